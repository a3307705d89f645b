#include "percsolid/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace percsolid {

namespace {

void iterate_region(const Region& r, const std::function<void(const Point&)>& fn) {
  Point p = r.lo;
  if (r.volume() == 0) return;
  while (true) {
    fn(p);
    int k = r.dim() - 1;
    while (k >= 0) {
      if (p[k] < r.hi[k]) {
        ++p[k];
        break;
      }
      p[k] = r.lo[k];
      --k;
    }
    if (k < 0) break;
  }
}

}  // namespace

DensityGrid::DensityGrid(const ClusterGraph& g, const std::vector<uint8_t>& u1_mask,
                         const Region& extent)
    : window_(g.window), extent_(extent.clipped_to(g.window)) {
  if (u1_mask.size() != static_cast<size_t>(g.vertex_count())) {
    throw std::invalid_argument("density grid: u1 mask size mismatch");
  }
  if (extent_.volume() >= std::numeric_limits<int32_t>::max()) {
    throw std::invalid_argument("density grid: extent too large for 32-bit prefix sums");
  }
  // row-major source values over the extent
  const Region ext = extent_;
  const Window& w = window_;
  std::vector<int64_t> stride(w.dim);
  {
    int64_t s = 1;
    for (int k = w.dim - 1; k >= 0; --k) {
      stride[k] = s;
      s *= w.side;
    }
  }
  auto site_at = [&](int64_t flat) {
    // flat row-major index within extent -> window site index
    int64_t site = 0;
    for (int k = w.dim - 1; k >= 0; --k) {
      const int64_t e = ext.extent(k);
      const int64_t c = ext.lo[k] + flat % e;
      flat /= e;
      site += (c - w.origin[k]) * stride[k];
    }
    return site;
  };
  cluster_ps_ = PrefixSum<int32_t>(ext, [&](int64_t i) -> int32_t {
    return g.local_of[site_at(i)] >= 0 ? 1 : 0;
  });
  u1_ps_ = PrefixSum<int32_t>(ext, [&](int64_t i) -> int32_t {
    const int32_t v = g.local_of[site_at(i)];
    return (v >= 0 && u1_mask[v]) ? 1 : 0;
  });
}

SigmaValue DensityGrid::sigma_radius(const Point& x, int64_t r) const {
  const Region ball = Region::ball(x, r);
  const Region clipped = ball.clipped_to(window_);
  if (!clipped.inside(extent_)) {
    throw std::domain_error("density grid: query ball leaves the prefix-sum extent");
  }
  SigmaValue out;
  out.truncated = !ball.inside(Region::of_window(window_));
  const int64_t denom = cluster_ps_.box_sum(ball.lo, ball.hi);
  if (denom == 0) {
    out.value = 0.0;  // 0/0 convention
    return out;
  }
  out.value = double(u1_ps_.box_sum(ball.lo, ball.hi)) / double(denom);
  return out;
}

SigmaValue DensityGrid::sigma(const Point& x, int ell, bool tilde) const {
  const int64_t r = (tilde ? 4 : 1) * (int64_t(1) << ell);
  return sigma_radius(x, r);
}

SigmaValue DensityGrid::cluster_density(const Point& x, int64_t R) const {
  const Region ball = Region::ball(x, R);
  const Region clipped = ball.clipped_to(window_);
  if (!clipped.inside(extent_)) {
    throw std::domain_error("density grid: query ball leaves the prefix-sum extent");
  }
  SigmaValue out;
  out.truncated = !ball.inside(Region::of_window(window_));
  double vol = 1.0;
  for (int k = 0; k < window_.dim; ++k) vol *= double(2 * R + 1);
  out.value = double(cluster_ps_.box_sum(ball.lo, ball.hi)) / vol;
  return out;
}

int64_t DensityGrid::cluster_count(const Point& lo, const Point& hi) const {
  return cluster_ps_.box_sum(lo, hi);
}

int64_t DensityGrid::u1_count(const Point& lo, const Point& hi) const {
  return u1_ps_.box_sum(lo, hi);
}

DensityField compute_field(const ClusterGraph& g, const DensityGrid& grid, int ell, bool tilde,
                           const Region& region, const std::string& u1_id) {
  DensityField f;
  f.ell = ell;
  f.tilde = tilde;
  f.u1_id = u1_id;
  iterate_region(region.clipped_to(g.window), [&](const Point& p) {
    const int32_t v = g.vertex_at(p);
    if (v < 0) return;
    const SigmaValue s = grid.sigma(p, ell, tilde);
    f.vertices.push_back(v);
    f.values.push_back(s.value);
    f.truncated.push_back(s.truncated ? 1 : 0);
  });
  return f;
}

void export_field_csv(const DensityField& f, const ClusterGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_field_csv: cannot open " + path);
  out << "# variant=" << (f.tilde ? "sigma_tilde" : "sigma") << " ell=" << f.ell
      << " u1=" << f.u1_id << "\n";
  const int d = g.window.dim;
  for (int k = 0; k < d; ++k) out << char('x' + k) << (k < d - 1 ? ' ' : ' ');
  out << "value truncated\n";
  char buf[64];
  for (size_t i = 0; i < f.vertices.size(); ++i) {
    const Point p = g.point_of(f.vertices[i]);
    for (int k = 0; k < d; ++k) out << p[k] << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", f.values[i]);
    out << buf << ' ' << int(f.truncated[i]) << "\n";
  }
}

BallAverage ball_average(const ClusterGraph& g, const std::function<double(int32_t)>& f,
                         const Point& x, int ell) {
  BallAverage avg;
  const int64_t r = int64_t(1) << ell;
  const Region ball = Region::ball(x, r);
  avg.truncated = !ball.inside(Region::of_window(g.window));
  double sum = 0.0;
  int64_t count = 0;
  iterate_region(ball.clipped_to(g.window), [&](const Point& p) {
    const int32_t v = g.vertex_at(p);
    if (v < 0) return;
    sum += f(v);
    ++count;
  });
  if (count == 0) {
    avg.empty = true;
    avg.value = 0.0;
    return avg;
  }
  avg.value = sum / double(count);
  return avg;
}

EtaEstimate estimate_eta(const PercConfig& cfg, const ClusterLabeling& lab) {
  EtaEstimate e;
  const int32_t id = largest_cluster_id(lab, false, cfg);
  const double vol = double(cfg.window.volume());
  e.eta_hat = id >= 0 ? double(lab.size[id]) / vol : 0.0;
  e.ci_lo = e.ci_hi = e.eta_hat;
  e.supercritical_looking = e.eta_hat >= 0.01;
  return e;
}

EtaEstimate estimate_eta(std::span<const double> per_config_density) {
  EtaEstimate e;
  if (per_config_density.empty()) return e;
  double mean = 0.0;
  for (double v : per_config_density) mean += v;
  mean /= double(per_config_density.size());
  double var = 0.0;
  for (double v : per_config_density) var += (v - mean) * (v - mean);
  if (per_config_density.size() > 1) var /= double(per_config_density.size() - 1);
  const double half = 1.96 * std::sqrt(var / double(per_config_density.size()));
  e.eta_hat = mean;
  e.ci_lo = mean - half;
  e.ci_hi = mean + half;
  e.supercritical_looking = mean >= 0.01;
  return e;
}

std::optional<int64_t> estimate_R_den(const ClusterGraph& g, const DensityGrid& grid, double alpha,
                                      double eta_hat, const Region& probe_region, int64_t max_R) {
  if (max_R <= 0) max_R = g.window.side / 4;
  for (int64_t R = 1; R <= max_R; R *= 2) {
    ConcentrationStats worst;
    bool all_ok = true;
    for (int64_t Rp = R; Rp <= 4 * R && all_ok; Rp *= 2) {
      const auto st = volume_concentration_stats(g, grid, alpha, eta_hat, Rp, probe_region);
      if (st.violations > 0 || st.checked == 0) all_ok = false;
      worst = st;
    }
    if (all_ok) return R;
  }
  return std::nullopt;
}

ConcentrationStats volume_concentration_stats(const ClusterGraph& g, const DensityGrid& grid,
                                              double alpha, double eta_hat, int64_t R,
                                              const Region& probe_region, int64_t stride) {
  ConcentrationStats st;
  const double lo = (1.0 - alpha) * eta_hat;
  const double hi = (1.0 + alpha) * eta_hat;
  int64_t counter = 0;
  iterate_region(probe_region.clipped_to(g.window), [&](const Point& p) {
    if (g.vertex_at(p) < 0) return;
    if (stride > 1 && (counter++ % stride) != 0) return;
    const SigmaValue d = grid.cluster_density(p, R);
    if (d.truncated) {
      ++st.skipped_truncated;
      return;
    }
    ++st.checked;
    if (d.value < lo || d.value > hi) ++st.violations;
  });
  return st;
}

LemmaCheckReport lipschitz_check(const ClusterGraph& g, const DensityGrid& grid, int ell,
                                 const Region& probe_region, double eta_hat) {
  LemmaCheckReport rep;
  rep.bound = 6.0 * std::pow(2.0, -double(ell)) / eta_hat;
  const Region reg = probe_region.clipped_to(g.window);
  iterate_region(reg, [&](const Point& p) {
    const int32_t v = g.vertex_at(p);
    if (v < 0) return;
    const SigmaValue sv = grid.sigma(p, ell, false);
    if (sv.truncated) return;
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
      const int32_t u = g.adj[e];
      if (u < v) continue;  // each unordered pair once
      const Point q = g.point_of(u);
      if (!reg.contains(q)) continue;
      const SigmaValue su = grid.sigma(q, ell, false);
      if (su.truncated) continue;
      ++rep.checked;
      const double diff = std::fabs(sv.value - su.value);
      rep.worst_ratio = std::max(rep.worst_ratio, diff / rep.bound);
      if (diff > rep.bound + 1e-12) ++rep.violations;
    }
  });
  return rep;
}

LemmaCheckReport average_sandwich_check(const ClusterGraph& g, const DensityGrid& grid, int ell,
                                        int ell_prime, const Region& probe_region, double alpha,
                                        double eta_hat, int64_t max_probes) {
  if (ell <= ell_prime) throw std::invalid_argument("average_sandwich_check: need ell > ell'");
  LemmaCheckReport rep;
  const double c0 = 3.0 * g.window.dim * std::pow(2.0, g.window.dim - 1) / eta_hat;
  const double slack = c0 * std::pow(2.0, double(ell_prime - ell));
  rep.bound = slack;
  const double lo_factor = (1.0 - alpha) / (1.0 + alpha);
  const double hi_factor = (1.0 + alpha) / (1.0 - alpha);

  // sigma_{ell'} averaged over B(x, 2^ell) cap cluster, via double prefix sums
  const Region reg = probe_region.clipped_to(g.window);
  Region span = reg;
  const int64_t reach = (int64_t(1) << ell) + (int64_t(1) << ell_prime);
  for (int k = 0; k < g.window.dim; ++k) {
    span.lo[k] = static_cast<int32_t>(span.lo[k] - reach);
    span.hi[k] = static_cast<int32_t>(span.hi[k] + reach);
  }
  span = span.clipped_to(g.window);
  if (!span.inside(grid.extent())) {
    throw std::domain_error("average_sandwich_check: grid extent too small for the span");
  }

  const Window& w = g.window;
  std::vector<int64_t> stride(w.dim);
  {
    int64_t s = 1;
    for (int k = w.dim - 1; k >= 0; --k) {
      stride[k] = s;
      s *= w.side;
    }
  }
  auto site_at = [&](int64_t flat) {
    int64_t site = 0;
    for (int k = w.dim - 1; k >= 0; --k) {
      const int64_t e = span.extent(k);
      const int64_t c = span.lo[k] + flat % e;
      flat /= e;
      site += (c - w.origin[k]) * stride[k];
    }
    return site;
  };
  // value prefix: sigma_{ell'}(y) on cluster sites, 0 elsewhere
  PrefixSum<double> sig_ps(span, [&](int64_t i) -> double {
    const int64_t site = site_at(i);
    if (g.local_of[site] < 0) return 0.0;
    Point y = w.index_point(site);
    return grid.sigma(y, ell_prime, false).value;
  });

  const int64_t r = int64_t(1) << ell;
  int64_t probes = 0;
  iterate_region(reg, [&](const Point& p) {
    if (max_probes > 0 && probes >= max_probes) return;
    const int32_t v = g.vertex_at(p);
    if (v < 0) return;
    const Region ball = Region::ball(p, r);
    if (!ball.inside(Region::of_window(w))) return;
    // all sigma_{ell'} values inside the ball must themselves be untruncated
    const Region inner_span = Region::ball(p, r + (int64_t(1) << ell_prime));
    if (!inner_span.inside(Region::of_window(w))) return;
    ++probes;
    const int64_t denom = grid.cluster_count(ball.lo, ball.hi);
    if (denom == 0) return;
    const double avg = sig_ps.box_sum(ball.lo, ball.hi) / double(denom);
    const double sx = grid.sigma(p, ell, false).value;
    const double lo = lo_factor * sx - slack;
    const double hi = hi_factor * sx + slack;
    ++rep.checked;
    const double excess = std::max(lo - avg, avg - hi);
    rep.worst_ratio = std::max(rep.worst_ratio, excess / slack + 1.0);
    if (excess > 1e-12) ++rep.violations;
  });
  return rep;
}

}  // namespace percsolid
