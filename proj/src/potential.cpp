#include "percsolid/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "percsolid/parallel.hpp"

namespace percsolid {

namespace {

// Conjugate gradient on the graph Laplacian restricted to `rows`:
//   (D - A)|_rows x = rhs,  x = 0 outside rows.
// Jacobi-preconditioned; deterministic regardless of thread count (fixed
// chunked reductions). Returns the solution over all vertices (0 off rows).
std::vector<double> cg_laplacian(const ClusterGraph& g, const std::vector<uint8_t>& rows,
                                 const std::vector<double>& rhs_full, double rtol,
                                 SolveStats* stats) {
  const int32_t n = g.vertex_count();
  std::vector<int32_t> idx;  // row vertices
  idx.reserve(n);
  for (int32_t v = 0; v < n; ++v) {
    if (rows[v]) idx.push_back(v);
  }
  const int64_t m = static_cast<int64_t>(idx.size());
  if (m == 0) return std::vector<double>(n, 0.0);

  std::vector<int32_t> row_of(n, -1);
  for (int64_t i = 0; i < m; ++i) row_of[idx[i]] = static_cast<int32_t>(i);

  std::vector<double> b(m), x(m, 0.0), r(m), z(m), p(m), ap(m), dinv(m);
  for (int64_t i = 0; i < m; ++i) {
    const int32_t v = idx[i];
    b[i] = rhs_full[v];
    dinv[i] = g.mu[v] > 0 ? 1.0 / double(g.mu[v]) : 1.0;
  }

  const int64_t chunk = 1 << 14;
  const int64_t nchunks = num_chunks(m, chunk);
  std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);

  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    parallel_chunks(m, chunk, 0, [&](int64_t, int64_t lo, int64_t hi) {
      for (int64_t i = lo; i < hi; ++i) {
        const int32_t v = idx[i];
        double acc = double(g.mu[v]) * in[i];
        for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
          const int32_t u = g.adj[e];
          const int32_t j = row_of[u];
          if (j >= 0) acc -= in[j];
        }
        out[i] = acc;
      }
    });
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
    parallel_chunks(m, chunk, 0, [&](int64_t ci, int64_t lo, int64_t hi) {
      double s = 0.0;
      for (int64_t i = lo; i < hi; ++i) s += a[i] * c[i];
      partial[ci] = s;
    });
    double s = 0.0;
    for (int64_t ci = 0; ci < nchunks; ++ci) s += partial[ci];
    return s;
  };

  // r = b; z = Minv r; p = z
  double bnorm = 0.0;
  for (int64_t i = 0; i < m; ++i) {
    r[i] = b[i];
    z[i] = dinv[i] * r[i];
    p[i] = z[i];
    bnorm = std::max(bnorm, std::fabs(b[i]));
  }
  if (bnorm == 0.0) {
    if (stats) *stats = SolveStats{0, 0.0};
    std::vector<double> full(n, 0.0);
    return full;
  }
  double rz = dot(r, z);
  const int max_iter = static_cast<int>(std::min<int64_t>(4 * m + 100, 2000000));
  int it = 0;
  for (; it < max_iter; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0) break;
    const double alpha = rz / pap;
    double rmax = 0.0;
    for (int64_t i = 0; i < m; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rmax = std::max(rmax, std::fabs(r[i]));
    }
    if (rmax <= rtol * bnorm) break;
    for (int64_t i = 0; i < m; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int64_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
  }

  // certified residual
  apply(x, ap);
  double res = 0.0;
  for (int64_t i = 0; i < m; ++i) res = std::max(res, std::fabs(ap[i] - b[i]));
  if (stats) *stats = SolveStats{it, res};

  std::vector<double> full(n, 0.0);
  for (int64_t i = 0; i < m; ++i) full[idx[i]] = x[i];
  return full;
}

}  // namespace

int64_t DirichletSystem::interior_count() const {
  int64_t n = 0;
  for (uint8_t k : killed) n += k ? 0 : 1;
  return n;
}

DirichletSystem window_killed_system(const ClusterGraph& g) {
  DirichletSystem sys;
  sys.g = &g;
  sys.killed.assign(g.vertex_count(), 0);
  for (int32_t v = 0; v < g.vertex_count(); ++v) {
    if (g.window.face_distance(g.point_of(v)) == 0) sys.killed[v] = 1;
  }
  return sys;
}

DirichletSystem no_kill_system(const ClusterGraph& g) {
  DirichletSystem sys;
  sys.g = &g;
  sys.killed.assign(g.vertex_count(), 0);
  return sys;
}

std::vector<double> hit_prob_exact(const DirichletSystem& sys, const std::vector<uint8_t>& target,
                                   SolveStats* stats) {
  const ClusterGraph& g = *sys.g;
  const int32_t n = g.vertex_count();
  bool has_target = false;
  for (int32_t v = 0; v < n; ++v) {
    if (target[v] && sys.killed[v]) {
      throw std::domain_error("hit_prob_exact: target must avoid the killed set");
    }
    has_target = has_target || target[v];
  }
  bool has_killed = false;
  for (uint8_t k : sys.killed) has_killed = has_killed || k;
  if (!has_target && !has_killed) {
    throw std::runtime_error("hit_prob_exact: no absorbing set, system singular");
  }

  std::vector<uint8_t> rows(n, 0);
  std::vector<double> rhs(n, 0.0);
  for (int32_t v = 0; v < n; ++v) {
    rows[v] = (!target[v] && !sys.killed[v]) ? 1 : 0;
    if (g.mu[v] == 0 && rows[v]) {
      throw std::runtime_error("hit_prob_exact: isolated interior vertex, system singular");
    }
  }
  for (int32_t v = 0; v < n; ++v) {
    if (!rows[v]) continue;
    double acc = 0.0;
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
      if (target[g.adj[e]]) acc += 1.0;
    }
    rhs[v] = acc;
  }
  auto h = cg_laplacian(g, rows, rhs, 1e-13, stats);
  for (int32_t v = 0; v < n; ++v) {
    if (target[v]) h[v] = 1.0;
    if (sys.killed[v]) h[v] = 0.0;
  }
  return h;
}

std::vector<double> green_column(const DirichletSystem& sys, int32_t y, SolveStats* stats) {
  const ClusterGraph& g = *sys.g;
  bool has_killed = false;
  for (uint8_t k : sys.killed) has_killed = has_killed || k;
  if (!has_killed) throw std::domain_error("green_column: killed set empty, no finite Green function");
  if (sys.killed[y]) throw std::domain_error("green_column: y must not be killed");
  const int32_t n = g.vertex_count();
  std::vector<uint8_t> rows(n, 0);
  for (int32_t v = 0; v < n; ++v) rows[v] = sys.killed[v] ? 0 : 1;
  std::vector<double> rhs(n, 0.0);
  rhs[y] = 1.0;  // (D - A) g(., y) = e_y  gives g(x,y) = N(x,y)/mu_y
  return cg_laplacian(g, rows, rhs, 1e-13, stats);
}

std::vector<std::vector<double>> green_dense(const DirichletSystem& sys, int64_t dense_cap) {
  const ClusterGraph& g = *sys.g;
  const int32_t n = g.vertex_count();
  std::vector<int32_t> idx;
  for (int32_t v = 0; v < n; ++v) {
    if (!sys.killed[v]) idx.push_back(v);
  }
  const int64_t m = static_cast<int64_t>(idx.size());
  if (m == 0) return {};
  if (m > dense_cap) {
    throw std::runtime_error("green_dense: interior exceeds the dense-solve cap; use green_column");
  }
  std::vector<int32_t> row_of(n, -1);
  for (int64_t i = 0; i < m; ++i) row_of[idx[i]] = static_cast<int32_t>(i);

  // dense SPD matrix D - A
  std::vector<double> M(static_cast<size_t>(m) * m, 0.0);
  for (int64_t i = 0; i < m; ++i) {
    const int32_t v = idx[i];
    M[i * m + i] = double(g.mu[v]);
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
      const int32_t j = row_of[g.adj[e]];
      if (j >= 0) M[i * m + j] -= 1.0;
    }
  }
  // Cholesky M = L L^T
  for (int64_t k = 0; k < m; ++k) {
    double d = M[k * m + k];
    for (int64_t s = 0; s < k; ++s) d -= M[k * m + s] * M[k * m + s];
    if (d <= 0) throw std::runtime_error("green_dense: matrix not positive definite");
    const double lkk = std::sqrt(d);
    M[k * m + k] = lkk;
    for (int64_t i = k + 1; i < m; ++i) {
      double acc = M[i * m + k];
      for (int64_t s = 0; s < k; ++s) acc -= M[i * m + s] * M[k * m + s];
      M[i * m + k] = acc / lkk;
    }
  }
  auto solve = [&](std::vector<double>& b) {
    for (int64_t i = 0; i < m; ++i) {
      double acc = b[i];
      for (int64_t s = 0; s < i; ++s) acc -= M[i * m + s] * b[s];
      b[i] = acc / M[i * m + i];
    }
    for (int64_t i = m - 1; i >= 0; --i) {
      double acc = b[i];
      for (int64_t s = i + 1; s < m; ++s) acc -= M[s * m + i] * b[s];
      b[i] = acc / M[i * m + i];
    }
  };

  std::vector<std::vector<double>> green(static_cast<size_t>(n),
                                         std::vector<double>(static_cast<size_t>(n), 0.0));
  std::vector<double> col(m);
  for (int64_t j = 0; j < m; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    solve(col);
    for (int64_t i = 0; i < m; ++i) green[idx[i]][idx[j]] = col[i];
  }
  return green;
}

EquilibriumResult equilibrium_and_capacity(const DirichletSystem& sys,
                                           const std::vector<uint8_t>& a_mask) {
  const ClusterGraph& g = *sys.g;
  const int32_t n = g.vertex_count();
  bool nonempty = false;
  for (int32_t v = 0; v < n; ++v) {
    if (a_mask[v]) {
      nonempty = true;
      if (sys.killed[v]) throw std::domain_error("equilibrium_and_capacity: A touches the killed set");
    }
  }
  if (!nonempty) throw std::domain_error("equilibrium_and_capacity: A empty");

  EquilibriumResult res;
  res.hit_prob = hit_prob_exact(sys, a_mask);
  for (int32_t v = 0; v < n; ++v) {
    if (!a_mask[v]) continue;
    double ret = 0.0;  // sum over neighbors of P_y[H_A < kill]
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) ret += res.hit_prob[g.adj[e]];
    const double e_val = double(g.mu[v]) - ret;  // mu_x P_x[Htilde_A >= kill]
    res.support.push_back(v);
    res.e_A.push_back(e_val);
    res.capacity += e_val;
  }
  return res;
}

double last_exit_residual(const DirichletSystem& sys, const EquilibriumResult& eq,
                          const std::vector<int32_t>& probes) {
  double worst = 0.0;
  for (int32_t x : probes) {
    if (sys.killed[x]) continue;
    const auto gcol = green_column(sys, x);  // g(x, .) row by symmetry
    double acc = 0.0;
    for (size_t i = 0; i < eq.support.size(); ++i) acc += gcol[eq.support[i]] * eq.e_A[i];
    worst = std::max(worst, std::fabs(acc - eq.hit_prob[x]));
  }
  return worst;
}

namespace {

// Poisson truncation index: smallest K with P[Pois(t) > K] <= tol.
int poisson_truncation(double t, double tol) {
  if (t <= 0) return 0;
  // iterate pmf from k=0; sum until 1 - cdf <= tol
  double logp = -t;  // log pmf at k=0
  double cdf = std::exp(logp);
  int k = 0;
  const int hard_cap = static_cast<int>(t + 60.0 * std::sqrt(t + 2.0) + 200.0);
  while (1.0 - cdf > tol && k < hard_cap) {
    ++k;
    logp += std::log(t) - std::log(double(k));
    cdf += std::exp(logp);
  }
  return k;
}

std::vector<double> uniformized_kernel(const ClusterGraph& g, const std::vector<uint8_t>* u_mask,
                                       double t, int32_t x, double tol) {
  const int32_t n = g.vertex_count();
  if (u_mask && !(*u_mask)[x]) throw std::domain_error("killed_heat_kernel: x outside U");
  std::vector<double> v(n, 0.0), next(n, 0.0), acc(n, 0.0);
  v[x] = 1.0;
  const int K = poisson_truncation(t, tol);
  double logp = -t;
  // k = 0 term
  for (int32_t i = 0; i < n; ++i) acc[i] += std::exp(logp) * v[i];
  for (int k = 1; k <= K; ++k) {
    // one step of the jump chain, killed outside U if requested
    std::fill(next.begin(), next.end(), 0.0);
    for (int32_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      const double share = v[i] / double(g.mu[i]);
      for (int64_t e = g.adj_offset[i]; e < g.adj_offset[i + 1]; ++e) {
        const int32_t j = g.adj[e];
        if (u_mask && !(*u_mask)[j]) continue;
        next[j] += share;
      }
    }
    v.swap(next);
    logp += std::log(t) - std::log(double(k));
    const double w = std::exp(logp);
    for (int32_t i = 0; i < n; ++i) acc[i] += w * v[i];
  }
  // q_t(x,y) = P_x[X_t = y] / mu_y
  for (int32_t i = 0; i < n; ++i) {
    acc[i] = g.mu[i] > 0 ? acc[i] / double(g.mu[i]) : acc[i];
  }
  return acc;
}

}  // namespace

std::vector<double> heat_kernel(const ClusterGraph& g, double t, int32_t x, double tol) {
  if (t < 0) throw std::invalid_argument("heat_kernel: t must be >= 0");
  for (int32_t v = 0; v < g.vertex_count(); ++v) {
    if (g.mu[v] == 0) throw std::runtime_error("heat_kernel: isolated vertex in cluster graph");
  }
  return uniformized_kernel(g, nullptr, t, x, tol);
}

std::vector<double> killed_heat_kernel(const ClusterGraph& g, const std::vector<uint8_t>& u_mask,
                                       double t, int32_t x, double tol) {
  if (t < 0) throw std::invalid_argument("killed_heat_kernel: t must be >= 0");
  return uniformized_kernel(g, &u_mask, t, x, tol);
}

EnvelopeFit gaussian_envelope_fit(const std::vector<KernelSample>& samples, int dim) {
  if (samples.size() < 8) throw std::domain_error("gaussian_envelope_fit: too few samples");
  EnvelopeFit fit;
  fit.points = static_cast<int>(samples.size());

  // z = log q + (d/2) log t against u = l1^2 / t; envelopes from binned hulls
  std::vector<double> u(samples.size()), z(samples.size());
  double umin = std::numeric_limits<double>::max(), umax = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].q <= 0) throw std::domain_error("gaussian_envelope_fit: non-positive kernel value");
    u[i] = samples[i].l1 * samples[i].l1 / samples[i].t;
    z[i] = std::log(samples[i].q) + 0.5 * dim * std::log(samples[i].t);
    umin = std::min(umin, u[i]);
    umax = std::max(umax, u[i]);
  }
  if (umax <= umin) throw std::domain_error("gaussian_envelope_fit: degenerate u range");

  const int nbins = 8;
  std::vector<double> hi_z(nbins, -std::numeric_limits<double>::max());
  std::vector<double> lo_z(nbins, std::numeric_limits<double>::max());
  std::vector<double> bin_u(nbins, 0.0);
  std::vector<int> bin_n(nbins, 0);
  for (size_t i = 0; i < samples.size(); ++i) {
    int b = static_cast<int>((u[i] - umin) / (umax - umin) * nbins);
    b = std::clamp(b, 0, nbins - 1);
    hi_z[b] = std::max(hi_z[b], z[i]);
    lo_z[b] = std::min(lo_z[b], z[i]);
    bin_u[b] += u[i];
    ++bin_n[b];
  }
  // least squares on the occupied bin hulls
  auto line_fit = [&](const std::vector<double>& zs, double& slope, double& intercept) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int b = 0; b < nbins; ++b) {
      if (bin_n[b] == 0) continue;
      const double ub = bin_u[b] / bin_n[b];
      sx += ub;
      sy += zs[b];
      sxx += ub * ub;
      sxy += ub * zs[b];
      ++n;
    }
    if (n < 2) throw std::domain_error("gaussian_envelope_fit: too few occupied bins");
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    intercept = (sy - slope * sx) / n;
  };
  double s_hi, a_hi, s_lo, a_lo;
  line_fit(hi_z, s_hi, a_hi);
  line_fit(lo_z, s_lo, a_lo);
  fit.c_upper = -s_hi;
  fit.c_lower = -s_lo;

  // shift intercepts so the envelopes enclose every sample
  double up_shift = -std::numeric_limits<double>::max();
  double dn_shift = std::numeric_limits<double>::max();
  for (size_t i = 0; i < samples.size(); ++i) {
    up_shift = std::max(up_shift, z[i] - (a_hi - fit.c_upper * u[i]));
    dn_shift = std::min(dn_shift, z[i] - (a_lo - fit.c_lower * u[i]));
  }
  fit.a_upper = a_hi + up_shift;
  fit.a_lower = a_lo + dn_shift;

  for (size_t i = 0; i < samples.size(); ++i) {
    const double top = fit.a_upper - fit.c_upper * u[i];
    const double bot = fit.a_lower - fit.c_lower * u[i];
    if (z[i] > top + 1e-12 || z[i] < bot - 1e-12) ++fit.violations;
  }
  return fit;
}

}  // namespace percsolid
