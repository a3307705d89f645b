#include "percsolid/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "percsolid/parallel.hpp"
#include "percsolid/rng.hpp"

namespace percsolid {

namespace {

struct StepState {
  int32_t vertex;
  Point pos;
};

// Checks stops at the current position; returns true and fills outcome cause
// when one fires. Order: entrance, exit, radius, window.
bool check_stops(const ClusterGraph& g, const StopSpec& spec, const Point& x0, int32_t v,
                 const Point& pos, WalkOutcome& out) {
  for (const auto& s : spec.targets) {
    if (s.mask[v]) {
      out.cause = s.name;
      return true;
    }
  }
  for (const auto& s : spec.exits) {
    if (!s.mask[v]) {
      out.cause = "exit:" + s.name;
      return true;
    }
  }
  for (int64_t r : spec.radius_stops) {
    if (linf_dist(pos, x0) >= r) {
      out.cause = "radius:" + std::to_string(r);
      return true;
    }
  }
  if (spec.window_kill && g.window.face_distance(pos) == 0) {
    out.cause = "window";
    return true;
  }
  return false;
}

WalkOutcome run_walk(const ClusterGraph& g, const Point& x0, const StopSpec& spec, uint64_t seed,
                     uint64_t replica_id, bool continuous_time) {
  const int32_t v0 = g.vertex_at(x0);
  if (v0 < 0) throw std::domain_error("walk: start point not in the cluster graph");
  if (spec.step_budget < 1) throw std::invalid_argument("walk: step budget must be >= 1");
  if (spec.targets.empty() && spec.exits.empty() && spec.radius_stops.empty() &&
      !spec.window_kill) {
    throw std::invalid_argument("walk: at least one stopping condition required");
  }

  const CounterRng rng(seed, rng_stream::walk ^ (replica_id * 0x9e3779b97f4a7c15ULL));
  WalkOutcome out;
  int32_t v = v0;
  Point pos = x0;
  for (int64_t t = 0;; ++t) {
    out.max_extent = std::max(out.max_extent, linf_dist(pos, x0));
    if (check_stops(g, spec, x0, v, pos, out)) {
      out.position = pos;
      return out;
    }
    if (t >= spec.step_budget) {
      out.cause = "budget";
      out.position = pos;
      return out;
    }
    if (g.mu[v] == 0) {  // isolated vertex, walk cannot move
      out.cause = "budget";
      out.position = pos;
      return out;
    }
    if (continuous_time) out.elapsed += rng.exp1(2 * uint64_t(t) + 1);
    const uint32_t pick = rng.below(2 * uint64_t(t), g.mu[v]);
    v = g.adj[g.adj_offset[v] + pick];
    pos = g.point_of(v);
    ++out.jumps;
  }
}

}  // namespace

WalkOutcome run_jump_chain(const ClusterGraph& g, const Point& x0, const StopSpec& spec,
                           uint64_t seed, uint64_t replica_id) {
  return run_walk(g, x0, spec, seed, replica_id, false);
}

WalkOutcome run_ct_walk(const ClusterGraph& g, const Point& x0, const StopSpec& spec,
                        uint64_t seed, uint64_t replica_id) {
  return run_walk(g, x0, spec, seed, replica_id, true);
}

HitEstimate estimate_hit_before(const ClusterGraph& g, const Point& x0,
                                const std::vector<uint8_t>& target_mask, int64_t guard_radius,
                                const std::vector<uint8_t>* guard_exit_set, int64_t replicas,
                                uint64_t seed, int threads, bool window_kill, int64_t step_budget) {
  if (replicas < 1) throw std::invalid_argument("estimate_hit_before: replicas must be >= 1");
  StopSpec spec;
  spec.window_kill = window_kill;
  spec.step_budget = step_budget;
  spec.targets.push_back(NamedSet{"target", target_mask});
  if (guard_exit_set) spec.exits.push_back(NamedSet{"guard", *guard_exit_set});
  if (guard_radius >= 0) spec.radius_stops.push_back(guard_radius);

  const int64_t chunk = 256;
  const int64_t nchunks = num_chunks(replicas, chunk);
  struct Tally {
    int64_t hit = 0, guard = 0, window = 0, budget = 0;
  };
  std::vector<Tally> tallies(static_cast<size_t>(nchunks));
  parallel_chunks(replicas, chunk, threads, [&](int64_t ci, int64_t lo, int64_t hi) {
    Tally t;
    for (int64_t r = lo; r < hi; ++r) {
      const WalkOutcome o = run_jump_chain(g, x0, spec, seed, static_cast<uint64_t>(r));
      if (o.cause == "target") ++t.hit;
      else if (o.cause == "window") ++t.window;
      else if (o.cause == "budget") ++t.budget;
      else ++t.guard;
    }
    tallies[static_cast<size_t>(ci)] = t;
  });

  HitEstimate est;
  est.replicas = replicas;
  for (const auto& t : tallies) {
    est.hits += t.hit;
    est.guard_fired += t.guard;
    est.window_escapes += t.window;
    est.budget_exhausted += t.budget;
  }
  est.wilson = wilson_interval(est.hits, replicas, 1.959963984540054);
  return est;
}

int ClusterCascadeEnv::degree(const Point& p) const {
  const int32_t v = g_.vertex_at(p);
  return v >= 0 ? g_.mu[v] : 0;
}

Point ClusterCascadeEnv::neighbor(const Point& p, int k) const {
  const int32_t v = g_.vertex_at(p);
  return g_.point_of(g_.adj[g_.adj_offset[v] + k]);
}

SigmaValue ClusterCascadeEnv::sigma(const Point& p, int ell, bool tilde) const {
  return grid_.sigma(p, ell, tilde);
}

LatticeProfileEnv::LatticeProfileEnv(int dim, std::vector<std::pair<int64_t, int64_t>> u1_intervals)
    : dim_(dim), iv_(std::move(u1_intervals)) {
  if (dim < 2) throw std::invalid_argument("lattice env: dim must be >= 2");
  std::sort(iv_.begin(), iv_.end());
}

Point LatticeProfileEnv::neighbor(const Point& p, int k) const {
  Point q = p;
  const int axis = k / 2;
  q[axis] = static_cast<int32_t>(q[axis] + (k % 2 == 0 ? 1 : -1));
  return q;
}

int64_t LatticeProfileEnv::profile_count(int64_t lo, int64_t hi) const {
  int64_t total = 0;
  for (const auto& [a, b] : iv_) {
    const int64_t l = std::max(lo, a);
    const int64_t h = std::min(hi, b);
    if (h >= l) total += h - l + 1;
  }
  return total;
}

SigmaValue LatticeProfileEnv::sigma(const Point& p, int ell, bool tilde) const {
  const int64_t r = (tilde ? 4 : 1) * (int64_t(1) << ell);
  SigmaValue out;
  out.value = double(profile_count(p[0] - r, p[0] + r)) / double(2 * r + 1);
  return out;
}

CascadeRecord run_gamma_cascade(const CascadeEnv& env, const Point& x0,
                                const std::vector<int64_t>& ells,
                                const std::vector<Interval>& intervals, long double alpha_t,
                                int64_t step_budget, uint64_t seed, uint64_t replica_id) {
  const int J = static_cast<int>(ells.size()) - 1;
  if (J < 0 || intervals.size() != ells.size()) {
    throw std::invalid_argument("cascade: need scales ell_0..ell_J with matching intervals");
  }
  for (int j = 0; j + 1 <= J; ++j) {
    if (ells[j] < ells[j + 1] + 2) {
      throw std::invalid_argument("cascade: scale gaps must be >= 2 for the extent bound");
    }
  }
  if (!env.in_graph(x0)) throw std::domain_error("cascade: start point not in the graph");

  CascadeRecord rec;
  rec.final_position = x0;

  auto in_interval = [&](const SigmaValue& s, int j) {
    return s.value >= double(intervals[j].lo) && s.value <= double(intervals[j].hi);
  };

  {
    const SigmaValue s0 = env.sigma(x0, static_cast<int>(ells[0]), false);
    rec.truncated_seen = rec.truncated_seen || s0.truncated;
    rec.gamma0_fired = in_interval(s0, 0);
  }
  if (!rec.gamma0_fired) return rec;

  const CounterRng rng(seed, rng_stream::walk ^ (replica_id * 0xbf58476d1ce4e5b9ULL));
  std::vector<Point> anchors;  // X_{gamma_0}, ..., X_{gamma_j}
  anchors.push_back(x0);
  std::vector<int64_t> extent(static_cast<size_t>(J) + 1, 0);

  Point pos = x0;
  uint64_t t = 0;
  bool failed = false;
  for (int j = 0; j < J && !failed; ++j) {
    const int64_t radius = int64_t(1) << ells[j];
    while (true) {
      // entrance check first: did we reach {sigma_{ell_{j+1}} in I_{j+1}}?
      const SigmaValue s = env.sigma(pos, static_cast<int>(ells[j + 1]), false);
      rec.truncated_seen = rec.truncated_seen || s.truncated;
      if (in_interval(s, j + 1)) {
        anchors.push_back(pos);
        ++rec.stages_completed;
        break;
      }
      if (linf_dist(pos, anchors[j]) >= radius) {  // tau_{2^{ell_j}} fired
        failed = true;
        break;
      }
      if (static_cast<int64_t>(t) >= step_budget) {
        failed = true;
        break;
      }
      const int deg = env.degree(pos);
      if (deg == 0) {
        failed = true;
        break;
      }
      pos = env.neighbor(pos, static_cast<int>(rng.below(t, static_cast<uint32_t>(deg))));
      ++t;
      ++rec.jumps;
      for (size_t a = 0; a < anchors.size(); ++a) {
        extent[a] = std::max(extent[a], linf_dist(pos, anchors[a]));
      }
    }
  }

  rec.final_position = pos;
  if (failed) return rec;
  rec.success = true;

  rec.stage_extent.assign(static_cast<size_t>(J) + 1, 0);
  for (int j = 0; j <= J; ++j) rec.stage_extent[j] = std::max(extent[j], linf_dist(pos, anchors[j]));
  rec.extent_ok = true;
  for (int j = 0; j <= J; ++j) {
    if (2 * rec.stage_extent[j] > 3 * (int64_t(1) << ells[j])) rec.extent_ok = false;
  }

  rec.sigma_tilde_final.resize(static_cast<size_t>(J) + 1);
  rec.sigma_tilde_ok = true;
  for (int j = 0; j <= J; ++j) {
    const SigmaValue s = env.sigma(pos, static_cast<int>(ells[j]), true);
    rec.truncated_seen = rec.truncated_seen || s.truncated;
    rec.sigma_tilde_final[j] = s.value;
    if (s.value < double(alpha_t) - 1e-15 || s.value > 1.0 - double(alpha_t) + 1e-15) {
      rec.sigma_tilde_ok = false;
    }
  }
  return rec;
}

}  // namespace percsolid
