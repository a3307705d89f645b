#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "percsolid/cluster_graph.hpp"
#include "percsolid/density.hpp"
#include "percsolid/schedule.hpp"
#include "percsolid/stats.hpp"

namespace percsolid {

struct NamedSet {
  std::string name;
  std::vector<uint8_t> mask;  // per cluster vertex
};

// Stop evaluation order at each step: entrance stops, then exit stops, then
// radius stops, then window kill, then the step budget.
struct StopSpec {
  std::vector<NamedSet> targets;       // entrance: fires when X in set
  std::vector<NamedSet> exits;         // exit: fires when X leaves set
  std::vector<int64_t> radius_stops;   // tau_r: fires when |X-X0|_inf >= r
  int64_t step_budget = 1 << 20;
  bool window_kill = false;            // fires on the outermost window layer
};

struct WalkOutcome {
  std::string cause;  // stop name, "radius:<r>", "window", or "budget"
  Point position;
  int64_t jumps = 0;
  double elapsed = 0.0;   // holding-time sum (continuous-time runs)
  int64_t max_extent = 0; // sup over the path of |X_s - X_0|_inf
};

WalkOutcome run_jump_chain(const ClusterGraph& g, const Point& x0, const StopSpec& spec,
                           uint64_t seed, uint64_t replica_id);
WalkOutcome run_ct_walk(const ClusterGraph& g, const Point& x0, const StopSpec& spec,
                        uint64_t seed, uint64_t replica_id);

struct HitEstimate {
  WilsonInterval wilson;        // escape counted as guard (documented censoring)
  int64_t hits = 0;
  int64_t guard_fired = 0;
  int64_t window_escapes = 0;
  int64_t budget_exhausted = 0;
  int64_t replicas = 0;
};

// P_x[H_target < guard]; guard is either a radius or an exit set.
HitEstimate estimate_hit_before(const ClusterGraph& g, const Point& x0,
                                const std::vector<uint8_t>& target_mask, int64_t guard_radius,
                                const std::vector<uint8_t>* guard_exit_set, int64_t replicas,
                                uint64_t seed, int threads = 0, bool window_kill = true,
                                int64_t step_budget = int64_t(1) << 24);

// Environment for the multi-scale cascade: uniform nearest-neighbor moves
// plus local density evaluation.
class CascadeEnv {
 public:
  virtual ~CascadeEnv() = default;
  virtual int dim() const = 0;
  virtual int degree(const Point& p) const = 0;
  virtual Point neighbor(const Point& p, int k) const = 0;
  virtual SigmaValue sigma(const Point& p, int ell, bool tilde) const = 0;
  virtual bool in_graph(const Point& p) const = 0;
};

class ClusterCascadeEnv : public CascadeEnv {
 public:
  ClusterCascadeEnv(const ClusterGraph& g, const DensityGrid& grid) : g_(g), grid_(grid) {}
  int dim() const override { return g_.window.dim; }
  int degree(const Point& p) const override;
  Point neighbor(const Point& p, int k) const override;
  SigmaValue sigma(const Point& p, int ell, bool tilde) const override;
  bool in_graph(const Point& p) const override { return g_.vertex_at(p) >= 0; }

 private:
  const ClusterGraph& g_;
  const DensityGrid& grid_;
};

// Full lattice with U1 = {x : x_1 in M}, M a union of disjoint integer
// intervals. Densities have the exact product form cnt(M cap [a,b])/(b-a+1).
class LatticeProfileEnv : public CascadeEnv {
 public:
  // intervals as [lo, hi] pairs, hi = INT64_MAX for a half-line
  LatticeProfileEnv(int dim, std::vector<std::pair<int64_t, int64_t>> u1_intervals);
  int dim() const override { return dim_; }
  int degree(const Point&) const override { return 2 * dim_; }
  Point neighbor(const Point& p, int k) const override;
  SigmaValue sigma(const Point& p, int ell, bool tilde) const override;
  bool in_graph(const Point&) const override { return true; }
  int64_t profile_count(int64_t lo, int64_t hi) const;

 private:
  int dim_;
  std::vector<std::pair<int64_t, int64_t>> iv_;
};

struct CascadeRecord {
  bool gamma0_fired = false;   // sigma_{ell_0}(x0) in I_0
  int stages_completed = 0;    // number of gamma_{j+1} reached
  bool success = false;        // the full event C
  int64_t jumps = 0;
  Point final_position;
  std::vector<int64_t> stage_extent;     // sup_{gamma_j <= s <= gamma_J} |X_s - X_{gamma_j}|
  std::vector<double> sigma_tilde_final; // sigma~_{ell_j}(X_{gamma_J}), j = 0..J
  bool extent_ok = false;                // all stage extents <= (3/2) 2^{ell_j}
  bool sigma_tilde_ok = false;           // all final values in [alpha~, 1-alpha~]
  bool truncated_seen = false;           // any density query clipped at the window
};

// Scales ell_0 > ell_1 > ... > ell_J (gaps >= 2); intervals I_0..I_J.
CascadeRecord run_gamma_cascade(const CascadeEnv& env, const Point& x0,
                                const std::vector<int64_t>& ells,
                                const std::vector<Interval>& intervals, long double alpha_t,
                                int64_t step_budget, uint64_t seed, uint64_t replica_id);

}  // namespace percsolid
