#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "percsolid/cluster_graph.hpp"
#include "percsolid/lattice.hpp"
#include "percsolid/percolation.hpp"
#include "percsolid/prefix_sum.hpp"

namespace percsolid {

struct SigmaValue {
  double value = 0.0;
  bool truncated = false;  // ball clipped at the window edge
};

// Prefix-summed cluster and U1 occupancy over an extent region, answering
// sigma / sigma-tilde queries in O(2^d). The extent must contain every ball
// the caller intends to query, clipped to the window.
class DensityGrid {
 public:
  DensityGrid(const ClusterGraph& g, const std::vector<uint8_t>& u1_mask, const Region& extent);

  // radius 2^ell, or 4*2^ell for the tilde variant; x need not be in the cluster
  SigmaValue sigma(const Point& x, int ell, bool tilde) const;
  SigmaValue sigma_radius(const Point& x, int64_t r) const;

  // |B(x,R) cap cluster| / |B(x,R)| on the unclipped ball volume
  SigmaValue cluster_density(const Point& x, int64_t R) const;

  int64_t cluster_count(const Point& lo, const Point& hi) const;
  int64_t u1_count(const Point& lo, const Point& hi) const;

  const Region& extent() const { return extent_; }
  const Window& window() const { return window_; }

 private:
  Window window_;
  Region extent_;
  PrefixSum<int32_t> cluster_ps_, u1_ps_;
};

// Materialized density values over the cluster vertices of a region.
struct DensityField {
  int ell = 0;
  bool tilde = false;
  std::string u1_id;
  std::vector<int32_t> vertices;   // cluster local ids
  std::vector<double> values;
  std::vector<uint8_t> truncated;
};

DensityField compute_field(const ClusterGraph& g, const DensityGrid& grid, int ell, bool tilde,
                           const Region& region, const std::string& u1_id);
void export_field_csv(const DensityField& f, const ClusterGraph& g, const std::string& path);

// Mean of f over B(x, 2^ell) cap cluster; empty intersection yields 0 with a flag.
struct BallAverage {
  double value = 0.0;
  bool empty = false;
  bool truncated = false;
};
BallAverage ball_average(const ClusterGraph& g, const std::function<double(int32_t)>& f,
                         const Point& x, int ell);

struct EtaEstimate {
  double eta_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool supercritical_looking = true;
};

EtaEstimate estimate_eta(const PercConfig& cfg, const ClusterLabeling& lab);
EtaEstimate estimate_eta(std::span<const double> per_config_density);

// Smallest dyadic R such that all boxes B(x,R'), R' in {R,2R,4R}, centered at
// cluster sites of the probe region (untruncated only) have relative cluster
// volume within [(1-alpha) eta, (1+alpha) eta].
std::optional<int64_t> estimate_R_den(const ClusterGraph& g, const DensityGrid& grid, double alpha,
                                      double eta_hat, const Region& probe_region,
                                      int64_t max_R = 0);

struct ConcentrationStats {
  int64_t checked = 0;
  int64_t skipped_truncated = 0;
  int64_t violations = 0;
  double fraction() const { return checked > 0 ? double(violations) / double(checked) : 0.0; }
};

ConcentrationStats volume_concentration_stats(const ClusterGraph& g, const DensityGrid& grid,
                                              double alpha, double eta_hat, int64_t R,
                                              const Region& probe_region, int64_t stride = 1);

struct LemmaCheckReport {
  int64_t checked = 0;
  int64_t violations = 0;
  double worst_ratio = 0.0;  // observed / bound, max
  double bound = 0.0;
};

// |sigma_ell(x) - sigma_ell(y)| <= 6*2^{-ell}/eta for adjacent cluster pairs.
LemmaCheckReport lipschitz_check(const ClusterGraph& g, const DensityGrid& grid, int ell,
                                 const Region& probe_region, double eta_hat);

// (sigma_{ell'})_{x,ell} within the two-sided sandwich around sigma_ell(x).
LemmaCheckReport average_sandwich_check(const ClusterGraph& g, const DensityGrid& grid, int ell,
                                        int ell_prime, const Region& probe_region, double alpha,
                                        double eta_hat, int64_t max_probes = 0);

}  // namespace percsolid
