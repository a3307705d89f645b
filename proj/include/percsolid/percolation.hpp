#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percsolid/cluster_graph.hpp"
#include "percsolid/lattice.hpp"

namespace percsolid {

enum class PercModel : uint8_t { site = 0, bond = 1 };

// One finite-box percolation sample. Occupancy is one bit per site for the
// site model; for the bond model it is d planes of per-site bits, plane k
// holding the edge from a site to its +e_k neighbor (0 when that neighbor
// would leave the window).
struct PercConfig {
  Window window;
  PercModel model = PercModel::site;
  double p = 0.0;
  uint64_t seed = 0;
  std::vector<uint64_t> bits;

  int64_t bit_count() const;
  bool bit(int64_t i) const { return (bits[i >> 6] >> (i & 63)) & 1; }

  bool site_open(int64_t site) const;         // bond model: >= 1 open incident edge
  bool edge_open(int64_t site, int axis) const;  // edge {site, site + e_axis}
  int64_t open_site_count() const;
};

PercConfig generate(PercModel model, int dim, int64_t side, double p, uint64_t seed);

// Binary config file, magic "PERC1".
void save_config(const PercConfig& cfg, const std::string& path);
PercConfig load_config(const std::string& path);

struct ClusterLabeling {
  std::vector<int32_t> label;       // per window site, -1 = no cluster
  std::vector<int64_t> size;        // per cluster id
  std::vector<int64_t> l1_diameter; // per cluster id, exact
  std::vector<int64_t> min_site;    // per cluster id, smallest member site index

  int32_t count() const { return static_cast<int32_t>(size.size()); }
};

// Connected components of the open graph; ids in order of each component's
// lexicographically smallest member.
ClusterLabeling label_clusters(const PercConfig& cfg);

// Open sites whose component has l1-diameter >= r.
std::vector<int64_t> s_r_vertices(const PercConfig& cfg, const ClusterLabeling& lab, double r);

// Largest component (ties by smallest minimum site index) as a ClusterGraph.
// spanning=true restricts to components touching two opposite window faces.
ClusterGraph largest_cluster(const PercConfig& cfg, const ClusterLabeling& lab,
                             bool spanning = false);
int32_t largest_cluster_id(const ClusterLabeling& lab, bool spanning, const PercConfig& cfg);

struct LocalUniquenessResult {
  double freq_nonempty = 0.0;   // S_R cap B(z,R) nonempty
  double freq_connected = 0.0;  // all pairs of S_{R/10} cap B(z,R) joined in S cap B(z,2R)
  int samples = 0;
  double value() const { return freq_nonempty < freq_connected ? freq_nonempty : freq_connected; }
};

LocalUniquenessResult local_uniqueness_stat(const PercConfig& cfg, const ClusterLabeling& lab,
                                            int64_t R, int sample_count, uint64_t seed);

// Appendix-style seed events on the cube x + [0, L0)^d. seed_event_D is TRUE
// iff the bad connectivity/volume pattern occurs; seed_event_I is TRUE iff
// the cube is over-dense.
bool seed_event_D(const PercConfig& cfg, const ClusterLabeling& lab, const Point& x, int64_t L0,
                  double eta1);
bool seed_event_I(const PercConfig& cfg, const ClusterLabeling& lab, const Point& x, int64_t L0,
                  double eta2);

struct ProductConditionResult {
  bool ok = false;
  double product_lower = 0.0;  // certified lower bound including tail
  double threshold = 0.0;      // max of the three right-hand terms
  std::string detail;
};

// Evaluates prod_i [1 - (4 r_i / ell_i)^d] with a certified geometric tail
// bound and compares against
//   max{ (1+eta2)/(1+2 eta1), sqrt(1-alpha/2), 1-(alpha/4) eta },
// where eta1 = sqrt(1-alpha/2) eta and eta2 = (1+alpha/4) eta.
ProductConditionResult product_condition_check(std::span<const double> r_seq,
                                               std::span<const double> ell_seq, int dim,
                                               double alpha, double eta);

}  // namespace percsolid
