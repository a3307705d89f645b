#pragma once

#include <cstdint>
#include <string>
#include <functional>
#include <vector>

#include "percsolid/lattice.hpp"

namespace percsolid {

// Indexed view of one connected cluster. Local ids are dense integers in
// ascending window-index order (lexicographic in coordinates). Adjacency is
// CSR; mu[v] equals the adjacency-list length (open incident edges for the
// bond model, open neighbors for the site model).
struct ClusterGraph {
  Window window;
  std::vector<int64_t> site_of;     // local id -> window site index (ascending)
  std::vector<int32_t> local_of;    // window site index -> local id, -1 if absent
  std::vector<int64_t> adj_offset;  // CSR offsets, size n+1
  std::vector<int32_t> adj;         // CSR neighbor ids
  std::vector<uint8_t> mu;          // per-vertex degree

  int32_t vertex_count() const { return static_cast<int32_t>(site_of.size()); }
  Point point_of(int32_t v) const { return window.index_point(site_of[v]); }
  int32_t vertex_at(const Point& p) const {
    if (!window.contains(p)) return -1;
    return local_of[window.point_index(p)];
  }
  int64_t total_edge_weight() const;  // sum of mu

  // Builds the CSR structure for the given open-site set and an edge oracle.
  // sites must be sorted ascending; edge(a_idx, b_idx) says whether the edge
  // between adjacent window sites is open.
  static ClusterGraph build(const Window& w, const std::vector<int64_t>& sites,
                            const std::function<bool(int64_t, int64_t, int)>& edge_open);
};

// Vertices of g outside U0 adjacent in g to some vertex of U0.
std::vector<int32_t> boundary_relative(const std::vector<uint8_t>& u0_mask, const ClusterGraph& g);

// Shortest path length inside `allowed` (per-vertex mask), -1 if none.
int64_t graph_distance_within(const ClusterGraph& g, const std::vector<uint8_t>& allowed,
                              int32_t x, int32_t y);

// Connected components of the induced subgraph on region_mask.
std::vector<std::vector<int32_t>> component_within(const ClusterGraph& g,
                                                   const std::vector<uint8_t>& region_mask);

// Text edge list export: "# vertices: N" header then "u v" lines.
void export_edge_list(const ClusterGraph& g, const std::string& path);

// mask helpers
std::vector<uint8_t> mask_of(const ClusterGraph& g, const std::vector<int32_t>& ids);
std::vector<uint8_t> mask_ball(const ClusterGraph& g, const Point& center, int64_t r);

}  // namespace percsolid
