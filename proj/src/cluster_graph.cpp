#include "percsolid/cluster_graph.hpp"

#include <deque>
#include <fstream>
#include <stdexcept>

namespace percsolid {

int64_t ClusterGraph::total_edge_weight() const {
  int64_t s = 0;
  for (uint8_t m : mu) s += m;
  return s;
}

ClusterGraph ClusterGraph::build(const Window& w, const std::vector<int64_t>& sites,
                                 const std::function<bool(int64_t, int64_t, int)>& edge_open) {
  ClusterGraph g;
  g.window = w;
  g.site_of = sites;
  g.local_of.assign(static_cast<size_t>(w.volume()), -1);
  for (size_t v = 0; v < sites.size(); ++v) g.local_of[sites[v]] = static_cast<int32_t>(v);

  const int d = w.dim;
  std::vector<int64_t> stride(d);
  {
    int64_t s = 1;
    for (int k = d - 1; k >= 0; --k) {
      stride[k] = s;
      s *= w.side;
    }
  }

  const int32_t n = static_cast<int32_t>(sites.size());
  g.adj_offset.assign(static_cast<size_t>(n) + 1, 0);
  g.mu.assign(static_cast<size_t>(n), 0);

  auto for_each_neighbor = [&](int32_t v, auto&& fn) {
    const int64_t idx = g.site_of[v];
    Point p = w.index_point(idx);
    for (int k = 0; k < d; ++k) {
      if (p[k] > w.origin[k]) {
        const int64_t nb = idx - stride[k];
        if (g.local_of[nb] >= 0 && edge_open(nb, idx, k)) fn(g.local_of[nb]);
      }
      if (p[k] < w.origin[k] + w.side - 1) {
        const int64_t nb = idx + stride[k];
        if (g.local_of[nb] >= 0 && edge_open(idx, nb, k)) fn(g.local_of[nb]);
      }
    }
  };

  for (int32_t v = 0; v < n; ++v) {
    int deg = 0;
    for_each_neighbor(v, [&](int32_t) { ++deg; });
    g.adj_offset[v + 1] = g.adj_offset[v] + deg;
    g.mu[v] = static_cast<uint8_t>(deg);
  }
  g.adj.resize(static_cast<size_t>(g.adj_offset[n]));
  for (int32_t v = 0; v < n; ++v) {
    int64_t pos = g.adj_offset[v];
    for_each_neighbor(v, [&](int32_t u) { g.adj[pos++] = u; });
  }
  return g;
}

std::vector<int32_t> boundary_relative(const std::vector<uint8_t>& u0_mask, const ClusterGraph& g) {
  if (u0_mask.size() != static_cast<size_t>(g.vertex_count())) {
    throw std::domain_error("boundary_relative: mask size mismatch");
  }
  std::vector<int32_t> out;
  for (int32_t v = 0; v < g.vertex_count(); ++v) {
    if (u0_mask[v]) continue;
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
      if (u0_mask[g.adj[e]]) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

int64_t graph_distance_within(const ClusterGraph& g, const std::vector<uint8_t>& allowed,
                              int32_t x, int32_t y) {
  if (x < 0 || y < 0 || x >= g.vertex_count() || y >= g.vertex_count() || !allowed[x] || !allowed[y]) {
    throw std::domain_error("graph_distance_within: endpoints must lie in the allowed set");
  }
  if (x == y) return 0;
  std::vector<int64_t> dist(g.vertex_count(), -1);
  std::deque<int32_t> queue;
  dist[x] = 0;
  queue.push_back(x);
  while (!queue.empty()) {
    const int32_t v = queue.front();
    queue.pop_front();
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
      const int32_t u = g.adj[e];
      if (!allowed[u] || dist[u] >= 0) continue;
      dist[u] = dist[v] + 1;
      if (u == y) return dist[u];
      queue.push_back(u);
    }
  }
  return -1;
}

std::vector<std::vector<int32_t>> component_within(const ClusterGraph& g,
                                                   const std::vector<uint8_t>& region_mask) {
  std::vector<std::vector<int32_t>> comps;
  std::vector<uint8_t> seen(g.vertex_count(), 0);
  std::vector<int32_t> stack;
  for (int32_t v = 0; v < g.vertex_count(); ++v) {
    if (!region_mask[v] || seen[v]) continue;
    comps.emplace_back();
    auto& comp = comps.back();
    seen[v] = 1;
    stack.push_back(v);
    while (!stack.empty()) {
      const int32_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int64_t e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e) {
        const int32_t wv = g.adj[e];
        if (region_mask[wv] && !seen[wv]) {
          seen[wv] = 1;
          stack.push_back(wv);
        }
      }
    }
  }
  return comps;
}

void export_edge_list(const ClusterGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_edge_list: cannot open " + path);
  out << "# vertices: " << g.vertex_count() << "\n";
  for (int32_t v = 0; v < g.vertex_count(); ++v) {
    for (int64_t e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
      if (g.adj[e] > v) out << v << ' ' << g.adj[e] << '\n';
    }
  }
}

std::vector<uint8_t> mask_of(const ClusterGraph& g, const std::vector<int32_t>& ids) {
  std::vector<uint8_t> m(g.vertex_count(), 0);
  for (int32_t v : ids) m[v] = 1;
  return m;
}

std::vector<uint8_t> mask_ball(const ClusterGraph& g, const Point& center, int64_t r) {
  std::vector<uint8_t> m(g.vertex_count(), 0);
  for (int32_t v = 0; v < g.vertex_count(); ++v) {
    if (linf_dist(g.point_of(v), center) <= r) m[v] = 1;
  }
  return m;
}

}  // namespace percsolid
