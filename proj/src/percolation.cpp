#include "percsolid/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "percsolid/parallel.hpp"
#include "percsolid/rng.hpp"

namespace percsolid {

namespace {

std::vector<int64_t> window_strides(const Window& w) {
  std::vector<int64_t> stride(w.dim);
  int64_t s = 1;
  for (int k = w.dim - 1; k >= 0; --k) {
    stride[k] = s;
    s *= w.side;
  }
  return stride;
}

// coordinate of a site along one axis, in [0, side)
inline int64_t axis_coord(int64_t site, int axis, const std::vector<int64_t>& stride, int64_t side) {
  return (site / stride[axis]) % side;
}

struct UnionFind {
  std::vector<int32_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int32_t find(int32_t x) {
    int32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const int32_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

}  // namespace

int64_t PercConfig::bit_count() const {
  const int64_t planes = model == PercModel::bond ? window.dim : 1;
  return planes * window.volume();
}

bool PercConfig::site_open(int64_t site) const {
  if (model == PercModel::site) return bit(site);
  const int64_t vol = window.volume();
  const auto stride = window_strides(window);
  for (int k = 0; k < window.dim; ++k) {
    if (bit(int64_t(k) * vol + site)) return true;
    const int64_t c = axis_coord(site, k, stride, window.side);
    if (c > 0 && bit(int64_t(k) * vol + site - stride[k])) return true;
  }
  return false;
}

bool PercConfig::edge_open(int64_t site, int axis) const {
  if (model != PercModel::bond) throw std::domain_error("edge_open: site model has no edge bits");
  return bit(int64_t(axis) * window.volume() + site);
}

int64_t PercConfig::open_site_count() const {
  int64_t n = 0;
  const int64_t vol = window.volume();
  for (int64_t i = 0; i < vol; ++i) {
    if (site_open(i)) ++n;
  }
  return n;
}

PercConfig generate(PercModel model, int dim, int64_t side, double p, uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("generate: dim must be >= 2");
  if (side < 2) throw std::invalid_argument("generate: side must be >= 2");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("generate: p must lie in (0,1)");

  PercConfig cfg;
  cfg.window = Window::centered(dim, side);
  cfg.model = model;
  cfg.p = p;
  cfg.seed = seed;
  const int64_t nbits = cfg.bit_count();
  cfg.bits.assign(static_cast<size_t>((nbits + 63) / 64), 0);

  const CounterRng rng(seed, rng_stream::occupancy);
  const int64_t vol = cfg.window.volume();
  const auto stride = window_strides(cfg.window);

  parallel_chunks(cfg.bits.size(), 4096, 0, [&](int64_t, int64_t lo, int64_t hi) {
    for (int64_t word = lo; word < hi; ++word) {
      uint64_t acc = 0;
      const int64_t base = word * 64;
      const int64_t top = std::min<int64_t>(64, nbits - base);
      for (int64_t b = 0; b < top; ++b) {
        const int64_t i = base + b;
        bool open = rng.u01(static_cast<uint64_t>(i)) < p;
        if (open && model == PercModel::bond) {
          // drop edges that would leave the window
          const int axis = static_cast<int>(i / vol);
          const int64_t site = i % vol;
          if (axis_coord(site, axis, stride, side) == side - 1) open = false;
        }
        if (open) acc |= (uint64_t(1) << b);
      }
      cfg.bits[static_cast<size_t>(word)] = acc;
    }
  });
  return cfg;
}

void save_config(const PercConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_config: cannot open " + path);
  const char magic[5] = {'P', 'E', 'R', 'C', '1'};
  out.write(magic, 5);
  const uint8_t version = 1;
  const uint8_t model = static_cast<uint8_t>(cfg.model);
  const uint8_t dim = static_cast<uint8_t>(cfg.window.dim);
  out.put(static_cast<char>(version));
  out.put(static_cast<char>(model));
  out.put(static_cast<char>(dim));
  auto put_u64 = [&](uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
  };
  put_u64(static_cast<uint64_t>(cfg.window.side));
  uint64_t pbits;
  static_assert(sizeof(double) == 8);
  std::memcpy(&pbits, &cfg.p, 8);
  put_u64(pbits);
  put_u64(cfg.seed);
  const int64_t nbits = cfg.bit_count();
  const int64_t nbytes = (nbits + 7) / 8;
  for (int64_t i = 0; i < nbytes; ++i) {
    const uint64_t word = cfg.bits[static_cast<size_t>(i / 8)];
    out.put(static_cast<char>((word >> (8 * (i % 8))) & 0xff));
  }
  if (!out) throw std::runtime_error("save_config: write failed for " + path);
}

PercConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, "PERC1", 5) != 0) {
    throw std::runtime_error("load_config: bad magic in " + path);
  }
  const int version = in.get();
  if (version != 1) throw std::runtime_error("load_config: unsupported version");
  const int model = in.get();
  const int dim = in.get();
  auto get_u64 = [&]() {
    char buf[8];
    in.read(buf, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= (uint64_t(static_cast<uint8_t>(buf[i])) << (8 * i));
    return v;
  };
  const int64_t side = static_cast<int64_t>(get_u64());
  const uint64_t pbits = get_u64();
  const uint64_t seed = get_u64();

  PercConfig cfg;
  cfg.window = Window::centered(dim, side);
  cfg.model = static_cast<PercModel>(model);
  std::memcpy(&cfg.p, &pbits, 8);
  cfg.seed = seed;
  const int64_t nbits = cfg.bit_count();
  const int64_t nbytes = (nbits + 7) / 8;
  cfg.bits.assign(static_cast<size_t>((nbits + 63) / 64), 0);
  for (int64_t i = 0; i < nbytes; ++i) {
    const int c = in.get();
    if (c < 0) throw std::runtime_error("load_config: truncated file " + path);
    cfg.bits[static_cast<size_t>(i / 8)] |= (uint64_t(c) << (8 * (i % 8)));
  }
  return cfg;
}

ClusterLabeling label_clusters(const PercConfig& cfg) {
  const Window& w = cfg.window;
  const int64_t vol = w.volume();
  const auto stride = window_strides(w);
  if (vol > std::numeric_limits<int32_t>::max()) {
    throw std::domain_error("label_clusters: window too large for 32-bit site labels");
  }

  // union-find over open sites (edges by model)
  UnionFind uf(static_cast<size_t>(vol));
  std::vector<uint8_t> open(static_cast<size_t>(vol), 0);
  for (int64_t i = 0; i < vol; ++i) open[i] = cfg.site_open(i) ? 1 : 0;

  for (int64_t i = 0; i < vol; ++i) {
    if (!open[i]) continue;
    for (int k = 0; k < w.dim; ++k) {
      if (axis_coord(i, k, stride, w.side) + 1 >= w.side) continue;
      const int64_t j = i + stride[k];
      const bool joined = cfg.model == PercModel::site ? open[j] != 0 : cfg.edge_open(i, k);
      if (joined) uf.unite(static_cast<int32_t>(i), static_cast<int32_t>(j));
    }
  }

  ClusterLabeling lab;
  lab.label.assign(static_cast<size_t>(vol), -1);
  // ids in scan order of each component's smallest member (roots are minimal by construction)
  std::vector<int32_t> id_of_root(static_cast<size_t>(vol), -1);
  int32_t next_id = 0;
  for (int64_t i = 0; i < vol; ++i) {
    if (!open[i]) continue;
    const int32_t root = uf.find(static_cast<int32_t>(i));
    if (id_of_root[root] < 0) {
      id_of_root[root] = next_id++;
      lab.min_site.push_back(root);
    }
    lab.label[i] = id_of_root[root];
  }
  lab.size.assign(static_cast<size_t>(next_id), 0);
  for (int64_t i = 0; i < vol; ++i) {
    if (lab.label[i] >= 0) ++lab.size[lab.label[i]];
  }

  // exact l1 diameters via max over the 2^{d-1} sign patterns of f(x)=sum eps_k x_k
  const int d = w.dim;
  const int patterns = 1 << (d - 1);  // fix eps_0 = +1
  std::vector<int64_t> fmin(static_cast<size_t>(next_id) * patterns,
                            std::numeric_limits<int64_t>::max());
  std::vector<int64_t> fmax(static_cast<size_t>(next_id) * patterns,
                            std::numeric_limits<int64_t>::min());
  Point p(d);
  for (int64_t i = 0; i < vol; ++i) {
    const int32_t id = lab.label[i];
    if (id < 0) continue;
    int64_t rem = i;
    for (int k = d - 1; k >= 0; --k) {
      p[k] = static_cast<int32_t>(rem % w.side);
      rem /= w.side;
    }
    for (int m = 0; m < patterns; ++m) {
      int64_t f = p[0];
      for (int k = 1; k < d; ++k) f += (m & (1 << (k - 1))) ? -int64_t(p[k]) : int64_t(p[k]);
      auto& lo = fmin[static_cast<size_t>(id) * patterns + m];
      auto& hi = fmax[static_cast<size_t>(id) * patterns + m];
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  lab.l1_diameter.assign(static_cast<size_t>(next_id), 0);
  for (int32_t id = 0; id < next_id; ++id) {
    int64_t diam = 0;
    for (int m = 0; m < patterns; ++m) {
      diam = std::max(diam, fmax[static_cast<size_t>(id) * patterns + m] -
                                fmin[static_cast<size_t>(id) * patterns + m]);
    }
    lab.l1_diameter[id] = diam;
  }
  return lab;
}

std::vector<int64_t> s_r_vertices(const PercConfig& cfg, const ClusterLabeling& lab, double r) {
  if (r < 0) throw std::invalid_argument("s_r_vertices: r must be >= 0");
  std::vector<int64_t> out;
  const int64_t vol = cfg.window.volume();
  for (int64_t i = 0; i < vol; ++i) {
    const int32_t id = lab.label[i];
    if (id >= 0 && double(lab.l1_diameter[id]) >= r) out.push_back(i);
  }
  return out;
}

int32_t largest_cluster_id(const ClusterLabeling& lab, bool spanning, const PercConfig& cfg) {
  const Window& w = cfg.window;
  std::vector<uint8_t> eligible(lab.size.size(), 1);
  if (spanning) {
    const auto stride = window_strides(w);
    // touching two opposite faces along some axis
    std::vector<uint8_t> lo_face(lab.size.size() * w.dim, 0), hi_face(lab.size.size() * w.dim, 0);
    for (int64_t i = 0; i < w.volume(); ++i) {
      const int32_t id = lab.label[i];
      if (id < 0) continue;
      for (int k = 0; k < w.dim; ++k) {
        const int64_t c = axis_coord(i, k, stride, w.side);
        if (c == 0) lo_face[size_t(id) * w.dim + k] = 1;
        if (c == w.side - 1) hi_face[size_t(id) * w.dim + k] = 1;
      }
    }
    for (size_t id = 0; id < lab.size.size(); ++id) {
      bool spans = false;
      for (int k = 0; k < w.dim; ++k) {
        spans = spans || (lo_face[id * w.dim + k] && hi_face[id * w.dim + k]);
      }
      eligible[id] = spans ? 1 : 0;
    }
  }
  int32_t best = -1;
  for (size_t id = 0; id < lab.size.size(); ++id) {
    if (!eligible[id]) continue;
    if (best < 0 || lab.size[id] > lab.size[best] ||
        (lab.size[id] == lab.size[best] && lab.min_site[id] < lab.min_site[best])) {
      best = static_cast<int32_t>(id);
    }
  }
  return best;
}

ClusterGraph largest_cluster(const PercConfig& cfg, const ClusterLabeling& lab, bool spanning) {
  const int32_t id = largest_cluster_id(lab, spanning, cfg);
  if (id < 0) {
    throw std::domain_error(spanning ? "largest_cluster: no spanning cluster"
                                     : "largest_cluster: empty configuration");
  }
  std::vector<int64_t> sites;
  sites.reserve(static_cast<size_t>(lab.size[id]));
  for (int64_t i = 0; i < cfg.window.volume(); ++i) {
    if (lab.label[i] == id) sites.push_back(i);
  }
  if (cfg.model == PercModel::site) {
    return ClusterGraph::build(cfg.window, sites, [](int64_t, int64_t, int) { return true; });
  }
  return ClusterGraph::build(cfg.window, sites, [&cfg](int64_t a, int64_t, int axis) {
    return cfg.edge_open(a, axis);
  });
}

namespace {

// BFS connectivity over open sites (site model) or open edges (bond model)
// restricted to an inclusive region.
std::vector<int64_t> bfs_region(const PercConfig& cfg, const Region& reg, int64_t start,
                                std::vector<int32_t>& mark, int32_t tag) {
  const Window& w = cfg.window;
  const auto stride = window_strides(w);
  std::vector<int64_t> visited;
  std::deque<int64_t> queue;
  mark[start] = tag;
  queue.push_back(start);
  Point p(w.dim);
  while (!queue.empty()) {
    const int64_t i = queue.front();
    queue.pop_front();
    visited.push_back(i);
    p = w.index_point(i);
    for (int k = 0; k < w.dim; ++k) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        const int64_t c = p[k] + sgn;
        if (c < reg.lo[k] || c > reg.hi[k]) continue;
        if (c < w.origin[k] || c >= w.origin[k] + w.side) continue;
        const int64_t j = i + sgn * stride[k];
        if (mark[j] == tag || !cfg.site_open(j)) continue;
        const bool joined = cfg.model == PercModel::site
                                ? true
                                : cfg.edge_open(sgn > 0 ? i : j, k);
        if (!joined) continue;
        mark[j] = tag;
        queue.push_back(j);
      }
    }
  }
  return visited;
}

}  // namespace

LocalUniquenessResult local_uniqueness_stat(const PercConfig& cfg, const ClusterLabeling& lab,
                                            int64_t R, int sample_count, uint64_t seed) {
  const Window& w = cfg.window;
  if (2 * R + 1 > w.side) throw std::domain_error("local_uniqueness_stat: window too small for R");
  const CounterRng rng(seed, rng_stream::sampling);

  LocalUniquenessResult res;
  res.samples = sample_count;
  int64_t nonempty = 0, connected = 0;
  std::vector<int32_t> mark(static_cast<size_t>(w.volume()), -1);
  int32_t tag = 0;

  for (int s = 0; s < sample_count; ++s) {
    // center with B(z,R) inside the window
    Point z(w.dim);
    for (int k = 0; k < w.dim; ++k) {
      const auto span = static_cast<uint32_t>(w.side - 2 * R);
      z[k] = static_cast<int32_t>(w.origin[k] + R + rng.below(uint64_t(s) * w.dim + k, span));
    }
    const Region inner = Region::ball(z, R);
    const Region outer = Region::ball(z, 2 * R).clipped_to(w);

    // S_R and S_{R/10} membership within the inner ball
    std::vector<int64_t> anchors;  // S_{R/10} cap B(z,R)
    bool has_sr = false;
    Point q = inner.lo;
    while (true) {
      if (w.contains(q)) {
        const int64_t idx = w.point_index(q);
        const int32_t id = lab.label[idx];
        if (id >= 0) {
          if (double(lab.l1_diameter[id]) >= double(R)) has_sr = true;
          if (double(lab.l1_diameter[id]) >= double(R) / 10.0) anchors.push_back(idx);
        }
      }
      int k = w.dim - 1;
      while (k >= 0) {
        if (q[k] < inner.hi[k]) {
          ++q[k];
          break;
        }
        q[k] = inner.lo[k];
        --k;
      }
      if (k < 0) break;
    }
    if (has_sr) ++nonempty;

    bool all_connected = true;
    if (anchors.size() > 1) {
      ++tag;
      bfs_region(cfg, outer, anchors.front(), mark, tag);
      for (size_t i = 1; i < anchors.size(); ++i) {
        if (mark[anchors[i]] != tag) {
          all_connected = false;
          break;
        }
      }
    }
    if (all_connected) ++connected;
  }
  res.freq_nonempty = double(nonempty) / double(sample_count);
  res.freq_connected = double(connected) / double(sample_count);
  return res;
}

namespace {

Region cube_region(const Point& x, int64_t L0) {
  Region r;
  r.lo = x;
  r.hi.resize(x.size());
  for (size_t k = 0; k < x.size(); ++k) r.hi[k] = static_cast<int32_t>(x[k] + L0 - 1);
  return r;
}

// connected components of S_{L0} restricted to the cube, returned as lists of
// site indices, largest first; `visited` is a scratch stamp array
std::vector<std::vector<int64_t>> cube_sl0_components(const PercConfig& cfg,
                                                      const ClusterLabeling& lab, const Region& cube,
                                                      int64_t L0, std::vector<int32_t>& visited,
                                                      int32_t& stamp) {
  const Window& w = cfg.window;
  const auto stride = window_strides(w);
  ++stamp;
  std::vector<std::vector<int64_t>> comps;
  Point q = cube.lo;
  while (true) {
    const int64_t idx = w.point_index(q);
    const int32_t id = lab.label[idx];
    if (id >= 0 && lab.l1_diameter[id] >= L0 && visited[idx] != stamp) {
      std::deque<int64_t> queue;
      std::vector<int64_t> comp;
      visited[idx] = stamp;
      queue.push_back(idx);
      Point p(w.dim);
      while (!queue.empty()) {
        const int64_t i = queue.front();
        queue.pop_front();
        comp.push_back(i);
        p = w.index_point(i);
        for (int k = 0; k < w.dim; ++k) {
          for (int sgn = -1; sgn <= 1; sgn += 2) {
            const int64_t c = p[k] + sgn;
            if (c < cube.lo[k] || c > cube.hi[k]) continue;
            const int64_t j = i + sgn * stride[k];
            const int32_t jid = lab.label[j];
            if (jid < 0 || lab.l1_diameter[jid] < L0 || visited[j] == stamp) continue;
            const bool joined = cfg.model == PercModel::site
                                    ? true
                                    : cfg.edge_open(sgn > 0 ? i : j, k);
            if (!joined) continue;
            visited[j] = stamp;
            queue.push_back(j);
          }
        }
      }
      comps.push_back(std::move(comp));
    }
    int k = w.dim - 1;
    while (k >= 0) {
      if (q[k] < cube.hi[k]) {
        ++q[k];
        break;
      }
      q[k] = cube.lo[k];
      --k;
    }
    if (k < 0) break;
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

}  // namespace

bool seed_event_D(const PercConfig& cfg, const ClusterLabeling& lab, const Point& x, int64_t L0,
                  double eta1) {
  const Window& w = cfg.window;
  const Region win = Region::of_window(w);
  const Region cx = cube_region(x, L0);
  if (!cx.inside(win)) throw std::domain_error("seed_event_D: cube outside window");

  std::vector<Point> neighbors;
  for (int k = 0; k < w.dim; ++k) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      Point y = x;
      y[k] = static_cast<int32_t>(y[k] + sgn * L0);
      if (!cube_region(y, L0).inside(win)) {
        throw std::domain_error("seed_event_D: neighbor cube outside window");
      }
      neighbors.push_back(y);
    }
  }

  const double need = eta1 * std::pow(double(L0), double(w.dim));
  std::vector<int32_t> mark(static_cast<size_t>(w.volume()), -1);
  int32_t tag = 0;

  auto candidates = [&](const Region& cube) {
    auto comps = cube_sl0_components(cfg, lab, cube, L0, mark, tag);
    std::vector<std::vector<int64_t>> big;
    for (auto& c : comps) {
      if (double(c.size()) >= need) big.push_back(std::move(c));
    }
    return big;
  };

  const auto cx_cands = candidates(cx);
  if (cx_cands.empty()) return true;  // bad event occurs

  std::vector<int32_t> mark2(static_cast<size_t>(w.volume()), -1);
  int32_t tag2 = 0;

  // good pattern: some C_x candidate connects, within S cap (cube_x u cube_y),
  // to a large component C_y of every neighbor cube
  for (const auto& c_x : cx_cands) {
    bool all_ok = true;
    for (const auto& y : neighbors) {
      const Region cy = cube_region(y, L0);
      const auto cy_cands = candidates(cy);
      if (cy_cands.empty()) {
        all_ok = false;
        break;
      }
      // BFS over open sites restricted to the union of the two cubes
      Region uni;
      uni.lo.resize(w.dim);
      uni.hi.resize(w.dim);
      for (int k = 0; k < w.dim; ++k) {
        uni.lo[k] = std::min(cx.lo[k], cy.lo[k]);
        uni.hi[k] = std::max(cx.hi[k], cy.hi[k]);
      }
      ++tag2;
      // union of two cubes is not a box; restrict BFS membership explicitly
      const auto stride = window_strides(w);
      std::deque<int64_t> queue;
      auto in_union = [&](const Point& p) { return cx.contains(p) || cy.contains(p); };
      mark2[c_x.front()] = tag2;
      queue.push_back(c_x.front());
      // seed the BFS with the whole candidate component (it is connected anyway)
      for (int64_t s : c_x) {
        if (mark2[s] != tag2) {
          mark2[s] = tag2;
          queue.push_back(s);
        }
      }
      Point p(w.dim);
      while (!queue.empty()) {
        const int64_t i = queue.front();
        queue.pop_front();
        p = w.index_point(i);
        for (int k = 0; k < w.dim; ++k) {
          for (int sgn = -1; sgn <= 1; sgn += 2) {
            Point q = p;
            q[k] = static_cast<int32_t>(q[k] + sgn);
            if (!uni.contains(q) || !in_union(q)) continue;
            const int64_t j = i + sgn * stride[k];
            if (mark2[j] == tag2 || !cfg.site_open(j)) continue;
            const bool joined = cfg.model == PercModel::site
                                    ? true
                                    : cfg.edge_open(sgn > 0 ? i : j, k);
            if (!joined) continue;
            mark2[j] = tag2;
            queue.push_back(j);
          }
        }
      }
      bool linked = false;
      for (const auto& c_y : cy_cands) {
        if (mark2[c_y.front()] == tag2) {
          linked = true;
          break;
        }
      }
      if (!linked) {
        all_ok = false;
        break;
      }
    }
    if (all_ok) return false;  // good pattern holds, bad event does not occur
  }
  return true;
}

bool seed_event_I(const PercConfig& cfg, const ClusterLabeling& lab, const Point& x, int64_t L0,
                  double eta2) {
  const Window& w = cfg.window;
  const Region cube = cube_region(x, L0);
  if (!cube.inside(Region::of_window(w))) throw std::domain_error("seed_event_I: cube outside window");
  int64_t count = 0;
  Point q = cube.lo;
  while (true) {
    const int64_t idx = w.point_index(q);
    const int32_t id = lab.label[idx];
    if (id >= 0 && lab.l1_diameter[id] >= L0) ++count;
    int k = w.dim - 1;
    while (k >= 0) {
      if (q[k] < cube.hi[k]) {
        ++q[k];
        break;
      }
      q[k] = cube.lo[k];
      --k;
    }
    if (k < 0) break;
  }
  return double(count) > eta2 * std::pow(double(L0), double(w.dim));
}

ProductConditionResult product_condition_check(std::span<const double> r_seq,
                                               std::span<const double> ell_seq, int dim,
                                               double alpha, double eta) {
  ProductConditionResult res;
  if (r_seq.size() != ell_seq.size() || r_seq.empty()) {
    throw std::invalid_argument("product_condition_check: sequences must be nonempty, same length");
  }
  const double eta1 = std::sqrt(1.0 - alpha / 2.0) * eta;
  const double eta2 = (1.0 + alpha / 4.0) * eta;
  res.threshold = std::max({(1.0 + eta2) / (1.0 + 2.0 * eta1), std::sqrt(1.0 - alpha / 2.0),
                            1.0 - (alpha / 4.0) * eta});

  double log_prod = 0.0;
  std::vector<double> q(r_seq.size());
  for (size_t i = 0; i < r_seq.size(); ++i) {
    q[i] = std::pow(4.0 * r_seq[i] / ell_seq[i], double(dim));
    if (q[i] >= 1.0) {
      res.ok = false;
      res.detail = "term " + std::to_string(i) + " non-positive (4r >= ell)";
      res.product_lower = 0.0;
      return res;
    }
    log_prod += std::log1p(-q[i]);
  }

  // certified geometric tail: extend with ratio rho = q_last/q_prev (< 1 required)
  double tail = 0.0;
  if (q.size() >= 2) {
    const double rho = q.back() / q[q.size() - 2];
    if (rho >= 1.0) {
      res.ok = false;
      res.detail = "tail ratio >= 1, no geometric tail bound";
      res.product_lower = 0.0;
      return res;
    }
    // sum_{k>=1} -log(1 - q rho^k) <= q rho / ((1-rho)(1-q))
    tail = q.back() * rho / ((1.0 - rho) * (1.0 - q.back()));
  } else {
    tail = q.back() / (1.0 - q.back());  // single term: assume same ratio as q0 vs 1
  }
  res.product_lower = std::exp(log_prod - tail);
  res.ok = res.product_lower > res.threshold;
  res.detail = "prefix product exp=" + std::to_string(std::exp(log_prod)) +
               " certified lower=" + std::to_string(res.product_lower);
  return res;
}

}  // namespace percsolid
