#include "percsolid/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace percsolid {

int64_t linf_dist(const Point& a, const Point& b) {
  int64_t m = 0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max<int64_t>(m, std::llabs(int64_t(a[k]) - b[k]));
  return m;
}

int64_t l1_dist(const Point& a, const Point& b) {
  int64_t s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += std::llabs(int64_t(a[k]) - b[k]);
  return s;
}

Window Window::centered(int dim, int64_t side) {
  if (dim < 2) throw std::invalid_argument("window: dimension must be >= 2");
  if (side < 1) throw std::invalid_argument("window: side must be >= 1");
  Window w;
  w.dim = dim;
  w.side = side;
  w.origin.assign(dim, static_cast<int32_t>(-(side / 2)));
  return w;
}

int64_t Window::volume() const {
  int64_t v = 1;
  for (int k = 0; k < dim; ++k) v *= side;
  return v;
}

bool Window::contains(const Point& p) const {
  if (static_cast<int>(p.size()) != dim) return false;
  for (int k = 0; k < dim; ++k) {
    if (p[k] < origin[k] || p[k] >= origin[k] + side) return false;
  }
  return true;
}

int64_t Window::point_index(const Point& p) const {
  if (!contains(p)) throw std::domain_error("point_index: point outside window");
  int64_t idx = 0;
  for (int k = 0; k < dim; ++k) idx = idx * side + (p[k] - origin[k]);
  return idx;
}

Point Window::index_point(int64_t idx) const {
  if (idx < 0 || idx >= volume()) throw std::domain_error("index_point: index out of range");
  Point p(dim);
  for (int k = dim - 1; k >= 0; --k) {
    p[k] = static_cast<int32_t>(origin[k] + idx % side);
    idx /= side;
  }
  return p;
}

int64_t Window::face_distance(const Point& p) const {
  if (!contains(p)) throw std::domain_error("face_distance: point outside window");
  int64_t m = side;
  for (int k = 0; k < dim; ++k) {
    m = std::min<int64_t>(m, p[k] - origin[k]);
    m = std::min<int64_t>(m, origin[k] + side - 1 - p[k]);
  }
  return m;
}

Region Region::of_window(const Window& w) {
  Region r;
  r.lo = w.origin;
  r.hi.resize(w.dim);
  for (int k = 0; k < w.dim; ++k) r.hi[k] = static_cast<int32_t>(w.origin[k] + w.side - 1);
  return r;
}

Region Region::ball(const Point& c, int64_t r) {
  Region b;
  b.lo.resize(c.size());
  b.hi.resize(c.size());
  for (size_t k = 0; k < c.size(); ++k) {
    b.lo[k] = static_cast<int32_t>(c[k] - r);
    b.hi[k] = static_cast<int32_t>(c[k] + r);
  }
  return b;
}

Region Region::clipped_to(const Window& w) const { return clipped_to(Region::of_window(w)); }

Region Region::clipped_to(const Region& outer) const {
  Region r = *this;
  for (int k = 0; k < dim(); ++k) {
    r.lo[k] = std::max(r.lo[k], outer.lo[k]);
    r.hi[k] = std::min(r.hi[k], outer.hi[k]);
  }
  return r;
}

bool Region::contains(const Point& p) const {
  for (int k = 0; k < dim(); ++k) {
    if (p[k] < lo[k] || p[k] > hi[k]) return false;
  }
  return true;
}

bool Region::inside(const Region& outer) const {
  for (int k = 0; k < dim(); ++k) {
    if (lo[k] < outer.lo[k] || hi[k] > outer.hi[k]) return false;
  }
  return true;
}

int64_t Region::volume() const {
  int64_t v = 1;
  for (int k = 0; k < dim(); ++k) {
    if (hi[k] < lo[k]) return 0;
    v *= extent(k);
  }
  return v;
}

std::vector<Point> ball_points(const Point& center, int64_t r, const Window& w) {
  if (!w.contains(center)) throw std::domain_error("ball_points: center outside window");
  if (r < 0) throw std::invalid_argument("ball_points: negative radius");
  const Region b = Region::ball(center, r).clipped_to(w);
  std::vector<Point> out;
  out.reserve(static_cast<size_t>(b.volume()));
  Point p = b.lo;
  const int d = w.dim;
  while (true) {
    out.push_back(p);
    int k = d - 1;
    while (k >= 0) {
      if (p[k] < b.hi[k]) {
        ++p[k];
        break;
      }
      p[k] = b.lo[k];
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

int ShapeSpec::dim() const {
  switch (kind) {
    case Kind::box:
    case Kind::ball:
      return static_cast<int>(center.size());
    case Kind::set_union:
      return parts.empty() ? 0 : parts.front().dim();
  }
  return 0;
}

bool ShapeSpec::contains(const std::vector<double>& x) const {
  switch (kind) {
    case Kind::box:
      for (size_t k = 0; k < center.size(); ++k) {
        if (std::fabs(x[k] - center[k]) > half_width[k]) return false;
      }
      return true;
    case Kind::ball: {
      double m = 0;
      for (size_t k = 0; k < center.size(); ++k) m = std::max(m, std::fabs(x[k] - center[k]));
      return m <= radius;
    }
    case Kind::set_union:
      for (const auto& part : parts) {
        if (part.contains(x)) return true;
      }
      return false;
  }
  return false;
}

bool ShapeSpec::degenerate() const {
  switch (kind) {
    case Kind::box:
      for (double h : half_width) {
        if (h <= 0) return true;
      }
      return half_width.empty();
    case Kind::ball:
      return radius <= 0;
    case Kind::set_union:
      if (parts.empty()) return true;
      for (const auto& part : parts) {
        if (part.degenerate()) return true;
      }
      return false;
  }
  return true;
}

void ShapeSpec::bounding_box(std::vector<double>& lo, std::vector<double>& hi) const {
  const int d = dim();
  switch (kind) {
    case Kind::box:
      lo.resize(d);
      hi.resize(d);
      for (int k = 0; k < d; ++k) {
        lo[k] = center[k] - half_width[k];
        hi[k] = center[k] + half_width[k];
      }
      return;
    case Kind::ball:
      lo.resize(d);
      hi.resize(d);
      for (int k = 0; k < d; ++k) {
        lo[k] = center[k] - radius;
        hi[k] = center[k] + radius;
      }
      return;
    case Kind::set_union: {
      parts.front().bounding_box(lo, hi);
      std::vector<double> plo, phi;
      for (size_t i = 1; i < parts.size(); ++i) {
        parts[i].bounding_box(plo, phi);
        for (int k = 0; k < d; ++k) {
          lo[k] = std::min(lo[k], plo[k]);
          hi[k] = std::max(hi[k], phi[k]);
        }
      }
      return;
    }
  }
}

ShapeSpec ShapeSpec::box_at(std::vector<double> c, std::vector<double> h) {
  ShapeSpec s;
  s.kind = Kind::box;
  s.center = std::move(c);
  s.half_width = std::move(h);
  return s;
}

ShapeSpec ShapeSpec::ball_at(std::vector<double> c, double r) {
  ShapeSpec s;
  s.kind = Kind::ball;
  s.center = std::move(c);
  s.radius = r;
  return s;
}

ShapeSpec ShapeSpec::union_of(std::vector<ShapeSpec> parts) {
  ShapeSpec s;
  s.kind = Kind::set_union;
  s.parts = std::move(parts);
  return s;
}

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream probe(line);
    std::string tok;
    if (probe >> tok) return true;
  }
  return false;
}

ShapeSpec parse_one(std::istream& in, int dim, const std::string& first_line) {
  std::istringstream ls(first_line);
  std::string tok;
  ls >> tok;
  if (tok == "box") {
    std::vector<double> c(dim), h(dim);
    for (int k = 0; k < dim; ++k) {
      if (!(ls >> c[k])) throw std::invalid_argument("shape parse: box needs " + std::to_string(2 * dim) + " reals");
    }
    for (int k = 0; k < dim; ++k) {
      if (!(ls >> h[k])) throw std::invalid_argument("shape parse: box needs " + std::to_string(2 * dim) + " reals");
    }
    return ShapeSpec::box_at(std::move(c), std::move(h));
  }
  if (tok == "ball") {
    std::vector<double> c(dim);
    double r = 0;
    for (int k = 0; k < dim; ++k) {
      if (!(ls >> c[k])) throw std::invalid_argument("shape parse: ball needs center and radius");
    }
    if (!(ls >> r)) throw std::invalid_argument("shape parse: ball needs center and radius");
    return ShapeSpec::ball_at(std::move(c), r);
  }
  if (tok == "union") {
    std::string brace;
    ls >> brace;
    if (brace != "{") throw std::invalid_argument("shape parse: expected '{' after union");
    std::vector<ShapeSpec> parts;
    std::string line;
    while (next_content_line(in, line)) {
      std::istringstream probe(line);
      std::string t;
      probe >> t;
      if (t == "}") return ShapeSpec::union_of(std::move(parts));
      parts.push_back(parse_one(in, dim, line));
    }
    throw std::invalid_argument("shape parse: unterminated union");
  }
  throw std::invalid_argument("shape parse: unknown shape kind '" + tok + "'");
}

}  // namespace

ShapeSpec ShapeSpec::parse(std::istream& in, int dim) {
  std::string line;
  if (!next_content_line(in, line)) throw std::invalid_argument("shape parse: empty input");
  return parse_one(in, dim, line);
}

ShapeSpec ShapeSpec::parse_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("shape parse: cannot open " + path);
  return parse(in, dim);
}

std::string ShapeSpec::serialize() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::box:
      out << "box";
      for (double v : center) out << ' ' << v;
      for (double v : half_width) out << ' ' << v;
      out << '\n';
      break;
    case Kind::ball:
      out << "ball";
      for (double v : center) out << ' ' << v;
      out << ' ' << radius << '\n';
      break;
    case Kind::set_union:
      out << "union {\n";
      for (const auto& part : parts) out << part.serialize();
      out << "}\n";
      break;
  }
  return out.str();
}

std::vector<Point> blow_up(const ShapeSpec& a, int64_t n, const Window& w) {
  if (n < 1) throw std::invalid_argument("blow_up: N must be >= 1");
  if (a.dim() != w.dim) throw std::invalid_argument("blow_up: shape/window dimension mismatch");
  if (a.degenerate()) throw std::domain_error("blow_up: shape has empty interior");

  std::vector<double> lo, hi;
  a.bounding_box(lo, hi);
  Region cand;
  cand.lo.resize(w.dim);
  cand.hi.resize(w.dim);
  int64_t needed_side = 0;
  for (int k = 0; k < w.dim; ++k) {
    const int64_t lk = static_cast<int64_t>(std::ceil(lo[k] * double(n) - 1e-9));
    const int64_t hk = static_cast<int64_t>(std::floor(hi[k] * double(n) + 1e-9));
    cand.lo[k] = static_cast<int32_t>(lk);
    cand.hi[k] = static_cast<int32_t>(hk);
    needed_side = std::max({needed_side, hk - w.origin[k] + 1, int64_t(w.origin[k]) + w.side - lk});
  }
  if (!cand.inside(Region::of_window(w))) {
    throw std::domain_error("blow_up: N*A exceeds window, required side >= " + std::to_string(needed_side));
  }

  std::vector<Point> out;
  std::vector<double> x(w.dim);
  Point p = cand.lo;
  while (true) {
    for (int k = 0; k < w.dim; ++k) x[k] = double(p[k]) / double(n);
    if (a.contains(x)) out.push_back(p);
    int k = w.dim - 1;
    while (k >= 0) {
      if (p[k] < cand.hi[k]) {
        ++p[k];
        break;
      }
      p[k] = cand.lo[k];
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

}  // namespace percsolid
