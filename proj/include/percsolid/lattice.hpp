#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace percsolid {

using Point = std::vector<int32_t>;

int64_t linf_dist(const Point& a, const Point& b);
int64_t l1_dist(const Point& a, const Point& b);

// Axis-aligned cube of lattice points: origin[k] <= p[k] < origin[k] + side.
struct Window {
  int dim = 0;
  int64_t side = 0;
  Point origin;

  static Window centered(int dim, int64_t side);

  int64_t volume() const;
  bool contains(const Point& p) const;

  // Row-major bijection with the first coordinate most significant; the
  // induced index order equals lexicographic order on coordinates.
  int64_t point_index(const Point& p) const;
  Point index_point(int64_t idx) const;

  // minimum distance from p to the outermost retained layer (0 on a face)
  int64_t face_distance(const Point& p) const;
};

// Inclusive lattice box [lo[k], hi[k]] per axis.
struct Region {
  Point lo, hi;

  static Region of_window(const Window& w);
  static Region ball(const Point& c, int64_t r);

  int dim() const { return static_cast<int>(lo.size()); }
  Region clipped_to(const Window& w) const;
  Region clipped_to(const Region& outer) const;
  bool contains(const Point& p) const;
  bool inside(const Region& outer) const;
  int64_t volume() const;

  // row-major iteration support
  int64_t extent(int axis) const { return int64_t(hi[axis]) - lo[axis] + 1; }
};

// All lattice points of B(center, r) clipped to w. center must lie in w.
std::vector<Point> ball_points(const Point& center, int64_t r, const Window& w);

// Continuum shapes used to build blow-ups A_N = (N*A) cap Z^d.
struct ShapeSpec {
  enum class Kind { box, ball, set_union };
  Kind kind = Kind::box;
  std::vector<double> center;      // box, ball
  std::vector<double> half_width;  // box
  double radius = 0.0;             // ball (sup-norm)
  std::vector<ShapeSpec> parts;    // set_union

  int dim() const;
  bool contains(const std::vector<double>& x) const;
  bool degenerate() const;  // empty interior
  void bounding_box(std::vector<double>& lo, std::vector<double>& hi) const;

  static ShapeSpec box_at(std::vector<double> c, std::vector<double> h);
  static ShapeSpec ball_at(std::vector<double> c, double r);
  static ShapeSpec union_of(std::vector<ShapeSpec> parts);

  // line-oriented text format:
  //   box cx cy cz hx hy hz
  //   ball cx cy cz r
  //   union { ... }
  static ShapeSpec parse(std::istream& in, int dim);
  static ShapeSpec parse_file(const std::string& path, int dim);
  std::string serialize() const;
};

std::vector<Point> blow_up(const ShapeSpec& a, int64_t n, const Window& w);

}  // namespace percsolid
