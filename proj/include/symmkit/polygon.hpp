#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "symmkit/errors.hpp"
#include "symmkit/grid.hpp"

namespace symmkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point2&) const = default;
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Orthonormal frame attached to a unit direction u: coordinates (along H, along u).
///
/// The direction along H = u^perp is w = (u.y, -u.x), so u = (0, 1) gives the
/// usual (x, y) coordinates.
struct ChordFrame {
  Point2 u;
  Point2 w;

  explicit ChordFrame(Point2 dir) {
    const double len = std::hypot(dir.x, dir.y);
    if (!(len > 0.0)) throw Error("chord direction must be nonzero");
    u = {dir.x / len, dir.y / len};
    w = {u.y, -u.x};
  }

  double along_h(const Point2& p) const { return dot(p, w); }
  double along_u(const Point2& p) const { return dot(p, u); }
  Point2 point(double x, double s) const { return w * x + u * s; }
};

/// Intersection of a body with a line orthogonal to H, as extents along u.
struct Chord {
  double lo;
  double hi;
  double midpoint() const { return 0.5 * (lo + hi); }
  double length() const { return hi - lo; }
};

/// Chord of the convex hull spanned by a closed vertex loop at H-coordinate x.
inline std::optional<Chord> chord_of_loop(std::span<const Point2> loop, const ChordFrame& frame, double x) {
  if (loop.empty()) return std::nullopt;
  double lo = INFINITY;
  double hi = -INFINITY;
  bool hit = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = loop[i];
    const Point2& q = loop[(i + 1) % n];
    const double a = frame.along_h(p);
    const double b = frame.along_h(q);
    const double sa = frame.along_u(p);
    const double sb = frame.along_u(q);
    if (a == x) {
      lo = std::min(lo, sa);
      hi = std::max(hi, sa);
      hit = true;
    }
    if ((a < x && x < b) || (b < x && x < a)) {
      const double s = sa + (sb - sa) * (x - a) / (b - a);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      hit = true;
    }
  }
  if (!hit) return std::nullopt;
  return Chord{lo, hi};
}

/// Strictly convex planar polygon with counter-clockwise vertices.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw DegenerateBody("convex polygon needs at least three vertices");
    for (const Point2& p : vertices_)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("polygon vertices must be finite");
    if (std::abs(area()) <= 1e-15) throw DegenerateBody("polygon has zero area");
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 e0 = vertices_[(i + 1) % n] - vertices_[i];
      const Point2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
      if (!(cross(e0, e1) > 1e-12)) throw Error("polygon is not strictly convex and counter-clockwise");
    }
    // A CCW loop with all left turns could still wind more than once.
    if (!(area() > 0.0) || std::abs(turning_sum() - 2.0 * M_PI) > 1e-6)
      throw Error("polygon is not a simple convex loop");
  }

  /// Convex hull of a point cloud (monotone chain); collinear and duplicate points are dropped.
  static ConvexPolygon hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw DegenerateBody("hull of fewer than three distinct points");
    std::vector<Point2> h(2 * pts.size());
    std::size_t k = 0;
    auto turn = [](const Point2& o, const Point2& a, const Point2& b) { return cross(a - o, b - o); };
    for (const Point2& p : pts) {
      while (k >= 2 && turn(h[k - 2], h[k - 1], p) <= 1e-12) --k;
      h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
      h[k++] = pts[i];
    }
    h.resize(k - 1);
    return ConvexPolygon(std::move(h));
  }

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  double area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    return 0.5 * a;
  }

  double perimeter() const {
    double p = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) p += distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    return p;
  }

  bool contains(const Point2& p) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const Point2& a = vertices_[i];
      const Point2& b = vertices_[(i + 1) % vertices_.size()];
      if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
  }

  ConvexPolygon translated(const Point2& d) const {
    std::vector<Point2> v = vertices_;
    for (Point2& p : v) p = p + d;
    return ConvexPolygon(std::move(v));
  }

  /// Mirror image in the line u^perp through the origin.
  ConvexPolygon reflected(const Point2& u) const {
    const ChordFrame f(u);
    std::vector<Point2> v;
    v.reserve(vertices_.size());
    for (auto it = vertices_.rbegin(); it != vertices_.rend(); ++it) v.push_back(*it - f.u * (2.0 * dot(*it, f.u)));
    return ConvexPolygon(std::move(v));
  }

  /// Extent of the projection onto H = u^perp, as H-coordinates.
  std::pair<double, double> projection(const ChordFrame& frame) const {
    double lo = INFINITY, hi = -INFINITY;
    for (const Point2& p : vertices_) {
      lo = std::min(lo, frame.along_h(p));
      hi = std::max(hi, frame.along_h(p));
    }
    return {lo, hi};
  }

 private:
  double turning_sum() const {
    double s = 0.0;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 e0 = vertices_[(i + 1) % n] - vertices_[i];
      const Point2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
      s += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    return s;
  }

  std::vector<Point2> vertices_;
};

/// Intersection of K with the line orthogonal to H = u^perp at H-coordinate x.
inline std::optional<Chord> chord(const ConvexPolygon& k, const Point2& u, double x) {
  return chord_of_loop(k.vertices(), ChordFrame(u), x);
}

/// Sutherland-Hodgman clip of a convex loop against a convex polygon. The result may be degenerate or empty.
inline std::vector<Point2> clip_convex(std::span<const Point2> subject, const ConvexPolygon& clipper) {
  std::vector<Point2> out(subject.begin(), subject.end());
  const auto cv = clipper.vertices();
  for (std::size_t e = 0; e < cv.size() && !out.empty(); ++e) {
    const Point2 a = cv[e];
    const Point2 b = cv[(e + 1) % cv.size()];
    const Point2 edge = b - a;
    std::vector<Point2> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Point2 p = in[i];
      const Point2 q = in[(i + 1) % in.size()];
      const double dp = cross(edge, p - a);
      const double dq = cross(edge, q - a);
      if (dp >= 0.0) out.push_back(p);
      if ((dp >= 0.0) != (dq >= 0.0)) {
        const double t = dp / (dp - dq);
        out.push_back(p + (q - p) * t);
      }
    }
  }
  return out;
}

/// Cells of a planar grid whose centers lie in K.
inline GridSet rasterize(const ConvexPolygon& k, const Grid& grid) {
  if (grid.dimension() != 2) throw Error("polygon rasterization needs a planar grid");
  return GridSet::from_predicate(grid, [&](std::size_t i) {
    const Vec c = grid.center(i);
    return k.contains({c[0], c[1]});
  });
}

}  // namespace symmkit
