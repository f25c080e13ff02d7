#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "symmkit/contraction.hpp"
#include "symmkit/grid.hpp"
#include "symmkit/polygon.hpp"
#include "symmkit/rearrangements.hpp"

// Seeded generators for grid functions, sets, polygons and maps.
namespace symmkit::sampling {

using Rng = std::mt19937_64;

/// Sub-seed for one trial, a splitmix64 step over (seed, trial).
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Nearest multiple of the grid spacing, measured from the grid origin along `axis`.
inline double snap(const Grid& g, std::size_t axis, double x) {
  const double o = g.origin()[axis];
  return o + std::round((x - o) / g.spacing()) * g.spacing();
}

inline double half_extent(const Grid& g, std::size_t axis) { return 0.5 * static_cast<double>(g.dim(axis)) * g.spacing(); }

/// Cells whose centers lie in the closed ball.
inline GridSet disk_raster(const Grid& g, const Vec& center, double radius) {
  const double r2 = radius * radius;
  return GridSet::from_predicate(g, [&](std::size_t i) {
    const Vec c = g.center(i);
    double d2 = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) d2 += (c[k] - center[k]) * (c[k] - center[k]);
    return d2 <= r2;
  });
}

/// Cells whose centers lie in the axis-aligned box [lo, hi].
inline GridSet box_raster(const Grid& g, const Vec& lo, const Vec& hi) {
  return GridSet::from_predicate(g, [&](std::size_t i) {
    const Vec c = g.center(i);
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] < lo[k] || c[k] > hi[k]) return false;
    return true;
  });
}

/// A random disk or box inside the central `spread` fraction of the grid.
inline GridSet random_blob(const Grid& g, Rng& rng, double spread) {
  const std::size_t n = g.dimension();
  Vec centre(n);
  double ext = INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = half_extent(g, k) * spread;
    centre[k] = g.axis_midpoint(k) + uniform(rng, -e, e);
    ext = std::min(ext, half_extent(g, k));
  }
  const double rmax = std::max(3.0 * g.spacing(), 0.35 * ext * spread);
  if (uniform_int(rng, 0, 1) == 0) return disk_raster(g, centre, uniform(rng, 2.0 * g.spacing(), rmax));
  Vec lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = uniform(rng, 2.0 * g.spacing(), rmax);
    lo[k] = centre[k] - w;
    hi[k] = centre[k] + w;
  }
  return box_raster(g, lo, hi);
}

/// Sum of 1-5 blob indicators with integer levels in 0..8 (the first blob at least 1).
inline GridFunction random_blob_function(const Grid& g, Rng& rng, double spread = 0.8) {
  std::vector<double> v(g.size(), 0.0);
  const int blobs = uniform_int(rng, 1, 5);
  for (int b = 0; b < blobs; ++b) {
    const GridSet s = random_blob(g, rng, spread);
    const int level = uniform_int(rng, b == 0 ? 1 : 0, 8);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (s[i]) v[i] += level;
  }
  return GridFunction(g, std::move(v));
}

inline GridSet random_blob_set(const Grid& g, Rng& rng, double spread) {
  GridSet s = random_blob(g, rng, spread);
  const int extra = uniform_int(rng, 0, 3);
  for (int b = 0; b < extra; ++b) s = s.united(random_blob(g, rng, spread));
  return s;
}

/// Strictly convex polygon with vertices on a random rotated ellipse.
inline ConvexPolygon random_convex_polygon(Rng& rng, Point2 centre, double rmin, double rmax, int max_vertices = 10) {
  const int n = uniform_int(rng, 3, max_vertices);
  const double a = uniform(rng, rmin, rmax);
  const double b = uniform(rng, rmin, rmax);
  const double rot = uniform(rng, 0.0, 2.0 * M_PI);
  std::vector<double> ang;
  while (static_cast<int>(ang.size()) < n) {
    const double t = uniform(rng, 0.0, 2.0 * M_PI);
    bool ok = true;
    for (double s : ang) {
      const double d = std::abs(s - t);
      if (std::min(d, 2.0 * M_PI - d) < 0.15) ok = false;
    }
    if (ok) ang.push_back(t);
  }
  std::sort(ang.begin(), ang.end());
  const double cr = std::cos(rot), sr = std::sin(rot);
  std::vector<Point2> v;
  for (double t : ang) {
    const double x = a * std::cos(t), y = b * std::sin(t);
    v.push_back({centre.x + cr * x - sr * y, centre.y + sr * x + cr * y});
  }
  return ConvexPolygon::hull(std::move(v));
}

/// Polygon symmetric under y -> -y, centred at (cx, 0).
inline ConvexPolygon random_h_symmetric_polygon(Rng& rng, double cx, double rmin, double rmax) {
  const int half = uniform_int(rng, 1, 5);
  const double a = uniform(rng, rmin, rmax);
  const double b = uniform(rng, rmin, rmax);
  std::vector<double> ang;
  while (static_cast<int>(ang.size()) < half) {
    const double t = uniform(rng, 0.1, M_PI - 0.1);
    bool ok = true;
    for (double s : ang)
      if (std::abs(s - t) < 0.1) ok = false;
    if (ok) ang.push_back(t);
  }
  std::vector<Point2> v;
  for (double t : ang) {
    v.push_back({cx + a * std::cos(t), b * std::sin(t)});
    v.push_back({cx + a * std::cos(t), -b * std::sin(t)});
  }
  v.push_back({cx + a, 0.0});
  if (uniform_int(rng, 0, 1)) v.push_back({cx - a, 0.0});
  return ConvexPolygon::hull(std::move(v));
}

inline ConvexPolygon random_triangle(Rng& rng, double extent) {
  for (;;) {
    std::vector<Point2> p(3);
    for (Point2& q : p) q = {uniform(rng, -extent, extent), uniform(rng, -extent, extent)};
    const double area2 = cross(p[1] - p[0], p[2] - p[0]);
    if (std::abs(area2) < 0.2 * extent * extent) continue;
    if (area2 < 0) std::swap(p[1], p[2]);
    return ConvexPolygon(std::move(p));
  }
}

/// Random PL contraction on [lo, hi]; with `eikonal` every slope is +1 or -1.
inline PLContraction random_contraction(Rng& rng, double lo, double hi, bool eikonal) {
  std::vector<Breakpoint> bp{{lo, uniform(rng, -0.5, 0.5)}};
  while (bp.back().t < hi) {
    const double t = std::min(hi, bp.back().t + uniform(rng, 0.05, 0.6));
    const double s = eikonal ? (uniform_int(rng, 0, 1) ? 1.0 : -1.0) : uniform(rng, -1.0, 1.0);
    bp.push_back({t, bp.back().value + s * (t - bp.back().t)});
  }
  return PLContraction(std::move(bp));
}

/// Random right-continuous non-decreasing map mixing jumps and linear ramps on [lo, hi].
inline MonotoneMap random_monotone_map(Rng& rng, double lo, double hi) {
  std::vector<Breakpoint> bp;
  double t = lo;
  double y = uniform(rng, -3.0, 3.0);
  bp.push_back({t, y});
  const int pieces = uniform_int(rng, 1, 6);
  for (int i = 0; i < pieces; ++i) {
    t += uniform(rng, 0.2, (hi - lo) / pieces + 0.2);
    if (uniform_int(rng, 0, 1)) {
      // Flat run up to a jump.
      bp.push_back({t, y});
      y += uniform_int(rng, 0, 3);
      bp.push_back({t, y});
    } else {
      y += uniform(rng, 0.0, 2.0);
      bp.push_back({t, y});
    }
  }
  return MonotoneMap(std::move(bp));
}

/// Function whose super-level sets are nested convex-polygon rasters (planar grids).
struct ColumnConvexSample {
  GridFunction f;
  ConvexPolygon outer;
};

inline ConvexPolygon scaled(const ConvexPolygon& k, const Point2& anchor, double factor) {
  std::vector<Point2> v(k.vertices().begin(), k.vertices().end());
  for (Point2& p : v) p = anchor + (p - anchor) * factor;
  return ConvexPolygon(std::move(v));
}

/// Mean of the vertices, an interior point.
inline Point2 vertex_centroid(const ConvexPolygon& k) {
  Point2 c{0.0, 0.0};
  for (const Point2& p : k.vertices()) c = c + p * (1.0 / static_cast<double>(k.size()));
  return c;
}

inline ColumnConvexSample random_column_convex_function(const Grid& g, Rng& rng, double spread = 0.6) {
  const double ex = half_extent(g, 0) * spread;
  const double ey = half_extent(g, 1) * spread;
  const Point2 centre{g.axis_midpoint(0) + uniform(rng, -0.5 * ex, 0.5 * ex),
                      g.axis_midpoint(1) + uniform(rng, -0.5 * ey, 0.5 * ey)};
  const double rmax = 0.5 * std::min(ex, ey);
  ConvexPolygon k = random_convex_polygon(rng, centre, std::max(4.0 * g.spacing(), 0.3 * rmax), rmax);
  const ConvexPolygon outer = k;
  const Point2 anchor = vertex_centroid(k);
  std::vector<double> v(g.size(), 0.0);
  const int layers = uniform_int(rng, 1, 4);
  for (int l = 0; l < layers; ++l) {
    const GridSet s = rasterize(k, g);
    const int inc = uniform_int(rng, 1, 3);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (s[i]) v[i] += inc;
    k = scaled(k, anchor, uniform(rng, 0.4, 0.9));
  }
  return {GridFunction(g, std::move(v)), outer};
}

/// Convex-polygon raster inside the central `spread` fraction of a planar grid.
inline ConvexPolygon random_grid_polygon(const Grid& g, Rng& rng, double spread) {
  const double ex = half_extent(g, 0) * spread;
  const double ey = half_extent(g, 1) * spread;
  const double rmax = 0.5 * std::min(ex, ey);
  const Point2 centre{g.axis_midpoint(0) + uniform(rng, -0.5 * ex, 0.5 * ex),
                      g.axis_midpoint(1) + uniform(rng, -0.5 * ey, 0.5 * ey)};
  return random_convex_polygon(rng, centre, std::max(4.0 * g.spacing(), 0.3 * rmax), rmax);
}

inline GridFunction random_function(Domain domain, const Grid& g, Rng& rng, double spread = 0.8) {
  if (domain == Domain::ColumnConvex) return random_column_convex_function(g, rng, std::min(spread, 0.6)).f;
  return random_blob_function(g, rng, spread);
}

}  // namespace symmkit::sampling
