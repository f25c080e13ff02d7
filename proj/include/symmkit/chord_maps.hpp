#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symmkit/contraction.hpp"
#include "symmkit/errors.hpp"
#include "symmkit/grid.hpp"
#include "symmkit/polygon.hpp"
#include "symmkit/rearrangements.hpp"

namespace symmkit {

/// Region between two piecewise-linear graphs over an interval of H-coordinates.
///
/// Graph vertices are (x, s) pairs in the frame of u: x along H = u^perp, s along u.
/// Both graphs share the same breakpoint abscissae.
struct ChordMovedRegion {
  Point2 u{0.0, 1.0};
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  std::vector<Point2> gplus;
  std::vector<Point2> gminus;

  /// Linear interpolation of both graphs; nullopt outside omega.
  std::optional<Chord> chord_at(double x) const {
    if (gplus.empty() || x < omega_lo || x > omega_hi) return std::nullopt;
    auto interp = [x](const std::vector<Point2>& g) {
      auto it = std::lower_bound(g.begin(), g.end(), x, [](const Point2& p, double v) { return p.x < v; });
      if (it == g.end()) return g.back().y;
      if (it->x == x || it == g.begin()) return it->y;
      const Point2& b = *it;
      const Point2& a = *std::prev(it);
      return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
    };
    return Chord{interp(gminus), interp(gplus)};
  }

  double area() const {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < gplus.size(); ++i) {
      const double l0 = gplus[i].y - gminus[i].y;
      const double l1 = gplus[i + 1].y - gminus[i + 1].y;
      a += 0.5 * (l0 + l1) * (gplus[i + 1].x - gplus[i].x);
    }
    return a;
  }

  /// g^+ concave and g^- convex, judged by consecutive slope differences.
  bool is_convex(double tol = 1e-9) const {
    auto slopes = [](const std::vector<Point2>& g) {
      std::vector<double> s;
      for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double dx = g[i + 1].x - g[i].x;
        if (dx > 1e-12) s.push_back((g[i + 1].y - g[i].y) / dx);
      }
      return s;
    };
    const auto sp = slopes(gplus);
    const auto sm = slopes(gminus);
    for (std::size_t i = 0; i + 1 < sp.size(); ++i)
      if (sp[i + 1] > sp[i] + tol) return false;
    for (std::size_t i = 0; i + 1 < sm.size(); ++i)
      if (sm[i + 1] < sm[i] - tol) return false;
    return true;
  }
};

/// Moves every chord of K orthogonal to H = u^perp by phi(t_x) - t_x along u,
/// where t_x is the chord midpoint. The result is exact: breakpoints are K's
/// vertex projections plus the points where t_x crosses a breakpoint of phi.
inline ChordMovedRegion chord_move_polygon(const ConvexPolygon& k, const PLContraction& phi, const Point2& u) {
  if (!(k.area() > 0.0)) throw DegenerateBody("chord movement needs a body of positive area");
  const ChordFrame frame(u);
  std::vector<double> xs;
  for (const Point2& p : k.vertices()) xs.push_back(frame.along_h(p));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto midpoint_at = [&](double x) {
    const auto c = chord_of_loop(k.vertices(), frame, x);
    if (!c) throw Error("chord query fell outside the projection of the body");
    return *c;
  };

  std::vector<double> all = xs;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double t0 = midpoint_at(xs[i]).midpoint();
    const double t1 = midpoint_at(xs[i + 1]).midpoint();
    if (t0 == t1) continue;
    const double lo = std::min(t0, t1);
    const double hi = std::max(t0, t1);
    for (const Breakpoint& b : phi.breakpoints()) {
      if (b.t > lo && b.t < hi) {
        const double x = xs[i] + (b.t - t0) / (t1 - t0) * (xs[i + 1] - xs[i]);
        if (x > xs[i] && x < xs[i + 1]) all.push_back(x);
      }
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  ChordMovedRegion r;
  r.u = frame.u;
  r.omega_lo = all.front();
  r.omega_hi = all.back();
  r.gplus.reserve(all.size());
  r.gminus.reserve(all.size());
  for (double x : all) {
    const Chord c = midpoint_at(x);
    const double half = 0.5 * c.length();
    const double centre = phi(c.midpoint());
    r.gplus.push_back({x, centre + half});
    r.gminus.push_back({x, centre - half});
  }
  return r;
}

/// The region occupied by K itself, i.e. chord movement with phi = id.
inline ChordMovedRegion region_of(const ConvexPolygon& k, const Point2& u) {
  return chord_move_polygon(k, canonical_contraction("id"), u);
}

/// Length of both boundary graphs plus the two end chords.
inline double perimeter_region(const ChordMovedRegion& r) {
  double p = 0.0;
  for (std::size_t i = 0; i + 1 < r.gplus.size(); ++i) {
    p += distance(r.gplus[i], r.gplus[i + 1]);
    p += distance(r.gminus[i], r.gminus[i + 1]);
  }
  if (!r.gplus.empty()) {
    p += r.gplus.front().y - r.gminus.front().y;
    p += r.gplus.back().y - r.gminus.back().y;
  }
  return p;
}

/// Length of the two boundary graphs only.
inline double graph_length(const ChordMovedRegion& r) {
  double p = 0.0;
  for (std::size_t i = 0; i + 1 < r.gplus.size(); ++i)
    p += distance(r.gplus[i], r.gplus[i + 1]) + distance(r.gminus[i], r.gminus[i + 1]);
  return p;
}

// ---------------------------------------------------------------------------
// Grid chord movement

/// Contiguous run [first, last] of member cells along a column, or nullopt for an empty column.
/// Throws NonConvexColumn for a column with gaps.
inline std::optional<std::pair<std::size_t, std::size_t>> column_run(const GridSet& a, std::size_t first,
                                                                      std::size_t stride, std::size_t len) {
  std::optional<std::pair<std::size_t, std::size_t>> run;
  for (std::size_t j = 0; j < len; ++j) {
    if (!a[first + j * stride]) continue;
    if (!run) {
      run = std::make_pair(j, j);
    } else if (run->second + 1 == j) {
      run->second = j;
    } else {
      throw NonConvexColumn("column is not a contiguous run of cells");
    }
  }
  return run;
}

/// Chord movement on a grid: H is the mid-plane orthogonal to `axis`, u = +axis.
/// Each column run keeps its length and is re-centred at phi(t), snapped to the
/// nearest cell with half-cell ties going to the increasing side.
inline GridSet chord_move_gridset(const GridSet& a, const PLContraction& phi, std::size_t axis) {
  const Grid& g = a.grid();
  if (axis >= g.dimension()) throw Error("chord movement axis out of range");
  const std::size_t len = g.dim(axis);
  const std::size_t st = g.stride(axis);
  const double h = g.spacing();
  const double mid = g.axis_midpoint(axis);
  GridSet out(g);
  g.for_each_column(axis, [&](std::size_t first) {
    const auto run = column_run(a, first, st, len);
    if (!run) return;
    const double s0 = g.center_coord(axis, run->first) - mid;
    const double s1 = g.center_coord(axis, run->second) - mid;
    const double start = phi(0.5 * (s0 + s1)) - 0.5 * (s1 - s0);
    const double q = (start + mid - g.origin()[axis]) / h - 0.5;
    const double snapped = std::floor(q + 0.5);
    const std::size_t count = run->second - run->first + 1;
    if (snapped < 0.0 || snapped + static_cast<double>(count) > static_cast<double>(len))
      throw OutOfGrid("moved column leaves the grid");
    const auto j0 = static_cast<std::size_t>(snapped);
    for (std::size_t j = 0; j < count; ++j) out.set(first + (j0 + j) * st, true);
  });
  return out;
}

inline SetMap chord_move_map(const PLContraction& phi, std::size_t axis, std::string name = "chord-move") {
  return {std::move(name), [phi, axis](const GridSet& a) { return chord_move_gridset(a, phi, axis); },
          Domain::ColumnConvex, phi};
}

// ---------------------------------------------------------------------------
// Counterexample maps

/// Blaschke shaking of the H^- part: H^+ cells stay, each column's H^- cells
/// slide into a contiguous run abutting H.
inline GridSet shake_set(const GridSet& a, const OrientedHyperplane& h) {
  const Grid& g = a.grid();
  const int axis_i = h.aligned_axis();
  if (axis_i < 0 || h.dimension() != g.dimension()) throw MisalignedHyperplane("shaking needs an axis-aligned hyperplane");
  const auto axis = static_cast<std::size_t>(axis_i);
  const std::size_t len = g.dim(axis);
  const std::size_t st = g.stride(axis);
  GridSet out = a;
  std::vector<std::pair<double, std::size_t>> negative;  // (distance to H, cell)
  g.for_each_column(axis, [&](std::size_t first) {
    negative.clear();
    std::size_t lambda = 0;
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t cell = first + j * st;
      const double sd = h.signed_distance(g.center(cell));
      if (sd < 0.0) {
        negative.emplace_back(-sd, cell);
        if (a[cell]) ++lambda;
        out.set(cell, false);
      }
    }
    std::sort(negative.begin(), negative.end());
    for (std::size_t j = 0; j < lambda; ++j) out.set(negative[j].second, true);
  });
  return out;
}

/// Shaking applied after polarization.
inline SetMap shake_polarization_map(const OrientedHyperplane& h) {
  return {"shake-polarization", [h](const GridSet& a) { return shake_set(polarize_set(a, h), h); }, Domain::General,
          std::nullopt};
}

/// Reflection in the hyperplane orthogonal to `axis` through the center of gravity of A.
/// Computed in integer index arithmetic; images snap to the nearest cell, ties upward.
inline GridSet cog_reflect(const GridSet& a, std::size_t axis) {
  const Grid& g = a.grid();
  if (axis >= g.dimension()) throw Error("cog reflection axis out of range");
  long long n = 0;
  long long sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    ++n;
    sum += static_cast<long long>(g.unflatten(i)[axis]);
  }
  if (n == 0) throw EmptySet("center of gravity of an empty set");
  GridSet out(g);
  const auto len = static_cast<long long>(g.dim(axis));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    Index idx = g.unflatten(i);
    const auto j = static_cast<long long>(idx[axis]);
    // Image index 2 c - j with c = sum / n, rounded half up.
    const long long num = 2 * (2 * sum - j * n) + n;
    const long long den = 2 * n;
    long long q = num / den;
    if (num % den != 0 && num < 0) --q;
    if (q < 0 || q >= len) throw OutOfGrid("reflected cell leaves the grid");
    idx[axis] = static_cast<std::size_t>(q);
    out.set(g.flatten(idx), true);
  }
  return out;
}

inline SetMap cog_reflect_map(std::size_t axis) {
  return {"cog-reflect", [axis](const GridSet& a) { return a.empty() ? a : cog_reflect(a, axis); }, Domain::General,
          std::nullopt};
}

/// Cells within `width` of H trade places with their mirror images.
inline GridSet near_swap(const GridSet& a, const OrientedHyperplane& h, double width) {
  if (!(width > 0.0)) throw Error("near-swap width must be positive");
  const Grid& g = a.grid();
  const ReflectionPlan plan = plan_reflection(g, h);
  const double tol = 1e-9 * g.spacing();
  return GridSet::from_predicate(g, [&](std::size_t i) {
    if (std::abs(h.signed_distance(g.center(i))) <= width + tol) {
      const auto p = plan.partner[i];
      return p != ReflectionPlan::outside && a[static_cast<std::size_t>(p)];
    }
    return a[i];
  });
}

inline SetMap near_swap_map(const OrientedHyperplane& h, double width) {
  return {"near-swap", [h, width](const GridSet& a) { return near_swap(a, h, width); }, Domain::General,
          std::nullopt};
}

// ---------------------------------------------------------------------------
// Brute-force union of translated symmetric pieces

/// Union over sampled t of (K_t + phi(t) u), K_t = (K - t u) cap (K^dagger + t u).
struct SampledUnion {
  Point2 u;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double t_step = 0.0;
  std::vector<std::vector<Point2>> pieces;

  /// Merged chord intervals of the union at H-coordinate x.
  std::vector<Chord> chords_at(double x) const {
    const ChordFrame frame(u);
    std::vector<Chord> cs;
    for (const auto& piece : pieces)
      if (auto c = chord_of_loop(piece, frame, x)) cs.push_back(*c);
    std::sort(cs.begin(), cs.end(), [](const Chord& a, const Chord& b) { return a.lo < b.lo; });
    std::vector<Chord> merged;
    for (const Chord& c : cs) {
      if (!merged.empty() && c.lo <= merged.back().hi) {
        merged.back().hi = std::max(merged.back().hi, c.hi);
      } else {
        merged.push_back(c);
      }
    }
    return merged;
  }
};

inline SampledUnion union_of_translates(const ConvexPolygon& k, const PLContraction& phi, const Point2& u,
                                        std::size_t samples) {
  if (samples < 2) throw Error("union of translates needs at least two samples");
  const ChordFrame frame(u);
  double lo = INFINITY, hi = -INFINITY;
  for (const Point2& p : k.vertices()) {
    lo = std::min(lo, frame.along_u(p));
    hi = std::max(hi, frame.along_u(p));
  }
  SampledUnion out;
  out.u = frame.u;
  out.t_lo = lo;
  out.t_hi = hi;
  out.t_step = (hi - lo) / static_cast<double>(samples - 1);
  const ConvexPolygon mirrored = k.reflected(frame.u);
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = lo + static_cast<double>(j) * out.t_step;
    const ConvexPolygon down = k.translated(frame.u * (-t));
    const ConvexPolygon up = mirrored.translated(frame.u * t);
    std::vector<Point2> piece = clip_convex(down.vertices(), up);
    if (piece.size() < 3) continue;
    const Point2 shift = frame.u * phi(t);
    for (Point2& p : piece) p = p + shift;
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

/// Largest Hausdorff distance between the union's chord and the region's chord
/// over `x_samples` interior abscissae of omega. Chords of length at most two
/// t-steps that no sample reaches are skipped; any other empty chord gives +inf.
inline double chordwise_hausdorff(const SampledUnion& un, const ChordMovedRegion& r, std::size_t x_samples) {
  double worst = 0.0;
  for (std::size_t j = 1; j <= x_samples; ++j) {
    const double x = r.omega_lo + (r.omega_hi - r.omega_lo) * static_cast<double>(j) / static_cast<double>(x_samples + 1);
    const auto target = r.chord_at(x);
    if (!target) continue;
    const std::vector<Chord> got = un.chords_at(x);
    if (got.empty()) {
      if (target->length() <= 2.0 * un.t_step) continue;
      return std::numeric_limits<double>::infinity();
    }
    auto dist_to_target = [&](double s) {
      return s < target->lo ? target->lo - s : (s > target->hi ? s - target->hi : 0.0);
    };
    auto dist_to_union = [&](double s) {
      double d = INFINITY;
      for (const Chord& c : got) d = std::min(d, s < c.lo ? c.lo - s : (s > c.hi ? s - c.hi : 0.0));
      return d;
    };
    for (const Chord& c : got) worst = std::max({worst, dist_to_target(c.lo), dist_to_target(c.hi)});
    worst = std::max({worst, dist_to_union(target->lo), dist_to_union(target->hi)});
    for (std::size_t i = 0; i + 1 < got.size(); ++i) {
      const double gap_mid = 0.5 * (got[i].hi + got[i + 1].lo);
      if (gap_mid > target->lo && gap_mid < target->hi) worst = std::max(worst, dist_to_union(gap_mid));
    }
  }
  return worst;
}

}  // namespace symmkit
