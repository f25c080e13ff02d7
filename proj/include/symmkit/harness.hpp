#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symmkit/chord_maps.hpp"
#include "symmkit/contraction.hpp"
#include "symmkit/grid.hpp"
#include "symmkit/io.hpp"
#include "symmkit/polygon.hpp"
#include "symmkit/rearrangements.hpp"
#include "symmkit/sampling.hpp"

namespace symmkit::harness {

using nlohmann::json;
using sampling::Rng;

enum class Verdict { Holds, Fails, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

/// Outcome of one randomized property check.
///
/// A Fails verdict carries the offending inputs in `counterexample["inputs"]`
/// and the observed violation in `counterexample["violation"]`; `replay_*`
/// re-evaluates the property on those inputs.
struct PropertyReport {
  std::string property;
  Verdict verdict = Verdict::Holds;
  json counterexample;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string note;

  bool holds() const { return verdict == Verdict::Holds; }
  bool fails() const { return verdict == Verdict::Fails; }
};

inline json to_json(const PropertyReport& r) {
  json j{{"property", r.property}, {"verdict", to_string(r.verdict)}, {"trials", r.trials}, {"seed", r.seed}};
  if (!r.note.empty()) j["note"] = r.note;
  if (r.fails()) j["counterexample"] = r.counterexample;
  return j;
}

/// Grid and hyperplane the randomized checks run on.
///
/// The hyperplane must be axis-aligned, through a cell-boundary plane, with
/// H^+ on the increasing side of `axis()`. Set generators stay inside the
/// central `spread` fraction of the grid.
struct ProbeSpace {
  Grid grid;
  OrientedHyperplane plane;
  double spread = 0.33;

  std::size_t axis() const { return static_cast<std::size_t>(plane.aligned_axis()); }
  Point2 u() const { return axis() == 0 ? Point2{1.0, 0.0} : Point2{0.0, 1.0}; }

  /// Square grid of `cells` per side on [-half, half]^2; H = {y = 0} with H^+ = {y >= 0}.
  static ProbeSpace planar(std::size_t cells = 64, double half = 1.0) {
    return {Grid::centered({cells, cells}, 2.0 * half / static_cast<double>(cells)),
            OrientedHyperplane({0.0, 1.0}, 0.0, Orientation::Positive)};
  }
};

// ---------------------------------------------------------------------------
// Function-level measurements

/// (p-norm of a - b) in grid measure. Terms are summed in sorted order so that
/// equal multisets of differences give bit-identical norms.
inline double lp_distance(const GridFunction& a, const GridFunction& b, double p) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::abs(a[i] - b[i]);
  if (std::isinf(p)) return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  std::sort(d.begin(), d.end());
  double s = 0.0;
  for (double x : d) s += std::pow(x, p);
  return std::pow(s * a.grid().cell_volume(), 1.0 / p);
}

/// Modulus of continuity at every realized cell-center distance, as
/// (squared distance in cells, omega) with omega non-decreasing.
inline std::vector<std::pair<long long, double>> modulus_profile(const GridFunction& f) {
  const Grid& g = f.grid();
  const std::size_t n = g.dimension();
  std::array<long long, 3> ext{1, 1, 1};
  for (std::size_t k = 0; k < n; ++k) ext[k] = static_cast<long long>(g.dim(k));
  std::map<long long, double> best;
  for (long long o0 = 0; o0 < ext[0]; ++o0) {
    for (long long o1 = -(ext[1] - 1); o1 < ext[1]; ++o1) {
      for (long long o2 = -(ext[2] - 1); o2 < ext[2]; ++o2) {
        // Half of the offsets suffice: (o, -o) give the same pairs.
        if (o0 == 0 && (o1 < 0 || (o1 == 0 && o2 <= 0))) continue;
        const std::array<long long, 3> o{o0, o1, o2};
        double m = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Index idx = g.unflatten(i);
          Index jdx = idx;
          bool inside = true;
          for (std::size_t k = 0; k < 3; ++k) {
            const long long q = static_cast<long long>(idx[k]) + o[k];
            if (q < 0 || q >= ext[k]) {
              inside = false;
              break;
            }
            jdx[k] = static_cast<std::size_t>(q);
          }
          if (inside) m = std::max(m, std::abs(f[i] - f[g.flatten(jdx)]));
        }
        const long long d2 = o0 * o0 + o1 * o1 + o2 * o2;
        auto [it, fresh] = best.emplace(d2, m);
        if (!fresh) it->second = std::max(it->second, m);
      }
    }
  }
  std::vector<std::pair<long long, double>> out;
  double run = 0.0;
  for (const auto& [d2, m] : best) {
    run = std::max(run, m);
    out.emplace_back(d2, run);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-input property evaluators. Each returns the violation, or nullopt.

inline std::optional<json> equimeasurable_violation(const FunctionTransformer& t, const GridFunction& f) {
  const GridFunction tf = t(f);
  const DistributionProfile a = distribution(f);
  const DistributionProfile b = distribution(tf);
  if (a == b) return std::nullopt;
  for (const auto& e : a.entries())
    if (b.count_above(e.level) != e.count)
      return json{{"level", e.level}, {"count_before", e.count}, {"count_after", b.count_above(e.level)}};
  for (const auto& e : b.entries())
    if (a.count_above(e.level) != e.count)
      return json{{"level", e.level}, {"count_before", a.count_above(e.level)}, {"count_after", e.count}};
  return json{{"level", nullptr}};
}

inline std::optional<json> monotonic_violation(const FunctionTransformer& t, const GridFunction& f, const GridFunction& g) {
  const GridFunction tf = t(f);
  const GridFunction tg = t(g);
  for (std::size_t i = 0; i < tf.size(); ++i)
    if (tf[i] > tg[i]) return json{{"cell", i}, {"Tf", tf[i]}, {"Tg", tg[i]}};
  return std::nullopt;
}

inline std::optional<json> lp_violation(const FunctionTransformer& t, const GridFunction& f, const GridFunction& g, double p) {
  const double before = lp_distance(f, g, p);
  const double after = lp_distance(t(f), t(g), p);
  if (after <= before + 1e-12) return std::nullopt;
  return json{{"p", std::isinf(p) ? json("inf") : json(p)}, {"before", before}, {"after", after}};
}

inline std::optional<json> modulus_violation(const FunctionTransformer& t, const GridFunction& f) {
  const auto a = modulus_profile(f);
  const auto b = modulus_profile(t(f));
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (b[i].second > a[i].second + 1e-12)
      return json{{"distance_cells_sq", a[i].first}, {"omega_before", a[i].second}, {"omega_after", b[i].second}};
  return std::nullopt;
}

namespace detail {

inline std::optional<json> guarded(const std::function<std::optional<json>()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return json{{"error", e.what()}};
  }
}

inline PropertyReport run_trials(const std::string& name, std::size_t trials, std::uint64_t seed,
                                 const std::function<std::pair<json, std::optional<json>>(Rng&)>& trial) {
  PropertyReport r{name, Verdict::Holds, json(), trials, seed, ""};
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(sampling::trial_seed(seed, k));
    auto [inputs, violation] = trial(rng);
    if (violation) {
      r.verdict = Verdict::Fails;
      r.counterexample = json{{"trial", k}, {"inputs", std::move(inputs)}, {"violation", std::move(*violation)}};
      return r;
    }
  }
  return r;
}

/// A pair f <= g from the domain. Column-convex pairs lift f on a dilated copy of
/// its outer polygon, so every super-level set of g stays a convex raster.
inline std::pair<GridFunction, GridFunction> ordered_pair(Domain domain, const Grid& grid, Rng& rng) {
  if (domain == Domain::ColumnConvex) {
    const auto sample = sampling::random_column_convex_function(grid, rng);
    const ConvexPolygon big =
        sampling::scaled(sample.outer, sampling::vertex_centroid(sample.outer), sampling::uniform(rng, 1.0, 1.5));
    const GridSet lift = rasterize(big, grid);
    const int inc = sampling::uniform_int(rng, 1, 3);
    std::vector<double> v(sample.f.values().begin(), sample.f.values().end());
    for (std::size_t i = 0; i < v.size(); ++i)
      if (lift[i]) v[i] += inc;
    return {sample.f, GridFunction(grid, std::move(v))};
  }
  GridFunction f = sampling::random_blob_function(grid, rng);
  const GridFunction noise = sampling::random_blob_function(grid, rng, 0.6);
  std::vector<double> v(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += noise[i];
  return {std::move(f), GridFunction(grid, std::move(v))};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Function-property checks

inline PropertyReport check_equimeasurable(const FunctionTransformer& t, const ProbeSpace& space, std::size_t trials,
                                           std::uint64_t seed) {
  return detail::run_trials("equimeasurable", trials, seed, [&](Rng& rng) {
    const GridFunction f = sampling::random_function(t.domain, space.grid, rng);
    return std::make_pair(json{{"f", io::to_json(f)}}, detail::guarded([&] { return equimeasurable_violation(t, f); }));
  });
}

inline PropertyReport check_monotonic(const FunctionTransformer& t, const ProbeSpace& space, std::size_t trials,
                                      std::uint64_t seed) {
  return detail::run_trials("monotonic", trials, seed, [&](Rng& rng) {
    const auto [f, g] = detail::ordered_pair(t.domain, space.grid, rng);
    return std::make_pair(json{{"f", io::to_json(f)}, {"g", io::to_json(g)}},
                          detail::guarded([&] { return monotonic_violation(t, f, g); }));
  });
}

inline PropertyReport check_lp_contracting(const FunctionTransformer& t, double p, const ProbeSpace& space,
                                           std::size_t trials, std::uint64_t seed) {
  const std::string name = std::isinf(p) ? "lp-contracting(p=inf)" : "lp-contracting(p=" + std::to_string(static_cast<int>(p)) + ")";
  return detail::run_trials(name, trials, seed, [&](Rng& rng) {
    const GridFunction f = sampling::random_function(t.domain, space.grid, rng);
    const GridFunction g = sampling::random_function(t.domain, space.grid, rng);
    return std::make_pair(json{{"f", io::to_json(f)}, {"g", io::to_json(g)}, {"p", std::isinf(p) ? json("inf") : json(p)}},
                          detail::guarded([&] { return lp_violation(t, f, g, p); }));
  });
}

inline PropertyReport check_modulus_reducing(const FunctionTransformer& t, const ProbeSpace& space, std::size_t trials,
                                             std::uint64_t seed) {
  return detail::run_trials("modulus-reducing", trials, seed, [&](Rng& rng) {
    const GridFunction f = sampling::random_function(t.domain, space.grid, rng);
    return std::make_pair(json{{"f", io::to_json(f)}}, detail::guarded([&] { return modulus_violation(t, f); }));
  });
}

/// Re-evaluates a failed function-property report on its recorded inputs.
inline bool replay_violation(const PropertyReport& r, const FunctionTransformer& t) {
  if (!r.fails()) return false;
  const json& in = r.counterexample.at("inputs");
  const GridFunction f = io::grid_function_from_json(in.at("f"));
  std::optional<json> v;
  if (r.property == "equimeasurable") {
    v = detail::guarded([&] { return equimeasurable_violation(t, f); });
  } else if (r.property == "monotonic") {
    const GridFunction g = io::grid_function_from_json(in.at("g"));
    v = detail::guarded([&] { return monotonic_violation(t, f, g); });
  } else if (r.property.rfind("lp-contracting", 0) == 0) {
    const GridFunction g = io::grid_function_from_json(in.at("g"));
    const double p = in.at("p").is_string() ? INFINITY : in.at("p").get<double>();
    v = detail::guarded([&] { return lp_violation(t, f, g, p); });
  } else if (r.property == "modulus-reducing") {
    v = detail::guarded([&] { return modulus_violation(t, f); });
  } else {
    return false;
  }
  return v.has_value() && *v == r.counterexample.at("violation");
}

// ---------------------------------------------------------------------------
// Set-map properties

namespace props {
inline constexpr const char* monotonic = "monotonic";
inline constexpr const char* measure = "measure-preserving";
inline constexpr const char* symmetric = "invariant-on-H-symmetric-sets";
inline constexpr const char* cylinders = "invariant-on-H-symmetric-cylinders";
inline constexpr const char* balls = "maps-balls-to-balls";
inline constexpr const char* respects = "respects-H-cylinders";
inline constexpr const char* perimeter = "perimeter-preserving-on-convex-bodies";
inline constexpr const char* two_balls = "invariant-on-H-symmetric-two-ball-unions";
}  // namespace props

inline std::optional<json> set_monotonic_violation(const SetMap& d, const GridSet& a, const GridSet& b) {
  const GridSet da = d(a);
  const GridSet db = d(b);
  for (std::size_t i = 0; i < da.size(); ++i)
    if (da[i] && !db[i]) return json{{"cell", i}};
  return std::nullopt;
}

inline std::optional<json> set_measure_violation(const SetMap& d, const GridSet& a) {
  const GridSet da = d(a);
  if (da.count() == a.count()) return std::nullopt;
  return json{{"count_before", a.count()}, {"count_after", da.count()}};
}

inline std::optional<json> set_invariance_violation(const SetMap& d, const GridSet& a) {
  const GridSet da = d(a);
  for (std::size_t i = 0; i < da.size(); ++i)
    if (da[i] != a[i]) return json{{"cell", i}, {"before", a[i]}, {"after", da[i]}};
  return std::nullopt;
}

/// Per-axis minimum cell index of a non-empty set.
inline Index min_corner(const GridSet& a) {
  Index m{SIZE_MAX, SIZE_MAX, SIZE_MAX};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    const Index idx = a.grid().unflatten(i);
    for (std::size_t k = 0; k < 3; ++k) m[k] = std::min(m[k], idx[k]);
  }
  return m;
}

/// Lattice translation taking `from` onto `to`, if there is one.
inline std::optional<std::array<long long, 3>> lattice_translation(const GridSet& from, const GridSet& to) {
  if (from.count() != to.count() || from.empty()) return std::nullopt;
  const Grid& g = from.grid();
  const Index a = min_corner(from);
  const Index b = min_corner(to);
  std::array<long long, 3> v{0, 0, 0};
  for (std::size_t k = 0; k < g.dimension(); ++k) v[k] = static_cast<long long>(b[k]) - static_cast<long long>(a[k]);
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!from[i]) continue;
    Index idx = g.unflatten(i);
    for (std::size_t k = 0; k < g.dimension(); ++k) {
      const long long q = static_cast<long long>(idx[k]) + v[k];
      if (q < 0 || q >= static_cast<long long>(g.dim(k))) return std::nullopt;
      idx[k] = static_cast<std::size_t>(q);
    }
    if (!to[g.flatten(idx)]) return std::nullopt;
  }
  return v;
}

/// The image of a ball raster must be a lattice translate of it.
inline std::optional<json> set_ball_violation(const SetMap& d, const GridSet& ball) {
  const GridSet img = d(ball);
  if (lattice_translation(ball, img)) return std::nullopt;
  return json{{"count_before", ball.count()}, {"count_after", img.count()}};
}

/// Image must stay inside the bounding box of the projection of the input onto H.
inline std::optional<json> set_cylinder_violation(const SetMap& d, const GridSet& a, std::size_t axis) {
  const GridSet img = d(a);
  const Grid& g = a.grid();
  Index lo{SIZE_MAX, SIZE_MAX, SIZE_MAX}, hi{0, 0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    const Index idx = g.unflatten(i);
    for (std::size_t k = 0; k < g.dimension(); ++k) {
      lo[k] = std::min(lo[k], idx[k]);
      hi[k] = std::max(hi[k], idx[k]);
    }
  }
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!img[i]) continue;
    const Index idx = g.unflatten(i);
    for (std::size_t k = 0; k < g.dimension(); ++k)
      if (k != axis && (idx[k] < lo[k] || idx[k] > hi[k])) return json{{"cell", i}};
  }
  return std::nullopt;
}

inline std::optional<json> polygon_perimeter_violation(const PLContraction& phi, const ConvexPolygon& k, const Point2& u) {
  const double before = k.perimeter();
  const double after = perimeter_region(chord_move_polygon(k, phi, u));
  if (std::abs(after - before) <= 1e-9) return std::nullopt;
  return json{{"perimeter_before", before}, {"perimeter_after", after}};
}

/// Grid route: lattice-aligned boxes, whose raster perimeter is their exact perimeter.
inline std::optional<json> grid_perimeter_violation(const SetMap& d, const GridSet& box) {
  const GridSet img = d(box);
  if (img.boundary_faces() == box.boundary_faces()) return std::nullopt;
  return json{{"perimeter_before", box.perimeter()}, {"perimeter_after", img.perimeter()}};
}

namespace detail {

inline GridSet random_domain_set(const SetMap& d, const ProbeSpace& s, Rng& rng) {
  if (d.domain == Domain::ColumnConvex) return rasterize(sampling::random_grid_polygon(s.grid, rng, s.spread), s.grid);
  return sampling::random_blob_set(s.grid, rng, s.spread);
}

inline std::pair<GridSet, GridSet> random_nested_pair(const SetMap& d, const ProbeSpace& s, Rng& rng) {
  if (d.domain == Domain::ColumnConvex) {
    const ConvexPolygon k = sampling::random_grid_polygon(s.grid, rng, s.spread);
    const ConvexPolygon big = sampling::scaled(k, sampling::vertex_centroid(k), sampling::uniform(rng, 1.05, 1.6));
    return {rasterize(k, s.grid), rasterize(big, s.grid)};
  }
  const GridSet a = sampling::random_blob_set(s.grid, rng, s.spread);
  return {a, a.united(sampling::random_blob_set(s.grid, rng, s.spread))};
}

inline GridSet random_symmetric_set(const SetMap& d, const ProbeSpace& s, Rng& rng) {
  GridSet a(s.grid);
  if (d.domain == Domain::ColumnConvex) {
    const double e = sampling::half_extent(s.grid, 0) * s.spread;
    const ConvexPolygon k = sampling::random_h_symmetric_polygon(rng, sampling::uniform(rng, -0.5 * e, 0.5 * e), 0.2 * e, 0.5 * e);
    a = rasterize(k, s.grid);
  } else {
    a = sampling::random_blob_set(s.grid, rng, s.spread);
  }
  return a.united(reflect_grid_set(a, s.plane));
}

/// Lattice box symmetric about H: [x - r, x + r] along H times [-h, h] along u.
inline GridSet random_symmetric_cylinder(const ProbeSpace& s, Rng& rng) {
  const Grid& g = s.grid;
  const std::size_t ax = s.axis();
  Vec lo(g.dimension()), hi(g.dimension());
  for (std::size_t k = 0; k < g.dimension(); ++k) {
    const double e = sampling::half_extent(g, k) * s.spread;
    if (k == ax) {
      const double half = sampling::snap(g, k, g.axis_midpoint(k) + sampling::uniform(rng, 2.0 * g.spacing(), e)) - g.axis_midpoint(k);
      lo[k] = g.axis_midpoint(k) - half;
      hi[k] = g.axis_midpoint(k) + half;
    } else {
      const double c = g.axis_midpoint(k) + sampling::uniform(rng, -0.5 * e, 0.5 * e);
      const double r = sampling::uniform(rng, 2.0 * g.spacing(), 0.5 * e);
      lo[k] = sampling::snap(g, k, c - r);
      hi[k] = sampling::snap(g, k, c + r);
    }
  }
  return sampling::box_raster(g, lo, hi);
}

/// Disk raster centred on a lattice corner, radius a whole number (>= 4) of cells.
inline GridSet random_ball(const ProbeSpace& s, Rng& rng) {
  const Grid& g = s.grid;
  const double r = g.spacing() * sampling::uniform_int(rng, 4, 8);
  Vec c(g.dimension());
  for (std::size_t k = 0; k < g.dimension(); ++k) {
    const double e = sampling::half_extent(g, k) * s.spread;
    c[k] = sampling::snap(g, k, g.axis_midpoint(k) + sampling::uniform(rng, -e, e));
  }
  return sampling::disk_raster(g, c, r);
}

/// Union of two disjoint lattice disks mirrored in H.
inline GridSet random_two_ball_union(const ProbeSpace& s, Rng& rng) {
  const Grid& g = s.grid;
  const std::size_t ax = s.axis();
  const int rc = sampling::uniform_int(rng, 4, 7);
  const double r = g.spacing() * rc;
  Vec c(g.dimension());
  for (std::size_t k = 0; k < g.dimension(); ++k) {
    const double e = sampling::half_extent(g, k) * s.spread;
    c[k] = sampling::snap(g, k, g.axis_midpoint(k) + sampling::uniform(rng, -e, e));
  }
  const double offset = g.spacing() * sampling::uniform_int(rng, rc + 1, rc + 10);
  c[ax] = g.axis_midpoint(ax) + offset;
  Vec m = c;
  m[ax] = g.axis_midpoint(ax) - offset;
  return sampling::disk_raster(g, c, r).united(sampling::disk_raster(g, m, r));
}

/// Lattice box anywhere in the central 90% of the grid.
inline GridSet random_lattice_box(const ProbeSpace& s, Rng& rng) {
  const Grid& g = s.grid;
  Vec lo(g.dimension()), hi(g.dimension());
  for (std::size_t k = 0; k < g.dimension(); ++k) {
    const double e = sampling::half_extent(g, k) * 0.9;
    const double a = sampling::uniform(rng, -e, e);
    const double b = sampling::uniform(rng, -e, e);
    lo[k] = sampling::snap(g, k, g.axis_midpoint(k) + std::min(a, b));
    hi[k] = sampling::snap(g, k, g.axis_midpoint(k) + std::max(a, b));
    if (hi[k] - lo[k] < 2.0 * g.spacing()) hi[k] = lo[k] + 2.0 * g.spacing();
  }
  return sampling::box_raster(g, lo, hi);
}

inline json set_json(const GridSet& a) { return io::to_json(a.indicator()); }

}  // namespace detail

/// Reports for the seven set properties plus invariance on H-symmetric two-ball unions.
struct SetMapReport {
  std::string map;
  std::vector<PropertyReport> reports;

  const PropertyReport& at(const std::string& property) const {
    for (const auto& r : reports)
      if (r.property == property) return r;
    throw Error("no report for property " + property);
  }

  /// True when every applicable property in `names` holds.
  bool all_hold(const std::vector<std::string>& names) const {
    for (const auto& n : names)
      if (at(n).fails()) return false;
    return true;
  }
};

inline std::vector<std::string> seven_set_properties() {
  return {props::monotonic, props::measure, props::symmetric, props::cylinders, props::balls, props::respects,
          props::perimeter};
}

inline json to_json(const SetMapReport& r) {
  json a = json::array();
  for (const auto& p : r.reports) a.push_back(to_json(p));
  return json{{"map", r.map}, {"properties", a}};
}

inline SetMapReport check_setmap_properties(const SetMap& d, const ProbeSpace& s, std::size_t trials, std::uint64_t seed) {
  using detail::guarded;
  using detail::set_json;
  SetMapReport out{d.name, {}};
  const std::size_t ax = s.axis();

  out.reports.push_back(detail::run_trials(props::monotonic, trials, seed, [&](Rng& rng) {
    const auto [a, b] = detail::random_nested_pair(d, s, rng);
    return std::make_pair(json{{"A", set_json(a)}, {"B", set_json(b)}},
                          guarded([&] { return set_monotonic_violation(d, a, b); }));
  }));
  out.reports.push_back(detail::run_trials(props::measure, trials, seed + 1, [&](Rng& rng) {
    const GridSet a = detail::random_domain_set(d, s, rng);
    return std::make_pair(json{{"A", set_json(a)}}, guarded([&] { return set_measure_violation(d, a); }));
  }));
  out.reports.push_back(detail::run_trials(props::symmetric, trials, seed + 2, [&](Rng& rng) {
    const GridSet a = detail::random_symmetric_set(d, s, rng);
    return std::make_pair(json{{"A", set_json(a)}}, guarded([&] { return set_invariance_violation(d, a); }));
  }));
  out.reports.push_back(detail::run_trials(props::cylinders, trials, seed + 3, [&](Rng& rng) {
    const GridSet a = detail::random_symmetric_cylinder(s, rng);
    return std::make_pair(json{{"A", set_json(a)}}, guarded([&] { return set_invariance_violation(d, a); }));
  }));
  out.reports.push_back(detail::run_trials(props::balls, trials, seed + 4, [&](Rng& rng) {
    const GridSet a = detail::random_ball(s, rng);
    return std::make_pair(json{{"A", set_json(a)}}, guarded([&] { return set_ball_violation(d, a); }));
  }));
  out.reports.push_back(detail::run_trials(props::respects, trials, seed + 5, [&](Rng& rng) {
    const GridSet a = detail::random_domain_set(d, s, rng);
    return std::make_pair(json{{"A", set_json(a)}, {"axis", ax}}, guarded([&] { return set_cylinder_violation(d, a, ax); }));
  }));
  if (d.chord_model) {
    const PLContraction phi = *d.chord_model;
    const Point2 u = s.u();
    PropertyReport r = detail::run_trials(props::perimeter, trials, seed + 6, [&](Rng& rng) {
      const ConvexPolygon k = sampling::random_convex_polygon(rng, {sampling::uniform(rng, -1.0, 1.0), sampling::uniform(rng, -1.0, 1.0)}, 0.2, 1.5);
      return std::make_pair(json{{"polygon", io::to_json(k)}, {"u", {u.x, u.y}}, {"contraction", io::to_json(phi)}},
                            guarded([&] { return polygon_perimeter_violation(phi, k, u); }));
    });
    r.note = "exact polygon route through the chord model";
    out.reports.push_back(std::move(r));
  } else {
    PropertyReport r = detail::run_trials(props::perimeter, trials, seed + 6, [&](Rng& rng) {
      const GridSet a = detail::random_lattice_box(s, rng);
      return std::make_pair(json{{"A", set_json(a)}}, guarded([&] { return grid_perimeter_violation(d, a); }));
    });
    r.note = "grid route on lattice boxes";
    out.reports.push_back(std::move(r));
  }
  if (d.domain == Domain::General) {
    out.reports.push_back(detail::run_trials(props::two_balls, trials, seed + 7, [&](Rng& rng) {
      const GridSet a = detail::random_two_ball_union(s, rng);
      return std::make_pair(json{{"A", set_json(a)}}, guarded([&] { return set_invariance_violation(d, a); }));
    }));
  } else {
    out.reports.push_back({props::two_balls, Verdict::NotApplicable, json(), 0, seed + 7,
                           "two-ball unions have split columns, outside the map's domain"});
  }
  return out;
}

/// Re-evaluates a failed set-property report on its recorded inputs.
inline bool replay_violation(const PropertyReport& r, const SetMap& d) {
  if (!r.fails()) return false;
  const json& in = r.counterexample.at("inputs");
  auto load = [&](const char* key) { return io::to_set(io::grid_function_from_json(in.at(key))); };
  std::optional<json> v;
  if (r.property == props::monotonic) {
    const GridSet a = load("A"), b = load("B");
    v = detail::guarded([&] { return set_monotonic_violation(d, a, b); });
  } else if (r.property == props::measure) {
    const GridSet a = load("A");
    v = detail::guarded([&] { return set_measure_violation(d, a); });
  } else if (r.property == props::symmetric || r.property == props::cylinders || r.property == props::two_balls) {
    const GridSet a = load("A");
    v = detail::guarded([&] { return set_invariance_violation(d, a); });
  } else if (r.property == props::balls) {
    const GridSet a = load("A");
    v = detail::guarded([&] { return set_ball_violation(d, a); });
  } else if (r.property == props::respects) {
    const GridSet a = load("A");
    const auto ax = in.at("axis").get<std::size_t>();
    v = detail::guarded([&] { return set_cylinder_violation(d, a, ax); });
  } else if (r.property == props::perimeter) {
    if (in.contains("polygon")) {
      const ConvexPolygon k = io::polygon_from_json(in.at("polygon"));
      const PLContraction phi = io::contraction_from_json(in.at("contraction"));
      const Point2 u{in.at("u").at(0).get<double>(), in.at("u").at(1).get<double>()};
      v = detail::guarded([&] { return polygon_perimeter_violation(phi, k, u); });
    } else {
      const GridSet a = load("A");
      v = detail::guarded([&] { return grid_perimeter_violation(d, a); });
    }
  } else {
    return false;
  }
  return v.has_value() && *v == r.counterexample.at("violation");
}

// ---------------------------------------------------------------------------
// Classification

struct Classification {
  std::string label;  // "Id", "dagger", "P_H", "P_H_dagger" or "other"
  json witness;
  std::vector<std::pair<double, double>> phi_samples;  // (t, phi(t)) read off ball displacements
  bool eikonal_on_probes = false;
  std::optional<bool> two_ball_invariant;
};

inline json to_json(const Classification& c) {
  json samples = json::array();
  for (const auto& [t, p] : c.phi_samples) samples.push_back({t, p});
  json j{{"label", c.label}, {"phi_samples", samples}, {"eikonal_on_probes", c.eikonal_on_probes}};
  if (c.two_ball_invariant) j["two_ball_invariant"] = *c.two_ball_invariant;
  if (!c.witness.is_null()) j["witness"] = c.witness;
  return j;
}

/// Decides which of Id, dagger, P_H, P_H^dagger a rearrangement equals on the probe space.
///
/// The displacement of ball rasters centred at x + t u gives samples of the
/// contraction phi; those pick a canonical candidate, which must then agree
/// with T on random probe functions (and, for general domains, on a two-ball
/// union). Throws NotARearrangement when T is not equimeasurable and monotonic.
inline Classification classify_rearrangement(const FunctionTransformer& t, const ProbeSpace& s, std::size_t trials,
                                             std::uint64_t seed) {
  const PropertyReport eq = check_equimeasurable(t, s, trials, seed);
  const PropertyReport mono = check_monotonic(t, s, trials, seed + 1);
  if (!eq.holds() || !mono.holds())
    throw NotARearrangement(t.name + " is not " + (eq.holds() ? "monotonic" : "equimeasurable"));

  const SetMap d = induced_set_map(t);
  const Grid& g = s.grid;
  const std::size_t ax = s.axis();
  const double h = g.spacing();
  const double ext = sampling::half_extent(g, ax);
  const double radius = 6.0 * h;
  Classification out;

  // Probe offsets: multiples of ext/8 in [-0.75 ext, 0.75 ext], snapped to the lattice.
  std::vector<double> probes;
  for (int k = -6; k <= 6; ++k) probes.push_back(sampling::snap(g, ax, g.axis_midpoint(ax) + ext * k / 8.0) - g.axis_midpoint(ax));
  for (double tp : probes) {
    Vec c(g.dimension());
    for (std::size_t k = 0; k < g.dimension(); ++k) c[k] = g.axis_midpoint(k);
    c[ax] += tp;
    const GridSet ball = sampling::disk_raster(g, c, radius);
    GridSet img(g);
    try {
      img = d(ball);
    } catch (const Error& e) {
      out.label = "other";
      out.witness = json{{"probe_t", tp}, {"error", e.what()}};
      return out;
    }
    const auto v = lattice_translation(ball, img);
    bool along_u_only = v.has_value();
    if (v)
      for (std::size_t k = 0; k < g.dimension(); ++k)
        if (k != ax && (*v)[k] != 0) along_u_only = false;
    if (!along_u_only) {
      out.label = "other";
      out.witness = json{{"probe_t", tp}, {"reason", "ball raster not mapped to a translate along u"},
                         {"ball", detail::set_json(ball)}, {"image", detail::set_json(img)}};
      return out;
    }
    out.phi_samples.emplace_back(tp, tp + static_cast<double>((*v)[ax]) * h);
  }

  out.eikonal_on_probes = true;
  for (std::size_t i = 0; i + 1 < out.phi_samples.size(); ++i) {
    const double dt = out.phi_samples[i + 1].first - out.phi_samples[i].first;
    const double dp = out.phi_samples[i + 1].second - out.phi_samples[i].second;
    if (std::abs(std::abs(dp) - dt) > 0.5 * h) out.eikonal_on_probes = false;
  }

  struct Candidate {
    const char* label;
    double (*phi)(double);
    FunctionTransformer transformer;
  };
  const std::vector<Candidate> candidates{
      {"Id", [](double x) { return x; }, identity_transformer()},
      {"dagger", [](double x) { return -x; }, reflection_transformer(s.plane)},
      {"P_H", [](double x) { return std::abs(x); }, polarization_transformer(s.plane)},
      {"P_H_dagger", [](double x) { return -std::abs(x); }, reflected_polarization_transformer(s.plane)},
  };
  const Candidate* match = nullptr;
  for (const auto& cand : candidates) {
    bool ok = true;
    for (const auto& [tp, ph] : out.phi_samples)
      if (std::abs(cand.phi(tp) - ph) > 0.5 * h) ok = false;
    if (ok) {
      match = &cand;
      break;
    }
  }
  if (!match) {
    // Witness: the probe where the observed displacement is furthest from every canonical value.
    std::size_t worst = 0;
    double worst_gap = -1.0;
    for (std::size_t i = 0; i < out.phi_samples.size(); ++i) {
      const auto [tp, ph] = out.phi_samples[i];
      double gap = INFINITY;
      for (const auto& cand : candidates) gap = std::min(gap, std::abs(cand.phi(tp) - ph));
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = i;
      }
    }
    const auto [tp, ph] = out.phi_samples[worst];
    out.label = "other";
    out.witness = json{{"reason", "displaced ball raster matches no canonical map"},
                       {"probe_t", tp},
                       {"observed_phi", ph},
                       {"canonical_phi", {tp, -tp, std::abs(tp), -std::abs(tp)}},
                       {"ball_radius", radius}};
    return out;
  }

  std::vector<GridFunction> probe_functions;
  if (t.domain == Domain::General) {
    Rng rng(sampling::trial_seed(seed, 1u << 20));
    const GridSet pair = detail::random_two_ball_union(s, rng);
    const bool invariant = !set_invariance_violation(d, pair).has_value();
    out.two_ball_invariant = invariant;
    probe_functions.push_back(pair.indicator());
  }
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(sampling::trial_seed(seed + 2, k));
    probe_functions.push_back(sampling::random_function(t.domain, g, rng));
  }
  for (const GridFunction& f : probe_functions) {
    const GridFunction got = t(f);
    const GridFunction want = match->transformer(f);
    if (!(got == want)) {
      out.label = "other";
      out.witness = json{{"reason", std::string("differs from ") + match->label + " on a probe function"},
                         {"f", io::to_json(f)}};
      return out;
    }
  }
  out.label = match->label;
  return out;
}

}  // namespace symmkit::harness
