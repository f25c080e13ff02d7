#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symmkit/contraction.hpp"
#include "symmkit/errors.hpp"
#include "symmkit/grid.hpp"
#include "symmkit/hyperplane.hpp"

namespace symmkit {

/// Which inputs a map accepts. Chord-movement maps only see sets whose columns are single runs.
enum class Domain { General, ColumnConvex };

/// A map GridFunction -> GridFunction on one grid.
struct FunctionTransformer {
  std::string name;
  std::function<GridFunction(const GridFunction&)> apply;
  Domain domain = Domain::General;

  GridFunction operator()(const GridFunction& f) const { return apply(f); }
};

/// A map GridSet -> GridSet preserving the grid.
///
/// `chord_model`, when present, is the contraction whose chord movement the map
/// realizes on convex bodies; polygon-exact checks use it.
struct SetMap {
  std::string name;
  std::function<GridSet(const GridSet&)> apply;
  Domain domain = Domain::General;
  std::optional<PLContraction> chord_model;

  GridSet operator()(const GridSet& a) const { return apply(a); }
};

// ---------------------------------------------------------------------------
// Polarization

/// P_H f: max(f, f^dagger) on H^+, min(f, f^dagger) on H^-. Centers on H keep f.
inline GridFunction polarize(const GridFunction& f, const OrientedHyperplane& h) {
  const ReflectionPlan plan = plan_reflection(f.grid(), h);
  const double fill = f.essinf();
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = plan.partner[i];
    const double mirror = p == ReflectionPlan::outside ? fill : f[static_cast<std::size_t>(p)];
    if (plan.side[i] > 0) {
      out[i] = std::max(f[i], mirror);
    } else if (plan.side[i] < 0) {
      out[i] = std::min(f[i], mirror);
    } else {
      out[i] = f[i];
    }
  }
  return GridFunction(f.grid(), std::move(out));
}

/// P_H A, defined through 1_{P_H A} = P_H 1_A.
inline GridSet polarize_set(const GridSet& a, const OrientedHyperplane& h) {
  const GridFunction p = polarize(a.indicator(), h);
  return GridSet::from_predicate(a.grid(), [&](std::size_t i) { return p[i] == 1.0; });
}

// ---------------------------------------------------------------------------
// Steiner and Schwarz symmetrization

/// Cell positions of a column of length `len`, in the order they are filled:
/// the middle cell first (odd length), then alternating sides starting on the
/// increasing-index side.
inline std::vector<std::size_t> centered_fill_order(std::size_t len) {
  std::vector<std::size_t> order;
  order.reserve(len);
  if (len == 0) return order;
  if (len % 2 == 1) {
    const std::size_t m = len / 2;
    order.push_back(m);
    for (std::size_t d = 1; d <= m; ++d) {
      order.push_back(m + d);
      order.push_back(m - d);
    }
  } else {
    const std::size_t m = len / 2;
    for (std::size_t d = 0; d < m; ++d) {
      order.push_back(m + d);
      order.push_back(m - 1 - d);
    }
  }
  return order;
}

/// Steiner symmetral about the mid-plane orthogonal to `axis`: every column
/// along `axis` becomes its symmetric-decreasing rearrangement.
inline GridFunction steiner_symmetrize_function(const GridFunction& f, std::size_t axis) {
  const Grid& g = f.grid();
  if (axis >= g.dimension()) throw Error("steiner axis out of range");
  const std::size_t len = g.dim(axis);
  const std::size_t st = g.stride(axis);
  const std::vector<std::size_t> order = centered_fill_order(len);
  std::vector<double> out(f.size());
  std::vector<double> column(len);
  g.for_each_column(axis, [&](std::size_t first) {
    for (std::size_t j = 0; j < len; ++j) column[j] = f[first + j * st];
    std::sort(column.begin(), column.end(), std::greater<>());
    for (std::size_t j = 0; j < len; ++j) out[first + order[j] * st] = column[j];
  });
  return GridFunction(g, std::move(out));
}

inline GridSet steiner_symmetrize_set(const GridSet& a, std::size_t axis) {
  const GridFunction s = steiner_symmetrize_function(a.indicator(), axis);
  return GridSet::from_predicate(a.grid(), [&](std::size_t i) { return s[i] == 1.0; });
}

/// Offsets (within a plane orthogonal to `axis`) ordered by distance from the
/// plane's center, ties broken by flat index. Returned as flat offsets from the
/// plane's first cell.
inline std::vector<std::size_t> disk_fill_order(const Grid& g, std::size_t axis) {
  std::vector<std::pair<long long, std::size_t>> keyed;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index idx = g.unflatten(i);
    if (idx[axis] != 0) continue;
    long long d2 = 0;
    for (std::size_t k = 0; k < g.dimension(); ++k) {
      if (k == axis) continue;
      // Doubled index coordinates keep the center on an integer lattice.
      const long long c = 2 * static_cast<long long>(idx[k]) - (static_cast<long long>(g.dim(k)) - 1);
      d2 += c * c;
    }
    keyed.emplace_back(d2, i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& kv : keyed) order.push_back(kv.second);
  return order;
}

/// Schwarz symmetral about the coordinate line `axis` through the grid center
/// (three-dimensional grids): each plane orthogonal to the line is rearranged
/// into a centered quasi-disk, larger values closer to the line.
inline GridFunction schwarz_symmetrize_function(const GridFunction& f, std::size_t axis) {
  const Grid& g = f.grid();
  if (g.dimension() != 3) throw Error("schwarz symmetrization needs a three-dimensional grid");
  if (axis >= 3) throw Error("schwarz axis out of range");
  const std::vector<std::size_t> order = disk_fill_order(g, axis);
  const std::size_t st = g.stride(axis);
  std::vector<double> out(f.size());
  std::vector<double> plane(order.size());
  for (std::size_t layer = 0; layer < g.dim(axis); ++layer) {
    const std::size_t base = layer * st;
    for (std::size_t j = 0; j < order.size(); ++j) plane[j] = f[base + order[j]];
    std::sort(plane.begin(), plane.end(), std::greater<>());
    for (std::size_t j = 0; j < order.size(); ++j) out[base + order[j]] = plane[j];
  }
  return GridFunction(g, std::move(out));
}

inline GridSet schwarz_symmetrize_set(const GridSet& a, std::size_t axis) {
  const GridFunction s = schwarz_symmetrize_function(a.indicator(), axis);
  return GridSet::from_predicate(a.grid(), [&](std::size_t i) { return s[i] == 1.0; });
}

// ---------------------------------------------------------------------------
// Pointwise maps

enum class ValueDomain { Reals, NonNegative };

/// Functions F^+, F^- associated with a map that is pointwise with respect to H.
struct AssociatedFunctionPair {
  std::string name;
  std::function<double(double, double)> plus;
  std::function<double(double, double)> minus;
  ValueDomain domain = ValueDomain::Reals;
};

namespace pairs {

inline AssociatedFunctionPair polarization() {
  return {"polarization", [](double r, double s) { return std::max(r, s); },
          [](double r, double s) { return std::min(r, s); }};
}

inline AssociatedFunctionPair reversed_polarization() {
  return {"reversed-polarization", [](double r, double s) { return std::min(r, s); },
          [](double r, double s) { return std::max(r, s); }};
}

inline AssociatedFunctionPair first_projection() {
  return {"first-projection", [](double r, double) { return r; }, [](double r, double) { return r; }};
}

inline AssociatedFunctionPair second_projection() {
  return {"second-projection", [](double, double s) { return s; }, [](double, double s) { return s; }};
}

inline AssociatedFunctionPair arithmetic_mean() {
  return {"arithmetic-mean", [](double r, double s) { return 0.5 * (r + s); },
          [](double r, double s) { return 0.5 * (r + s); }};
}

inline AssociatedFunctionPair max_max() {
  return {"max-max", [](double r, double s) { return std::max(r, s); },
          [](double r, double s) { return std::max(r, s); }};
}

/// Keeps f on H^+ while the mirror value is below `threshold`, otherwise takes
/// the mirror value; F^- is the complementary choice. Equimeasurable but not monotonic.
inline AssociatedFunctionPair threshold_switch(double threshold) {
  return {"threshold-switch", [threshold](double r, double s) { return s < threshold ? r : s; },
          [threshold](double r, double s) { return r < threshold ? r : s; }};
}

}  // namespace pairs

inline std::vector<AssociatedFunctionPair> pair_catalog() {
  return {pairs::polarization(),   pairs::reversed_polarization(), pairs::first_projection(),
          pairs::second_projection(), pairs::arithmetic_mean(),     pairs::max_max(),
          pairs::threshold_switch(4.5)};
}

inline AssociatedFunctionPair associated_pair(const std::string& name) {
  for (auto& p : pair_catalog())
    if (p.name == name) return p;
  throw UnknownName("unknown associated function pair '" + name + "'");
}

/// T f = F^+(f, f^dagger) on H^+ and F^-(f, f^dagger) on H^-.
inline FunctionTransformer build_pointwise_map(const AssociatedFunctionPair& fp, const OrientedHyperplane& h) {
  auto plus = fp.plus;
  auto minus = fp.minus;
  return {"pointwise:" + fp.name, [plus, minus, h](const GridFunction& f) {
            const ReflectionPlan plan = plan_reflection(f.grid(), h);
            const double fill = f.essinf();
            std::vector<double> out(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) {
              const auto p = plan.partner[i];
              const double mirror = p == ReflectionPlan::outside ? fill : f[static_cast<std::size_t>(p)];
              out[i] = plan.side[i] < 0 ? minus(f[i], mirror) : plus(f[i], mirror);
            }
            return GridFunction(f.grid(), std::move(out));
          }};
}

struct FValuesCheck {
  bool holds = true;
  std::optional<std::pair<double, double>> violation;
};

/// Checks {F^+(r,s), F^-(s,r)} = {r,s} as multisets over the sampled pairs.
inline FValuesCheck check_fvalues(const AssociatedFunctionPair& fp, const std::vector<std::pair<double, double>>& samples) {
  for (const auto& [r, s] : samples) {
    double a = fp.plus(r, s);
    double b = fp.minus(s, r);
    if (a > b) std::swap(a, b);
    const double lo = std::min(r, s);
    const double hi = std::max(r, s);
    if (a != lo || b != hi) return {false, std::make_pair(r, s)};
  }
  return {};
}

/// All ordered pairs of values taken by a function.
inline std::vector<std::pair<double, double>> value_pairs(const GridFunction& f) {
  const std::vector<double> lv = f.levels();
  std::vector<std::pair<double, double>> out;
  out.reserve(lv.size() * lv.size());
  for (double r : lv)
    for (double s : lv) out.emplace_back(r, s);
  return out;
}

// ---------------------------------------------------------------------------
// Catalogued transformers and set maps

inline FunctionTransformer identity_transformer() {
  return {"identity", [](const GridFunction& f) { return f; }};
}

inline FunctionTransformer reflection_transformer(const OrientedHyperplane& h) {
  return {"reflection", [h](const GridFunction& f) { return reflect_grid_function(f, h); }};
}

inline FunctionTransformer polarization_transformer(const OrientedHyperplane& h) {
  return {"polarization", [h](const GridFunction& f) { return polarize(f, h); }};
}

/// dagger composed with P_H.
inline FunctionTransformer reflected_polarization_transformer(const OrientedHyperplane& h) {
  return {"reflected-polarization", [h](const GridFunction& f) { return reflect_grid_function(polarize(f, h), h); }};
}

inline SetMap identity_set_map() {
  return {"identity", [](const GridSet& a) { return a; }, Domain::General, canonical_contraction("id")};
}

inline SetMap reflection_set_map(const OrientedHyperplane& h) {
  return {"reflection", [h](const GridSet& a) { return reflect_grid_set(a, h); }, Domain::General,
          canonical_contraction("neg")};
}

inline SetMap polarization_set_map(const OrientedHyperplane& h) {
  return {"polarization", [h](const GridSet& a) { return polarize_set(a, h); }, Domain::General,
          canonical_contraction("abs")};
}

inline SetMap reflected_polarization_set_map(const OrientedHyperplane& h) {
  return {"reflected-polarization", [h](const GridSet& a) { return reflect_grid_set(polarize_set(a, h), h); },
          Domain::General, canonical_contraction("negabs")};
}

/// The set map induced by T: A -> {x : T 1_A (x) = 1}.
inline SetMap induced_set_map(const FunctionTransformer& t) {
  return {"induced:" + t.name,
          [t](const GridSet& a) {
            const GridFunction image = t(a.indicator());
            return GridSet::from_predicate(a.grid(), [&](std::size_t i) { return image[i] == 1.0; });
          },
          t.domain, std::nullopt};
}

enum class LevelSets { Closed, Open };

/// Rebuilds T f from the images of the super-level sets of f.
///
/// Closed: T f(x) = max{ t > essinf f : x in D{f >= t} } over the values t of f.
/// Open:   T f(x) = max{ v_k : x in D{f > v_(k-1)} } over consecutive values.
/// Either way the result defaults to essinf f where no level applies.
inline GridFunction layer_cake_rearrangement(const SetMap& d, const GridFunction& f, LevelSets kind = LevelSets::Closed) {
  const std::vector<double> lv = f.levels();
  std::vector<double> out(f.size(), lv.front());
  for (std::size_t k = 1; k < lv.size(); ++k) {
    const GridSet src = kind == LevelSets::Closed ? level_set(f, lv[k]) : level_set(f, lv[k - 1], true);
    const GridSet img = d(src);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (img[i]) out[i] = std::max(out[i], lv[k]);
  }
  return GridFunction(f.grid(), std::move(out));
}

inline FunctionTransformer layer_cake_transformer(const SetMap& d, LevelSets kind = LevelSets::Closed) {
  return {"layer-cake:" + d.name, [d, kind](const GridFunction& f) { return layer_cake_rearrangement(d, f, kind); },
          d.domain};
}

/// Pointwise composition phi o f.
inline GridFunction compose_monotone(const GridFunction& f, const MonotoneMap& phi) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = phi(f[i]);
  return GridFunction(f.grid(), std::move(out));
}

}  // namespace symmkit
