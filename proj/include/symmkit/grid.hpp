#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "symmkit/errors.hpp"
#include "symmkit/hyperplane.hpp"

namespace symmkit {

using Index = std::array<std::size_t, 3>;

/// Regular axis-aligned grid of n <= 3 dimensions with uniform spacing.
///
/// Cell i along axis k covers [origin_k + i h, origin_k + (i+1) h]; values are
/// stored row-major, the last axis varying fastest.
class Grid {
 public:
  Grid(std::vector<std::size_t> dims, Vec origin, double spacing)
      : dims_(std::move(dims)), origin_(std::move(origin)), spacing_(spacing) {
    if (dims_.empty() || dims_.size() > 3) throw Error("grid must have 1 to 3 axes");
    if (origin_.size() != dims_.size()) throw Error("grid origin dimension mismatch");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw Error("grid spacing must be positive");
    for (std::size_t d : dims_)
      if (d == 0) throw Error("grid dims must be positive");
    for (double o : origin_)
      if (!std::isfinite(o)) throw Error("grid origin must be finite");
    size_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
    strides_.fill(0);
    std::size_t s = 1;
    for (std::size_t k = dims_.size(); k-- > 0;) {
      strides_[k] = s;
      s *= dims_[k];
    }
  }

  /// Grid of the given shape centered on the origin.
  static Grid centered(std::vector<std::size_t> dims, double spacing) {
    Vec origin(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) origin[k] = -0.5 * static_cast<double>(dims[k]) * spacing;
    return Grid(std::move(dims), std::move(origin), spacing);
  }

  std::size_t dimension() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  const Vec& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

  double cell_volume() const { return std::pow(spacing_, static_cast<double>(dims_.size())); }
  double total_measure() const { return static_cast<double>(size_) * cell_volume(); }

  Index unflatten(std::size_t flat) const {
    Index idx{0, 0, 0};
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      idx[k] = flat / strides_[k];
      flat %= strides_[k];
    }
    return idx;
  }

  std::size_t flatten(const Index& idx) const {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) flat += idx[k] * strides_[k];
    return flat;
  }

  double center_coord(std::size_t axis, std::size_t i) const {
    return origin_[axis] + (static_cast<double>(i) + 0.5) * spacing_;
  }

  Vec center(std::size_t flat) const {
    const Index idx = unflatten(flat);
    Vec c(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) c[k] = center_coord(k, idx[k]);
    return c;
  }

  /// Coordinate of the mid-plane of the grid along an axis.
  double axis_midpoint(std::size_t axis) const {
    return origin_.at(axis) + 0.5 * static_cast<double>(dims_.at(axis)) * spacing_;
  }

  /// Calls fn(first_flat_index) once per line of cells running along `axis`.
  template <class Fn>
  void for_each_column(std::size_t axis, Fn&& fn) const {
    const std::size_t st = strides_.at(axis);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      if ((flat / st) % dims_[axis] == 0) fn(flat);
    }
  }

  bool operator==(const Grid& o) const {
    return dims_ == o.dims_ && origin_ == o.origin_ && spacing_ == o.spacing_;
  }

 private:
  std::vector<std::size_t> dims_;
  Vec origin_;
  double spacing_;
  std::size_t size_ = 0;
  std::array<std::size_t, 3> strides_{};
};

/// Real function sampled at the cell centers of a grid.
class GridFunction {
 public:
  explicit GridFunction(Grid grid, double fill = 0.0) : grid_(std::move(grid)), values_(grid_.size(), fill) {
    if (!std::isfinite(fill)) throw Error("grid function values must be finite");
  }

  GridFunction(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error("grid function value count does not match grid");
    for (double v : values_)
      if (!std::isfinite(v)) throw Error("grid function values must be finite");
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }

  void set(std::size_t i, double v) {
    if (!std::isfinite(v)) throw Error("grid function values must be finite");
    values_[i] = v;
  }

  /// Minimum sampled value; the grid stand-in for the essential infimum.
  double essinf() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  /// Sorted distinct values.
  std::vector<double> levels() const {
    std::vector<double> v = values_;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  bool operator==(const GridFunction& o) const { return grid_ == o.grid_ && values_ == o.values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Boolean mask over the cells of a grid.
class GridSet {
 public:
  explicit GridSet(Grid grid) : grid_(std::move(grid)), mask_(grid_.size(), 0) {}

  GridSet(Grid grid, std::vector<std::uint8_t> mask) : grid_(std::move(grid)), mask_(std::move(mask)) {
    if (mask_.size() != grid_.size()) throw Error("grid set mask size does not match grid");
    for (auto& m : mask_) m = m ? 1 : 0;
  }

  template <class Pred>
  static GridSet from_predicate(const Grid& grid, Pred&& pred) {
    GridSet s(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) s.mask_[i] = pred(i) ? 1 : 0;
    return s;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return mask_.size(); }
  bool contains(std::size_t i) const { return mask_[i] != 0; }
  bool operator[](std::size_t i) const { return mask_[i] != 0; }
  void set(std::size_t i, bool v) { mask_[i] = v ? 1 : 0; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1)); }
  double measure() const { return static_cast<double>(count()) * grid_.cell_volume(); }
  bool empty() const { return count() == 0; }

  GridFunction indicator() const {
    std::vector<double> v(mask_.size());
    for (std::size_t i = 0; i < mask_.size(); ++i) v[i] = mask_[i] ? 1.0 : 0.0;
    return GridFunction(grid_, std::move(v));
  }

  bool subset_of(const GridSet& o) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !o.mask_[i]) return false;
    return true;
  }

  GridSet united(const GridSet& o) const {
    GridSet r = *this;
    for (std::size_t i = 0; i < mask_.size(); ++i) r.mask_[i] = mask_[i] | o.mask_[i];
    return r;
  }

  GridSet intersected(const GridSet& o) const {
    GridSet r = *this;
    for (std::size_t i = 0; i < mask_.size(); ++i) r.mask_[i] = mask_[i] & o.mask_[i];
    return r;
  }

  /// Number of cell faces separating a member cell from a non-member or from the outside.
  std::size_t boundary_faces() const {
    std::size_t faces = 0;
    for (std::size_t i = 0; i < mask_.size(); ++i) {
      if (!mask_[i]) continue;
      const Index idx = grid_.unflatten(i);
      for (std::size_t k = 0; k < grid_.dimension(); ++k) {
        const std::size_t st = grid_.stride(k);
        if (idx[k] == 0 || !mask_[i - st]) ++faces;
        if (idx[k] + 1 == grid_.dim(k) || !mask_[i + st]) ++faces;
      }
    }
    return faces;
  }

  /// Grid perimeter: boundary faces times the face area h^(n-1).
  double perimeter() const {
    return static_cast<double>(boundary_faces()) *
           std::pow(grid_.spacing(), static_cast<double>(grid_.dimension() - 1));
  }

  bool operator==(const GridSet& o) const { return grid_ == o.grid_ && mask_ == o.mask_; }

 private:
  Grid grid_;
  std::vector<std::uint8_t> mask_;
};

/// Super-level set {f >= t} (or {f > t} when strict).
inline GridSet level_set(const GridFunction& f, double t, bool strict = false) {
  return GridSet::from_predicate(f.grid(), [&](std::size_t i) { return strict ? f[i] > t : f[i] >= t; });
}

/// Measure of {f > t} for every distinct value t of a grid function.
class DistributionProfile {
 public:
  struct Entry {
    double level;
    std::size_t count;  // cells with value strictly above `level`
    double measure;
    bool operator==(const Entry& o) const { return level == o.level && count == o.count; }
  };

  DistributionProfile(std::vector<Entry> entries, std::size_t total_cells, double cell_volume)
      : entries_(std::move(entries)), total_cells_(total_cells), cell_volume_(cell_volume) {}

  std::span<const Entry> entries() const { return entries_; }
  std::size_t total_cells() const { return total_cells_; }

  /// Cell count of {f > t} for an arbitrary threshold t.
  std::size_t count_above(double t) const {
    auto it = std::upper_bound(entries_.begin(), entries_.end(), t,
                               [](double v, const Entry& e) { return v < e.level; });
    if (it == entries_.begin()) return total_cells_;
    return std::prev(it)->count;
  }

  double measure_above(double t) const { return static_cast<double>(count_above(t)) * cell_volume_; }

  bool operator==(const DistributionProfile& o) const {
    return entries_ == o.entries_ && total_cells_ == o.total_cells_;
  }

 private:
  std::vector<Entry> entries_;
  std::size_t total_cells_;
  double cell_volume_;
};

inline DistributionProfile distribution(const GridFunction& f) {
  std::vector<double> sorted(f.values().begin(), f.values().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<DistributionProfile::Entry> entries;
  const double vol = f.grid().cell_volume();
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const std::size_t above = sorted.size() - j;
    entries.push_back({sorted[i], above, static_cast<double>(above) * vol});
    i = j;
  }
  return DistributionProfile(std::move(entries), f.size(), vol);
}

/// Per-cell action of a reflection on a grid.
///
/// partner[i] is the cell whose center is the mirror image of cell i's center,
/// or `outside` when the mirror image falls off the grid. side[i] is +1 on the
/// interior of H^+, -1 on the interior of H^-, and 0 when the center lies on H.
struct ReflectionPlan {
  static constexpr std::ptrdiff_t outside = -1;
  std::vector<std::ptrdiff_t> partner;
  std::vector<std::int8_t> side;
};

/// Throws MisalignedHyperplane unless reflection in `h` maps cell centers onto the cell-center lattice.
inline ReflectionPlan plan_reflection(const Grid& grid, const OrientedHyperplane& h) {
  if (h.dimension() != grid.dimension()) throw Error("hyperplane and grid dimensions differ");
  constexpr double lattice_tol = 1e-9;
  const double on_plane_tol = 1e-9 * grid.spacing();
  ReflectionPlan plan;
  plan.partner.assign(grid.size(), ReflectionPlan::outside);
  plan.side.assign(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec c = grid.center(i);
    const double sd = h.signed_distance(c);
    plan.side[i] = sd > on_plane_tol ? 1 : (sd < -on_plane_tol ? -1 : 0);
    const Vec r = h.reflect(c);
    Index idx{0, 0, 0};
    bool inside = true;
    for (std::size_t k = 0; k < grid.dimension(); ++k) {
      const double q = (r[k] - grid.origin()[k]) / grid.spacing() - 0.5;
      const double qr = std::round(q);
      if (std::abs(q - qr) > lattice_tol)
        throw MisalignedHyperplane("reflection does not map the cell-center lattice to itself");
      if (qr < 0.0 || qr >= static_cast<double>(grid.dim(k))) {
        inside = false;
      } else {
        idx[k] = static_cast<std::size_t>(qr);
      }
    }
    if (inside) plan.partner[i] = static_cast<std::ptrdiff_t>(grid.flatten(idx));
  }
  return plan;
}

/// f-dagger: (f^dagger)(c) = f(c^dagger). Mirror images off the grid read essinf f.
inline GridFunction reflect_grid_function(const GridFunction& f, const OrientedHyperplane& h) {
  const ReflectionPlan plan = plan_reflection(f.grid(), h);
  const double fill = f.essinf();
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = plan.partner[i];
    out[i] = p == ReflectionPlan::outside ? fill : f[static_cast<std::size_t>(p)];
  }
  return GridFunction(f.grid(), std::move(out));
}

/// Mirror image of a set; cells whose image is off the grid are dropped.
inline GridSet reflect_grid_set(const GridSet& a, const OrientedHyperplane& h) {
  const ReflectionPlan plan = plan_reflection(a.grid(), h);
  return GridSet::from_predicate(a.grid(), [&](std::size_t i) {
    const auto p = plan.partner[i];
    return p != ReflectionPlan::outside && a[static_cast<std::size_t>(p)];
  });
}

}  // namespace symmkit
