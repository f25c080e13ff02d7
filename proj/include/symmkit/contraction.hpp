#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "symmkit/errors.hpp"

namespace symmkit {

struct Breakpoint {
  double t;
  double value;
  bool operator==(const Breakpoint&) const = default;
};

/// Continuous piecewise-linear map R -> R with Lipschitz constant 1.
///
/// Breakpoints have strictly increasing t. Outside [t_first, t_last] the
/// terminal segments continue with their own slopes.
class PLContraction {
 public:
  static constexpr double slope_tol = 1e-12;

  explicit PLContraction(std::vector<Breakpoint> breakpoints) : bp_(std::move(breakpoints)) {
    if (bp_.size() < 2) throw Error("contraction needs at least two breakpoints");
    for (const Breakpoint& b : bp_)
      if (!std::isfinite(b.t) || !std::isfinite(b.value)) throw Error("contraction breakpoints must be finite");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
      if (!(bp_[i + 1].t > bp_[i].t)) throw Error("contraction breakpoints must have increasing t");
      if (std::abs(slope(i)) > 1.0 + slope_tol) throw Error("contraction segment slope exceeds 1 in magnitude");
    }
  }

  std::size_t segments() const { return bp_.size() - 1; }
  const std::vector<Breakpoint>& breakpoints() const { return bp_; }

  double slope(std::size_t segment) const {
    const Breakpoint& a = bp_[segment];
    const Breakpoint& b = bp_[segment + 1];
    return (b.value - a.value) / (b.t - a.t);
  }

  double operator()(double t) const {
    std::size_t seg;
    if (t <= bp_.front().t) {
      seg = 0;
    } else if (t >= bp_.back().t) {
      seg = bp_.size() - 2;
    } else {
      auto it = std::upper_bound(bp_.begin(), bp_.end(), t, [](double v, const Breakpoint& b) { return v < b.t; });
      seg = static_cast<std::size_t>(it - bp_.begin()) - 1;
    }
    const Breakpoint& a = bp_[seg];
    if (t == a.t) return a.value;
    if (t == bp_[seg + 1].t) return bp_[seg + 1].value;
    return a.value + slope(seg) * (t - a.t);
  }

  /// True when every segment has slope +1 or -1 (the eikonal condition).
  bool eikonal(double tol = 1e-12) const {
    for (std::size_t i = 0; i < segments(); ++i)
      if (std::abs(std::abs(slope(i)) - 1.0) > tol) return false;
    return true;
  }

  /// True when all segments meeting (lo, hi) share one slope.
  bool affine_on(double lo, double hi, double tol = 1e-12) const {
    bool first = true;
    double s0 = 0.0;
    for (std::size_t i = 0; i < segments(); ++i) {
      const bool meets = (i == 0 || bp_[i].t < hi) && (i + 1 == segments() || bp_[i + 1].t > lo);
      if (!meets) continue;
      if (first) {
        s0 = slope(i);
        first = false;
      } else if (std::abs(slope(i) - s0) > tol) {
        return false;
      }
    }
    return true;
  }

  bool operator==(const PLContraction&) const = default;

 private:
  std::vector<Breakpoint> bp_;
};

/// phi(t) = t, -t, |t| or -|t| under the names id, neg, abs, negabs.
inline PLContraction canonical_contraction(const std::string& name, double half_width = 1.0) {
  const double r = half_width;
  if (!(r > 0.0)) throw Error("canonical contraction domain must be positive");
  if (name == "id") return PLContraction({{-r, -r}, {0.0, 0.0}, {r, r}});
  if (name == "neg") return PLContraction({{-r, r}, {0.0, 0.0}, {r, -r}});
  if (name == "abs") return PLContraction({{-r, r}, {0.0, 0.0}, {r, r}});
  if (name == "negabs") return PLContraction({{-r, -r}, {0.0, 0.0}, {r, -r}});
  throw UnknownName("unknown canonical contraction '" + name + "'");
}

/// Distance to the nearest multiple of `period`, breakpoints covering [lo, hi].
inline PLContraction sawtooth_contraction(double period, double lo = -4.0, double hi = 4.0) {
  if (!(period > 0.0)) throw Error("sawtooth period must be positive");
  if (!(hi > lo)) throw Error("sawtooth domain is empty");
  const double half = 0.5 * period;
  const auto first = static_cast<long long>(std::floor(lo / half));
  const auto last = static_cast<long long>(std::ceil(hi / half));
  std::vector<Breakpoint> bp;
  for (long long k = first; k <= last; ++k) {
    const double t = static_cast<double>(k) * half;
    bp.push_back({t, (k % 2 == 0) ? 0.0 : half});
  }
  return PLContraction(std::move(bp));
}

/// Right-continuous non-decreasing map built from sorted breakpoints.
///
/// Consecutive breakpoints with equal t encode a jump; the map takes the later
/// value at the jump. Between breakpoints it interpolates linearly, and beyond
/// the ends it continues the terminal slopes (flat when the end is a jump).
class MonotoneMap {
 public:
  explicit MonotoneMap(std::vector<Breakpoint> breakpoints) : bp_(std::move(breakpoints)) {
    if (bp_.empty()) throw Error("monotone map needs at least one breakpoint");
    for (const Breakpoint& b : bp_)
      if (!std::isfinite(b.t) || !std::isfinite(b.value)) throw Error("monotone map breakpoints must be finite");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
      if (bp_[i + 1].t < bp_[i].t) throw NonMonotoneMap("monotone map breakpoints must have non-decreasing t");
      if (bp_[i + 1].value < bp_[i].value) throw NonMonotoneMap("monotone map values decrease");
      if (i + 2 < bp_.size() && bp_[i].t == bp_[i + 1].t && bp_[i + 1].t == bp_[i + 2].t)
        throw Error("monotone map allows at most two breakpoints per t");
    }
  }

  static MonotoneMap affine(double alpha, double beta) {
    if (alpha < 0.0) throw NonMonotoneMap("affine map with negative slope");
    return MonotoneMap({{0.0, beta}, {1.0, alpha + beta}});
  }

  const std::vector<Breakpoint>& breakpoints() const { return bp_; }

  double operator()(double t) const {
    if (bp_.size() == 1) return bp_.front().value;
    // Last breakpoint with bp.t <= t; jumps therefore resolve to the right value.
    auto it = std::upper_bound(bp_.begin(), bp_.end(), t, [](double v, const Breakpoint& b) { return v < b.t; });
    if (it == bp_.begin()) {
      const Breakpoint& a = bp_[0];
      const Breakpoint& b = bp_[1];
      if (a.t == b.t) return a.value;
      return a.value + (b.value - a.value) / (b.t - a.t) * (t - a.t);
    }
    const std::size_t i = static_cast<std::size_t>(it - bp_.begin()) - 1;
    const Breakpoint& a = bp_[i];
    if (t == a.t) return a.value;
    if (i + 1 < bp_.size()) {
      const Breakpoint& b = bp_[i + 1];
      return a.value + (b.value - a.value) / (b.t - a.t) * (t - a.t);
    }
    const Breakpoint& p = bp_[i - 1];
    if (p.t == a.t) return a.value;
    return a.value + (a.value - p.value) / (a.t - p.t) * (t - a.t);
  }

 private:
  std::vector<Breakpoint> bp_;
};

}  // namespace symmkit
