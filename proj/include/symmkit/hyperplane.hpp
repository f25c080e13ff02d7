#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "symmkit/errors.hpp"

namespace symmkit {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

enum class Orientation { Positive, Negative };

/// Oriented affine hyperplane {x : x.normal = offset}.
///
/// With orientation Positive the closed half-space H^+ is {x.normal >= offset};
/// Negative flips the two sides. The normal is normalized on construction.
class OrientedHyperplane {
 public:
  OrientedHyperplane(Vec normal, double offset, Orientation orientation = Orientation::Positive)
      : normal_(std::move(normal)), offset_(offset), orientation_(orientation) {
    if (normal_.empty() || normal_.size() > 3) throw Error("hyperplane normal must have 1 to 3 components");
    const double len = norm(normal_);
    if (!(len > 0.0) || !std::isfinite(len)) throw Error("hyperplane normal must be a finite nonzero vector");
    if (!std::isfinite(offset_)) throw Error("hyperplane offset must be finite");
    for (double& c : normal_) c /= len;
  }

  const Vec& normal() const { return normal_; }
  double offset() const { return offset_; }
  Orientation orientation() const { return orientation_; }
  std::size_t dimension() const { return normal_.size(); }

  /// Positive inside H^+, negative inside H^-, zero on H. Magnitude is the distance to H.
  double signed_distance(const Vec& x) const {
    const double d = dot(x, normal_) - offset_;
    return orientation_ == Orientation::Positive ? d : -d;
  }

  bool in_positive(const Vec& x) const { return signed_distance(x) >= 0.0; }
  bool in_negative(const Vec& x) const { return signed_distance(x) <= 0.0; }

  Vec reflect(const Vec& x) const {
    const double k = 2.0 * (offset_ - dot(x, normal_));
    Vec y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += k * normal_[i];
    return y;
  }

  /// Index of the coordinate axis the normal points along, or -1 if not axis-aligned.
  int aligned_axis() const {
    int axis = -1;
    for (std::size_t i = 0; i < normal_.size(); ++i) {
      if (std::abs(normal_[i]) > 1e-12) {
        if (axis >= 0) return -1;
        axis = static_cast<int>(i);
      }
    }
    return axis;
  }

  /// +1 when H^+ lies on the increasing side of the aligned axis, -1 otherwise.
  int positive_direction_sign() const {
    const int axis = aligned_axis();
    if (axis < 0) throw MisalignedHyperplane("hyperplane is not axis-aligned");
    const double s = normal_[static_cast<std::size_t>(axis)];
    const int sign = s > 0 ? 1 : -1;
    return orientation_ == Orientation::Positive ? sign : -sign;
  }

  bool operator==(const OrientedHyperplane&) const = default;

 private:
  Vec normal_;
  double offset_;
  Orientation orientation_;
};

inline Vec reflect_point(const Vec& x, const OrientedHyperplane& h) { return h.reflect(x); }

inline std::string describe(const OrientedHyperplane& h) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < h.normal().size(); ++i) {
    if (i) os << ' ';
    os << h.normal()[i];
  }
  return os.str();
}

}  // namespace symmkit
