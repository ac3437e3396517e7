#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gardingkit/errors.hpp"

namespace gk {

/// A point kappa in R^n of principal curvatures. Descending order is tracked
/// explicitly because the cone lemmas are stated for sorted vectors.
class CurvatureVector {
 public:
  CurvatureVector() = default;

  explicit CurvatureVector(std::vector<double> values, bool sorted = false)
      : values_(std::move(values)), sorted_(sorted) {
    validate();
    if (sorted_ && !std::is_sorted(values_.rbegin(), values_.rend()))
      throw InvalidInput("CurvatureVector: sorted flag set but values not descending");
  }

  static CurvatureVector sorted_descending(std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<double>());
    return CurvatureVector(std::move(values), true);
  }

  int n() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }
  bool is_sorted() const { return sorted_; }

  /// Re-sorts in place (descending) and sets the flag.
  void sort_descending() {
    std::sort(values_.begin(), values_.end(), std::greater<double>());
    sorted_ = true;
  }

 private:
  void validate() const {
    if (values_.size() < 2)
      throw InvalidInput("CurvatureVector: need n >= 2, got n = " +
                         std::to_string(values_.size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidInput("CurvatureVector: non-finite entry");
  }

  std::vector<double> values_;
  bool sorted_ = false;
};

/// A direction (xi or lambda) paired with a CurvatureVector of equal size.
class DirectionVector {
 public:
  DirectionVector() = default;

  explicit DirectionVector(std::vector<double> components)
      : comps_(std::move(components)) {
    for (double v : comps_)
      if (!std::isfinite(v)) throw InvalidInput("DirectionVector: non-finite entry");
  }

  static DirectionVector axis(int n, int i) {
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    c[static_cast<std::size_t>(i)] = 1.0;
    return DirectionVector(std::move(c));
  }

  int n() const { return static_cast<int>(comps_.size()); }
  double operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return comps_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& components() const { return comps_; }

  double norm() const {
    double s = 0.0;
    for (double v : comps_) s += v * v;
    return std::sqrt(s);
  }

  void normalize() {
    const double s = norm();
    if (s > 0.0)
      for (double& v : comps_) v /= s;
  }

 private:
  std::vector<double> comps_;
};

inline void require_same_dim(const CurvatureVector& kappa, const DirectionVector& xi) {
  if (kappa.n() != xi.n())
    throw InvalidInput("dimension mismatch: kappa has n = " + std::to_string(kappa.n()) +
                       ", direction has n = " + std::to_string(xi.n()));
}

}  // namespace gk
