#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "graspaff/error.hpp"

namespace graspaff {

template <typename Scalar>
using ProbVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using VectorXd = ProbVector<double>;

/// Tolerance for accepting externally supplied distributions before renormalizing.
inline constexpr double kLoadSumTolerance = 1e-6;

/// Sum deviation below which a vector counts as already normalized. Bounded by
/// the rounding error that one division pass can leave behind, so a vector that
/// came out of normalize() always passes and normalize() is a fixed point on it.
template <typename Scalar>
Scalar normalized_tolerance(Eigen::Index size) {
  return Scalar(2) * static_cast<Scalar>(size > 0 ? size : 1) * std::numeric_limits<Scalar>::epsilon();
}

/// Probability vector over the classes of a taxonomy: non-negative entries that
/// sum to one. Only constructible through normalize() or from_normalized().
template <typename Scalar>
class BasicDistribution {
 public:
  using Vector = ProbVector<Scalar>;

  BasicDistribution() = default;

  const Vector& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  Scalar operator[](Eigen::Index i) const { return values_(i); }

  bool operator==(const BasicDistribution& other) const {
    return values_.size() == other.values_.size() && values_ == other.values_;
  }

  template <typename Derived>
  friend BasicDistribution<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& raw,
                                                               Eigen::Index expected_size);

 private:
  explicit BasicDistribution(Vector v) : values_(std::move(v)) {}
  Vector values_;
};

using Distribution = BasicDistribution<double>;

/// Scales a non-negative vector to unit sum. Vectors whose sum is already one
/// within normalized_tolerance() are returned unchanged, which makes the
/// operation idempotent bit for bit. Pass expected_size < 0 to skip the length check.
template <typename Derived>
BasicDistribution<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& raw,
                                                      Eigen::Index expected_size) {
  using Scalar = typename Derived::Scalar;
  if (expected_size >= 0 && raw.size() != expected_size) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(expected_size) +
                                                  " entries, got " + std::to_string(raw.size()));
  }
  if (raw.size() == 0) throw Error(ErrorCode::AllZero, "empty vector");
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const Scalar x = raw(i);
    if (!std::isfinite(static_cast<double>(x))) {
      throw Error(ErrorCode::NegativeEntry, "non-finite entry at index " + std::to_string(i));
    }
    if (x < Scalar(0)) throw Error(ErrorCode::NegativeEntry, "negative entry at index " + std::to_string(i));
  }
  const Scalar sum = raw.sum();
  if (!(sum > Scalar(0))) throw Error(ErrorCode::AllZero, "every entry is zero");

  ProbVector<Scalar> v = raw;
  if (std::abs(sum - Scalar(1)) > normalized_tolerance<Scalar>(raw.size())) v /= sum;
  return BasicDistribution<Scalar>(std::move(v));
}

template <typename Derived>
BasicDistribution<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& raw) {
  return normalize(raw, Eigen::Index{-1});
}

/// Accepts a vector that claims to be a distribution (|sum - 1| <= kLoadSumTolerance)
/// and renormalizes it. Throws NotNormalized outside the tolerance.
template <typename Derived>
BasicDistribution<typename Derived::Scalar> from_normalized(const Eigen::MatrixBase<Derived>& raw,
                                                            Eigen::Index expected_size = -1) {
  using Scalar = typename Derived::Scalar;
  if (expected_size >= 0 && raw.size() != expected_size) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(expected_size) +
                                                  " entries, got " + std::to_string(raw.size()));
  }
  const Scalar sum = raw.sum();
  if (!(std::abs(static_cast<double>(sum) - 1.0) <= kLoadSumTolerance)) {
    throw Error(ErrorCode::NotNormalized, "entries sum to " + std::to_string(static_cast<double>(sum)));
  }
  return normalize(raw, expected_size);
}

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::MatrixBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

template <typename Scalar>
Eigen::Index argmax(const BasicDistribution<Scalar>& d) {
  return argmax(d.values());
}

/// Population standard deviation of the strictly positive entries (0 for an empty
/// or singleton support).
template <typename Derived>
typename Derived::Scalar nonzero_std(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const auto mask = (v.array() > Scalar(0));
  const Eigen::Index m = mask.count();
  if (m <= 1) return Scalar(0);
  const Scalar hi = mask.select(v.array(), Scalar(0)).maxCoeff();
  const Scalar lo = mask.select(v.array(), hi).minCoeff();
  if (hi == lo) return Scalar(0);  // the mean of equal values need not round back to them
  const Scalar mean = mask.select(v.array(), Scalar(0)).sum() / static_cast<Scalar>(m);
  const Scalar ss = mask.select((v.array() - mean).square(), Scalar(0)).sum();
  return std::sqrt(ss / static_cast<Scalar>(m));
}

}  // namespace graspaff
