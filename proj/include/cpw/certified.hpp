#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace cpw {

/// A numeric result paired with a rigorous two-sided error bound.
/// The true quantity lies in [value - error, value + error] unless
/// `finite` is false, in which case `note` states why the quantity
/// diverged (or could not be bounded).
struct CertifiedValue {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
  std::string note;

  static CertifiedValue exact(double v) { return {v, 0.0, true, {}}; }

  static CertifiedValue pm(double v, double e) {
    if (e < 0) throw std::invalid_argument("CertifiedValue: negative error bound");
    return {v, e, true, {}};
  }

  static CertifiedValue infinite(std::string why) {
    return {std::numeric_limits<double>::infinity(), 0.0, false, std::move(why)};
  }

  CertifiedValue operator+(const CertifiedValue& o) const {
    if (!finite) return *this;
    if (!o.finite) return o;
    return pm(value + o.value, error + o.error);
  }

  CertifiedValue scaled(double c) const {
    if (!finite) return *this;
    return pm(c * value, std::abs(c) * error);
  }
};

/// Neumaier-compensated accumulator. Summation order is always the caller's
/// iteration order, so results do not depend on scheduling.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double get() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline bool nearly_equal(double a, double b, double rtol, double atol = 0.0) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace cpw
