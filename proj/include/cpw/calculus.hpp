#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cpw/certified.hpp"
#include "cpw/geometry.hpp"

namespace cpw {

/// Nonnegative piecewise-constant function on the line. values[i] lives on
/// (breakpoints[i], breakpoints[i+1]); the tails are constant on
/// (-inf, x_0) and (x_m, +inf). All 1D integrals are closed form.
class StepFunction1D {
 public:
  StepFunction1D(std::vector<double> breakpoints, std::vector<double> values,
                 double left_tail = 0.0, double right_tail = 0.0);

  static StepFunction1D zero() { return StepFunction1D({0.0}, {}, 0.0, 0.0); }
  static StepFunction1D constant(double c) { return StepFunction1D({0.0}, {}, c, c); }
  static StepFunction1D indicator(double a, double b, double height = 1.0);
  /// Indicator of a finite interval union.
  static StepFunction1D indicator(const OpenSet& e, double height = 1.0);

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double left_tail() const { return left_; }
  double right_tail() const { return right_; }

  /// Value at x; at a breakpoint returns the right limit.
  double operator()(double x) const;
  double max_value() const;
  bool compact_support() const { return left_ == 0.0 && right_ == 0.0; }
  /// Hull [min, max] of the support; nullopt when f == 0 (requires compact support).
  std::optional<std::pair<double, double>> support_hull() const;

  /// Total integral; infinity flag when a tail is nonzero.
  CertifiedValue integral() const;
  double l1_norm() const;  // throws on non-compact support
  /// Exact integral over [a, b].
  double integrate_interval(double a, double b) const;
  /// Cumulative mass over [breaks_.front(), x], x >= front. Requires zero left tail.
  double cumulative(double x) const;

  StepFunction1D pow(double e) const;
  StepFunction1D scaled(double c) const;
  /// f * 1_{[a,b)} as a step function with zero tails.
  StepFunction1D restricted(double a, double b) const;
  /// f * 1_{complement of [a,b)}.
  StepFunction1D excluding(double a, double b) const;
  StepFunction1D translated(double dx) const;

  /// Pointwise combination on the common breakpoint refinement.
  static StepFunction1D combine(const StepFunction1D& f, const StepFunction1D& g,
                                const std::function<double(double, double)>& op);

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
  double left_ = 0.0, right_ = 0.0;
};

/// Piecewise-constant function on a cubical grid over `box`, constant
/// outside. The nD sampling substrate for weights and oracles.
class GridFunctionND {
 public:
  GridFunctionND(Cube box, int cells_per_axis, std::vector<double> cell_values,
                 double outside_value = 0.0);

  const Cube& box() const { return box_; }
  int cells_per_axis() const { return cells_; }
  double outside_value() const { return outside_; }
  int dim() const { return box_.dim(); }

  double operator()(const std::vector<double>& x) const;
  double& cell(const std::vector<int>& idx);
  double cell_value(const std::vector<int>& idx) const;
  Cube cell_cube(const std::vector<int>& idx) const;

  /// Exact integral over an axis-aligned box.
  double integrate_box(const Box& b) const;
  CertifiedValue integral() const;

  GridFunctionND pow(double e) const;

 private:
  std::size_t flat(const std::vector<int>& idx) const;
  Cube box_;
  int cells_;
  std::vector<double> vals_;
  double outside_;
};

// -- integration -------------------------------------------------------------

CertifiedValue integrate(const StepFunction1D& f, const OpenSet& e);
CertifiedValue integrate(const StepFunction1D& f, const Cube& q);
CertifiedValue integrate(const GridFunctionND& f, const OpenSet& e);
CertifiedValue integrate(const GridFunctionND& f, const Cube& q);

/// Power mean (|Q|^{-1} int_Q |f|^t)^{1/t}; t = 1 is the plain average.
/// t < 1 is a domain error.
double average(const StepFunction1D& f, const Cube& q, double t = 1.0);
double average(const GridFunctionND& f, const Cube& q, double t = 1.0);

class Weight;  // weights.hpp

/// (int |f|^p w)^{1/p}. Exact for step/step pairs; infinity flag when the
/// integral diverges.
CertifiedValue lp_quasinorm(const StepFunction1D& f, double p, const Weight& w);

/// p int_0^inf t^{p-1} w({f > t}) dt by exact level-set decomposition at the
/// distinct values of f. Equals lp_quasinorm^p for step data.
CertifiedValue layer_cake_norm(const StepFunction1D& f, double p, const Weight& w,
                               int levels = 0);

/// Superlevel set {f > lambda} as an interval union (exact; bounded iff
/// compact support or lambda >= tails).
OpenSet superlevel(const StepFunction1D& f, double lambda);

}  // namespace cpw
