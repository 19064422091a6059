#pragma once

#include <vector>

#include "cpw/calculus.hpp"
#include "cpw/geometry.hpp"

namespace cpw {

class Weight;

/// Uncentered Hardy-Littlewood maximal function of 1_Q at x: the supremum of
/// |Q cap R| / |R| over axis-aligned cubes R containing x. Closed form in 1D;
/// in higher dimensions a one-parameter maximization over the candidate side
/// length (piecewise smooth with knots at the per-axis distances).
double m_indicator(const Cube& q, const std::vector<double>& x);
double m_indicator_1d(double qa, double qb, double x);

/// Exact Mf(x) for compactly supported step f. Optimal intervals have their
/// endpoints among the breakpoints and x itself: with one endpoint fixed the
/// average is a Moebius function of the other within each constant piece, so
/// it is monotone there and extrema land on the piece boundaries. All O(m^2)
/// candidate pairs are enumerated.
double m_stepfn_eval(const StepFunction1D& f, double x);

/// (M(|f|^s))^{1/s}; s = 1 reduces to m_stepfn_eval. s < 1 is a domain error.
double m_s_eval(const StepFunction1D& f, double s, double x);

/// M(1_Q w)(x), exact for step-materializable weights.
double m_localized(const Cube& q, const Weight& w, double x);

/// The exact open set {Mf > lambda} for compactly supported step f.
/// On each region between breakpoints Mf is a maximum of finitely many
/// Moebius functions of x, so the boundary points come from linear solves.
OpenSet m_superlevel(const StepFunction1D& f, double lambda);

}  // namespace cpw
