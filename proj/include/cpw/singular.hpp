#pragma once

#include <optional>
#include <vector>

#include "cpw/calculus.hpp"
#include "cpw/geometry.hpp"
#include "cpw/sparse.hpp"
#include "cpw/weights.hpp"

namespace cpw {

/// Hilbert transform Hf(x) = (1/pi) p.v. int f(t)/(x-t) dt of a compactly
/// supported step function, in closed form: (1/pi) sum_j d_j ln|x - x_j| over
/// the jumps d_j of f. Unitary on L^2 with this normalization. Throws at a
/// breakpoint with a nonzero jump (the p.v. does not exist there).
double hilbert_eval(const StepFunction1D& f, double x);

/// Truncated transform (1/pi) int_{|x-t|>eps} f(t)/(x-t) dt, closed form.
double hilbert_eval_truncated(const StepFunction1D& f, double x, double eps);

/// ||Hf||_{L^p(w)} by certified quadrature with analytic tails
/// (|Hf| <= ||f||_1/(pi dist) off the support hull).
CertifiedValue hilbert_lp_norm(const StepFunction1D& f, double p, const Weight& w);

enum class CfMode { PrincipalValue, Truncated };

/// Coifman-Fefferman ratio ||Hf||_{L^p(w)} / ||Mf||_{L^p(w)}.
double cf_ratio(const StepFunction1D& f, const Weight& w, double p,
                CfMode mode = CfMode::PrincipalValue, double trunc_eps = 0.0);

struct GrandMaximalResult {
  std::vector<double> per_cube;
  double max = 0.0;
};

/// Grand maximal form: per menu cube, (1/|Q|) int_Q |H(f 1_{R \ 3Q})|^theta |g|;
/// the menu max is a lower bound for the supremum.
GrandMaximalResult grand_maximal_eval(const StepFunction1D& f, const StepFunction1D& g,
                                      double theta, const std::vector<Cube>& menu);

struct ThetaSparseResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool flagged = false;  // degenerate input (f or g vanishing)
};

/// Empirical theta-sparse domination check: lhs = <|Hf|^theta, |g|>, rhs the
/// sparse form over the CZ-constructed family at lambda = 2. The domination
/// theorem guarantees existence of some sparse family; this reports the
/// concrete one.
ThetaSparseResult theta_sparse_check(const StepFunction1D& f, const StepFunction1D& g,
                                     double theta, double s);

}  // namespace cpw
