#pragma once

#include <utility>
#include <vector>

#include "cpw/calculus.hpp"
#include "cpw/geometry.hpp"
#include "cpw/weights.hpp"

namespace cpw {

/// One cube of a sparse collection; the exceptional set is the cube minus
/// the listed subcubes (exact measures, no geometry library needed).
struct SparseEntry {
  DyadicCube cube;
  std::vector<DyadicCube> removed;

  double exceptional_measure() const;
};

/// gamma-sparse collection of dyadic cubes: |E_Q| >= gamma |Q| with the E_Q
/// pairwise disjoint. Non-dyadic input cubes are out of scope here (they can
/// be embedded into boundedly many dyadic families; v1 accepts dyadic only).
struct SparseCollection {
  std::vector<SparseEntry> entries;
  double gamma = 0.5;
};

/// Calderon-Zygmund stopping time: maximal dyadic descendants whose average
/// exceeds lambda times the parent stopping average. The result is
/// (1 - 1/lambda)-sparse.
SparseCollection cz_sparse(const StepFunction1D& f, const std::vector<DyadicCube>& roots,
                           double lambda);

struct SparseCheck {
  bool ok = false;
  double worst_ratio = 0.0;  // min |E_Q| / |Q|
  bool disjoint = false;
};

/// Exact measure checks of both sparse conditions.
SparseCheck verify_sparse(const SparseCollection& s, double gamma);

/// Sparse form (t')^gamma sum_Q <|f|>_Q^gamma <|g|>_{t,Q} |Q|.
double sparse_form(const SparseCollection& s, const StepFunction1D& f, const StepFunction1D& g,
                   double t, double gamma_exp);
/// Variant with the second argument multiplied by a weight (g w).
double sparse_form_weighted(const SparseCollection& s, const StepFunction1D& f,
                            const StepFunction1D& g, const Weight& w, double t, double gamma_exp);

/// sum_{R in S} Phi_q(R) / Phi_q(Q0) where Phi_q(R) = int (M 1_R)^q w.
/// All cubes of S must sit inside q0.
double sparse_mass_ratio(const SparseCollection& s, const Cube& q0, const Weight& w, double q);

/// [sum_Q <f>_Q^p Phi_q(Q)] / ||Mf||_{L^p(w)}^p, 0 < p < q.
double corollary_norm_ratio(const SparseCollection& s, const StepFunction1D& f, const Weight& w,
                            double p, double q);

struct CarlesonResult {
  double a_found = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool skipped_zero_mass = false;
};

/// Dyadic Carleson embedding check: A_found = max_R sum_{Q subset R} a_Q / w(R),
/// then verifies sum a_R (<h>_R^w)^alpha <= (A^{1/alpha} alpha' ||h||_{L^alpha(w)})^alpha
/// on the finite family.
CarlesonResult carleson_check(const std::vector<std::pair<DyadicCube, double>>& family,
                              const Weight& w, const StepFunction1D& h, double alpha);

/// ||Mf||_{L^p(w)}^p by certified quadrature of the exact pointwise evaluator,
/// with analytic tails off the support. Needs compact f.
CertifiedValue maximal_lp_mass(const StepFunction1D& f, double p, const Weight& w);

}  // namespace cpw
