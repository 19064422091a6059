#pragma once

#include <vector>

#include "cpw/calculus.hpp"
#include "cpw/geometry.hpp"
#include "cpw/weights.hpp"

namespace cpw {

/// Whitney decompositions of the superlevel sets Omega_k = {Mf > 2^k},
/// k_min <= k <= k_max. Omega_{k+1} subset Omega_k by construction.
struct LevelDecomposition {
  StepFunction1D source = StepFunction1D::zero();  // the f with h = Mf
  int k_min = 0, k_max = 0;
  double whitney_R = 1.0;
  std::vector<OpenSet> omega;                // index k - k_min
  std::vector<std::vector<Cube>> families;   // Whitney cubes per level

  const OpenSet& omega_at(int k) const { return omega.at(static_cast<std::size_t>(k - k_min)); }
  const std::vector<Cube>& family_at(int k) const {
    return families.at(static_cast<std::size_t>(k - k_min));
  }
};

LevelDecomposition level_decompose(const StepFunction1D& f, int k_min, int k_max, double R = 1.0);

/// int (M_{k,p,q} h)^p w = 2^{kp} sum_{Q in Q_k} int (M 1_Q)^q w.
CertifiedValue mkpq_integral(const LevelDecomposition& dec, int k, double p, double q,
                             const Weight& w);

/// sum over the decomposition's k-range, with a geometric-decay certificate
/// for the truncated lower levels when one is available.
CertifiedValue mpq_integral(const LevelDecomposition& dec, double p, double q, const Weight& w);

/// mpq_integral(level_decompose(f,...)) / int_{2^{k_min} < Mf} (Mf)^p w on the
/// matching window. 0 < p < q.
double lemma_ratio(const StepFunction1D& f, const Weight& w, double p, double q, int k_min,
                   int k_max, double R = 1.0);

/// Dyadic layer-cake sum sum_k 2^{kp} [w(Omega_k) - w(Omega_{k+1})]; lies in
/// [2^{-p}, 1] * ||Mf||_{L^p(w)}^p when the levels cover the support of w.
double layer_cake_sum(const LevelDecomposition& dec, double p, const Weight& w);

/// The same sum with undifferenced level masses and the leading factor p:
/// p sum_k 2^{kp} sum_{Q in Q_k} w(Q). Reported alongside layer_cake_sum.
double layer_cake_sum_undifferenced(const LevelDecomposition& dec, double p, const Weight& w);

}  // namespace cpw
