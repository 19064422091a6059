#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpw/calculus.hpp"
#include "cpw/certified.hpp"
#include "cpw/geometry.hpp"

namespace cpw {

// -- psi functions ------------------------------------------------------------

/// phi_p(0) = 0, phi_p(t) = t^p / log^2(1 + 1/t) on (0,1], constant phi_p(1)
/// for t > 1. Natural log.
double phi_p(double t, double p);

/// Young-type profile for the C_psi condition. Defined on [0,1] with the
/// constant extension psi(t) = psi(1) for t > 1.
class PsiFunction {
 public:
  enum class Kind { Power, PhiP, Custom };

  static PsiFunction power(double p);
  static PsiFunction phi(double p);
  /// For custom profiles, `near_zero_exponent` is the a with psi(t) ~ t^a as
  /// t -> 0 when known; < 0 means unknown (tail classification then falls
  /// back to the integral test).
  static PsiFunction custom(std::function<double(double)> fn, double near_zero_exponent = -1.0);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  double exponent() const { return p_; }
  double near_zero_exponent() const;
  /// Nondecreasing on a sample grid; checked for Custom at construction.
  bool validate() const;
  std::string name() const;

 private:
  Kind kind_ = Kind::Power;
  double p_ = 2.0;
  double hint_ = -1.0;
  std::function<double(double)> fn_;
};

// -- Kahanpaa-Mejlbro rules ---------------------------------------------------

/// ell_k / h_k generator. Presets: "geometric" ell_k = 2^{-|k|-1},
/// "harmonic" ell_k = 1/(|k|+2); h from ell via h = ell^{n(p-1)} or
/// h = phi_p(ell^n)/ell^n, or explicit tables. In dimension n the index is
/// |m|_1 = sum |m_i|.
struct KmRule {
  enum class EllKind { Geometric, Harmonic, Table };
  enum class HKind { PowerOfEll, PhiOverEll, Table };

  EllKind ell_kind = EllKind::Geometric;
  HKind h_kind = HKind::PowerOfEll;
  double p = 2.0;              // exponent parameter for the h rules
  double power_scale = 1.0;    // pointwise h^power_scale (power_transform)
  int dim = 1;
  std::map<long long, double> ell_table;
  std::map<long long, double> h_table;

  static KmRule geometric_power(double p, int dim = 1);
  static KmRule geometric_phi(double p, int dim = 1);
  static KmRule harmonic_power(double p, int dim = 1);
  static KmRule table(std::map<long long, double> ell, std::map<long long, double> h);

  double ell(long long k) const;  // 1D: k in Z; nD: |m|_1
  double h(long long k) const;
  double h_sup(long long k_range = 64) const;
  void validate() const;
};

/// Hole interval Omega_k = [4k - ell_k/2, 4k + ell_k/2] of the 1D weight.
Cube km_hole_cube(const KmRule& rule, long long k);
/// Island I_k = [4k-3, 4k-1].
Cube km_island_cube(long long k);
/// nD hole P_m and island R_m.
Cube km_hole_cube_nd(const KmRule& rule, const std::vector<long long>& m);
Cube km_island_cube_nd(const std::vector<long long>& m);

// -- weights ------------------------------------------------------------------

/// Decay/growth information for certified tail bounds and for the analytic
/// finite-vs-infinite decision of the tail functional. The descriptor
/// asserts c_lower |x|^growth <= w(x) <= c_upper |x|^growth on supp w for
/// |x| > x0, and |supp w cap {R < |x| < 2R}| ~ mass_coeff * R^support_mass_exponent.
struct TailDescriptor {
  double growth = 0.0;
  double x0 = 1.0;
  double c_lower = 1.0;
  double c_upper = 1.0;
  double support_mass_exponent = 1.0;
  double mass_coeff = 2.0;
};

/// A nonnegative locally integrable function, not a.e. zero. Step, rule-based
/// (Kahanpaa-Mejlbro 1D/nD), analytic-with-tail-descriptor, or grid-backed.
class Weight {
 public:
  enum class Kind { Step, Km1d, KmNd, Analytic, Grid };

  static Weight step(StepFunction1D s);
  static Weight constant(double c = 1.0);
  static Weight km1d(KmRule rule);
  static Weight kmnd(KmRule rule, int dim);
  static Weight analytic(std::function<double(double)> fn, TailDescriptor tail,
                         std::optional<OpenSet> support = std::nullopt,
                         std::optional<double> bound_hint = std::nullopt);
  static Weight grid(GridFunctionND g);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::optional<double>& bound_hint() const { return bound_hint_; }
  const std::optional<TailDescriptor>& tail_descriptor() const { return tail_; }

  bool has_compact_support() const;
  /// [lo, hi] window containing the support (1D, compact weights only).
  std::pair<double, double> support_window() const;

  double operator()(double x) const;
  double value_at(const std::vector<double>& x) const;

  /// w * 1_[lo,hi) as an exact step function (1D; Analytic has no exact
  /// materialization and throws).
  StepFunction1D to_step(double lo, double hi) const;
  bool step_materializable() const;

  CertifiedValue integrate_cube(const Cube& q) const;
  CertifiedValue integrate_set(const OpenSet& e) const;
  CertifiedValue integrate_box_nd(const Box& b) const;

  /// Pointwise w^r with scaled hints (power_transform backend).
  Weight power(double r) const;

  double sup_bound_or(double fallback) const;
  /// Descriptor with per-variant defaults filled in; nullopt when the weight
  /// is compactly supported (no tail).
  std::optional<TailDescriptor> effective_tail() const;

  const StepFunction1D& step_fn() const;
  const KmRule& km_rule() const;
  const GridFunctionND& grid_fn() const;
  const std::function<double(double)>& analytic_fn() const;

 private:
  Kind kind_ = Kind::Step;
  int dim_ = 1;
  std::shared_ptr<const StepFunction1D> step_;
  std::shared_ptr<const KmRule> rule_;
  std::shared_ptr<const GridFunctionND> grid_;
  std::function<double(double)> fn_;
  std::shared_ptr<const OpenSet> support_;
  std::optional<double> bound_hint_;
  std::optional<TailDescriptor> tail_;
};

/// w = sum_k 1_{I_k} + sum_k h_k 1_{Omega_k}.
Weight km_weight_1d(const KmRule& rule);
/// w = 1_A + sum_m h_m 1_{P_m}, A = union of R_m.
Weight km_weight_nd(const KmRule& rule, int dim);

/// |A cap Q(x,r)| >= c r^n density check for the nD island set, exact box
/// arithmetic. Q(x,r) is the closed cube of side 2r centered at x.
struct KmDensityReport {
  bool pass = true;
  double worst_ratio = 0.0;  // min over samples of |A cap Q(x,r)| / r^n
};
KmDensityReport km_density_check(int dim, const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& radii, double c_required);

/// int |f|^p w dx with symbolic tail handling; exact for step pairs.
CertifiedValue weighted_power_mass(const StepFunction1D& f, double p, const Weight& w);

// -- tail functionals and certifiers ------------------------------------------

struct TailAnalysis {
  bool finite = true;
  std::string reason;
};

/// Analytic finite/infinite decision for int psi(M 1_Q) w. Never decided by
/// numeric divergence.
TailAnalysis classify_tail(const Weight& w, const PsiFunction& psi);

/// int_{R^n} psi(M 1_Q) w with a certified bound: exact/closed-form inside a
/// dilation window, analytic bound for the remainder, window grown until the
/// remainder is ~1e-9 of the value.
CertifiedValue tail_functional(const Cube& q, const Weight& w, const PsiFunction& psi);

/// Discretized tail sum_{k>=0} 2^{-n(p-1)k} <w>_{2^k Q} with a certified
/// geometric remainder. p > 1.
CertifiedValue tail_discretized(const Cube& q, const Weight& w, double p);

/// int psi(M1_Q) w / int_{R^n \ Q} psi(M1_Q) w, always >= 1. Returns +inf
/// when the denominator vanishes (w supported inside Q).
double hole_ratio(const Cube& q, const Weight& w, const PsiFunction& psi);

/// max over the family of int_Q M(1_Q w) / int (M1_Q)^p w; 0 when the tail
/// functional is infinite (the zero convention).
double cp_characteristic_estimate(const Weight& w, double p, const std::vector<Cube>& family);

/// Default epsilon for the C_p condition at characteristic value cp_char
/// (pass <= 0 when unknown; the min{1, 1/[w]} factor then degenerates to 1).
double default_epsilon(int dim, double p, double cp_char = 0.0);

struct CertifyPair {
  Cube q;
  OpenSet e;
};

enum class CertifyMode { All, Dyadic, Dilated };

struct CertifyRow {
  std::size_t pair_index = 0;
  double q_lower = 0, q_side = 0;
  double e_measure = 0;
  double ratio = 0;
};

struct CertifyResult {
  double c_star = 0;
  std::size_t argmax = 0;
  std::vector<CertifyRow> rows;
};

/// Best-constant lower bound max over the menu of
/// w(E) / [(|E|/|Q|)^eps * int psi(M1_base) w], base per mode: the cube
/// itself, its dyadic cover cells, or dilate(Q, gamma). Pairs with infinite
/// tail functional contribute 0.
CertifyResult cpsi_certify(const Weight& w, const PsiFunction& psi, double eps,
                           const std::vector<CertifyPair>& menu, CertifyMode mode,
                           double gamma = 3.0);

struct ClassicalCharacteristics {
  double a_p = 0;
  bool a_p_finite = true;
  double rh_q = 0;
  bool rh_q_finite = true;
  double a_infty = 0;
  bool a_infty_finite = true;
};

/// sup over the family of the A_p / RH_q / Fujii-Wilson defining ratios
/// (lower bounds for the true characteristics).
ClassicalCharacteristics classical_characteristics(const Weight& w, const std::vector<Cube>& family,
                                                   double p, double q);

Weight power_transform(const Weight& w, double r);

/// (int_0^t phi_p(s) s^{-2} ds) / t^{p-1}, certified quadrature over the
/// integrable singularity. t in (0,1).
CertifiedValue ratio_a(double t, double p);
/// t^eps log^2(1 + 1/t); the p parameter only names the family.
double ratio_b(double t, double p, double eps);

}  // namespace cpw
