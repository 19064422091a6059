#include "cpw/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cpw/maximal.hpp"
#include "cpw/quadrature.hpp"

namespace cpw {

namespace {

constexpr double kPi = std::numbers::pi;

// jumps d_j = v_j - v_{j-1} at each breakpoint (v_{-1} = v_m = 0)
std::vector<double> jumps(const StepFunction1D& f) {
  const auto& v = f.values();
  std::vector<double> d(f.breakpoints().size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    double right = j < v.size() ? v[j] : 0.0;
    double left = j > 0 ? v[j - 1] : 0.0;
    d[j] = right - left;
  }
  return d;
}

}  // namespace

double hilbert_eval(const StepFunction1D& f, double x) {
  if (!f.compact_support()) throw std::invalid_argument("hilbert_eval: compact support required");
  const auto& b = f.breakpoints();
  auto d = jumps(f);
  CompensatedSum s;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (d[j] == 0.0) continue;
    double r = std::abs(x - b[j]);
    if (r == 0.0)
      throw std::domain_error("hilbert_eval: principal value does not exist at a jump point");
    s.add(d[j] * std::log(r));
  }
  return s.get() / kPi;
}

double hilbert_eval_truncated(const StepFunction1D& f, double x, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("hilbert_eval_truncated: eps must be > 0");
  if (!f.compact_support())
    throw std::invalid_argument("hilbert_eval_truncated: compact support required");
  const auto& b = f.breakpoints();
  const auto& v = f.values();
  CompensatedSum s;
  // per piece [b_i, b_{i+1}] clipped against (x-eps, x+eps):
  // int_a^c dt/(x-t) = ln|x-a| - ln|x-c|
  auto piece = [&](double a, double c) {
    if (c <= a) return 0.0;
    return std::log(std::abs(x - a)) - std::log(std::abs(x - c));
  };
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    double a = b[i], c = b[i + 1];
    double contrib = piece(a, std::min(c, x - eps)) + piece(std::max(a, x + eps), c);
    if (x - eps <= a && c <= x + eps) contrib = 0.0;  // piece fully excised
    s.add(v[i] * contrib);
  }
  return s.get() / kPi;
}

CertifiedValue hilbert_lp_norm(const StepFunction1D& f, double p, const Weight& w) {
  if (!(p > 0)) throw std::invalid_argument("hilbert_lp_norm: p must be > 0");
  if (!f.compact_support()) throw std::invalid_argument("hilbert_lp_norm: compact f required");
  auto hull = f.support_hull();
  if (!hull) return CertifiedValue::exact(0.0);
  auto cls = classify_tail(w, PsiFunction::power(p));
  if (!cls.finite) return CertifiedValue::infinite("||Hf||_p diverges: " + cls.reason);
  if (!w.step_materializable())
    throw std::invalid_argument("hilbert_lp_norm: analytic weights unsupported");

  double l1 = f.l1_norm();
  auto window_mass = [&](double wlo, double whi) -> CertifiedValue {
    StepFunction1D ws = w.to_step(wlo, whi);
    std::vector<double> edges(ws.breakpoints());
    for (double bp : f.breakpoints())
      if (bp > wlo && bp < whi) edges.push_back(bp);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    CompensatedSum sum;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      double v = ws(0.5 * (edges[i] + edges[i + 1]));
      if (v == 0) continue;
      // |Hf|^p has integrable log-type singularities at the breakpoints;
      // Kronrod nodes are interior so the panels stay finite.
      auto r = integrate_gk(
          [&](double x) { return std::pow(std::abs(hilbert_eval(f, x)), p); }, edges[i],
          edges[i + 1], {1e-9, 0.0, 1600});
      sum.add(v * r.value);
      err += v * r.error;
    }
    return CertifiedValue::pm(sum.get(), err);
  };

  CertifiedValue mass = CertifiedValue::exact(0.0);
  if (w.has_compact_support()) {
    auto [sl, sh] = w.support_window();
    mass = window_mass(std::min(sl, hull->first) - 1.0, std::max(sh, hull->second) + 1.0);
  } else if (w.kind() == Weight::Kind::Step) {
    // constant tails: |Hf| is bracketed by l1/(pi (x - far)) and
    // l1/(pi (x - near)) on the rays, which integrate in closed form
    if (!(p > 1.0)) return CertifiedValue::infinite("||Hf||_p diverges for p <= 1");
    const auto& ws = w.step_fn();
    double span = hull->second - hull->first;
    double reach = std::max({std::abs(hull->first), std::abs(hull->second),
                             std::abs(ws.breakpoints().front()), std::abs(ws.breakpoints().back())});
    double d = std::max(8192.0, 64.0 * (reach + span + 1.0));
    mass = window_mass(-d, d);
    auto ray = [&](double dist_far, double dist_near, double tail_val) {
      double hi = std::pow(l1 / kPi, p) * std::pow(dist_near, 1.0 - p) / (p - 1.0);
      double lo = std::pow(l1 / kPi, p) * std::pow(dist_far, 1.0 - p) / (p - 1.0);
      return CertifiedValue::pm(tail_val * 0.5 * (hi + lo), tail_val * 0.5 * (hi - lo));
    };
    if (ws.right_tail() > 0) mass = mass + ray(d - hull->first, d - hull->second, ws.right_tail());
    if (ws.left_tail() > 0) mass = mass + ray(hull->second + d, hull->first + d, ws.left_tail());
  } else {
    double wsup = w.sup_bound_or(1.0);
    double half = std::max({std::abs(hull->first), std::abs(hull->second), 8.0});
    double bound = std::numeric_limits<double>::infinity();
    mass = window_mass(-half, half);
    for (int iter = 0; iter < 40; ++iter) {
      double dmin = std::min(std::abs(-half - hull->second), std::abs(half - hull->first));
      // |Hf(x)| <= ||f||_1 / (pi dist)
      bound = 2.0 * wsup * std::pow(l1 / kPi, p) * std::pow(dmin, 1.0 - p) / (p - 1.0);
      if (bound <= 1e-9 * std::max(mass.value, 1e-300)) break;
      if (half >= 32768.0 && bound <= 1e-4 * std::max(mass.value, 1e-300)) break;
      if (half > 4e5) break;
      mass = mass + window_mass(-2 * half, -half) + window_mass(half, 2 * half);
      half *= 2.0;
    }
    mass = CertifiedValue::pm(mass.value + bound / 2, mass.error + bound / 2);
  }
  if (!mass.finite) return mass;
  double val = std::pow(mass.value, 1.0 / p);
  double err = mass.value > 0 ? mass.error / p * std::pow(mass.value, 1.0 / p - 1.0) : mass.error;
  return CertifiedValue::pm(val, err);
}

double cf_ratio(const StepFunction1D& f, const Weight& w, double p, CfMode mode, double trunc_eps) {
  if (!(p > 0)) throw std::invalid_argument("cf_ratio: p must be > 0");
  auto den = maximal_lp_mass(f, p, w);
  if (!den.finite) return std::numeric_limits<double>::infinity();
  double den_norm = std::pow(den.value, 1.0 / p);
  if (!(den_norm > 0)) return std::numeric_limits<double>::infinity();  // f == 0 flag

  CertifiedValue num;
  if (mode == CfMode::PrincipalValue) {
    num = hilbert_lp_norm(f, p, w);
  } else {
    if (!(trunc_eps > 0)) throw std::invalid_argument("cf_ratio: truncated mode needs eps > 0");
    // same quadrature with the truncated evaluator
    auto hull = f.support_hull();
    if (!hull) return std::numeric_limits<double>::infinity();
    auto cls = classify_tail(w, PsiFunction::power(p));
    if (!cls.finite) return std::numeric_limits<double>::infinity();
    double half = std::max({std::abs(hull->first), std::abs(hull->second), 8.0}) * 64.0;
    StepFunction1D ws = w.to_step(-half, half);
    CompensatedSum sum;
    const auto& edges = ws.breakpoints();
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      double v = ws(0.5 * (edges[i] + edges[i + 1]));
      if (v == 0) continue;
      sum.add(v * integrate_gk(
                      [&](double x) {
                        return std::pow(std::abs(hilbert_eval_truncated(f, x, trunc_eps)), p);
                      },
                      edges[i], edges[i + 1], {1e-9, 0.0, 1200})
                      .value);
    }
    num = CertifiedValue::pm(std::pow(sum.get(), 1.0 / p), 0.0);
  }
  if (!num.finite) return std::numeric_limits<double>::infinity();
  return num.value / den_norm;
}

GrandMaximalResult grand_maximal_eval(const StepFunction1D& f, const StepFunction1D& g,
                                      double theta, const std::vector<Cube>& menu) {
  if (!(theta > 0) || !(theta < 1))
    throw std::invalid_argument("grand_maximal_eval: theta must lie in (0,1)");
  if (!f.compact_support() || !g.compact_support())
    throw std::invalid_argument("grand_maximal_eval: compact support required");
  GrandMaximalResult res;
  for (const auto& q : menu) {
    if (q.dim() != 1) throw std::invalid_argument("grand_maximal_eval: 1D menu required");
    Cube q3 = dilate(q, 3.0);
    StepFunction1D fcut = f.excluding(q3.lower[0], q3.upper(0));
    double val = 0.0;
    if (fcut.integral().value > 0.0) {
      // the cut support is >= l(Q) away from Q, so the integrand is smooth on Q
      auto r = integrate_gk(
          [&](double x) {
            return std::pow(std::abs(hilbert_eval(fcut, x)), theta) * g(x);
          },
          q.lower[0], q.upper(0), {1e-10, 0.0, 800});
      val = r.value / q.volume();
    }
    res.per_cube.push_back(val);
    res.max = std::max(res.max, val);
  }
  return res;
}

ThetaSparseResult theta_sparse_check(const StepFunction1D& f, const StepFunction1D& g,
                                     double theta, double s) {
  if (!(theta > 0) || !(theta < 1))
    throw std::invalid_argument("theta_sparse_check: theta must lie in (0,1)");
  if (!(s > 1.0) || s > 1.0 / (1.0 - theta) + 1e-12)
    throw std::invalid_argument("theta_sparse_check: need 1 < s <= 1/(1-theta)");
  ThetaSparseResult res;
  auto fh = f.support_hull();
  auto gh = g.support_hull();
  if (!fh || !gh) {
    res.flagged = true;
    return res;
  }
  // lhs = int |Hf|^theta |g|
  CompensatedSum lhs;
  std::vector<double> edges;
  for (double bp : f.breakpoints()) edges.push_back(bp);
  for (double bp : g.breakpoints()) edges.push_back(bp);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (g(0.5 * (edges[i] + edges[i + 1])) == 0.0) continue;
    lhs.add(integrate_gk(
                [&](double x) { return std::pow(std::abs(hilbert_eval(f, x)), theta) * g(x); },
                edges[i], edges[i + 1], {1e-9, 0.0, 1200})
                .value);
  }
  res.lhs = lhs.get();

  // rhs: sparse form over the CZ family rooted at a dyadic cover of the hull
  double lo = std::min(fh->first, gh->first);
  double hi = std::max(fh->second, gh->second);
  auto roots = dyadic_cover(Cube::interval(lo, hi));
  auto collection = cz_sparse(f, roots, 2.0);
  res.rhs = sparse_form(collection, f, g, s, theta);
  res.ratio = res.rhs > 0 ? res.lhs / res.rhs : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace cpw
