#include "cpw/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpw/maximal.hpp"
#include "cpw/quadrature.hpp"

namespace cpw {

double SparseEntry::exceptional_measure() const {
  double m = cube.cube().volume();
  for (const auto& r : removed) m -= r.cube().volume();
  return m;
}

namespace {

double dyadic_avg(const StepFunction1D& f, const DyadicCube& c) {
  Cube q = c.cube();
  return f.integrate_interval(q.lower[0], q.upper(0)) / q.volume();
}

bool f_constant_on(const StepFunction1D& f, const DyadicCube& c) {
  Cube q = c.cube();
  for (double b : f.breakpoints())
    if (b > q.lower[0] && b < q.upper(0)) return false;
  return true;
}

struct CzBuilder {
  const StepFunction1D& f;
  double lambda;
  int max_generation;
  std::vector<SparseEntry>& out;

  // collects the maximal stopping descendants of `cube` (whose own stopping
  // average is `base`) into entry `slot`, recursing into each stopping cube.
  void scan(const DyadicCube& cube, double base, std::size_t slot) {
    if (cube.generation >= max_generation) return;
    for (const auto& child : cube.children()) {
      double a = dyadic_avg(f, child);
      if (a > lambda * base) {
        out[slot].removed.push_back(child);
        out.push_back(SparseEntry{child, {}});
        std::size_t child_slot = out.size() - 1;
        scan(child, a, child_slot);
      } else {
        if (a == 0.0 || f_constant_on(f, child)) continue;
        scan(child, base, slot);
      }
    }
  }
};

}  // namespace

SparseCollection cz_sparse(const StepFunction1D& f, const std::vector<DyadicCube>& roots,
                           double lambda) {
  if (!(lambda > 1.0)) throw std::invalid_argument("cz_sparse: lambda must be > 1");
  if (!f.compact_support()) throw std::invalid_argument("cz_sparse: f must have zero tails");
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (roots[i].contains(roots[j]) || roots[j].contains(roots[i]))
        throw std::invalid_argument("cz_sparse: roots must be disjoint");

  SparseCollection s;
  s.gamma = 1.0 - 1.0 / lambda;
  for (const auto& root : roots) {
    s.entries.push_back(SparseEntry{root, {}});
    std::size_t slot = s.entries.size() - 1;
    CzBuilder b{f, lambda, root.generation + 64, s.entries};
    b.scan(root, dyadic_avg(f, root), slot);
  }
  return s;
}

namespace {

// |E_i cap E_j| for dyadic entries, exact via nested-or-disjoint arithmetic.
double exceptional_overlap(const SparseEntry& a, const SparseEntry& b) {
  const SparseEntry *ea = &a, *eb = &b;
  if (b.cube.contains(a.cube)) std::swap(ea, eb);
  if (!ea->cube.contains(eb->cube)) return 0.0;
  const DyadicCube& inner = eb->cube;
  // intersection domain is the inner cube; subtract the removed cubes of
  // either entry that meet it, dropping nested duplicates
  std::vector<DyadicCube> rem;
  for (const auto* e : {ea, eb})
    for (const auto& r : e->removed) {
      if (r.contains(inner)) return 0.0;
      if (inner.contains(r)) rem.push_back(r);
    }
  std::sort(rem.begin(), rem.end(),
            [](const DyadicCube& x, const DyadicCube& y) { return x.generation < y.generation; });
  std::vector<DyadicCube> kept;
  double removed_mass = 0.0;
  for (const auto& r : rem) {
    bool inside = false;
    for (const auto& k : kept)
      if (k.contains(r)) {
        inside = true;
        break;
      }
    if (!inside) {
      kept.push_back(r);
      removed_mass += r.cube().volume();
    }
  }
  return inner.cube().volume() - removed_mass;
}

}  // namespace

SparseCheck verify_sparse(const SparseCollection& s, double gamma) {
  SparseCheck chk;
  chk.worst_ratio = std::numeric_limits<double>::infinity();
  chk.disjoint = true;
  for (const auto& e : s.entries) {
    double q = e.cube.cube().volume();
    chk.worst_ratio = std::min(chk.worst_ratio, e.exceptional_measure() / q);
  }
  if (s.entries.empty()) chk.worst_ratio = 0.0;
  for (std::size_t i = 0; i < s.entries.size() && chk.disjoint; ++i)
    for (std::size_t j = i + 1; j < s.entries.size(); ++j) {
      double ov = exceptional_overlap(s.entries[i], s.entries[j]);
      double tol = 1e-12 * std::min(s.entries[i].cube.cube().volume(), s.entries[j].cube.cube().volume());
      if (ov > tol) {
        chk.disjoint = false;
        break;
      }
    }
  chk.ok = chk.disjoint && chk.worst_ratio >= gamma * (1.0 - 1e-12);
  return chk;
}

double sparse_form(const SparseCollection& s, const StepFunction1D& f, const StepFunction1D& g,
                   double t, double gamma_exp) {
  if (!(t > 1.0)) throw std::invalid_argument("sparse_form: t must be > 1");
  if (!(gamma_exp > 0.0) || gamma_exp > 1.0)
    throw std::invalid_argument("sparse_form: gamma must lie in (0,1]");
  double tp = t / (t - 1.0);
  CompensatedSum sum;
  for (const auto& e : s.entries) {
    Cube q = e.cube.cube();
    sum.add(std::pow(average(f, q, 1.0), gamma_exp) * average(g, q, t) * q.volume());
  }
  return std::pow(tp, gamma_exp) * sum.get();
}

double sparse_form_weighted(const SparseCollection& s, const StepFunction1D& f,
                            const StepFunction1D& g, const Weight& w, double t, double gamma_exp) {
  if (!(t > 1.0)) throw std::invalid_argument("sparse_form: t must be > 1");
  if (!(gamma_exp > 0.0) || gamma_exp > 1.0)
    throw std::invalid_argument("sparse_form: gamma must lie in (0,1]");
  double tp = t / (t - 1.0);
  CompensatedSum sum;
  for (const auto& e : s.entries) {
    Cube q = e.cube.cube();
    StepFunction1D gw = StepFunction1D::combine(g, w.to_step(q.lower[0], q.upper(0)),
                                                [](double x, double y) { return x * y; });
    sum.add(std::pow(average(f, q, 1.0), gamma_exp) * average(gw, q, t) * q.volume());
  }
  return std::pow(tp, gamma_exp) * sum.get();
}

double sparse_mass_ratio(const SparseCollection& s, const Cube& q0, const Weight& w, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("sparse_mass_ratio: q must be > 1");
  PsiFunction psi = PsiFunction::power(q);
  auto den = tail_functional(q0, w, psi);
  if (!den.finite) return std::numeric_limits<double>::infinity();
  CompensatedSum num;
  for (const auto& e : s.entries) {
    Cube r = e.cube.cube();
    if (!q0.contains_cube(r))
      throw std::invalid_argument("sparse_mass_ratio: collection not contained in Q0");
    auto t = tail_functional(r, w, psi);
    if (!t.finite) return std::numeric_limits<double>::infinity();
    num.add(t.value);
  }
  return num.get() / den.value;
}

double corollary_norm_ratio(const SparseCollection& s, const StepFunction1D& f, const Weight& w,
                            double p, double q) {
  if (!(0 < p && p < q)) throw std::invalid_argument("corollary_norm_ratio: need 0 < p < q");
  auto den = maximal_lp_mass(f, p, w);
  if (!den.finite) return std::numeric_limits<double>::infinity();
  if (den.value <= den.error) return std::numeric_limits<double>::infinity();  // division flag
  PsiFunction psi = PsiFunction::power(q);
  CompensatedSum num;
  for (const auto& e : s.entries) {
    Cube cube = e.cube.cube();
    auto t = tail_functional(cube, w, psi);
    if (!t.finite) return std::numeric_limits<double>::infinity();
    num.add(std::pow(average(f, cube, 1.0), p) * t.value);
  }
  return num.get() / den.value;
}

CarlesonResult carleson_check(const std::vector<std::pair<DyadicCube, double>>& family,
                              const Weight& w, const StepFunction1D& h, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("carleson_check: alpha must be > 1");
  CarlesonResult res;
  std::vector<double> wq(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    Cube q = family[i].first.cube();
    wq[i] = w.integrate_cube(q).value;
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (wq[i] <= 0) {
      res.skipped_zero_mass = true;
      continue;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j)
      if (family[i].first.contains(family[j].first)) acc += family[j].second;
    res.a_found = std::max(res.a_found, acc / wq[i]);
  }
  // embedding inequality on the family
  CompensatedSum lhs;
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (wq[i] <= 0) continue;
    Cube q = family[i].first.cube();
    StepFunction1D hw = StepFunction1D::combine(h, w.to_step(q.lower[0], q.upper(0)),
                                                [](double a, double b) { return a * b; });
    double avg_w = hw.integrate_interval(q.lower[0], q.upper(0)) / wq[i];
    lhs.add(family[i].second * std::pow(avg_w, alpha));
  }
  res.lhs = lhs.get();
  double alpha_prime = alpha / (alpha - 1.0);
  auto norm = weighted_power_mass(h, alpha, w);
  res.rhs = res.a_found * std::pow(alpha_prime, alpha) * norm.value;
  res.holds = res.lhs <= res.rhs * (1.0 + 1e-9) + 1e-300;
  return res;
}

CertifiedValue maximal_lp_mass(const StepFunction1D& f, double p, const Weight& w) {
  if (!(p > 0)) throw std::invalid_argument("maximal_lp_mass: p must be > 0");
  if (!f.compact_support()) throw std::invalid_argument("maximal_lp_mass: compact f required");
  auto hull = f.support_hull();
  if (!hull) return CertifiedValue::exact(0.0);
  if (w.dim() != 1) throw std::invalid_argument("maximal_lp_mass: 1D weights only");

  auto cls = classify_tail(w, PsiFunction::power(p));
  if (!cls.finite) return CertifiedValue::infinite("||Mf||_p^p diverges: " + cls.reason);

  double l1 = f.l1_norm();
  auto window_mass = [&](double wlo, double whi) -> CertifiedValue {
    StepFunction1D ws = w.to_step(wlo, whi);
    std::vector<double> edges(ws.breakpoints());
    for (double b : f.breakpoints())
      if (b > wlo && b < whi) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    CompensatedSum sum;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      double v = ws(0.5 * (edges[i] + edges[i + 1]));
      if (v == 0) continue;
      auto r = integrate_gk([&](double x) { return std::pow(m_stepfn_eval(f, x), p); }, edges[i],
                            edges[i + 1], {1e-10, 0.0, 1200});
      sum.add(v * r.value);
      err += v * r.error;
    }
    return CertifiedValue::pm(sum.get(), err);
  };

  if (w.has_compact_support()) {
    auto [sl, sh] = w.support_window();
    return window_mass(std::min(sl, hull->first) - 1.0, std::max(sh, hull->second) + 1.0);
  }
  if (!w.step_materializable())
    throw std::invalid_argument("maximal_lp_mass: unbounded analytic weights unsupported");

  if (w.kind() == Weight::Kind::Step) {
    // constant tails: on rays beyond D the exact bracket
    // total/(x - far) <= Mf(x) <= total/(x - near) integrates in closed form
    if (!(p > 1.0)) return CertifiedValue::infinite("||Mf||_p^p diverges for p <= 1");
    const auto& ws = w.step_fn();
    double span = hull->second - hull->first;
    double reach = std::max({std::abs(hull->first), std::abs(hull->second),
                             std::abs(ws.breakpoints().front()), std::abs(ws.breakpoints().back())});
    double d = std::max(8192.0, 64.0 * (reach + span + 1.0));
    auto inner = window_mass(-d, d);
    auto ray = [&](double dist_far, double dist_near, double tail_val) {
      double hi = std::pow(l1, p) * std::pow(dist_near, 1.0 - p) / (p - 1.0);
      double lo = std::pow(l1, p) * std::pow(dist_far, 1.0 - p) / (p - 1.0);
      return CertifiedValue::pm(tail_val * 0.5 * (hi + lo), tail_val * 0.5 * (hi - lo));
    };
    CertifiedValue right = ws.right_tail() > 0
                               ? ray(d - hull->first, d - hull->second, ws.right_tail())
                               : CertifiedValue::exact(0.0);
    CertifiedValue left = ws.left_tail() > 0
                              ? ray(hull->second + d, hull->first + d, ws.left_tail())
                              : CertifiedValue::exact(0.0);
    return inner + left + right;
  }

  double wsup = w.sup_bound_or(1.0);
  double half = std::max({std::abs(hull->first), std::abs(hull->second), 8.0});
  CertifiedValue inner = window_mass(-half, half);
  double bound = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 40; ++iter) {
    // Mf(x) <= ||f||_1 / dist(x, hull) off the support
    double dmin = std::min(std::abs(-half - hull->second), std::abs(half - hull->first));
    bound = 2.0 * wsup * std::pow(l1, p) * std::pow(dmin, 1.0 - p) / (p - 1.0);
    if (bound <= 1e-9 * std::max(inner.value, 1e-300)) break;
    if (half >= 32768.0 && bound <= 1e-4 * std::max(inner.value, 1e-300)) break;
    if (half > 4e5) break;
    inner = inner + window_mass(-2 * half, -half) + window_mass(half, 2 * half);
    half *= 2.0;
  }
  return CertifiedValue::pm(inner.value + bound / 2, inner.error + bound / 2);
}

}  // namespace cpw
