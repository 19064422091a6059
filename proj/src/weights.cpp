#include "cpw/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpw/maximal.hpp"
#include "cpw/quadrature.hpp"

namespace cpw {

// -- psi ----------------------------------------------------------------------

double phi_p(double t, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("phi_p: p must be > 1");
  if (!(t >= 0.0)) throw std::invalid_argument("phi_p: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (t > 1.0) t = 1.0;
  double lg = std::log1p(1.0 / t);
  return std::pow(t, p) / (lg * lg);
}

PsiFunction PsiFunction::power(double p) {
  if (!(p > 0)) throw std::invalid_argument("PsiFunction::power: p must be > 0");
  PsiFunction f;
  f.kind_ = Kind::Power;
  f.p_ = p;
  return f;
}

PsiFunction PsiFunction::phi(double p) {
  if (!(p > 1)) throw std::invalid_argument("PsiFunction::phi: p must be > 1");
  PsiFunction f;
  f.kind_ = Kind::PhiP;
  f.p_ = p;
  return f;
}

PsiFunction PsiFunction::custom(std::function<double(double)> fn, double near_zero_exponent) {
  PsiFunction f;
  f.kind_ = Kind::Custom;
  f.fn_ = std::move(fn);
  f.hint_ = near_zero_exponent;
  if (!f.validate()) throw std::invalid_argument("PsiFunction::custom: not nondecreasing on [0,1]");
  return f;
}

double PsiFunction::operator()(double t) const {
  if (!(t >= 0)) throw std::invalid_argument("PsiFunction: t must be >= 0");
  if (t > 1.0) t = 1.0;
  switch (kind_) {
    case Kind::Power:
      return std::pow(t, p_);
    case Kind::PhiP:
      return phi_p(t, p_);
    case Kind::Custom:
      return fn_(t);
  }
  return 0.0;
}

double PsiFunction::near_zero_exponent() const {
  if (kind_ == Kind::Custom) return hint_;
  return p_;
}

bool PsiFunction::validate() const {
  if (kind_ != Kind::Custom) return true;
  double prev = -1.0;
  for (int i = 0; i <= 512; ++i) {
    double t = static_cast<double>(i) / 512.0;
    double v = fn_(t);
    if (!(v >= 0) || !std::isfinite(v) || v + 1e-12 * std::max(1.0, std::abs(prev)) < prev)
      return false;
    prev = v;
  }
  return true;
}

std::string PsiFunction::name() const {
  switch (kind_) {
    case Kind::Power:
      return "power(" + std::to_string(p_) + ")";
    case Kind::PhiP:
      return "phi(" + std::to_string(p_) + ")";
    case Kind::Custom:
      return "custom";
  }
  return {};
}

// -- KM rules -------------------------------------------------------------------

KmRule KmRule::geometric_power(double p, int dim) {
  KmRule r;
  r.ell_kind = EllKind::Geometric;
  r.h_kind = HKind::PowerOfEll;
  r.p = p;
  r.dim = dim;
  r.validate();
  return r;
}

KmRule KmRule::geometric_phi(double p, int dim) {
  KmRule r = geometric_power(p, dim);
  r.h_kind = HKind::PhiOverEll;
  r.validate();
  return r;
}

KmRule KmRule::harmonic_power(double p, int dim) {
  KmRule r = geometric_power(p, dim);
  r.ell_kind = EllKind::Harmonic;
  r.validate();
  return r;
}

KmRule KmRule::table(std::map<long long, double> ell, std::map<long long, double> h) {
  KmRule r;
  r.ell_kind = EllKind::Table;
  r.h_kind = HKind::Table;
  r.ell_table = std::move(ell);
  r.h_table = std::move(h);
  r.validate();
  return r;
}

double KmRule::ell(long long k) const {
  switch (ell_kind) {
    case EllKind::Geometric:
      return std::ldexp(1.0, -static_cast<int>(std::min<long long>(std::llabs(k), 1060)) - 1);
    case EllKind::Harmonic:
      return 1.0 / (static_cast<double>(std::llabs(k)) + 2.0);
    case EllKind::Table: {
      auto it = ell_table.find(k);
      return it == ell_table.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

double KmRule::h(long long k) const {
  double l = ell(k);
  if (l <= 0.0) return 0.0;
  double base;
  switch (h_kind) {
    case HKind::PowerOfEll:
      base = std::pow(l, static_cast<double>(dim) * (p - 1.0));
      break;
    case HKind::PhiOverEll: {
      double ln = std::pow(l, static_cast<double>(dim));
      base = phi_p(ln, p) / ln;
      break;
    }
    case HKind::Table: {
      auto it = h_table.find(k);
      base = it == h_table.end() ? 0.0 : it->second;
      break;
    }
  }
  return power_scale == 1.0 ? base : std::pow(base, power_scale);
}

double KmRule::h_sup(long long k_range) const {
  double m = 0.0;
  if (h_kind == HKind::Table) {
    for (const auto& [k, v] : h_table) m = std::max(m, power_scale == 1.0 ? v : std::pow(v, power_scale));
    return m;
  }
  for (long long k = -k_range; k <= k_range; ++k) m = std::max(m, h(k));
  return m;
}

void KmRule::validate() const {
  long long probe = 32;
  for (long long k = -probe; k <= probe; ++k) {
    double l = ell(k);
    if (ell_kind == EllKind::Table && ell_table.find(k) == ell_table.end()) continue;
    if (!(l > 0.0) || l > 1.0) throw std::invalid_argument("KmRule: need 0 < ell_k <= 1");
    double hk = h(k);
    if (!(hk > 0.0) || !std::isfinite(hk)) throw std::invalid_argument("KmRule: need 0 < h_k < inf");
  }
}

Cube km_hole_cube(const KmRule& rule, long long k) {
  double l = rule.ell(k);
  if (!(l > 0)) throw std::invalid_argument("km_hole_cube: ell_k vanishes");
  return Cube({4.0 * static_cast<double>(k) - l / 2.0}, l);
}

Cube km_island_cube(long long k) { return Cube({4.0 * static_cast<double>(k) - 3.0}, 2.0); }

Cube km_hole_cube_nd(const KmRule& rule, const std::vector<long long>& m) {
  long long s = 0;
  for (long long mi : m) s += std::llabs(mi);
  double l = rule.ell(s);
  if (!(l > 0)) throw std::invalid_argument("km_hole_cube_nd: ell_m vanishes");
  std::vector<double> lo(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) lo[i] = 4.0 * static_cast<double>(m[i]) - l / 2.0;
  return Cube(std::move(lo), l);
}

Cube km_island_cube_nd(const std::vector<long long>& m) {
  std::vector<double> lo(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) lo[i] = 4.0 * static_cast<double>(m[i]) - 3.0;
  return Cube(std::move(lo), 2.0);
}

// -- weight construction --------------------------------------------------------

Weight Weight::step(StepFunction1D s) {
  Weight w;
  w.kind_ = Kind::Step;
  w.dim_ = 1;
  w.step_ = std::make_shared<StepFunction1D>(std::move(s));
  double m = w.step_->max_value();
  if (m <= 0) throw std::invalid_argument("Weight: a.e. zero");
  w.bound_hint_ = m;
  return w;
}

Weight Weight::constant(double c) { return step(StepFunction1D::constant(c)); }

Weight Weight::km1d(KmRule rule) {
  rule.validate();
  Weight w;
  w.kind_ = Kind::Km1d;
  w.dim_ = 1;
  w.rule_ = std::make_shared<KmRule>(std::move(rule));
  w.bound_hint_ = std::max(1.0, w.rule_->h_sup());
  return w;
}

Weight Weight::kmnd(KmRule rule, int dim) {
  if (dim < 1) throw std::invalid_argument("Weight::kmnd: dim must be >= 1");
  rule.validate();
  Weight w;
  w.kind_ = Kind::KmNd;
  w.dim_ = dim;
  w.rule_ = std::make_shared<KmRule>(std::move(rule));
  w.bound_hint_ = std::max(1.0, w.rule_->h_sup());
  return w;
}

Weight Weight::analytic(std::function<double(double)> fn, TailDescriptor tail,
                        std::optional<OpenSet> support, std::optional<double> bound_hint) {
  Weight w;
  w.kind_ = Kind::Analytic;
  w.dim_ = 1;
  w.fn_ = std::move(fn);
  w.tail_ = tail;
  if (support) w.support_ = std::make_shared<OpenSet>(std::move(*support));
  w.bound_hint_ = bound_hint;
  return w;
}

Weight Weight::grid(GridFunctionND g) {
  Weight w;
  w.kind_ = Kind::Grid;
  w.dim_ = g.dim();
  w.grid_ = std::make_shared<GridFunctionND>(std::move(g));
  return w;
}

bool Weight::has_compact_support() const {
  switch (kind_) {
    case Kind::Step:
      return step_->compact_support();
    case Kind::Km1d:
    case Kind::KmNd:
      return false;
    case Kind::Analytic:
      return support_ && !support_->is_empty() && support_->bounding_box().has_value();
    case Kind::Grid:
      return grid_->outside_value() == 0.0;
  }
  return false;
}

std::pair<double, double> Weight::support_window() const {
  if (!has_compact_support()) throw std::invalid_argument("support_window: weight has unbounded support");
  switch (kind_) {
    case Kind::Step:
      return {step_->breakpoints().front(), step_->breakpoints().back()};
    case Kind::Analytic: {
      auto bb = support_->bounding_box();
      return {bb->lo[0], bb->hi[0]};
    }
    case Kind::Grid:
      return {grid_->box().lower[0], grid_->box().upper(0)};
    default:
      throw std::logic_error("support_window: unreachable");
  }
}

double Weight::operator()(double x) const {
  if (dim_ != 1) throw std::invalid_argument("Weight::operator(): use value_at for dim > 1");
  return value_at({x});
}

double Weight::value_at(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("Weight::value_at: dim mismatch");
  switch (kind_) {
    case Kind::Step:
      return (*step_)(x[0]);
    case Kind::Km1d: {
      double t = x[0];
      auto k = static_cast<long long>(std::llround(t / 4.0));
      double c = 4.0 * static_cast<double>(k);
      if (std::abs(t - c) <= rule_->ell(k) / 2.0) return rule_->h(k);
      // islands: t in [4j-3, 4j-1] for some j
      double frac = t - 4.0 * std::floor(t / 4.0);  // [0,4)
      if (frac >= 1.0 && frac <= 3.0) return 1.0;
      return 0.0;
    }
    case Kind::KmNd: {
      bool in_a = true;
      long long s = 0;
      std::vector<long long> m(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        double frac = x[i] - 4.0 * std::floor(x[i] / 4.0);
        if (frac < 1.0 || frac > 3.0) in_a = false;
        m[i] = static_cast<long long>(std::llround(x[i] / 4.0));
        s += std::llabs(m[i]);
      }
      if (in_a) return 1.0;
      double l = rule_->ell(s);
      bool in_hole = l > 0;
      for (std::size_t i = 0; i < x.size() && in_hole; ++i)
        if (std::abs(x[i] - 4.0 * static_cast<double>(m[i])) > l / 2.0) in_hole = false;
      return in_hole ? rule_->h(s) : 0.0;
    }
    case Kind::Analytic: {
      if (support_ && !support_->contains(x)) return 0.0;
      double v = fn_(x[0]);
      return v > 0 ? v : 0.0;
    }
    case Kind::Grid:
      return (*grid_)(x);
  }
  return 0.0;
}

bool Weight::step_materializable() const {
  return dim_ == 1 && kind_ != Kind::Analytic;
}

StepFunction1D Weight::to_step(double lo, double hi) const {
  if (!(hi > lo)) throw std::invalid_argument("to_step: need hi > lo");
  if (!step_materializable())
    throw std::invalid_argument("to_step: weight has no exact step materialization");
  if (kind_ == Kind::Step) return step_->restricted(lo, hi);
  if (kind_ == Kind::Grid) {
    std::vector<double> breaks{lo};
    std::vector<double> vals;
    const auto& g = *grid_;
    double h = g.box().side / g.cells_per_axis();
    for (int i = 0; i <= g.cells_per_axis(); ++i) {
      double edge = g.box().lower[0] + h * i;
      if (edge > lo && edge < hi) breaks.push_back(edge);
    }
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      vals.push_back(g({0.5 * (breaks[i] + breaks[i + 1])}));
    return StepFunction1D(std::move(breaks), std::move(vals));
  }
  // Km1d: cells are islands (value 1) and holes (value h_k)
  std::vector<std::pair<Cube, double>> cells;
  auto kmin = static_cast<long long>(std::floor((lo - 1.0) / 4.0));
  auto kmax = static_cast<long long>(std::ceil((hi + 1.0) / 4.0));
  for (long long k = kmin; k <= kmax; ++k) {
    Cube island = km_island_cube(k);
    if (island.upper(0) > lo && island.lower[0] < hi) cells.emplace_back(island, 1.0);
    double l = rule_->ell(k);
    if (l > 0) {
      Cube hole = km_hole_cube(*rule_, k);
      if (hole.upper(0) > lo && hole.lower[0] < hi) cells.emplace_back(hole, rule_->h(k));
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first.lower[0] < b.first.lower[0]; });
  std::vector<double> breaks{lo};
  std::vector<double> vals;
  for (const auto& [c, v] : cells) {
    double a = std::max(lo, c.lower[0]);
    double b = std::min(hi, c.upper(0));
    if (b <= a) continue;
    if (a > breaks.back()) {
      vals.push_back(0.0);
      breaks.push_back(a);
    }
    vals.push_back(v);
    breaks.push_back(b);
  }
  if (breaks.back() < hi) {
    vals.push_back(0.0);
    breaks.push_back(hi);
  }
  if (vals.empty()) return StepFunction1D::zero();
  return StepFunction1D(std::move(breaks), std::move(vals));
}

namespace {

// measure of the island union (period 4, pattern [1,3)) below x
double km_island_cumulative(double x) {
  double period = std::floor(x / 4.0);
  double frac = x - 4.0 * period;
  return 2.0 * period + std::clamp(frac - 1.0, 0.0, 2.0);
}

// exact island mass plus hole masses over [lo, hi]; hole sums beyond the
// enumeration cap go into the certified error via the rule's decay
CertifiedValue km_interval_mass(const KmRule& rule, double lo, double hi) {
  if (hi <= lo) return CertifiedValue::exact(0.0);
  double islands = km_island_cumulative(hi) - km_island_cumulative(lo);
  auto klo = static_cast<long long>(std::ceil((lo - 0.5) / 4.0));
  auto khi = static_cast<long long>(std::floor((hi + 0.5) / 4.0));
  constexpr long long kCap = 200'000;
  CompensatedSum holes;
  double err = 0.0;
  long long a = std::max(klo, -kCap), b2 = std::min(khi, kCap);
  for (long long k = a; k <= b2; ++k) {
    double l = rule.ell(k);
    if (l <= 0) continue;
    double c = 4.0 * static_cast<double>(k);
    double o = std::min(hi, c + l / 2.0) - std::max(lo, c - l / 2.0);
    if (o > 0) holes.add(rule.h(k) * std::min(o, l));
  }
  if (klo < -kCap || khi > kCap) {
    // remaining holes: h_k ell_k <= (|k|+2)^{-e} with e > 1 for the
    // harmonic family (the geometric family underflows inside the cap,
    // and tables vanish outside their keys)
    if (rule.ell_kind == KmRule::EllKind::Harmonic) {
      double e = (static_cast<double>(rule.dim) * (rule.p - 1.0)) * rule.power_scale + 1.0;
      if (e <= 1.0)
        return CertifiedValue::infinite("km mass: hole masses are not summable");
      err += 2.0 * std::pow(static_cast<double>(kCap), 1.0 - e) / (e - 1.0);
    }
  }
  return CertifiedValue::pm(islands + holes.get(), err);
}

}  // namespace

CertifiedValue Weight::integrate_cube(const Cube& q) const {
  if (q.dim() != dim_) throw std::invalid_argument("integrate_cube: dim mismatch");
  switch (kind_) {
    case Kind::Step:
      return CertifiedValue::exact(step_->integrate_interval(q.lower[0], q.upper(0)));
    case Kind::Km1d:
      return km_interval_mass(*rule_, q.lower[0], q.upper(0));
    case Kind::Grid:
      return CertifiedValue::exact(grid_->integrate_box(Box::of(q)));
    case Kind::KmNd: {
      // island part is a product of per-axis island masses
      double island = 1.0;
      for (int i = 0; i < dim_; ++i)
        island *= km_island_cumulative(q.upper(i)) - km_island_cumulative(q.lower[i]);
      // holes enumerated over the index box
      CompensatedSum holes;
      double cells = 1.0;
      std::vector<long long> mlo(static_cast<std::size_t>(dim_)), mhi(static_cast<std::size_t>(dim_)), cur(static_cast<std::size_t>(dim_));
      for (int i = 0; i < dim_; ++i) {
        mlo[i] = static_cast<long long>(std::ceil((q.lower[i] - 0.5) / 4.0));
        mhi[i] = static_cast<long long>(std::floor((q.upper(i) + 0.5) / 4.0));
        if (mhi[i] < mlo[i]) return CertifiedValue::exact(island);
        cells *= static_cast<double>(mhi[i] - mlo[i] + 1);
        cur[i] = mlo[i];
      }
      if (cells > 4e6)
        throw std::invalid_argument("integrate_cube: nD hole enumeration too large for this box");
      while (true) {
        long long s = 0;
        for (long long mi : cur) s += std::llabs(mi);
        double l = rule_->ell(s);
        if (l > 0) {
          double ov = 1.0;
          for (int i = 0; i < dim_ && ov > 0; ++i) {
            double c = 4.0 * static_cast<double>(cur[i]);
            double a = std::max(q.lower[i], c - l / 2.0);
            double b = std::min(q.upper(i), c + l / 2.0);
            ov = b > a ? ov * (b - a) : 0.0;
          }
          if (ov > 0) holes.add(rule_->h(s) * ov);
        }
        int axis = 0;
        while (axis < dim_) {
          if (cur[axis] < mhi[axis]) {
            ++cur[axis];
            for (int j = 0; j < axis; ++j) cur[j] = mlo[j];
            break;
          }
          ++axis;
        }
        if (axis == dim_) break;
      }
      return CertifiedValue::exact(island + holes.get());
    }
    case Kind::Analytic: {
      // quadrature over the support boxes clipped to q
      OpenSet domain = support_ ? support_->intersect(q) : OpenSet(1, {Box::of(q)});
      CompensatedSum s;
      double err = 0.0;
      for (const auto& b : domain.boxes()) {
        auto r = integrate_gk([this](double x) { return fn_(x); }, b.lo[0], b.hi[0], {1e-12, 0.0, 2000});
        if (!r.finite) return r;
        s.add(r.value);
        err += r.error;
      }
      return CertifiedValue::pm(s.get(), err);
    }
  }
  return CertifiedValue::exact(0.0);
}

CertifiedValue Weight::integrate_set(const OpenSet& e) const {
  if (e.dim() != dim_) throw std::invalid_argument("integrate_set: dim mismatch");
  CompensatedSum s;
  double err = 0.0;
  for (const auto& b : e.boxes()) {
    auto r = dim_ == 1 ? integrate_cube(Cube::interval(b.lo[0], b.hi[0])) : integrate_box_nd(b);
    if (!r.finite) return r;
    s.add(r.value);
    err += r.error;
  }
  return CertifiedValue::pm(s.get(), err);
}

CertifiedValue Weight::integrate_box_nd(const Box& b) const {
  switch (kind_) {
    case Kind::Grid:
      return CertifiedValue::exact(grid_->integrate_box(b));
    case Kind::KmNd: {
      // same as integrate_cube but with a general box
      double island = 1.0;
      for (int i = 0; i < dim_; ++i)
        island *= km_island_cumulative(b.hi[i]) - km_island_cumulative(b.lo[i]);
      CompensatedSum holes;
      double cells = 1.0;
      std::vector<long long> mlo(static_cast<std::size_t>(dim_)), mhi(static_cast<std::size_t>(dim_)), cur(static_cast<std::size_t>(dim_));
      for (int i = 0; i < dim_; ++i) {
        mlo[i] = static_cast<long long>(std::ceil((b.lo[i] - 0.5) / 4.0));
        mhi[i] = static_cast<long long>(std::floor((b.hi[i] + 0.5) / 4.0));
        if (mhi[i] < mlo[i]) return CertifiedValue::exact(island);
        cells *= static_cast<double>(mhi[i] - mlo[i] + 1);
        cur[i] = mlo[i];
      }
      if (cells > 4e6)
        throw std::invalid_argument("integrate_box_nd: hole enumeration too large for this box");
      while (true) {
        long long s = 0;
        for (long long mi : cur) s += std::llabs(mi);
        double l = rule_->ell(s);
        if (l > 0) {
          double ov = 1.0;
          for (int i = 0; i < dim_ && ov > 0; ++i) {
            double c = 4.0 * static_cast<double>(cur[i]);
            double a0 = std::max(b.lo[i], c - l / 2.0);
            double b0 = std::min(b.hi[i], c + l / 2.0);
            ov = b0 > a0 ? ov * (b0 - a0) : 0.0;
          }
          if (ov > 0) holes.add(rule_->h(s) * ov);
        }
        int axis = 0;
        while (axis < dim_) {
          if (cur[axis] < mhi[axis]) {
            ++cur[axis];
            for (int j = 0; j < axis; ++j) cur[j] = mlo[j];
            break;
          }
          ++axis;
        }
        if (axis == dim_) break;
      }
      return CertifiedValue::exact(island + holes.get());
    }
    default:
      throw std::invalid_argument("integrate_box_nd: unsupported weight kind");
  }
}

Weight Weight::power(double r) const {
  if (!(r > 0)) throw std::invalid_argument("Weight::power: r must be > 0");
  switch (kind_) {
    case Kind::Step:
      return step(step_->pow(r));
    case Kind::Km1d: {
      KmRule rr = *rule_;
      rr.power_scale *= r;
      return km1d(rr);
    }
    case Kind::KmNd: {
      KmRule rr = *rule_;
      rr.power_scale *= r;
      return kmnd(rr, dim_);
    }
    case Kind::Grid:
      return grid(grid_->pow(r));
    case Kind::Analytic: {
      auto f = fn_;
      TailDescriptor td = *tail_;
      td.growth *= r;
      td.c_lower = std::pow(td.c_lower, r);
      td.c_upper = std::pow(td.c_upper, r);
      std::optional<OpenSet> sup;
      if (support_) sup = *support_;
      std::optional<double> bh;
      if (bound_hint_) bh = std::pow(*bound_hint_, r);
      return analytic([f, r](double x) { return std::pow(f(x), r); }, td, std::move(sup), bh);
    }
  }
  throw std::logic_error("Weight::power: unreachable");
}

double Weight::sup_bound_or(double fallback) const {
  if (kind_ == Kind::Grid) {
    double m = grid_->outside_value();
    // grid values are few; scan once
    return std::max(m, [this] {
      double mm = 0;
      const auto& g = *grid_;
      int n = g.dim();
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        mm = std::max(mm, g.cell_value(idx));
        int axis = 0;
        while (axis < n) {
          if (idx[axis] + 1 < g.cells_per_axis()) {
            ++idx[axis];
            for (int j = 0; j < axis; ++j) idx[j] = 0;
            break;
          }
          ++axis;
        }
        if (axis == n) break;
      }
      return mm;
    }());
  }
  return bound_hint_ ? *bound_hint_ : fallback;
}

std::optional<TailDescriptor> Weight::effective_tail() const {
  if (has_compact_support()) return std::nullopt;
  TailDescriptor td;
  switch (kind_) {
    case Kind::Step: {
      td.growth = 0.0;
      td.x0 = std::max(std::abs(step_->breakpoints().front()), std::abs(step_->breakpoints().back())) + 1.0;
      td.c_upper = std::max(step_->left_tail(), step_->right_tail());
      td.c_lower = td.c_upper;
      td.support_mass_exponent = 1.0;
      td.mass_coeff = (step_->left_tail() > 0 ? 1.0 : 0.0) + (step_->right_tail() > 0 ? 1.0 : 0.0);
      return td;
    }
    case Kind::Km1d:
    case Kind::KmNd:
      td.growth = 0.0;
      td.x0 = 4.0;
      td.c_upper = sup_bound_or(1.0);
      td.c_lower = 1.0;
      td.support_mass_exponent = static_cast<double>(dim_);
      td.mass_coeff = std::pow(2.0, dim_ + 1);
      return td;
    case Kind::Analytic:
      return tail_;
    case Kind::Grid:
      td.growth = 0.0;
      td.x0 = 1.0;
      td.c_upper = grid_->outside_value();
      td.c_lower = td.c_upper;
      td.support_mass_exponent = static_cast<double>(dim_);
      td.mass_coeff = std::pow(2.0, dim_ + 1);
      return td;
  }
  return std::nullopt;
}

const StepFunction1D& Weight::step_fn() const {
  if (kind_ != Kind::Step) throw std::logic_error("step_fn: wrong kind");
  return *step_;
}
const KmRule& Weight::km_rule() const {
  if (kind_ != Kind::Km1d && kind_ != Kind::KmNd) throw std::logic_error("km_rule: wrong kind");
  return *rule_;
}
const GridFunctionND& Weight::grid_fn() const {
  if (kind_ != Kind::Grid) throw std::logic_error("grid_fn: wrong kind");
  return *grid_;
}
const std::function<double(double)>& Weight::analytic_fn() const {
  if (kind_ != Kind::Analytic) throw std::logic_error("analytic_fn: wrong kind");
  return fn_;
}

Weight km_weight_1d(const KmRule& rule) {
  if (rule.dim != 1) {
    KmRule r = rule;
    r.dim = 1;
    return Weight::km1d(r);
  }
  return Weight::km1d(rule);
}

Weight km_weight_nd(const KmRule& rule, int dim) {
  KmRule r = rule;
  r.dim = dim;
  return Weight::kmnd(r, dim);
}

KmDensityReport km_density_check(int dim, const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& radii, double c_required) {
  KmDensityReport rep;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    for (double r : radii) {
      // |A cap Q(x,r)| with Q(x,r) of side 2r; A is the product of the
      // per-axis island sets.
      double vol = 1.0;
      for (int i = 0; i < dim; ++i) {
        double lo = x[i] - r, hi = x[i] + r;
        double m = 0.0;
        auto kmin = static_cast<long long>(std::floor((lo - 1.0) / 4.0));
        auto kmax = static_cast<long long>(std::ceil((hi + 1.0) / 4.0));
        for (long long k = kmin; k <= kmax; ++k) {
          double a = std::max(lo, 4.0 * static_cast<double>(k) - 3.0);
          double b = std::min(hi, 4.0 * static_cast<double>(k) - 1.0);
          if (b > a) m += b - a;
        }
        vol *= m;
      }
      double ratio = vol / std::pow(r, dim);
      rep.worst_ratio = std::min(rep.worst_ratio, ratio);
      if (ratio < c_required) rep.pass = false;
    }
  }
  return rep;
}

// -- weighted power mass ----------------------------------------------------------

CertifiedValue weighted_power_mass(const StepFunction1D& f, double p, const Weight& w) {
  if (w.dim() != 1) throw std::invalid_argument("weighted_power_mass: 1D weight required");
  const auto& b = f.breakpoints();
  double lo = b.front(), hi = b.back();

  // tails of f
  double lt = f.left_tail(), rt = f.right_tail();
  CompensatedSum total;
  double err = 0.0;
  if (lt > 0 || rt > 0) {
    if (!w.has_compact_support())
      return CertifiedValue::infinite("f has a nonzero tail and w has unbounded support");
    auto [wl, wh] = w.support_window();
    if (lt > 0 && wl < lo) {
      auto m = w.integrate_cube(Cube::interval(wl - 1.0, lo));
      total.add(std::pow(lt, p) * m.value);
      err += std::pow(lt, p) * m.error;
    }
    if (rt > 0 && wh > hi) {
      auto m = w.integrate_cube(Cube::interval(hi, wh + 1.0));
      total.add(std::pow(rt, p) * m.value);
      err += std::pow(rt, p) * m.error;
    }
  }

  if (f.values().empty()) return CertifiedValue::pm(total.get(), err);

  if (w.step_materializable()) {
    StepFunction1D ws = w.to_step(lo - 1.0, hi + 1.0);
    StepFunction1D prod = StepFunction1D::combine(
        f.pow(p).restricted(lo, hi), ws, [](double a, double c) { return a * c; });
    total.add(prod.integral().value);
  } else {
    // analytic weight: per-piece quadrature
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      double v = f.values()[i];
      if (v == 0) continue;
      auto r = integrate_gk([&](double x) { return w(x); }, b[i], b[i + 1], {1e-12, 0.0, 2000});
      if (!r.finite) return r;
      total.add(std::pow(v, p) * r.value);
      err += std::pow(v, p) * r.error;
    }
  }
  return CertifiedValue::pm(total.get(), err);
}

// -- tail classification -----------------------------------------------------------

namespace {

/// Certified upper value of int_0^{t0} psi(t) t^{-beta-1} dt by dyadic panels
/// toward 0 plus an analytic (Power/PhiP) or empirical-geometric (Custom)
/// remainder. Returns infinite when not certifiably convergent.
CertifiedValue psi_small_t_integral(const PsiFunction& psi, double t0, double beta) {
  if (t0 <= 0) return CertifiedValue::exact(0.0);
  auto integrand = [&](double t) { return psi(t) * std::pow(t, -beta - 1.0); };
  CompensatedSum sum;
  double err = 0.0;
  double hi = t0;
  double prev_panel = -1.0;
  for (int j = 0; j < 1080; ++j) {
    double lo = hi / 2.0;
    auto r = integrate_gk(integrand, lo, hi, {1e-13, 0.0, 400});
    if (!r.finite) return r;
    sum.add(r.value);
    err += r.error;
    double t_next = lo;
    // analytic remainder bounds
    if (psi.kind() == PsiFunction::Kind::Power) {
      double p = psi.exponent();
      if (p <= beta) return CertifiedValue::infinite("power psi: tail integral diverges");
      double rem = std::pow(t_next, p - beta) / (p - beta);
      if (rem <= 1e-12 * std::max(sum.get(), 1e-300)) return CertifiedValue::pm(sum.get() + rem / 2, err + rem / 2);
    } else if (psi.kind() == PsiFunction::Kind::PhiP) {
      double p = psi.exponent();
      if (p < beta) return CertifiedValue::infinite("phi_p: tail integral diverges");
      double lg = std::log1p(1.0 / t_next);
      double rem;
      if (p > beta)
        rem = std::pow(t_next, p - beta) / ((p - beta) * lg * lg);
      else  // p == beta: int_0^e dt/(t log^2(1+1/t)) <= (1+e)/log(1+1/e)
        rem = (1.0 + t_next) / lg;
      if (rem <= 1e-12 * std::max(sum.get(), 1e-300)) return CertifiedValue::pm(sum.get() + rem / 2, err + rem / 2);
    } else {
      // custom: require empirical geometric decay of the panel values
      if (prev_panel > 0 && r.value > 0) {
        double rho = r.value / prev_panel;
        if (rho < 0.75 && j > 6) {
          double rem = r.value * rho / (1.0 - rho);
          if (rem <= 1e-9 * std::max(sum.get(), 1e-300))
            return CertifiedValue::pm(sum.get() + rem / 2, err + rem / 2);
        }
      }
      if (r.value == 0.0 && j > 6) return CertifiedValue::pm(sum.get(), err);
    }
    prev_panel = r.value;
    hi = t_next;
    if (hi < 1e-300) return CertifiedValue::pm(sum.get(), err);
  }
  return CertifiedValue::infinite("psi tail integral: no certified convergence");
}

}  // namespace

TailAnalysis classify_tail(const Weight& w, const PsiFunction& psi) {
  if (w.has_compact_support()) return {true, "compact support"};
  auto td = w.effective_tail();
  if (!td) return {false, "unbounded support without a tail descriptor"};
  double n = static_cast<double>(w.dim());
  double load = (td->growth + td->support_mass_exponent) / n;  // psi exponent must exceed this

  switch (psi.kind()) {
    case PsiFunction::Kind::Power: {
      double p = psi.exponent();
      if (p > load) return {true, ""};
      return {false, "power tail: n p <= growth + support mass exponent"};
    }
    case PsiFunction::Kind::PhiP: {
      double p = psi.exponent();
      if (p >= load) return {true, ""};  // log^2 gain covers the boundary case
      return {false, "phi_p tail: n p < growth + support mass exponent"};
    }
    case PsiFunction::Kind::Custom: {
      double hint = psi.near_zero_exponent();
      if (hint > 0) {
        if (hint > load) return {true, ""};
        if (hint < load) return {false, "custom psi tail: exponent hint too small"};
      }
      auto r = psi_small_t_integral(psi, 1.0, load);
      if (r.finite) return {true, ""};
      return {false, "custom psi: tail integral not certifiably convergent"};
    }
  }
  return {false, "unknown psi kind"};
}

// -- tail functional ---------------------------------------------------------------

namespace {

// int_{r1}^{r2} psi(L/u) du for L <= r1 <= r2 (1D off-cube segment).
CertifiedValue segment_psi_integral(const PsiFunction& psi, double L, double r1, double r2) {
  if (r2 <= r1) return CertifiedValue::exact(0.0);
  if (psi.kind() == PsiFunction::Kind::Power) {
    double p = psi.exponent();
    if (p == 1.0) return CertifiedValue::exact(L * std::log(r2 / r1));
    double v = std::pow(L, p) * (std::pow(r1, 1.0 - p) - std::pow(r2, 1.0 - p)) / (p - 1.0);
    return CertifiedValue::pm(v, 4e-16 * std::abs(v));
  }
  return integrate_gk([&](double u) { return psi(L / u); }, r1, r2, {1e-12, 0.0, 2000});
}

// int_{r1}^{inf} psi(L/u) du = L int_0^{L/r1} psi(t)/t^2 dt.
CertifiedValue ray_psi_integral(const PsiFunction& psi, double L, double r1) {
  auto m = psi_small_t_integral(psi, L / r1, 1.0);
  return m.finite ? m.scaled(L) : m;
}

CertifiedValue tail_functional_1d(const Cube& q, const Weight& w, const PsiFunction& psi) {
  auto cls = classify_tail(w, psi);
  if (!cls.finite) return CertifiedValue::infinite(cls.reason);

  double a = q.lower[0], b = q.upper(0), L = q.side;
  double psi1 = psi(1.0);

  // inner evaluation over a window [wlo, whi] containing [a, b]
  auto eval_window = [&](double wlo, double whi) -> CertifiedValue {
    CompensatedSum sum;
    double err = 0.0;
    if (w.step_materializable()) {
      StepFunction1D ws = w.to_step(wlo, whi);
      const auto& bp = ws.breakpoints();
      std::vector<double> edges(bp);
      for (double e : {a, b})
        if (e > wlo && e < whi) edges.push_back(e);
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double c = edges[i], d = edges[i + 1];
        double v = ws(0.5 * (c + d));
        if (v == 0) continue;
        if (c >= a && d <= b) {
          sum.add(v * (d - c) * psi1);
        } else if (d <= a) {  // left of Q: M1_Q(x) = L/(b - x)
          auto r = segment_psi_integral(psi, L, b - d, b - c);
          sum.add(v * r.value);
          err += v * r.error;
        } else {  // right of Q
          auto r = segment_psi_integral(psi, L, c - a, d - a);
          sum.add(v * r.value);
          err += v * r.error;
        }
      }
    } else {
      // analytic weight: direct quadrature, split at Q's endpoints
      std::vector<double> edges{wlo, whi, a, b};
      std::sort(edges.begin(), edges.end());
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double c = std::max(wlo, edges[i]), d = std::min(whi, edges[i + 1]);
        if (d <= c) continue;
        auto r = integrate_gk(
            [&](double x) { return psi(m_indicator_1d(a, b, x)) * w(x); }, c, d, {1e-11, 0.0, 3000});
        if (!r.finite) return r;
        sum.add(r.value);
        err += r.error;
      }
    }
    return CertifiedValue::pm(sum.get(), err);
  };

  if (w.has_compact_support()) {
    auto [sl, sh] = w.support_window();
    double wlo = std::min(a, sl) - 1.0, whi = std::max(b, sh) + 1.0;
    return eval_window(wlo, whi);
  }

  // Step weights with constant tails: exact ray contributions, no growth loop.
  if (w.kind() == Weight::Kind::Step) {
    const auto& ws = w.step_fn();
    double wlo = std::min(a, ws.breakpoints().front()) - 1.0;
    double whi = std::max(b, ws.breakpoints().back()) + 1.0;
    auto inner = eval_window(wlo, whi);
    if (!inner.finite) return inner;
    CertifiedValue left = CertifiedValue::exact(0.0), right = CertifiedValue::exact(0.0);
    if (ws.left_tail() > 0) {
      auto r = ray_psi_integral(psi, L, b - wlo);
      if (!r.finite) return r;
      left = r.scaled(ws.left_tail());
    }
    if (ws.right_tail() > 0) {
      auto r = ray_psi_integral(psi, L, whi - a);
      if (!r.finite) return r;
      right = r.scaled(ws.right_tail());
    }
    return inner + left + right;
  }

  // Rule-based / analytic weights with unbounded support: grow the window
  // until the bound on the remainder is negligible (or the cell budget is
  // reached; the remainder then stays in the error bound). The window grows
  // incrementally so each annulus is evaluated once.
  double wsup = w.sup_bound_or(-1.0);
  auto td = w.effective_tail();
  double mid = 0.5 * (a + b);
  double half = 8.0 * L;
  double wlo = mid - half, whi = mid + half;
  CertifiedValue inner = eval_window(wlo, whi);
  if (!inner.finite) return inner;
  double bound = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 44; ++iter) {
    // remainder bound beyond the window
    if (wsup > 0) {
      auto bl = ray_psi_integral(psi, L, b - wlo);
      auto br = ray_psi_integral(psi, L, whi - a);
      if (!bl.finite || !br.finite) return CertifiedValue::infinite("tail bound diverged");
      bound = wsup * (bl.value + bl.error + br.value + br.error);
    } else if (td) {
      // unbounded analytic weight: dyadic annulus sum with the descriptor
      double D = std::max(b - wlo, whi - a);
      double total = 0.0;
      double p_eff = psi.near_zero_exponent();
      if (p_eff <= 0)
        return CertifiedValue::infinite("custom psi without exponent hint: no tail bound");
      double rho = std::pow(2.0, td->growth + td->support_mass_exponent - p_eff);
      if (rho >= 1.0) return CertifiedValue::infinite("tail descriptor does not give decay");
      double term = 0.0;
      for (int j = 0; j < 200; ++j) {
        double r1 = D * std::pow(2.0, j);
        double r2 = 2.0 * r1;
        // w-mass of the annulus: c_upper r2^growth on a support slice of
        // measure <= mass_coeff r2^{s_exp}
        double mass = td->mass_coeff * td->c_upper *
                      std::pow(r2, td->growth + td->support_mass_exponent);
        term = psi(std::min(1.0, L / r1)) * mass;
        total += term;
        if (j > 2 && term <= 1e-12 * total) break;
      }
      bound = total + term * rho / (1.0 - rho);
    } else {
      return CertifiedValue::infinite("no bound hint or tail descriptor for the remainder");
    }

    if (bound <= 1e-9 * std::max(inner.value, 1e-300)) break;
    // cell budget guard: window cells scale linearly for rule weights
    if (whi - wlo > 8.0e3) break;
    double nlo = mid - 2.0 * (mid - wlo), nhi = mid + 2.0 * (whi - mid);
    auto left = eval_window(nlo, wlo);
    auto right = eval_window(whi, nhi);
    if (!left.finite || !right.finite) return CertifiedValue::infinite("window extension diverged");
    inner = inner + left + right;
    wlo = nlo;
    whi = nhi;
  }
  return CertifiedValue::pm(inner.value + bound / 2.0, inner.error + bound / 2.0);
}

CertifiedValue tail_functional_nd(const Cube& q, const Weight& w, const PsiFunction& psi) {
  auto cls = classify_tail(w, psi);
  if (!cls.finite) return CertifiedValue::infinite(cls.reason);
  if (w.dim() != 2)
    throw std::invalid_argument("tail_functional: dimensions above 2 are not supported");
  if (w.kind() != Weight::Kind::KmNd && w.kind() != Weight::Kind::Grid)
    throw std::invalid_argument("tail_functional: unsupported nD weight kind");

  double n = 2.0;
  double L = q.side;
  double wsup = w.sup_bound_or(1.0);
  double psi_exp = psi.near_zero_exponent();

  auto cell_integral = [&](const Cube& cell) {
    // tensor quadrature of psi(M 1_Q) over the cell
    auto inner_fn = [&](double x0) {
      auto fy = [&](double x1) { return psi(m_indicator(q, {x0, x1})); };
      return integrate_gk(fy, cell.lower[1], cell.upper(1), {1e-8, 0.0, 200}).value;
    };
    return integrate_gk(inner_fn, cell.lower[0], cell.upper(0), {1e-8, 0.0, 200});
  };

  double lambda = 8.0;
  for (int iter = 0; iter < 20; ++iter) {
    Cube window = dilate(q, lambda);
    CompensatedSum sum;
    double err = 0.0;
    if (w.kind() == Weight::Kind::Grid) {
      const auto& g = w.grid_fn();
      if (g.outside_value() > 0)
        throw std::invalid_argument("tail_functional: nD grid weights need compact support");
      std::vector<int> idx{0, 0};
      for (idx[0] = 0; idx[0] < g.cells_per_axis(); ++idx[0])
        for (idx[1] = 0; idx[1] < g.cells_per_axis(); ++idx[1]) {
          double v = g.cell_value(idx);
          if (v == 0) continue;
          auto r = cell_integral(g.cell_cube(idx));
          sum.add(v * r.value);
          err += v * r.error;
        }
      return CertifiedValue::pm(sum.get(), err);
    }
    // KmNd: islands and holes inside the window
    const auto& rule = w.km_rule();
    auto mlo0 = static_cast<long long>(std::floor((window.lower[0] - 1.0) / 4.0));
    auto mhi0 = static_cast<long long>(std::ceil((window.upper(0) + 1.0) / 4.0));
    auto mlo1 = static_cast<long long>(std::floor((window.lower[1] - 1.0) / 4.0));
    auto mhi1 = static_cast<long long>(std::ceil((window.upper(1) + 1.0) / 4.0));
    for (long long m0 = mlo0; m0 <= mhi0; ++m0)
      for (long long m1 = mlo1; m1 <= mhi1; ++m1) {
        std::vector<long long> m{m0, m1};
        Cube island = km_island_cube_nd(m);
        auto ri = cell_integral(island);
        sum.add(ri.value);
        err += ri.error;
        long long s = std::llabs(m0) + std::llabs(m1);
        if (rule.ell(s) > 0) {
          Cube hole = km_hole_cube_nd(rule, m);
          auto rh = cell_integral(hole);
          sum.add(rule.h(s) * rh.value);
          err += rule.h(s) * rh.error;
        }
      }
    // remainder: M1_Q <= (L/d)^n beyond the window, w <= wsup
    double D = (lambda - 1.0) * L / 2.0;
    double rho = std::pow(2.0, n - n * psi_exp);
    if (rho >= 1.0) return CertifiedValue::infinite("nD tail bound does not decay");
    double total = 0.0, term = 0.0;
    for (int j = 0; j < 120; ++j) {
      double r1 = D * std::pow(2.0, j);
      double r2 = 2 * r1;
      double shell = std::pow(L + 2 * r2, n) - std::pow(L + 2 * r1, n);
      term = wsup * psi(std::min(1.0, std::pow(L / r1, n))) * shell;
      total += term;
      if (term <= 1e-12 * total) break;
    }
    double bound = total + term * rho / (1.0 - rho);
    if (bound <= 1e-6 * std::max(sum.get(), 1e-300) || lambda > 4096)
      return CertifiedValue::pm(sum.get() + bound / 2, err + bound / 2);
    lambda *= 2;
  }
  throw std::logic_error("tail_functional_nd: window loop exhausted");
}

}  // namespace

CertifiedValue tail_functional(const Cube& q, const Weight& w, const PsiFunction& psi) {
  if (q.dim() != w.dim()) throw std::invalid_argument("tail_functional: dim mismatch");
  return q.dim() == 1 ? tail_functional_1d(q, w, psi) : tail_functional_nd(q, w, psi);
}

CertifiedValue tail_discretized(const Cube& q, const Weight& w, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("tail_discretized: p must be > 1");
  if (q.dim() != w.dim()) throw std::invalid_argument("tail_discretized: dim mismatch");
  double n = static_cast<double>(q.dim());
  double decay = std::pow(2.0, -n * (p - 1.0));
  double wsup = w.sup_bound_or(-1.0);
  if (wsup <= 0) {
    auto td = w.effective_tail();
    if (!td || td->growth > 0)
      return CertifiedValue::infinite("tail_discretized: unbounded weight without usable bound");
    wsup = td->c_upper;
  }
  CompensatedSum sum;
  double err = 0.0;
  double factor = 1.0;
  for (int k = 0; k < 2000; ++k) {
    Cube qk = k == 0 ? q : dilate(q, std::pow(2.0, k));
    auto m = w.integrate_cube(qk);
    if (!m.finite) return m;
    sum.add(factor * m.value / qk.volume());
    err += factor * m.error / qk.volume();
    double rem = wsup * factor * decay / (1.0 - decay);
    if (rem <= 1e-9 * std::max(sum.get(), 1e-300) || k > 1800)
      return CertifiedValue::pm(sum.get() + rem / 2, err + rem / 2);
    factor *= decay;
  }
  return CertifiedValue::pm(sum.get(), err);
}

double hole_ratio(const Cube& q, const Weight& w, const PsiFunction& psi) {
  auto num = tail_functional(q, w, psi);
  if (!num.finite) throw std::invalid_argument("hole_ratio: tail functional is infinite");
  auto inside = w.integrate_cube(q);
  double den = num.value - psi(1.0) * inside.value;
  double den_err = num.error + psi(1.0) * inside.error;
  if (den <= den_err) return std::numeric_limits<double>::infinity();
  return num.value / den;
}

double cp_characteristic_estimate(const Weight& w, double p, const std::vector<Cube>& family) {
  if (!(p > 0)) throw std::invalid_argument("cp_characteristic_estimate: p must be > 0");
  if (w.dim() != 1)
    throw std::invalid_argument("cp_characteristic_estimate: 1D weights only");
  PsiFunction psi = PsiFunction::power(p);
  auto cls = classify_tail(w, psi);
  if (!cls.finite) return 0.0;  // the zero convention
  double best = 0.0;
  for (const auto& q : family) {
    auto den = tail_functional(q, w, psi);
    if (!den.finite || den.value <= 0) return 0.0;
    // numerator: int_Q M(1_Q w)
    StepFunction1D ws = w.to_step(q.lower[0], q.upper(0));
    const auto& edges = ws.breakpoints();
    CompensatedSum s;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      s.add(integrate_gk([&](double x) { return m_stepfn_eval(ws, x); }, edges[i], edges[i + 1],
                         {1e-10, 0.0, 1500})
                .value);
    best = std::max(best, s.get() / den.value);
  }
  return best;
}

double default_epsilon(int dim, double p, double cp_char) {
  double n = static_cast<double>(dim);
  double factor = cp_char > 0 ? std::min(1.0, 1.0 / cp_char) : 1.0;
  return (1.0 - std::pow(2.0, -n * (p - 1.0))) /
         (std::pow(2.0, 2.0 * n * p + 3.0 * n) * std::pow(20.0, n)) * factor;
}

CertifyResult cpsi_certify(const Weight& w, const PsiFunction& psi, double eps,
                           const std::vector<CertifyPair>& menu, CertifyMode mode, double gamma) {
  if (!(eps > 0)) throw std::invalid_argument("cpsi_certify: eps must be > 0");
  CertifyResult res;
  res.c_star = 0.0;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    const auto& pair = menu[i];
    if (pair.e.dim() != pair.q.dim() || pair.q.dim() != w.dim())
      throw std::invalid_argument("cpsi_certify: dimension mismatch");
    double em = pair.e.measure();
    if (!(em > 0)) throw std::invalid_argument("cpsi_certify: |E| must be positive");
    for (const auto& bx : pair.e.boxes())
      if (Box::of(pair.q).overlap_volume(bx) < bx.volume() * (1 - 1e-12))
        throw std::invalid_argument("cpsi_certify: E not contained in Q");

    double ratio = 0.0;
    auto eval_base = [&](const Cube& base, const OpenSet& e, const Cube& frac_cube) -> double {
      auto tail = tail_functional(base, w, psi);
      if (!tail.finite || tail.value <= 0) return 0.0;
      auto we = w.integrate_set(e);
      double fr = e.measure() / frac_cube.volume();
      return we.value / (std::pow(fr, eps) * tail.value);
    };

    switch (mode) {
      case CertifyMode::All:
        ratio = eval_base(pair.q, pair.e, pair.q);
        break;
      case CertifyMode::Dilated:
        ratio = eval_base(dilate(pair.q, gamma), pair.e, pair.q);
        break;
      case CertifyMode::Dyadic: {
        for (const auto& cell : dyadic_cover(pair.q)) {
          Cube cq = cell.cube();
          OpenSet ei = pair.e.intersect(cq);
          if (ei.measure() <= 0) continue;
          ratio = std::max(ratio, eval_base(cq, ei, cq));
        }
        break;
      }
    }
    CertifyRow row;
    row.pair_index = i;
    row.q_lower = pair.q.lower[0];
    row.q_side = pair.q.side;
    row.e_measure = em;
    row.ratio = ratio;
    res.rows.push_back(row);
    if (ratio > res.c_star) {
      res.c_star = ratio;
      res.argmax = i;
    }
  }
  return res;
}

ClassicalCharacteristics classical_characteristics(const Weight& w, const std::vector<Cube>& family,
                                                   double p, double q) {
  if (!(p > 1) || !(q > 1))
    throw std::invalid_argument("classical_characteristics: exponents p, q must be > 1");
  if (w.dim() != 1) throw std::invalid_argument("classical_characteristics: 1D only");
  ClassicalCharacteristics out;
  for (const auto& cube : family) {
    double lo = cube.lower[0], hi = cube.upper(0);
    StepFunction1D ws = w.to_step(lo, hi);
    double vol = cube.volume();
    double avg = ws.integrate_interval(lo, hi) / vol;
    if (avg <= 0) continue;

    // A_p: <w> <w^{-1/(p-1)}>^{p-1}
    bool vanishes = false;
    for (std::size_t i = 0; i + 1 < ws.breakpoints().size(); ++i)
      if (ws.values()[i] == 0.0) vanishes = true;
    if (vanishes) {
      out.a_p_finite = false;
    } else {
      double dual = ws.pow(-1.0 / (p - 1.0)).integrate_interval(lo, hi) / vol;
      out.a_p = std::max(out.a_p, avg * std::pow(dual, p - 1.0));
    }

    // RH_q: <w^q>^{1/q} / <w>
    double rq = std::pow(ws.pow(q).integrate_interval(lo, hi) / vol, 1.0 / q);
    out.rh_q = std::max(out.rh_q, rq / avg);

    // Fujii-Wilson: (1/w(Q)) int_Q M(1_Q w)
    double wq = ws.integrate_interval(lo, hi);
    CompensatedSum s;
    for (std::size_t i = 0; i + 1 < ws.breakpoints().size(); ++i) {
      auto r = integrate_gk([&](double x) { return m_stepfn_eval(ws, x); }, ws.breakpoints()[i],
                            ws.breakpoints()[i + 1], {1e-9, 0.0, 800});
      s.add(r.value);
    }
    out.a_infty = std::max(out.a_infty, s.get() / wq);
  }
  return out;
}

Weight power_transform(const Weight& w, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("power_transform: r must be > 1");
  return w.power(r);
}

CertifiedValue ratio_a(double t, double p) {
  if (!(t > 0) || !(t < 1)) throw std::invalid_argument("ratio_a: t must lie in (0,1)");
  if (!(p > 1)) throw std::invalid_argument("ratio_a: p must be > 1");
  PsiFunction psi = PsiFunction::phi(p);
  auto integral = psi_small_t_integral(psi, t, 1.0);
  if (!integral.finite) return integral;
  return integral.scaled(std::pow(t, 1.0 - p));
}

double ratio_b(double t, double p, double eps) {
  (void)p;
  if (!(t > 0) || !(t < 1)) throw std::invalid_argument("ratio_b: t must lie in (0,1)");
  if (!(eps > 0)) throw std::invalid_argument("ratio_b: eps must be > 0");
  double lg = std::log1p(1.0 / t);
  return std::pow(t, eps) * lg * lg;
}

}  // namespace cpw
