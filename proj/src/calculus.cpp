#include "cpw/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpw/weights.hpp"

namespace cpw {

namespace {

void check_value(double v) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw std::invalid_argument("StepFunction1D: values must be finite and >= 0");
}

}  // namespace

StepFunction1D::StepFunction1D(std::vector<double> breakpoints, std::vector<double> values,
                               double left_tail, double right_tail)
    : breaks_(std::move(breakpoints)), values_(std::move(values)), left_(left_tail), right_(right_tail) {
  if (breaks_.empty()) throw std::invalid_argument("StepFunction1D: need at least one breakpoint");
  if (values_.size() + 1 != breaks_.size())
    throw std::invalid_argument("StepFunction1D: values.size() must be breakpoints.size()-1");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
    if (!(breaks_[i] < breaks_[i + 1]))
      throw std::invalid_argument("StepFunction1D: breakpoints must be strictly increasing");
  for (double b : breaks_)
    if (!std::isfinite(b)) throw std::invalid_argument("StepFunction1D: non-finite breakpoint");
  for (double v : values_) check_value(v);
  check_value(left_);
  check_value(right_);
}

StepFunction1D StepFunction1D::indicator(double a, double b, double height) {
  if (!(b > a)) throw std::invalid_argument("indicator: need b > a");
  return StepFunction1D({a, b}, {height});
}

StepFunction1D StepFunction1D::indicator(const OpenSet& e, double height) {
  if (e.dim() != 1) throw std::invalid_argument("indicator: 1D set required");
  if (e.is_empty()) return zero();
  std::vector<double> breaks;
  std::vector<double> vals;
  for (const auto& b : e.boxes()) {
    if (!breaks.empty()) {
      if (b.lo[0] > breaks.back()) {
        vals.push_back(0.0);
        breaks.push_back(b.lo[0]);
      }
    } else {
      breaks.push_back(b.lo[0]);
    }
    vals.push_back(height);
    breaks.push_back(b.hi[0]);
  }
  return StepFunction1D(std::move(breaks), std::move(vals));
}

double StepFunction1D::operator()(double x) const {
  if (x < breaks_.front()) return left_;
  if (x >= breaks_.back()) return right_;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  if (i >= values_.size()) return right_;
  return values_[i];
}

double StepFunction1D::max_value() const {
  double m = std::max(left_, right_);
  for (double v : values_) m = std::max(m, v);
  return m;
}

std::optional<std::pair<double, double>> StepFunction1D::support_hull() const {
  if (!compact_support())
    throw std::invalid_argument("support_hull: tails are nonzero");
  std::size_t first = values_.size(), last = values_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 0) {
      if (first == values_.size()) first = i;
      last = i;
    }
  }
  if (first == values_.size()) return std::nullopt;
  return std::make_pair(breaks_[first], breaks_[last + 1]);
}

CertifiedValue StepFunction1D::integral() const {
  if (!compact_support()) return CertifiedValue::infinite("nonzero tail over an unbounded set");
  CompensatedSum s;
  for (std::size_t i = 0; i < values_.size(); ++i) s.add(values_[i] * (breaks_[i + 1] - breaks_[i]));
  return CertifiedValue::exact(s.get());
}

double StepFunction1D::l1_norm() const {
  auto v = integral();
  if (!v.finite) throw std::invalid_argument("l1_norm: non-compact support");
  return v.value;
}

double StepFunction1D::integrate_interval(double a, double b) const {
  if (b <= a) return 0.0;
  CompensatedSum s;
  if (a < breaks_.front()) s.add(left_ * (std::min(b, breaks_.front()) - a));
  if (b > breaks_.back()) s.add(right_ * (b - std::max(a, breaks_.back())));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double lo = std::max(a, breaks_[i]);
    double hi = std::min(b, breaks_[i + 1]);
    if (hi > lo) s.add(values_[i] * (hi - lo));
  }
  return s.get();
}

double StepFunction1D::cumulative(double x) const {
  if (left_ != 0.0) throw std::invalid_argument("cumulative: nonzero left tail");
  return integrate_interval(breaks_.front(), x);
}

StepFunction1D StepFunction1D::pow(double e) const {
  auto pw = [e](double v) { return v == 0.0 ? 0.0 : std::pow(v, e); };
  std::vector<double> v(values_);
  for (double& x : v) x = pw(x);
  return StepFunction1D(breaks_, std::move(v), pw(left_), pw(right_));
}

StepFunction1D StepFunction1D::scaled(double c) const {
  if (!(c >= 0)) throw std::invalid_argument("scaled: negative factor");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return StepFunction1D(breaks_, std::move(v), left_ * c, right_ * c);
}

StepFunction1D StepFunction1D::restricted(double a, double b) const {
  if (!(b > a)) throw std::invalid_argument("restricted: need b > a");
  std::vector<double> edges{a, b};
  for (double bp : breaks_)
    if (bp > a && bp < b) edges.push_back(bp);
  std::sort(edges.begin(), edges.end());
  std::vector<double> vals(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    vals[i] = (*this)(0.5 * (edges[i] + edges[i + 1]));
  return StepFunction1D(std::move(edges), std::move(vals));
}

StepFunction1D StepFunction1D::excluding(double a, double b) const {
  auto zero_on = [&](double x) { return x >= a && x < b; };
  std::vector<double> breaks(breaks_);
  if (std::find(breaks.begin(), breaks.end(), a) == breaks.end()) breaks.push_back(a);
  if (std::find(breaks.begin(), breaks.end(), b) == breaks.end()) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> vals(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    vals[i] = zero_on(mid) ? 0.0 : (*this)(mid);
  }
  double lt = left_, rt = right_;  // [a,b) is bounded, tails unaffected
  return StepFunction1D(std::move(breaks), std::move(vals), lt, rt);
}

StepFunction1D StepFunction1D::translated(double dx) const {
  std::vector<double> b(breaks_);
  for (double& x : b) x += dx;
  return StepFunction1D(std::move(b), values_, left_, right_);
}

StepFunction1D StepFunction1D::combine(const StepFunction1D& f, const StepFunction1D& g,
                                       const std::function<double(double, double)>& op) {
  std::vector<double> breaks;
  breaks.reserve(f.breaks_.size() + g.breaks_.size());
  std::merge(f.breaks_.begin(), f.breaks_.end(), g.breaks_.begin(), g.breaks_.end(),
             std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> vals(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    vals[i] = op(f(mid), g(mid));
  }
  return StepFunction1D(std::move(breaks), std::move(vals), op(f.left_, g.left_), op(f.right_, g.right_));
}

GridFunctionND::GridFunctionND(Cube box, int cells_per_axis, std::vector<double> cell_values,
                               double outside_value)
    : box_(std::move(box)), cells_(cells_per_axis), vals_(std::move(cell_values)), outside_(outside_value) {
  if (cells_ <= 0) throw std::invalid_argument("GridFunctionND: cells_per_axis must be positive");
  std::size_t expect = 1;
  for (int i = 0; i < box_.dim(); ++i) expect *= static_cast<std::size_t>(cells_);
  if (vals_.size() != expect) throw std::invalid_argument("GridFunctionND: value array size mismatch");
  for (double v : vals_) check_value(v);
  check_value(outside_);
}

std::size_t GridFunctionND::flat(const std::vector<int>& idx) const {
  std::size_t f = 0;
  for (int i = 0; i < box_.dim(); ++i) {
    if (idx[i] < 0 || idx[i] >= cells_) throw std::out_of_range("GridFunctionND: cell index");
    f = f * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(idx[i]);
  }
  return f;
}

double GridFunctionND::operator()(const std::vector<double>& x) const {
  std::vector<int> idx(static_cast<std::size_t>(box_.dim()));
  double h = box_.side / cells_;
  for (int i = 0; i < box_.dim(); ++i) {
    double t = (x[i] - box_.lower[i]) / h;
    if (t < 0 || t >= cells_) return outside_;
    idx[i] = static_cast<int>(t);
  }
  return vals_[flat(idx)];
}

double& GridFunctionND::cell(const std::vector<int>& idx) { return vals_[flat(idx)]; }
double GridFunctionND::cell_value(const std::vector<int>& idx) const { return vals_[flat(idx)]; }

Cube GridFunctionND::cell_cube(const std::vector<int>& idx) const {
  double h = box_.side / cells_;
  std::vector<double> lo(static_cast<std::size_t>(box_.dim()));
  for (int i = 0; i < box_.dim(); ++i) lo[i] = box_.lower[i] + h * idx[i];
  return Cube(std::move(lo), h);
}

double GridFunctionND::integrate_box(const Box& b) const {
  double h = box_.side / cells_;
  int n = box_.dim();
  CompensatedSum s;
  // outside part
  double cut = b.volume();
  double box_part = b.overlap_volume(Box::of(box_));
  s.add(outside_ * (cut - box_part));
  // cells intersecting b
  std::vector<int> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n)), cur(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    lo[i] = std::max(0, static_cast<int>(std::floor((b.lo[i] - box_.lower[i]) / h)));
    hi[i] = std::min(cells_ - 1, static_cast<int>(std::floor((b.hi[i] - box_.lower[i]) / h)));
    if (hi[i] < lo[i]) return s.get();
    cur[i] = lo[i];
  }
  while (true) {
    Cube cc = cell_cube(cur);
    double ov = Box::of(cc).overlap_volume(b);
    if (ov > 0) s.add(vals_[flat(cur)] * ov);
    int axis = 0;
    while (axis < n) {
      if (cur[axis] < hi[axis]) {
        ++cur[axis];
        for (int j = 0; j < axis; ++j) cur[j] = lo[j];
        break;
      }
      ++axis;
    }
    if (axis == n) break;
  }
  return s.get();
}

CertifiedValue GridFunctionND::integral() const {
  if (outside_ != 0.0) return CertifiedValue::infinite("nonzero outside value");
  return CertifiedValue::exact(integrate_box(Box::of(box_)));
}

GridFunctionND GridFunctionND::pow(double e) const {
  std::vector<double> v(vals_);
  for (double& x : v) x = x == 0.0 ? 0.0 : std::pow(x, e);
  return GridFunctionND(box_, cells_, std::move(v), outside_ == 0.0 ? 0.0 : std::pow(outside_, e));
}

CertifiedValue integrate(const StepFunction1D& f, const OpenSet& e) {
  if (e.dim() != 1) throw std::invalid_argument("integrate: dimension mismatch");
  CompensatedSum s;
  for (const auto& b : e.boxes()) s.add(f.integrate_interval(b.lo[0], b.hi[0]));
  return CertifiedValue::exact(s.get());
}

CertifiedValue integrate(const StepFunction1D& f, const Cube& q) {
  if (q.dim() != 1) throw std::invalid_argument("integrate: dimension mismatch");
  return CertifiedValue::exact(f.integrate_interval(q.lower[0], q.upper(0)));
}

CertifiedValue integrate(const GridFunctionND& f, const OpenSet& e) {
  if (e.dim() != f.dim()) throw std::invalid_argument("integrate: dimension mismatch");
  CompensatedSum s;
  for (const auto& b : e.boxes()) s.add(f.integrate_box(b));
  return CertifiedValue::exact(s.get());
}

CertifiedValue integrate(const GridFunctionND& f, const Cube& q) {
  return CertifiedValue::exact(f.integrate_box(Box::of(q)));
}

double average(const StepFunction1D& f, const Cube& q, double t) {
  if (!(t >= 1.0)) throw std::invalid_argument("average: power averages need t >= 1");
  double mass = f.pow(t).integrate_interval(q.lower[0], q.upper(0));
  return std::pow(mass / q.volume(), 1.0 / t);
}

double average(const GridFunctionND& f, const Cube& q, double t) {
  if (!(t >= 1.0)) throw std::invalid_argument("average: power averages need t >= 1");
  double mass = f.pow(t).integrate_box(Box::of(q));
  return std::pow(mass / q.volume(), 1.0 / t);
}

CertifiedValue lp_quasinorm(const StepFunction1D& f, double p, const Weight& w) {
  if (!(p > 0)) throw std::invalid_argument("lp_quasinorm: p must be > 0");
  auto m = weighted_power_mass(f, p, w);
  if (!m.finite) return m;
  return CertifiedValue::pm(std::pow(m.value, 1.0 / p),
                            m.value > 0 ? m.error / p * std::pow(m.value, 1.0 / p - 1.0) : m.error);
}

CertifiedValue layer_cake_norm(const StepFunction1D& f, double p, const Weight& w, int levels) {
  if (!(p > 0)) throw std::invalid_argument("layer_cake_norm: p must be > 0");
  (void)levels;  // step data has finitely many exact levels

  // a nonzero tail of f makes low level sets unbounded: diverges unless w has
  // compact support, in which case f may be clipped to it (equal w-a.e.)
  StepFunction1D g = f;
  if (!f.compact_support()) {
    if (!w.has_compact_support())
      return CertifiedValue::infinite("unbounded level sets over a weight with unbounded support");
    auto [lo, hi] = w.support_window();
    g = f.restricted(lo - 1.0, hi + 1.0);
  }

  std::vector<double> vals(g.values());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<double> thresholds;
  for (double v : vals)
    if (v > 0) thresholds.push_back(v);
  if (thresholds.empty()) return CertifiedValue::exact(0.0);

  CompensatedSum s;
  double prev = 0.0;
  double err = 0.0;
  for (double t : thresholds) {
    // {g > tau} is constant for tau in (prev, t): equal to {g >= t}
    OpenSet level = superlevel(g, 0.5 * (prev + t));
    auto wm = w.integrate_set(level);
    if (!wm.finite) return wm;
    s.add((std::pow(t, p) - std::pow(prev, p)) * wm.value);
    err += (std::pow(t, p) - std::pow(prev, p)) * wm.error;
    prev = t;
  }
  return CertifiedValue::pm(s.get(), err);
}

OpenSet superlevel(const StepFunction1D& f, double lambda) {
  const auto& b = f.breakpoints();
  std::vector<std::pair<double, double>> iv;
  double lo = -std::numeric_limits<double>::infinity();
  if (f.left_tail() > lambda)
    throw std::invalid_argument("superlevel: unbounded level set (left tail above lambda)");
  if (f.right_tail() > lambda)
    throw std::invalid_argument("superlevel: unbounded level set (right tail above lambda)");
  (void)lo;
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    if (f.values()[i] > lambda) iv.emplace_back(b[i], b[i + 1]);
  return OpenSet::intervals(iv);
}

}  // namespace cpw
