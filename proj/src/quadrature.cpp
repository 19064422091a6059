#include "cpw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cpw {

namespace {

// Kronrod 15 abscissae on [0,1] (positive half) and weights; Gauss 7 weights
// sit on the odd Kronrod nodes.
constexpr double kron_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kron_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gauss_w[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b, value, err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double k = kron_w[7] * fc;
  double g = gauss_w[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double dx = h * kron_x[i];
    double s = f(c - dx) + f(c + dx);
    k += kron_w[i] * s;
    if (i % 2 == 1) g += gauss_w[i / 2] * s;
  }
  k *= h;
  g *= h;
  return {a, b, k, std::abs(k - g)};
}

}  // namespace

CertifiedValue integrate_gk(const std::function<double(double)>& f, double a, double b,
                            QuadOptions opts) {
  if (a == b) return CertifiedValue::exact(0.0);
  bool flip = a > b;
  if (flip) std::swap(a, b);

  std::vector<Panel> panels{gk15(f, a, b)};
  while (static_cast<int>(panels.size()) < opts.max_intervals) {
    double total = 0.0, err = 0.0;
    for (const auto& p : panels) {
      total += p.value;
      err += p.err;
    }
    if (err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) break;
    // split the worst panel; ties resolve to the leftmost for determinism
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    Panel p = panels[worst];
    double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) break;  // subdivision exhausted
    panels[worst] = gk15(f, p.a, mid);
    panels.push_back(gk15(f, mid, p.b));
  }

  CompensatedSum v;
  double err = 0.0;
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    v.add(p.value);
    err += p.err;
  }
  double value = flip ? -v.get() : v.get();
  if (!std::isfinite(value) || !std::isfinite(err))
    return CertifiedValue::infinite("quadrature produced a non-finite value");
  return CertifiedValue::pm(value, err);
}

}  // namespace cpw
