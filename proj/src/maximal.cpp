#include "cpw/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpw/weights.hpp"

namespace cpw {

double m_indicator_1d(double qa, double qb, double x) {
  if (x >= qa && x <= qb) return 1.0;
  double len = qb - qa;
  double dist = x < qa ? qa - x : x - qb;
  return len / (len + dist);
}

namespace {

// objective |Q cap R|/|R| for the optimal placement of a cube of side s
double side_objective(double s, double len, const std::vector<double>& d) {
  double num = 1.0;
  for (double di : d) {
    double t = std::min(len, s - di);
    if (t <= 0) return 0.0;
    num *= t;
  }
  return num / std::pow(s, static_cast<double>(d.size()));
}

}  // namespace

double m_indicator(const Cube& q, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != q.dim())
    throw std::invalid_argument("m_indicator: point dimension mismatch");
  for (double xi : x)
    if (!std::isfinite(xi)) throw std::invalid_argument("m_indicator: non-finite point");
  if (q.dim() == 1) return m_indicator_1d(q.lower[0], q.upper(0), x[0]);

  std::vector<double> d(x.size());
  double dmax = 0.0;
  for (int i = 0; i < q.dim(); ++i) {
    d[i] = std::max({0.0, q.lower[i] - x[i], x[i] - q.upper(i)});
    dmax = std::max(dmax, d[i]);
  }
  if (dmax == 0.0) return 1.0;

  double len = q.side;
  // knots of the piecewise-smooth objective
  std::vector<double> knots;
  for (double di : d) {
    if (di > dmax) continue;
    knots.push_back(std::max(di, dmax));
    knots.push_back(di + len);
  }
  knots.push_back(dmax);
  knots.push_back(dmax + len);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(), [&](double s) { return s < dmax; }),
              knots.end());

  double best = 0.0, best_s = dmax + len;
  auto consider = [&](double s) {
    if (s <= dmax) return;
    double v = side_objective(s, len, d);
    if (v > best) {
      best = v;
      best_s = s;
    }
  };
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    consider(knots[i]);
    consider(knots[i + 1]);
    for (int j = 1; j < 16; ++j) consider(knots[i] + (knots[i + 1] - knots[i]) * j / 16.0);
  }
  // local refinement around the best sample
  double radius = (knots.back() - knots.front()) / 16.0;
  for (int it = 0; it < 60 && radius > 0; ++it) {
    double center = best_s;
    for (int j = -8; j <= 8; ++j) consider(center + radius * j / 8.0);
    radius *= 0.6;
  }
  return best;
}

double m_stepfn_eval(const StepFunction1D& f, double x) {
  if (!f.compact_support())
    throw std::invalid_argument("m_stepfn_eval: compactly supported f required");
  const auto& b = f.breakpoints();
  double total = f.cumulative(b.back());
  if (total == 0.0) return 0.0;

  auto mass_to = [&](double t) {
    if (t <= b.front()) return 0.0;
    if (t >= b.back()) return total;
    return f.cumulative(t);
  };

  std::vector<double> lefts{x}, rights{x};
  for (double v : b) {
    if (v <= x) lefts.push_back(v);
    if (v >= x) rights.push_back(v);
  }
  double best = 0.0;
  for (double a : lefts) {
    double fa = mass_to(a);
    for (double c : rights) {
      if (c <= a) continue;
      best = std::max(best, (mass_to(c) - fa) / (c - a));
    }
  }
  return best;
}

double m_s_eval(const StepFunction1D& f, double s, double x) {
  if (!(s >= 1.0)) throw std::invalid_argument("m_s_eval: s must be >= 1");
  if (s == 1.0) return m_stepfn_eval(f, x);
  return std::pow(m_stepfn_eval(f.pow(s), x), 1.0 / s);
}

double m_localized(const Cube& q, const Weight& w, double x) {
  if (q.dim() != 1) throw std::invalid_argument("m_localized: 1D only");
  StepFunction1D ws = w.to_step(q.lower[0], q.upper(0));
  return m_stepfn_eval(ws, x);
}

OpenSet m_superlevel(const StepFunction1D& f, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("m_superlevel: lambda must be > 0");
  if (!f.compact_support())
    throw std::invalid_argument("m_superlevel: compactly supported f required");
  if (lambda >= f.max_value()) return OpenSet::empty(1);

  const auto& b = f.breakpoints();
  const auto& vals = f.values();
  double total = f.cumulative(b.back());
  auto mass_to = [&](double t) { return t <= b.front() ? 0.0 : f.cumulative(std::min(t, b.back())); };

  std::vector<std::pair<double, double>> out;
  auto add = [&](double lo, double hi) {
    if (hi > lo) out.emplace_back(lo, hi);
  };

  // left tail: intervals [x, c], c a breakpoint
  {
    double best = std::numeric_limits<double>::infinity();
    for (double c : b) {
      double m = mass_to(c);
      if (m > 0) best = std::min(best, c - m / lambda);
    }
    add(best, b.front());
  }
  // right tail: intervals [a, x]
  {
    double best = -std::numeric_limits<double>::infinity();
    for (double a : b) {
      double m = total - mass_to(a);
      if (m > 0) best = std::max(best, a + m / lambda);
    }
    add(b.back(), best);
  }

  // interior pieces (u, v)
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    double u = b[i], v = b[i + 1];
    double c = vals[i];
    double fu = mass_to(u), fv = mass_to(v);

    // constant candidates: both endpoints are breakpoints straddling the piece
    bool whole = false;
    for (double a : b) {
      if (a > u) break;
      if (whole) break;
      double fa = mass_to(a);
      for (double e : b) {
        if (e < v) continue;
        if ((mass_to(e) - fa) / (e - a) > lambda) {
          whole = true;
          break;
        }
      }
    }
    if (whole) {
      add(u, v);
      continue;
    }

    // averages over [a, x]: (F(u) + c (x-u) - F(a)) vs lambda (x - a)
    for (double a : b) {
      if (a > u) break;
      double fa = mass_to(a);
      double rhs0 = fa - fu + c * u - lambda * a;
      if (c == lambda) {
        if (0.0 > rhs0) add(u, v);
        continue;
      }
      double xs = rhs0 / (c - lambda);
      if (c > lambda)
        add(std::max(u, xs), v);
      else
        add(u, std::min(v, xs));
    }
    // averages over [x, e]: (F(e) - F(v) - c (x-v)) vs lambda (e - x)
    for (double e : b) {
      if (e < v) continue;
      double fe = mass_to(e);
      double rhs0 = lambda * e - fe + fv - c * v;
      if (c == lambda) {
        if (0.0 > rhs0) add(u, v);
        continue;
      }
      double xs = rhs0 / (lambda - c);
      if (lambda > c)
        add(std::max(u, xs), v);
      else
        add(u, std::min(v, xs));
    }
  }

  return OpenSet::intervals(out);
}

}  // namespace cpw
