#pragma once

#include <functional>

#include "cpw/certified.hpp"

namespace cpw {

struct QuadOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod 7/15. The reported error is the sum of the |K15-G7|
/// differences of the accepted subintervals (quadpack-style estimate, taken
/// undamped so it stays conservative). Nodes are interior, so integrable
/// endpoint singularities are usable directly.
CertifiedValue integrate_gk(const std::function<double(double)>& f, double a, double b,
                            QuadOptions opts = {});

}  // namespace cpw
