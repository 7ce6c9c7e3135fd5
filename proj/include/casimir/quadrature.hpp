#pragma once

#include <functional>
#include <vector>

namespace casimir::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1], increasing
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton on the Legendre
// recurrence). Rules are cached per n and safe to call concurrently.
const Rule& gauss_legendre(int n);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

// Globally adaptive 15-point Gauss-Kronrod on [lo, hi]. Stops when the
// summed error estimate is below max(abs_tol, rel_tol * |value|); throws
// NumericError when max_intervals is exhausted first.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                  double rel_tol, double abs_tol = 0.0, int max_intervals = 2000);

}  // namespace casimir::quad
