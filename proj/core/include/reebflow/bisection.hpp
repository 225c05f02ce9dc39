#pragma once

#include <cmath>
#include <cstdint>

namespace reebflow {

struct BisectionResult {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

// Bisection on a bracket [lo, hi] where g(lo) <= 0 <= g(hi) for an
// increasing g. Stops once the bracket is narrower than `tol` or cannot be
// split further in double precision.
template <typename G>
BisectionResult bisect_increasing(G&& g, double lo, double hi, double tol,
                                  int max_iterations = 2000) {
  BisectionResult r{0.5 * (lo + hi), lo, hi, 0};
  while (r.iterations < max_iterations && hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double v = g(mid);
    if (v == 0.0) {
      lo = hi = mid;
      break;
    }
    if (v < 0.0)
      lo = mid;
    else
      hi = mid;
    ++r.iterations;
  }
  r.lo = lo;
  r.hi = hi;
  r.root = lo + 0.5 * (hi - lo);
  return r;
}

}  // namespace reebflow
