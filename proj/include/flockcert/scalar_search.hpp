#pragma once

#include <cmath>
#include <utility>

namespace flockcert::search {

/// Golden-section search for the maximizer of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than `abs_tol`.
template <typename F>
double golden_maximize(F&& f, double lo, double hi, double abs_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 500 && (b - a) > abs_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

/// Bisection on a predicate that holds on [lo, x*) and fails on [x*, hi].
/// Returns {last true point, first false point}; the gap is <= abs_tol (or
/// floating-point resolution).
template <typename Pred>
std::pair<double, double> bisect_boundary(Pred&& holds, double lo, double hi, double abs_tol) {
  for (int it = 0; it < 2000 && hi - lo > abs_tol; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (holds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace flockcert::search
