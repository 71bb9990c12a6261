#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "rsm/errors.hpp"

namespace rsm {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

namespace detail {

template <class F>
struct SimpsonState {
  const F& f;
  int max_depth;
  bool exhausted = false;
  double error = 0.0;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double h = (b - a) / 12.0;
    const double left = h * (fa + 4.0 * flm + fm);
    const double right = h * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
      if (std::abs(delta) > 15.0 * tol) exhausted = true;
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace detail

/// Adaptive Simpson with Richardson correction on [a, b] to absolute tolerance `abs_tol`.
/// Throws NumericalError (carrying the achieved estimate) when `max_depth` bisections are not enough.
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double abs_tol, int max_depth = 48) {
  if (a == b) return {0.0, 0.0};
  detail::SimpsonState<F> st{f, max_depth};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = st.recurse(a, b, fa, fm, fb, whole, abs_tol, 0);
  if (st.exhausted && st.error > abs_tol)
    throw NumericalError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                             "], error estimate " + std::to_string(st.error),
                         st.error);
  return {v, st.error};
}

/// Splits [a, b] into panels no longer than `panel` and integrates each adaptively with an
/// absolute budget proportional to its length, so the total error is <= tol_per_length * |b - a|.
template <class F>
QuadratureResult integrate_panels(const F& f, double a, double b, double panel, double tol_per_length) {
  if (a == b) return {0.0, 0.0};
  const double len = std::abs(b - a);
  const auto n = static_cast<long>(std::max(1.0, std::ceil(len / panel)));
  const double h = (b - a) / static_cast<double>(n);
  QuadratureResult total;
  for (long k = 0; k < n; ++k) {
    const double lo = a + h * static_cast<double>(k);
    const double hi = (k + 1 == n) ? b : a + h * static_cast<double>(k + 1);
    const auto r = adaptive_simpson(f, lo, hi, tol_per_length * std::abs(hi - lo));
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

}  // namespace rsm
