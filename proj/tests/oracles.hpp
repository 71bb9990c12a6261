#pragma once

// Independent reference computations for the tests. Nothing here calls the library's evaluation
// paths: forces are summed directly and integrals use Boost's Gauss-Kronrod quadrature.

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

struct Comb {
  double f0;
  double bandwidth;
  std::vector<double> phases;

  double force(double tau) const {
    const auto n = phases.size();
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      s += std::cos(bandwidth * static_cast<double>(i) / static_cast<double>(n) * tau + phases[i - 1]);
    return f0 / static_cast<double>(n) * s;
  }
};

/// G-K 61 on panels of length `panel` (at most a few oscillations of the fastest component), each
/// refined at most three times. The relative target sits above the roundoff floor of the cosine sum.
template <class F>
double integrate(const F& f, double a, double b, double panel = 0.25) {
  if (a == b) return 0.0;
  const auto n = static_cast<long>(std::max(1.0, std::ceil(std::abs(b - a) / panel)));
  const double h = (b - a) / static_cast<double>(n);
  double total = 0.0;
  for (long k = 0; k < n; ++k) {
    const double lo = a + h * static_cast<double>(k);
    const double hi = (k + 1 == n) ? b : lo + h;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 3, 1e-12);
  }
  return total;
}

/// Integral of the force over [0, tau] by quadrature.
inline double impulse(const Comb& comb, double tau) {
  return integrate([&](double s) { return comb.force(s); }, 0.0, tau);
}

}  // namespace oracle
