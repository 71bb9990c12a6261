#pragma once

// Band-limited white-noise force defined in the particle's proper frame:
//
//   f(tau) = (f0 / N) * sum_{i=1..N} cos(w_i tau + phi_i),   w_i = bandwidth * i / N
//
// with phases phi_i i.i.d. uniform on [0, 2pi). There is no zero-frequency term.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsm/errors.hpp"
#include "rsm/histogram.hpp"

namespace rsm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Frequency comb and amplitude of the proper-frame force.
class NoiseSpec {
 public:
  static constexpr double kDefaultBandwidth = 8.0 * std::numbers::pi;

  NoiseSpec(double f0, std::size_t n_components, double bandwidth = kDefaultBandwidth)
      : f0_(f0), n_(n_components), bandwidth_(bandwidth) {
    if (!(f0 > 0.0) || !std::isfinite(f0)) throw ConfigError("noise amplitude f0 must be positive and finite");
    if (n_components == 0) throw ConfigError("noise n_components must be >= 1");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("noise bandwidth must be positive");
  }

  double f0() const noexcept { return f0_; }
  std::size_t n_components() const noexcept { return n_; }
  double bandwidth() const noexcept { return bandwidth_; }

  /// w_i for i in 1..N.
  double frequency(std::size_t i) const noexcept {
    return bandwidth_ * static_cast<double>(i) / static_cast<double>(n_);
  }

  /// Period of the lowest component, 2 pi N / bandwidth. Every component is periodic on it.
  double fundamental_period() const noexcept { return kTwoPi * static_cast<double>(n_) / bandwidth_; }

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;

 private:
  double f0_;
  std::size_t n_;
  double bandwidth_;
};

/// One sample path of the force: the N random phases and the seed they came from.
struct Realization {
  std::vector<double> phases;
  std::uint64_t seed = 0;
};

/// Phases are drawn from std::mt19937_64 seeded with `seed` (its output sequence is fixed by the
/// C++ standard). Each phase is 2*pi * (u >> 11) * 2^-53 for consecutive 64-bit outputs u, so the
/// mapping is identical on every platform.
inline Realization draw_realization(const NoiseSpec& spec, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Realization r;
  r.seed = seed;
  r.phases.resize(spec.n_components());
  for (auto& phi : r.phases) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    phi = kTwoPi * u;
    if (phi >= kTwoPi) phi = 0.0;
  }
  return r;
}

namespace detail {
inline void check_matches(const NoiseSpec& spec, const Realization& real) {
  if (real.phases.size() != spec.n_components())
    throw ConfigError("realization has " + std::to_string(real.phases.size()) + " phases, spec expects " +
                      std::to_string(spec.n_components()));
}
}  // namespace detail

/// Direct cosine sum. O(N) transcendental calls; BandLimitedForce is the fast path.
inline double force_at(const NoiseSpec& spec, const Realization& real, double tau) {
  detail::check_matches(spec, real);
  double s = 0.0;
  for (std::size_t i = 1; i <= spec.n_components(); ++i) s += std::cos(spec.frequency(i) * tau + real.phases[i - 1]);
  return spec.f0() / static_cast<double>(spec.n_components()) * s;
}

/// Exact definite integral of the force over [0, tau]; zero at tau = 0.
inline double force_integral(const NoiseSpec& spec, const Realization& real, double tau) {
  detail::check_matches(spec, real);
  double s = 0.0;
  for (std::size_t i = 1; i <= spec.n_components(); ++i) {
    const double phi = real.phases[i - 1];
    s += (std::sin(spec.frequency(i) * tau + phi) - std::sin(phi)) / static_cast<double>(i);
  }
  return spec.f0() / spec.bandwidth() * s;
}

/// A realization bound to its spec, with precomputed coefficients. Because w_i = i * w_1 the sums
/// are polynomials in z = exp(i w_1 tau) and are evaluated by Horner's rule, one sincos per call.
/// Immutable; safe to share between threads.
class BandLimitedForce {
 public:
  BandLimitedForce(NoiseSpec spec, Realization real) : spec_(std::move(spec)), real_(std::move(real)) {
    detail::check_matches(spec_, real_);
    const std::size_t n = spec_.n_components();
    unit_.resize(n);
    scaled_.resize(n);
    offset_ = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double phi = real_.phases[i - 1];
      unit_[i - 1] = std::polar(1.0, phi);
      scaled_[i - 1] = unit_[i - 1] / static_cast<double>(i);
      offset_ += std::sin(phi) / static_cast<double>(i);
    }
  }

  BandLimitedForce(NoiseSpec spec, std::uint64_t seed)
      : BandLimitedForce(spec, draw_realization(spec, seed)) {}

  const NoiseSpec& spec() const noexcept { return spec_; }
  const Realization& realization() const noexcept { return real_; }

  double force(double tau) const { return spec_.f0() / static_cast<double>(spec_.n_components()) * horner(unit_, tau).real(); }

  /// Definite integral over [0, tau].
  double integral(double tau) const { return spec_.f0() / spec_.bandwidth() * (horner(scaled_, tau).imag() - offset_); }

  /// Value the integral would have at tau = 0 if the lower-limit terms were dropped, i.e. the
  /// antiderivative (f0/bandwidth) * sum sin(phi_i)/i. Converts between constants of integration
  /// that fix the initial rapidity and ones that fix the mean rapidity.
  double antiderivative_at_zero() const noexcept { return spec_.f0() / spec_.bandwidth() * offset_; }

  /// Upper bound on |integral(tau)| for all tau.
  double integral_bound() const noexcept {
    double h = 0.0;
    for (std::size_t i = 1; i <= spec_.n_components(); ++i) h += 1.0 / static_cast<double>(i);
    return 2.0 * spec_.f0() / spec_.bandwidth() * h;
  }

 private:
  std::complex<double> horner(const std::vector<std::complex<double>>& coeff, double tau) const {
    const double arg = spec_.frequency(1) * tau;
    const std::complex<double> z(std::cos(arg), std::sin(arg));
    std::complex<double> acc(0.0, 0.0);
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * z + *it;
    return acc * z;
  }

  NoiseSpec spec_;
  Realization real_;
  std::vector<std::complex<double>> unit_;    // exp(i phi_k)
  std::vector<std::complex<double>> scaled_;  // exp(i phi_k) / k
  double offset_;                             // sum sin(phi_k) / k
};

/// Non-fatal notes raised while sampling (e.g. a horizon shorter than the fundamental period).
struct Diagnostics {
  std::vector<std::string> warnings;
};

namespace detail {
inline void check_sampling(double horizon, std::size_t n_samples, std::size_t n_bins) {
  if (!(horizon > 0.0)) throw ConfigError("sampling horizon must be positive");
  if (n_bins == 0) throw ConfigError("n_bins must be positive");
  if (n_samples < 10 * n_bins) throw ConfigError("n_samples must be at least 10 * n_bins");
}

inline void warn_short_horizon(const NoiseSpec& spec, double horizon, Diagnostics* diag) {
  if (diag != nullptr && horizon < spec.fundamental_period())
    diag->warnings.push_back("horizon " + std::to_string(horizon) + " s is shorter than the fundamental period " +
                             std::to_string(spec.fundamental_period()) + " s");
}
}  // namespace detail

/// Force values on the half-open uniform grid tau_k = k * horizon / n, k = 0..n-1.
inline std::vector<double> sample_force(const BandLimitedForce& force, double horizon, std::size_t n_samples) {
  std::vector<double> out(n_samples);
  const double step = horizon / static_cast<double>(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) out[k] = force.force(step * static_cast<double>(k));
  return out;
}

/// Time-sampled density of one realization on mirror-symmetric bins about zero.
inline Histogram force_distribution(const BandLimitedForce& force, double horizon, std::size_t n_samples,
                                    std::size_t n_bins, Diagnostics* diag = nullptr) {
  detail::check_sampling(horizon, n_samples, n_bins);
  detail::warn_short_horizon(force.spec(), horizon, diag);
  const auto xs = sample_force(force, horizon, n_samples);
  return histogram_of(xs, symmetric_edges(xs, n_bins));
}

inline Histogram force_distribution(const NoiseSpec& spec, const Realization& real, double horizon,
                                    std::size_t n_samples, std::size_t n_bins, Diagnostics* diag = nullptr) {
  return force_distribution(BandLimitedForce(spec, real), horizon, n_samples, n_bins, diag);
}

/// Time samples over [0, horizon] from one realization per seed, concatenated in seed order.
inline std::vector<double> pooled_force_samples(const NoiseSpec& spec, std::span<const std::uint64_t> seeds,
                                                double horizon, std::size_t samples_per_realization) {
  std::vector<double> pooled;
  pooled.reserve(samples_per_realization * seeds.size());
  for (auto seed : seeds) {
    const auto xs = sample_force(BandLimitedForce(spec, seed), horizon, samples_per_realization);
    pooled.insert(pooled.end(), xs.begin(), xs.end());
  }
  return pooled;
}

/// Density of the pooled ensemble of time samples, on mirror-symmetric bins.
inline Histogram ensemble_force_distribution(const NoiseSpec& spec, std::span<const std::uint64_t> seeds,
                                             double horizon, std::size_t samples_per_realization,
                                             std::size_t n_bins, Diagnostics* diag = nullptr) {
  if (seeds.empty()) throw ConfigError("ensemble needs at least one seed");
  detail::check_sampling(horizon, samples_per_realization * seeds.size(), n_bins);
  detail::warn_short_horizon(spec, horizon, diag);
  const auto pooled = pooled_force_samples(spec, seeds, horizon, samples_per_realization);
  return histogram_of(pooled, symmetric_edges(pooled, n_bins));
}

}  // namespace rsm
