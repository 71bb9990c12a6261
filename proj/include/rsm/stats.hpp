#pragma once

// Ergodic estimators: velocity densities, drift (window-mean) quantities and the time-average vs
// ensemble-average consistency check for the force.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "rsm/errors.hpp"
#include "rsm/histogram.hpp"
#include "rsm/kinematics.hpp"
#include "rsm/noise.hpp"
#include "rsm/quadrature.hpp"

namespace rsm {

/// Window means of velocity, momentum and kinetic energy.
struct DriftSummary {
  double mean_velocity = 0.0;
  double mean_momentum = 0.0;
  double mean_kinetic_energy = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};

struct Window {
  double start = 0.0;
  double end = 0.0;
};

/// Grid on which distributions are sampled. The two choices weight velocities differently
/// (uniform lab time weights each proper-time sample by gamma).
enum class Sampling { ProperTime, LabTime };

namespace detail {

inline double interpolate(std::span<const double> t, std::span<const double> y, double at) {
  auto it = std::lower_bound(t.begin(), t.end(), at);
  if (it == t.begin()) return y.front();
  if (it == t.end()) return y.back();
  const auto k = static_cast<std::size_t>(it - t.begin());
  const double w = (at - t[k - 1]) / (t[k] - t[k - 1]);
  return y[k - 1] + w * (y[k] - y[k - 1]);
}

/// Trapezoidal time-average of g(v) over [a, b] with linearly interpolated end samples.
template <class G>
double window_average(std::span<const double> t, std::span<const double> v, Window w, const G& g) {
  double acc = 0.0;
  double t_prev = w.start;
  double g_prev = g(interpolate(t, v, w.start));
  auto it = std::upper_bound(t.begin(), t.end(), w.start);
  for (; it != t.end() && *it < w.end; ++it) {
    const auto k = static_cast<std::size_t>(it - t.begin());
    const double gk = g(v[k]);
    acc += 0.5 * (*it - t_prev) * (gk + g_prev);
    t_prev = *it;
    g_prev = gk;
  }
  const double g_end = g(interpolate(t, v, w.end));
  acc += 0.5 * (w.end - t_prev) * (g_end + g_prev);
  return acc / (w.end - w.start);
}

}  // namespace detail

/// Drift quantities of a sampled lab-frame path over `window`:
/// mean velocity (x(end) - x(start)) / (end - start), and time averages of m0 gamma v and m0 c^2 (gamma - 1).
inline DriftSummary drift_summary(std::span<const double> t, std::span<const double> x, std::span<const double> v,
                                  double m0, double c, Window window) {
  if (t.size() != x.size() || t.size() != v.size()) throw ConfigError("series arrays differ in length");
  if (t.size() < 2) throw ConfigError("drift window is empty: series has fewer than two samples");
  if (!(window.end > window.start)) throw ConfigError("drift window is empty");
  const double eps = 1e-12 * std::max(1.0, std::abs(t.back()));
  if (window.start < t.front() - eps || window.end > t.back() + eps)
    throw ConfigError("drift window lies outside the series span");
  window.start = std::max(window.start, t.front());
  window.end = std::min(window.end, t.back());

  const auto gamma = [c](double u) { return 1.0 / std::sqrt(1.0 - (u / c) * (u / c)); };
  DriftSummary d;
  d.window_start = window.start;
  d.window_end = window.end;
  d.mean_velocity =
      (detail::interpolate(t, x, window.end) - detail::interpolate(t, x, window.start)) / (window.end - window.start);
  d.mean_momentum = detail::window_average(t, v, window, [&](double u) { return m0 * gamma(u) * u; });
  d.mean_kinetic_energy =
      detail::window_average(t, v, window, [&](double u) { return m0 * c * c * (gamma(u) - 1.0); });
  d.mean_kinetic_energy = std::max(0.0, d.mean_kinetic_energy);
  return d;
}

inline DriftSummary drift_summary(const KinematicSeries& s, const ParticleModel& m, Window window) {
  return drift_summary(s.t, s.x, s.v, m.m0(), m.c(), window);
}

/// (1/T) * integral of v over proper time [0, T], as the mean over a uniform half-open grid.
/// v(tau) is periodic in the fundamental period, so for whole periods this is the periodic
/// trapezoidal rule and converges spectrally. The default grid has 16 points per period of the
/// highest force component.
inline double proper_time_mean_velocity(const ParticleModel& m, double horizon, std::size_t n_samples = 0) {
  if (!(horizon > 0.0)) throw ConfigError("averaging horizon must be positive");
  if (n_samples == 0)
    n_samples = static_cast<std::size_t>(std::ceil(16.0 * horizon * m.noise().bandwidth() / kTwoPi)) + 1;
  const double step = horizon / static_cast<double>(n_samples);
  double acc = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) acc += velocity_at_proper_time(m, step * static_cast<double>(k));
  return acc / static_cast<double>(n_samples);
}

/// Velocity samples on a uniform proper-time grid (half-open) or uniform lab-time grid over [0, horizon].
inline std::vector<double> sample_velocity(const ParticleModel& m, double horizon, std::size_t n_samples,
                                           Sampling sampling = Sampling::ProperTime) {
  std::vector<double> out(n_samples);
  const double step = horizon / static_cast<double>(n_samples);
  if (sampling == Sampling::ProperTime) {
    for (std::size_t k = 0; k < n_samples; ++k) out[k] = velocity_at_proper_time(m, step * static_cast<double>(k));
  } else {
    ProperClock clock(m);
    for (std::size_t k = 0; k < n_samples; ++k)
      out[k] = velocity_at_proper_time(m, clock.advance_to(step * static_cast<double>(k)));
  }
  return out;
}

inline Histogram velocity_distribution(const ParticleModel& m, double horizon, std::size_t n_samples,
                                       std::size_t n_bins, Sampling sampling = Sampling::ProperTime,
                                       Diagnostics* diag = nullptr) {
  detail::check_sampling(horizon, n_samples, n_bins);
  detail::warn_short_horizon(m.noise(), horizon, diag);
  const auto vs = sample_velocity(m, horizon, n_samples, sampling);
  return histogram_of(vs, n_bins);
}

/// Standard error of the window-mean velocity from batch means: the window is cut into
/// `n_batches` equal sub-windows and the spread of their mean velocities is divided by sqrt(n_batches).
inline double mean_velocity_standard_error(std::span<const double> t, std::span<const double> x, Window window,
                                           std::size_t n_batches = 10) {
  if (n_batches < 2) throw ConfigError("batch-means error needs at least two batches");
  if (!(window.end > window.start)) throw ConfigError("drift window is empty");
  const double h = (window.end - window.start) / static_cast<double>(n_batches);
  std::vector<double> means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    const double a = window.start + h * static_cast<double>(b);
    means[b] = (detail::interpolate(t, x, a + h) - detail::interpolate(t, x, a)) / h;
  }
  double mu = 0.0;
  for (double m : means) mu += m;
  mu /= static_cast<double>(n_batches);
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  const double sd = std::sqrt(ss / static_cast<double>(n_batches - 1));
  return sd / std::sqrt(static_cast<double>(n_batches));
}

/// Number of strict sign changes in a sequence (zeros are skipped).
inline std::size_t count_sign_changes(std::span<const double> v) {
  std::size_t n = 0;
  int last = 0;
  for (double x : v) {
    const int s = (x > 0.0) - (x < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++n;
    last = s;
  }
  return n;
}

struct ErgodicityOptions {
  std::uint64_t base_seed = 1;      // realization used for the time average; ensemble uses the next seeds
  std::size_t time_samples = 100000;
  double fixed_tau = 0.0;           // proper time at which the ensemble is sampled
};

/// Total-variation distance between the time-sampled force density of one realization over
/// [0, horizon] and the density of force values at a fixed proper time across `n_realizations`
/// independent realizations. Both use the same mirror-symmetric bins.
inline double ergodicity_check(const NoiseSpec& spec, std::size_t n_realizations, double horizon, std::size_t n_bins,
                               const ErgodicityOptions& opt = {}) {
  if (n_realizations < 30) throw ConfigError("ergodicity_check needs at least 30 realizations");
  if (!(horizon > 0.0)) throw ConfigError("sampling horizon must be positive");
  if (n_bins == 0) throw ConfigError("n_bins must be positive");
  const auto in_time = sample_force(BandLimitedForce(spec, opt.base_seed), horizon, opt.time_samples);
  std::vector<double> across;
  across.reserve(n_realizations);
  for (std::size_t r = 0; r < n_realizations; ++r)
    across.push_back(BandLimitedForce(spec, opt.base_seed + 1 + r).force(opt.fixed_tau));

  std::vector<double> pooled(in_time);
  pooled.insert(pooled.end(), across.begin(), across.end());
  const auto edges = symmetric_edges(pooled, n_bins);
  return total_variation(histogram_of(in_time, edges), histogram_of(across, edges));
}

}  // namespace rsm
