#pragma once

// Closed-form single-particle kinematics under the proper-frame force. The lab velocity depends on
// proper time only through the force impulse:
//
//   theta(tau) = (I(tau) + c_hat) / (m0 c),   v(tau) = c tanh(theta(tau)),   dt/dtau = cosh(theta(tau))

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rsm/errors.hpp"
#include "rsm/noise.hpp"
#include "rsm/quadrature.hpp"

namespace rsm {

inline constexpr double kDefaultTimeTolerance = 1e-8;

/// Rest mass, light speed, integration constant and the force realization driving the particle.
class ParticleModel {
 public:
  ParticleModel(double m0, double c, double c_hat, std::shared_ptr<const BandLimitedForce> force)
      : m0_(m0), c_(c), c_hat_(c_hat), force_(std::move(force)) {
    if (!(m0 > 0.0) || !std::isfinite(m0)) throw ConfigError("rest mass m0 must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("light speed c must be positive");
    if (!force_) throw ConfigError("particle model needs a force realization");
    if (!std::isfinite(c_hat / (m0 * c))) throw ConfigError("initial rapidity c_hat / (m0 c) must be finite");
  }

  /// c_hat chosen so that theta(0) = theta0.
  static ParticleModel with_initial_rapidity(double m0, double c, double theta0,
                                             std::shared_ptr<const BandLimitedForce> force) {
    return ParticleModel(m0, c, m0 * c * theta0, std::move(force));
  }

  /// c_hat chosen so that the proper-time average of theta is theta0: the constant used when the
  /// force is integrated without its lower-limit terms.
  static ParticleModel with_mean_rapidity(double m0, double c, double theta0,
                                          std::shared_ptr<const BandLimitedForce> force) {
    const double shift = force ? force->antiderivative_at_zero() : 0.0;
    return ParticleModel(m0, c, m0 * c * theta0 + shift, std::move(force));
  }

  double m0() const noexcept { return m0_; }
  double c() const noexcept { return c_; }
  double c_hat() const noexcept { return c_hat_; }
  const BandLimitedForce& force() const noexcept { return *force_; }
  const std::shared_ptr<const BandLimitedForce>& force_ptr() const noexcept { return force_; }
  const NoiseSpec& noise() const noexcept { return force_->spec(); }

  double initial_rapidity() const noexcept { return c_hat_ / (m0_ * c_); }

  /// Returns a copy with c_hat shifted by delta.
  ParticleModel boosted(double delta_c_hat) const { return ParticleModel(m0_, c_, c_hat_ + delta_c_hat, force_); }

  /// Upper bound on the Lorentz factor over all proper time.
  double max_lorentz_factor() const {
    return std::cosh(std::abs(initial_rapidity()) + force_->integral_bound() / (m0_ * c_));
  }

 private:
  double m0_;
  double c_;
  double c_hat_;
  std::shared_ptr<const BandLimitedForce> force_;
};

/// Aligned samples (tau, t, x, v) of one trajectory.
struct KinematicSeries {
  std::vector<double> tau;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> v;

  std::size_t size() const noexcept { return t.size(); }
};

inline double rapidity_at(const ParticleModel& m, double tau) {
  return (m.force().integral(tau) + m.c_hat()) / (m.m0() * m.c());
}

/// c tanh(theta), kept strictly inside (-c, c) even where tanh rounds to +-1.
inline double velocity_from_rapidity(double theta, double c) {
  double b = std::tanh(theta);
  if (std::abs(b) >= 1.0) b = std::copysign(std::nextafter(1.0, 0.0), theta);
  return c * b;
}

inline double velocity_at_proper_time(const ParticleModel& m, double tau) {
  return velocity_from_rapidity(rapidity_at(m, tau), m.c());
}

/// dt/dtau = 1/sqrt(1 - v^2/c^2) = cosh(theta).
inline double lorentz_factor_at(const ParticleModel& m, double tau) { return std::cosh(rapidity_at(m, tau)); }

namespace detail {
inline double quadrature_panel(const ParticleModel& m) { return kTwoPi / m.noise().bandwidth(); }

inline double lab_time_between(const ParticleModel& m, double tau_a, double tau_b, double tol_per_length) {
  const auto gamma = [&m](double s) { return lorentz_factor_at(m, s); };
  return integrate_panels(gamma, tau_a, tau_b, quadrature_panel(m), tol_per_length).value;
}
}  // namespace detail

/// Lab time elapsed over proper time [0, tau], to relative accuracy `tol`.
inline double lab_time_of(const ParticleModel& m, double tau, double tol = kDefaultTimeTolerance) {
  if (!(tau >= 0.0)) throw DomainError("lab_time_of needs tau >= 0");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  return detail::lab_time_between(m, 0.0, tau, tol);
}

/// Inverts t(tau) incrementally along increasing lab time. Each advance is a bracketed Newton
/// iteration on the monotone map t(tau) (slope gamma in [1, gamma_max]) that only integrates from
/// the last anchor, so a sweep over a grid costs O(total proper time).
class ProperClock {
 public:
  explicit ProperClock(const ParticleModel& model, double tol = kDefaultTimeTolerance)
      : model_(model), tol_(tol), gamma_max_(model.max_lorentz_factor()) {
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  }

  double tau() const noexcept { return tau_; }
  double t() const noexcept { return t_; }

  /// Advances to lab time `target` (>= current) and returns the matching proper time.
  double advance_to(double target) {
    if (!(target >= t_)) throw DomainError("ProperClock only advances forward in lab time");
    const double abs_tol = 0.5 * tol_ * std::max(1.0, target);
    if (std::abs(t_ - target) <= abs_tol) return tau_;
    const double dt = target - t_;
    double lo = tau_ + dt / gamma_max_;
    double hi = tau_ + dt;
    constexpr int kMaxIterations = 200;
    for (int it = 0; it < kMaxIterations; ++it) {
      double next = tau_ + (target - t_) / lorentz_factor_at(model_, tau_);
      if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
      t_ += detail::lab_time_between(model_, tau_, next, 0.1 * tol_);
      tau_ = next;
      const double miss = t_ - target;
      if (std::abs(miss) <= abs_tol) return tau_;
      if (miss < 0.0)
        lo = std::max(lo, tau_);
      else
        hi = std::min(hi, tau_);
      if (!(lo < hi))
        throw NumericalError("proper-time bracket collapsed at t = " + std::to_string(target), std::abs(miss));
    }
    throw NumericalError("proper-time inversion did not converge at t = " + std::to_string(target),
                         std::abs(t_ - target));
  }

 private:
  ParticleModel model_;
  double tol_;
  double gamma_max_;
  double tau_ = 0.0;
  double t_ = 0.0;
};

/// Proper time at lab time t (clock synchronised at t = tau = 0); |t(tau) - t| <= tol * max(1, t).
inline double proper_time_of(const ParticleModel& m, double t, double tol = kDefaultTimeTolerance) {
  if (!(t >= 0.0)) throw DomainError("proper_time_of needs t >= 0");
  ProperClock clock(m, tol);
  return clock.advance_to(t);
}

/// Samples the trajectory on the uniform lab grid t_k = t_end * k / n_steps, k = 0..n_steps.
/// Positions come from trapezoidal integration of v dt starting at x0, so x carries an O(dt^2)
/// discretisation error on top of the sampling.
inline KinematicSeries trajectory(const ParticleModel& m, double t_end, std::size_t n_steps, double x0 = 0.0,
                                  double tol = kDefaultTimeTolerance) {
  if (!(t_end > 0.0)) throw ConfigError("trajectory needs t_end > 0");
  if (n_steps < 2) throw ConfigError("trajectory needs n_steps >= 2");
  KinematicSeries s;
  const std::size_t n = n_steps + 1;
  s.tau.reserve(n);
  s.t.reserve(n);
  s.x.reserve(n);
  s.v.reserve(n);
  ProperClock clock(m, tol);
  const double h = t_end / static_cast<double>(n_steps);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (k + 1 == n) ? t_end : h * static_cast<double>(k);
    const double tau = clock.advance_to(t);
    const double v = velocity_at_proper_time(m, tau);
    double x = x0;
    if (k > 0) x = s.x.back() + 0.5 * (t - s.t.back()) * (v + s.v.back());
    s.tau.push_back(tau);
    s.t.push_back(t);
    s.x.push_back(x);
    s.v.push_back(v);
  }
  return s;
}

/// F_lab = F_proper / sqrt(1 - v^2/c^2).
inline double proper_to_lab_force(double f_proper, double v, double c) {
  if (!(std::abs(v) < c)) throw DomainError("force transform needs |v| < c");
  return f_proper / std::sqrt(1.0 - (v / c) * (v / c));
}

/// F_proper = sqrt(1 - v^2/c^2) F_lab.
inline double lab_to_proper_force(double f_lab, double v, double c) {
  if (!(std::abs(v) < c)) throw DomainError("force transform needs |v| < c");
  return f_lab * std::sqrt(1.0 - (v / c) * (v / c));
}

}  // namespace rsm
