#pragma once

// Two particles, each driven by its own proper-frame force at its own proper time, repelling through
// an instantaneous (non-retarded) 1D Coulomb force evaluated at equal lab time:
//
//   dx_k/dt   = v_k
//   dv_k/dt   = (1 - v_k^2/c^2)^{3/2} / m0 * [ F_k(tau_k) + sqrt(1 - v_k^2/c^2) * F_rep,k(x1, x2) ]
//   dtau_k/dt = sqrt(1 - v_k^2/c^2)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rsm/errors.hpp"
#include "rsm/noise.hpp"
#include "rsm/stats.hpp"

namespace rsm {

struct TwoParticleState {
  double x1 = 0.0, v1 = 0.0, tau1 = 0.0;
  double x2 = 0.0, v2 = 0.0, tau2 = 0.0;

  double separation() const noexcept { return std::abs(x1 - x2); }

  TwoParticleState& operator+=(const TwoParticleState& o) noexcept {
    x1 += o.x1, v1 += o.v1, tau1 += o.tau1;
    x2 += o.x2, v2 += o.v2, tau2 += o.tau2;
    return *this;
  }
  friend TwoParticleState operator+(TwoParticleState a, const TwoParticleState& b) noexcept { return a += b; }
  friend TwoParticleState operator*(double s, TwoParticleState a) noexcept {
    a.x1 *= s, a.v1 *= s, a.tau1 *= s;
    a.x2 *= s, a.v2 *= s, a.tau2 *= s;
    return a;
  }
  friend bool operator==(const TwoParticleState&, const TwoParticleState&) = default;
};

struct TwoParticleConfig {
  double alpha = 0.01;          // Coulomb coupling (N m^2); 0 decouples the particles
  double m0 = 1.0;
  double c = 1.0;
  std::shared_ptr<const BandLimitedForce> force1;  // null: no medium force on particle 1
  std::shared_ptr<const BandLimitedForce> force2;
  TwoParticleState initial;
  double t0 = 0.0;
  double min_separation = 1e-4;

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0 (repulsive coupling)");
    if (!(m0 > 0.0)) throw ConfigError("rest mass m0 must be positive");
    if (!(c > 0.0)) throw ConfigError("light speed c must be positive");
    if (!(min_separation > 0.0)) throw ConfigError("min_separation must be positive");
    if (!(std::abs(initial.v1) < c) || !(std::abs(initial.v2) < c))
      throw ConfigError("initial velocities must satisfy |v| < c (sub-luminality)");
    if (!(initial.separation() >= min_separation))
      throw ConfigError("initial separation must be at least min_separation");
  }
};

struct PairForce {
  double on1 = 0.0;
  double on2 = 0.0;
};

/// alpha * sign(x1 - x2) / (x1 - x2)^2 on particle 1 and exactly its negation on particle 2.
inline PairForce coulomb_pair_force(double x1, double x2, double alpha, double min_separation = 0.0) {
  const double d = x1 - x2;
  if (d == 0.0 || !(std::abs(d) >= min_separation))
    throw ProximityError("particles closer than min_separation (" + std::to_string(std::abs(d)) + " m)",
                         std::abs(d));
  const double f = std::copysign(alpha / (d * d), d);
  return {f, -f};
}

/// Time derivative of the state with respect to lab time.
inline TwoParticleState derivative(const TwoParticleState& s, const TwoParticleConfig& cfg) {
  if (!(std::abs(s.v1) < cfg.c) || !(std::abs(s.v2) < cfg.c)) throw DomainError("state has |v| >= c");
  const PairForce rep = cfg.alpha == 0.0 ? PairForce{} : coulomb_pair_force(s.x1, s.x2, cfg.alpha, cfg.min_separation);
  const auto one = [&](double v, double tau, double f_rep, const std::shared_ptr<const BandLimitedForce>& medium) {
    const double b2 = (v / cfg.c) * (v / cfg.c);
    const double root = std::sqrt(1.0 - b2);
    const double f_proper = medium ? medium->force(tau) : 0.0;
    const double accel = root * root * root / cfg.m0 * (f_proper + root * f_rep);
    return std::pair{accel, root};
  };
  const auto [a1, r1] = one(s.v1, s.tau1, rep.on1, cfg.force1);
  const auto [a2, r2] = one(s.v2, s.tau2, rep.on2, cfg.force2);
  TwoParticleState d;
  d.x1 = s.v1, d.v1 = a1, d.tau1 = r1;
  d.x2 = s.v2, d.v2 = a2, d.tau2 = r2;
  return d;
}

/// States at the accepted macro steps t0, t0 + dt, ..., t_end.
struct ShockSeries {
  std::vector<double> t;
  std::vector<TwoParticleState> states;

  std::size_t size() const noexcept { return t.size(); }

  std::vector<double> column(double TwoParticleState::*field) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.*field);
    return out;
  }
};

/// Number of times a rejected step may be halved before integration gives up.
inline constexpr int kMaxStepHalvings = 10;

namespace detail {

inline bool admissible(const TwoParticleState& prev, const TwoParticleState& s, const TwoParticleConfig& cfg) {
  // without coupling the particles may pass through each other
  const bool apart = cfg.alpha == 0.0 || (s.separation() >= cfg.min_separation &&
                                          std::signbit(s.x1 - s.x2) == std::signbit(prev.x1 - prev.x2));
  return std::abs(s.v1) < cfg.c && std::abs(s.v2) < cfg.c && apart &&
         s.tau1 > prev.tau1 && s.tau2 > prev.tau2 && std::isfinite(s.x1) && std::isfinite(s.x2);
}

inline bool rk4_step(const TwoParticleState& s, double h, const TwoParticleConfig& cfg, TwoParticleState& out) {
  try {
    const auto k1 = derivative(s, cfg);
    const auto k2 = derivative(s + (0.5 * h) * k1, cfg);
    const auto k3 = derivative(s + (0.5 * h) * k2, cfg);
    const auto k4 = derivative(s + h * k3, cfg);
    out = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  } catch (const ProximityError&) {
    return false;
  } catch (const DomainError&) {
    return false;
  }
  return admissible(s, out, cfg);
}

inline TwoParticleState advance(const TwoParticleState& s, double t, double h, const TwoParticleConfig& cfg,
                                int depth) {
  TwoParticleState next;
  if (rk4_step(s, h, cfg, next)) return next;
  if (depth >= kMaxStepHalvings)
    throw SingularityError("shock integration failed at t = " + std::to_string(t) + " with separation " +
                               std::to_string(s.separation()) + " m after " + std::to_string(kMaxStepHalvings) +
                               " step halvings",
                           t, s.separation());
  const auto mid = advance(s, t, 0.5 * h, cfg, depth + 1);
  return advance(mid, t + 0.5 * h, 0.5 * h, cfg, depth + 1);
}

}  // namespace detail

/// Classical fixed-step RK4 from cfg.t0 to t_end. A step that would leave |v| < c, drop below
/// min_separation, swap the particles' order or fail to advance proper time is retried as two
/// half steps, recursively down to dt / 2^10; beyond that a SingularityError reports the time and
/// separation.
inline ShockSeries integrate_shock(const TwoParticleConfig& cfg, double t_end, double dt) {
  cfg.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_end > cfg.t0)) throw ConfigError("t_end must exceed t0");
  const auto n_steps = static_cast<std::size_t>(std::ceil((t_end - cfg.t0) / dt - 1e-9));
  ShockSeries out;
  out.t.reserve(n_steps + 1);
  out.states.reserve(n_steps + 1);
  out.t.push_back(cfg.t0);
  out.states.push_back(cfg.initial);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t_prev = out.t.back();
    const double t_next = (k == n_steps) ? t_end : cfg.t0 + dt * static_cast<double>(k);
    out.states.push_back(detail::advance(out.states.back(), t_prev, t_next - t_prev, cfg, 0));
    out.t.push_back(t_next);
  }
  return out;
}

struct ShockReport {
  DriftSummary before1, before2;
  DriftSummary after1, after2;
  double total_momentum_before = 0.0;
  double total_momentum_after = 0.0;
  double closest_approach = 0.0;
  double closest_approach_time = 0.0;
};

struct ClosestApproach {
  std::size_t index = 0;
  double time = 0.0;
  double separation = std::numeric_limits<double>::infinity();
};

inline ClosestApproach closest_approach(const ShockSeries& series) {
  ClosestApproach ca;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double d = series.states[k].separation();
    if (d < ca.separation) ca = {k, series.t[k], d};
  }
  return ca;
}

/// Pre- and post-shock windows bounding the interval in which the separation is below
/// `interaction_radius`.
inline std::pair<Window, Window> interaction_windows(const ShockSeries& series, double interaction_radius) {
  if (series.size() < 2) throw ConfigError("shock series is too short for windows");
  std::size_t first = series.size(), last = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series.states[k].separation() < interaction_radius) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == series.size()) {
    const auto ca = closest_approach(series);
    first = last = ca.index;
  }
  const Window pre{series.t.front(), series.t[first]};
  const Window post{series.t[last], series.t.back()};
  if (!(pre.end > pre.start) || !(post.end > post.start))
    throw ConfigError("interaction interval leaves no pre- or post-shock window; lengthen the run or "
                      "reduce interaction_radius");
  return {pre, post};
}

inline ShockReport shock_report(const ShockSeries& series, const TwoParticleConfig& cfg, Window pre, Window post) {
  const auto ca = closest_approach(series);
  if (!(pre.end <= ca.time) || !(post.start >= ca.time))
    throw ConfigError("pre/post windows must be separated by the closest-approach time " + std::to_string(ca.time));
  const auto t = series.t;
  const auto x1 = series.column(&TwoParticleState::x1), v1 = series.column(&TwoParticleState::v1);
  const auto x2 = series.column(&TwoParticleState::x2), v2 = series.column(&TwoParticleState::v2);
  ShockReport r;
  r.before1 = drift_summary(t, x1, v1, cfg.m0, cfg.c, pre);
  r.before2 = drift_summary(t, x2, v2, cfg.m0, cfg.c, pre);
  r.after1 = drift_summary(t, x1, v1, cfg.m0, cfg.c, post);
  r.after2 = drift_summary(t, x2, v2, cfg.m0, cfg.c, post);
  r.total_momentum_before = r.before1.mean_momentum + r.before2.mean_momentum;
  r.total_momentum_after = r.after1.mean_momentum + r.after2.mean_momentum;
  r.closest_approach = ca.separation;
  r.closest_approach_time = ca.time;
  return r;
}

}  // namespace rsm
