#pragma once

// Drives one experiment from a validated config and writes its artifacts plus a run manifest.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsm/collision.hpp"
#include "rsm/io/config.hpp"
#include "rsm/io/csv.hpp"
#include "rsm/kinematics.hpp"
#include "rsm/noise.hpp"
#include "rsm/parallel.hpp"
#include "rsm/stats.hpp"

#ifndef RSM_VERSION
#define RSM_VERSION "0.0.0"
#endif

namespace rsm::io {

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir, in write order
  std::vector<std::string> warnings;
};

/// 64-bit FNV-1a, used for the manifest's config hash.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline ParticleModel make_particle(const ExperimentConfig& cfg, double theta0, std::uint64_t seed) {
  auto force = std::make_shared<const BandLimitedForce>(cfg.noise_spec(), seed);
  const auto& p = cfg.particle;
  return p.convention == RapidityConvention::Mean ? ParticleModel::with_mean_rapidity(p.m0, p.c, theta0, force)
                                                  : ParticleModel::with_initial_rapidity(p.m0, p.c, theta0, force);
}

/// Shock configuration for one seed: particle 1 uses `seed`, particle 2 `seed + seed2_offset`
/// (or the same realization when shared_realization is set). Velocities are given in units of c.
inline TwoParticleConfig make_shock_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& s = cfg.shock;
  const auto spec = cfg.noise_spec();
  TwoParticleConfig out;
  out.alpha = s.alpha;
  out.m0 = cfg.particle.m0;
  out.c = cfg.particle.c;
  out.force1 = std::make_shared<const BandLimitedForce>(spec, seed);
  out.force2 = s.shared_realization ? out.force1 : std::make_shared<const BandLimitedForce>(spec, seed + s.seed2_offset);
  out.initial = {s.x1, s.v1 * out.c, s.tau1, s.x2, s.v2 * out.c, s.tau2};
  out.t0 = s.t0;
  out.min_separation = s.min_separation;
  return out;
}

struct ShockOutcome {
  ShockSeries series;
  ShockReport report;
  double after1_noise = 0.0;  // batch-means standard error of post-shock <v1>
};

inline ShockOutcome run_shock(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto sc = make_shock_config(cfg, seed);
  ShockOutcome o;
  o.series = integrate_shock(sc, cfg.shock.t_end, cfg.shock.dt);
  Window pre, post;
  if (cfg.shock.pre_window) {
    pre = *cfg.shock.pre_window;
    post = *cfg.shock.post_window;
  } else {
    std::tie(pre, post) = interaction_windows(o.series, cfg.shock.interaction_radius);
  }
  o.report = shock_report(o.series, sc, pre, post);
  o.after1_noise = mean_velocity_standard_error(o.series.t, o.series.column(&TwoParticleState::x1), post);
  return o;
}

namespace detail {

inline std::string tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline nlohmann::ordered_json to_json(const DriftSummary& d) {
  return {{"window", {d.window_start, d.window_end}},
          {"mean_velocity", d.mean_velocity},
          {"mean_momentum", d.mean_momentum},
          {"mean_kinetic_energy", d.mean_kinetic_energy}};
}

inline nlohmann::ordered_json to_json(const ShockReport& r) {
  return {{"before", {to_json(r.before1), to_json(r.before2)}},
          {"after", {to_json(r.after1), to_json(r.after2)}},
          {"total_momentum_before", r.total_momentum_before},
          {"total_momentum_after", r.total_momentum_after},
          {"closest_approach", r.closest_approach},
          {"closest_approach_time", r.closest_approach_time}};
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void csv(const std::string& name, const CsvTable& t) {
    write_csv(t, dir_ / name);
    files_.push_back(name);
  }
  void series(const std::string& name, const KinematicSeries& s) {
    write_series_csv(s, dir_ / name);
    files_.push_back(name);
  }
  void histogram(const std::string& name, const Histogram& h) {
    write_histogram_csv(h, dir_ / name);
    files_.push_back(name);
  }
  void json(const std::string& name, const nlohmann::ordered_json& j) { text(name, j.dump(2) + "\n"); }
  void text(const std::string& name, const std::string& body) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + (dir_ / name).string() + "' for writing");
    out << body;
    if (!out) throw IoError("write failed for '" + (dir_ / name).string() + "'");
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

template <class Fn>
auto with_context(const ExperimentConfig& cfg, const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError("kind=" + std::string(kind_name(cfg.kind)) + " " + what + ": " + e.what(), e.estimate());
  } catch (const DomainError& e) {
    throw NumericalError("kind=" + std::string(kind_name(cfg.kind)) + " " + what + ": " + e.what());
  }
}

inline void run_force_path(const ExperimentConfig& cfg, Writer& w) {
  const auto spec = cfg.noise_spec();
  const double horizon = cfg.sampling.horizon_periods * spec.fundamental_period();
  for (auto seed : cfg.seeds) {
    const BandLimitedForce force(spec, seed);
    const auto f = sample_force(force, horizon, cfg.sampling.n_samples);
    std::vector<double> tau(f.size());
    for (std::size_t k = 0; k < tau.size(); ++k) tau[k] = horizon * static_cast<double>(k) / static_cast<double>(f.size());
    w.csv("force_path_seed" + std::to_string(seed) + ".csv", {"force_path", "tau[s] force[N]", {"tau", "force"}, {tau, f}});
  }
}

inline void run_force_dist(const ExperimentConfig& cfg, Writer& w, Diagnostics& diag) {
  const auto spec = cfg.noise_spec();
  const double horizon = cfg.sampling.horizon_periods * spec.fundamental_period();
  rsm::detail::check_sampling(horizon, cfg.sampling.n_samples * cfg.seeds.size(), cfg.sampling.n_bins);
  rsm::detail::warn_short_horizon(spec, horizon, &diag);
  const auto xs = pooled_force_samples(spec, cfg.seeds, horizon, cfg.sampling.n_samples);
  const auto h = histogram_of(xs, symmetric_edges(xs, cfg.sampling.n_bins));
  double mean = 0.0, sq = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  for (double x : xs) sq += (x - mean) * (x - mean);
  const double sd = std::sqrt(sq / static_cast<double>(xs.size()));
  w.histogram("force_dist.csv", h);
  w.json("force_dist_summary.json", {{"n_samples", xs.size()},
                                     {"n_realizations", cfg.seeds.size()},
                                     {"f0", spec.f0()},
                                     {"sample_mean", mean},
                                     {"sample_std", sd},
                                     {"mirror_asymmetry", mirror_asymmetry(h)},
                                     {"peak_density", h.peak_density()}});
}

inline void run_single(const ExperimentConfig& cfg, Writer& w, Diagnostics& diag, bool series, bool summary_hist) {
  const auto spec = cfg.noise_spec();
  const double horizon = cfg.sampling.horizon_periods * spec.fundamental_period();
  CsvTable summary{"single_summary", "theta0[1] seed[1] c_hat[N s] mean_v[m/s] hist_mean_v[m/s] tanh_theta0[1]",
                   {"theta0", "seed", "c_hat", "mean_v", "hist_mean_v", "tanh_theta0"}, std::vector<std::vector<double>>(6)};
  for (double theta : cfg.particle.theta0) {
    for (auto seed : cfg.seeds) {
      with_context(cfg, "theta0=" + tag(theta) + " seed=" + std::to_string(seed), [&] {
        const auto m = make_particle(cfg, theta, seed);
        const std::string stem = "theta" + tag(theta) + "_seed" + std::to_string(seed);
        if (series) {
          CsvTable t{"velocity_series", "tau[s] rapidity[1] v[m/s]", {"tau", "rapidity", "v"}, std::vector<std::vector<double>>(3)};
          const double step = horizon / static_cast<double>(cfg.sampling.n_samples);
          for (std::size_t k = 0; k < cfg.sampling.n_samples; ++k) {
            const double tau = step * static_cast<double>(k);
            const double th = rapidity_at(m, tau);
            t.columns[0].push_back(tau);
            t.columns[1].push_back(th);
            t.columns[2].push_back(velocity_from_rapidity(th, m.c()));
          }
          w.csv("single_" + stem + ".csv", t);
        }
        const auto h = velocity_distribution(m, horizon, cfg.sampling.n_samples, cfg.sampling.n_bins, cfg.sampling.grid, &diag);
        w.histogram("velocity_dist_" + stem + ".csv", h);
        if (summary_hist) {
          const double direct = proper_time_mean_velocity(m, horizon);
          const double row[] = {theta, static_cast<double>(seed), m.c_hat(), direct, mean_of(h), std::tanh(theta)};
          for (std::size_t j = 0; j < 6; ++j) summary.columns[j].push_back(row[j]);
        }
        return 0;
      });
    }
  }
  if (summary_hist) w.csv(series ? "single_summary.csv" : "velocity_dist_summary.csv", summary);
}

inline void run_trajectory(const ExperimentConfig& cfg, Writer& w) {
  const auto spec = cfg.noise_spec();
  const double t_end = cfg.trajectory.t_end_periods * spec.fundamental_period();
  CsvTable summary{"trajectory_summary", "theta0[1] seed[1] slope[m/s] sign_changes[1] c_tanh_theta0[m/s]",
                   {"theta0", "seed", "slope", "sign_changes", "c_tanh_theta0"}, std::vector<std::vector<double>>(5)};
  for (double theta : cfg.particle.theta0) {
    for (auto seed : cfg.seeds) {
      with_context(cfg, "theta0=" + tag(theta) + " seed=" + std::to_string(seed), [&] {
        const auto m = make_particle(cfg, theta, seed);
        const auto s = trajectory(m, t_end, cfg.trajectory.n_steps, cfg.trajectory.x0, cfg.sampling.tol);
        w.series("trajectory_theta" + tag(theta) + "_seed" + std::to_string(seed) + ".csv", s);
        const double row[] = {theta, static_cast<double>(seed), (s.x.back() - s.x.front()) / (s.t.back() - s.t.front()),
                              static_cast<double>(count_sign_changes(s.v)), m.c() * std::tanh(theta)};
        for (std::size_t j = 0; j < 5; ++j) summary.columns[j].push_back(row[j]);
        return 0;
      });
    }
  }
  w.csv("trajectory_summary.csv", summary);
}

inline void run_shock_kind(const ExperimentConfig& cfg, Writer& w) {
  for (auto seed : cfg.seeds) {
    const auto o = with_context(cfg, "seed=" + std::to_string(seed), [&] { return run_shock(cfg, seed); });
    CsvTable t{"shock_series", "t[s] x1[m] x2[m] v1[m/s] v2[m/s] tau1[s] tau2[s]",
               {"t", "x1", "x2", "v1", "v2", "tau1", "tau2"}, std::vector<std::vector<double>>(7)};
    const std::size_t n = o.series.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (k % cfg.shock.output_every != 0 && k + 1 != n) continue;
      const auto& s = o.series.states[k];
      const double row[] = {o.series.t[k], s.x1, s.x2, s.v1, s.v2, s.tau1, s.tau2};
      for (std::size_t j = 0; j < 7; ++j) t.columns[j].push_back(row[j]);
    }
    w.csv("shock_seed" + std::to_string(seed) + ".csv", t);
    auto j = detail::to_json(o.report);
    j["seed"] = seed;
    j["after1_velocity_standard_error"] = o.after1_noise;
    w.json("shock_report_seed" + std::to_string(seed) + ".json", j);
  }
}

inline void run_ensemble(const ExperimentConfig& cfg, Writer& w) {
  const auto outcomes = parallel_map(cfg.seeds.size(), [&](std::size_t i) {
    const auto seed = cfg.seeds[i];
    auto o = with_context(cfg, "seed=" + std::to_string(seed), [&] { return run_shock(cfg, seed); });
    o.series = {};  // keep only the report
    return o;
  });
  CsvTable t{"ensemble_summary",
             "seed[1] v1_before[m/s] v2_before[m/s] v1_after[m/s] v2_after[m/s] p_before[kg m/s] p_after[kg m/s] "
             "closest_approach[m] v1_after_stderr[m/s]",
             {"seed", "v1_before", "v2_before", "v1_after", "v2_after", "p_before", "p_after", "closest_approach",
              "v1_after_stderr"},
             std::vector<std::vector<double>>(9)};
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& r = outcomes[i].report;
    const double row[] = {static_cast<double>(cfg.seeds[i]), r.before1.mean_velocity, r.before2.mean_velocity,
                          r.after1.mean_velocity, r.after2.mean_velocity, r.total_momentum_before,
                          r.total_momentum_after, r.closest_approach, outcomes[i].after1_noise};
    for (std::size_t j = 0; j < 9; ++j) t.columns[j].push_back(row[j]);
    m1 += r.after1.mean_velocity;
    m2 += r.after2.mean_velocity;
  }
  const auto n = static_cast<double>(outcomes.size());
  m1 /= n;
  m2 /= n;
  double ss = 0.0;
  for (const auto& o : outcomes) ss += (o.report.after1.mean_velocity - m1) * (o.report.after1.mean_velocity - m1);
  w.csv("ensemble_summary.csv", t);
  w.json("ensemble_report.json", {{"n_runs", outcomes.size()},
                                  {"mean_v1_after", m1},
                                  {"mean_v2_after", m2},
                                  {"std_v1_after", outcomes.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0}});
}

}  // namespace detail

/// Runs the experiment into `output_dir` (the config's output.dir when empty). Outputs are a pure
/// function of the config: rerunning yields byte-identical files. Throws ConfigError for invalid
/// setups, NumericalError (with experiment context) for numerical failures and IoError for I/O.
inline RunResult run(const ExperimentConfig& cfg, std::filesystem::path output_dir = {}) {
  if (output_dir.empty()) output_dir = cfg.output_dir;
  detail::Writer w(output_dir);
  Diagnostics diag;
  switch (cfg.kind) {
    case Kind::ForcePath: detail::run_force_path(cfg, w); break;
    case Kind::ForceDist: detail::run_force_dist(cfg, w, diag); break;
    case Kind::Single: detail::run_single(cfg, w, diag, true, true); break;
    case Kind::VelocityDist: detail::run_single(cfg, w, diag, false, true); break;
    case Kind::Trajectory: detail::run_trajectory(cfg, w); break;
    case Kind::Shock: detail::run_shock_kind(cfg, w); break;
    case Kind::Ensemble: detail::run_ensemble(cfg, w); break;
  }

  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.canonical)));
  std::string manifest;
  manifest += "tool = rsm\n";
  manifest += "version = " RSM_VERSION "\n";
  manifest += "config_schema_version = " + std::to_string(kConfigSchemaVersion) + "\n";
  manifest += "csv_schema_version = " + std::to_string(kCsvSchemaVersion) + "\n";
  manifest += "kind = " + std::string(kind_name(cfg.kind)) + "\n";
  manifest += "config_hash = fnv1a64:" + std::string(hash) + "\n";
  manifest += "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) manifest += (i ? ", " : "") + std::to_string(cfg.seeds[i]);
  manifest += "\nfiles = ";
  for (std::size_t i = 0; i < w.files().size(); ++i) manifest += (i ? ", " : "") + w.files()[i];
  manifest += "\n";
  w.text("manifest.txt", manifest);

  return {output_dir, w.files(), diag.warnings};
}

}  // namespace rsm::io
