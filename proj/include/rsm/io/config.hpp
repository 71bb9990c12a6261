#pragma once

// Experiment configuration: a flat key-value document with optional one-level [sections].
//
//   # comment
//   kind  = single
//   seeds = 1, 2, 3
//   [particle]
//   theta0 = 0.3
//
// Keys inside a section are addressed as "section.key" (also by --override). Unknown keys are rejected.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rsm/errors.hpp"
#include "rsm/noise.hpp"
#include "rsm/stats.hpp"

namespace rsm::io {

/// Bumped whenever a default or a key changes meaning.
inline constexpr int kConfigSchemaVersion = 1;

class ConfigSyntaxError : public ConfigError {
 public:
  ConfigSyntaxError(const std::string& msg, int line, int column)
      : ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct Entry {
  std::string value;
  int line = 0;  // 0 for values supplied by overrides
};

/// Parsed document: fully qualified key -> raw value.
using KeyValueDoc = std::map<std::string, Entry>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline bool is_key_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
}

inline std::optional<std::size_t> bad_key_char(std::string_view key) {
  for (std::size_t i = 0; i < key.size(); ++i)
    if (!is_key_char(key[i])) return i;
  return std::nullopt;
}

}  // namespace detail

inline KeyValueDoc parse_document(std::string_view text) {
  KeyValueDoc doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    // strip comments: whole-line '#'/';' or inline " #"
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto indent = static_cast<int>(line.find_first_not_of(" \t"));
    line = detail::trim(line);
    if (line.empty() || line.front() == ';') continue;
    const int col0 = indent + 1;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigSyntaxError("unterminated section header", line_no, col0);
      auto name = detail::trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigSyntaxError("empty section name", line_no, col0 + 1);
      if (auto bad = detail::bad_key_char(name))
        throw ConfigSyntaxError("invalid character in section name", line_no, col0 + 1 + static_cast<int>(*bad));
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigSyntaxError("expected 'key = value'", line_no, col0 + static_cast<int>(line.size()));
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigSyntaxError("missing key before '='", line_no, col0);
    if (auto bad = detail::bad_key_char(key))
      throw ConfigSyntaxError("invalid character in key", line_no, col0 + static_cast<int>(*bad));
    const auto value = detail::trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigSyntaxError("missing value after '='", line_no, col0 + static_cast<int>(eq) + 1);
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.contains(full)) throw ConfigSyntaxError("duplicate key '" + full + "'", line_no, col0);
    doc[full] = Entry{std::string(value), line_no};
  }
  return doc;
}

/// Applies "key=value" (fully qualified key) on top of a parsed document.
inline void apply_override(KeyValueDoc& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  const auto key = detail::trim(assignment.substr(0, eq));
  const auto value = detail::trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty()) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  doc[std::string(key)] = Entry{std::string(value), 0};
}

enum class Kind { ForcePath, ForceDist, Single, VelocityDist, Trajectory, Shock, Ensemble };

inline std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::ForcePath: return "force-path";
    case Kind::ForceDist: return "force-dist";
    case Kind::Single: return "single";
    case Kind::VelocityDist: return "velocity-dist";
    case Kind::Trajectory: return "trajectory";
    case Kind::Shock: return "shock";
    case Kind::Ensemble: return "ensemble";
  }
  return "?";
}

/// Which integration constant `theta0` pins: the proper-time mean rapidity (the convention in
/// which curves are labelled by their drift) or the rapidity at tau = 0.
enum class RapidityConvention { Mean, Initial };

struct NoiseParams {
  std::size_t n_components = 250;
  double bandwidth = NoiseSpec::kDefaultBandwidth;
  std::optional<double> f0;   // Newtons
  double drive = 0.1;         // f0 / (bandwidth m0 c), used when f0 is absent
};

struct ParticleParams {
  double m0 = 1.0;
  double c = 1.0;
  std::vector<double> theta0;
  RapidityConvention convention = RapidityConvention::Mean;
};

struct SamplingParams {
  double horizon_periods = 1.0;  // in fundamental periods of the force
  std::size_t n_samples = 100000;
  std::size_t n_bins = 101;
  Sampling grid = Sampling::ProperTime;
  double tol = kDefaultTimeTolerance;
};

struct TrajectoryParams {
  double t_end_periods = 50.0;
  std::size_t n_steps = 50000;
  double x0 = 0.0;
};

struct ShockParams {
  double alpha = 0.01;
  double x1 = 0.0, x2 = -300.0;
  double v1 = 0.015, v2 = 0.15;  // in units of c
  double tau1 = 0.0, tau2 = 0.0;
  double t0 = 500.0;
  double t_end = 5000.0;
  double dt = 0.05;
  double min_separation = 1e-4;
  double interaction_radius = 150.0;
  bool shared_realization = false;
  std::uint64_t seed2_offset = 1000003;  // particle 2 uses seed + offset
  std::size_t output_every = 20;
  std::optional<Window> pre_window;
  std::optional<Window> post_window;
};

struct ExperimentConfig {
  Kind kind = Kind::Single;
  std::vector<std::uint64_t> seeds;
  NoiseParams noise;
  ParticleParams particle;
  SamplingParams sampling;
  TrajectoryParams trajectory;
  ShockParams shock;
  std::string output_dir = "out";
  std::string canonical;  // resolved "key = value" lines, sorted; hashed into the manifest

  double f0() const {
    return noise.f0 ? *noise.f0 : noise.drive * noise.bandwidth * particle.m0 * particle.c;
  }
  NoiseSpec noise_spec() const { return NoiseSpec(f0(), noise.n_components, noise.bandwidth); }
};

namespace detail {

struct Reader {
  KeyValueDoc& doc;

  const Entry* find(const std::string& key) {
    auto it = doc.find(key);
    return it == doc.end() ? nullptr : &it->second;
  }

  [[noreturn]] static void fail(const std::string& key, const Entry& e, const std::string& why) {
    std::string where = e.line > 0 ? " (line " + std::to_string(e.line) + ")" : " (override)";
    throw ConfigError("invalid value for '" + key + "'" + where + ": " + why);
  }

  static double to_double(const std::string& key, const Entry& e, std::string_view s) {
    s = trim(s);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
      fail(key, e, "'" + std::string(s) + "' is not a finite number");
    return v;
  }

  static std::uint64_t to_uint(const std::string& key, const Entry& e, std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      fail(key, e, "'" + std::string(s) + "' is not a non-negative integer");
    return v;
  }

  static std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
      auto comma = s.find(',', start);
      out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  void number(const std::string& key, double& out) {
    if (auto* e = find(key)) out = to_double(key, *e, e->value);
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (auto* e = find(key)) out = to_double(key, *e, e->value);
  }
  template <class UInt>
  void count(const std::string& key, UInt& out) {
    if (auto* e = find(key)) out = static_cast<UInt>(to_uint(key, *e, e->value));
  }
  void flag(const std::string& key, bool& out) {
    if (auto* e = find(key)) {
      if (e->value == "true") out = true;
      else if (e->value == "false") out = false;
      else fail(key, *e, "expected true or false");
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (auto* e = find(key)) {
      out.clear();
      for (auto part : split(e->value)) out.push_back(to_double(key, *e, part));
    }
  }
  void window(const std::string& key, std::optional<Window>& out) {
    if (auto* e = find(key)) {
      auto parts = split(e->value);
      if (parts.size() != 2) fail(key, *e, "expected 'start, end'");
      out = Window{to_double(key, *e, parts[0]), to_double(key, *e, parts[1])};
      if (!(out->end > out->start)) fail(key, *e, "window end must exceed start");
    }
  }
};

}  // namespace detail

/// Every key the schema understands.
inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "kind", "seeds", "output.dir",
      "noise.n_components", "noise.bandwidth", "noise.f0", "noise.drive",
      "particle.m0", "particle.c", "particle.theta0", "particle.v0", "particle.convention",
      "sampling.horizon_periods", "sampling.n_samples", "sampling.n_bins", "sampling.grid", "sampling.tol",
      "trajectory.t_end_periods", "trajectory.n_steps", "trajectory.x0",
      "shock.alpha", "shock.x1", "shock.x2", "shock.v1", "shock.v2", "shock.tau1", "shock.tau2", "shock.t0",
      "shock.t_end", "shock.dt", "shock.min_separation", "shock.interaction_radius", "shock.shared_realization",
      "shock.seed2_offset", "shock.output_every", "shock.pre_window", "shock.post_window"};
  return keys;
}

inline bool is_single_particle(Kind k) {
  return k == Kind::Single || k == Kind::VelocityDist || k == Kind::Trajectory;
}

/// Parses, applies overrides, fills documented defaults and validates every invariant.
inline ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides = {}) {
  KeyValueDoc doc = parse_document(text);
  for (const auto& o : overrides) apply_override(doc, o);

  for (const auto& [key, entry] : doc) {
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      std::string where = entry.line > 0 ? " at line " + std::to_string(entry.line) : " in overrides";
      throw ConfigError("unknown key '" + key + "'" + where);
    }
  }

  std::vector<std::string> missing;
  if (!doc.contains("kind")) missing.push_back("kind");
  if (!doc.contains("seeds")) missing.push_back("seeds");
  if (!doc.contains("kind") && !doc.contains("particle.theta0") && !doc.contains("particle.v0"))
    missing.push_back("particle.theta0 (for kinds single, velocity-dist, trajectory)");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& m : missing) msg += " " + m + (m == missing.back() ? "" : ",");
    throw ConfigError(msg);
  }

  ExperimentConfig cfg;
  detail::Reader r{doc};

  const Entry& kind_entry = *r.find("kind");
  static const std::pair<std::string_view, Kind> kinds[] = {
      {"force-path", Kind::ForcePath}, {"force-dist", Kind::ForceDist}, {"single", Kind::Single},
      {"velocity-dist", Kind::VelocityDist}, {"trajectory", Kind::Trajectory}, {"shock", Kind::Shock},
      {"ensemble", Kind::Ensemble}};
  bool kind_ok = false;
  for (auto [name, k] : kinds)
    if (kind_entry.value == name) cfg.kind = k, kind_ok = true;
  if (!kind_ok)
    detail::Reader::fail("kind", kind_entry,
                         "expected one of force-path, force-dist, single, velocity-dist, trajectory, shock, ensemble");

  const Entry& seeds_entry = *r.find("seeds");
  for (auto part : detail::Reader::split(seeds_entry.value)) {
    // "a-b" is an inclusive range
    if (auto dash = part.find('-'); dash != std::string_view::npos && dash > 0) {
      const auto lo = detail::Reader::to_uint("seeds", seeds_entry, part.substr(0, dash));
      const auto hi = detail::Reader::to_uint("seeds", seeds_entry, part.substr(dash + 1));
      if (hi < lo || hi - lo >= 1000000) detail::Reader::fail("seeds", seeds_entry, "bad seed range");
      for (auto sd = lo; sd <= hi; ++sd) cfg.seeds.push_back(sd);
    } else {
      cfg.seeds.push_back(detail::Reader::to_uint("seeds", seeds_entry, part));
    }
  }
  if (cfg.seeds.empty()) detail::Reader::fail("seeds", seeds_entry, "at least one seed is required");

  if (auto* e = r.find("output.dir")) cfg.output_dir = e->value;

  r.count("noise.n_components", cfg.noise.n_components);
  r.number("noise.bandwidth", cfg.noise.bandwidth);
  r.number("noise.f0", cfg.noise.f0);
  r.number("noise.drive", cfg.noise.drive);
  if (doc.contains("noise.f0") && doc.contains("noise.drive"))
    throw ConfigError("noise.f0 and noise.drive are mutually exclusive amplitude normalizations");

  r.number("particle.m0", cfg.particle.m0);
  r.number("particle.c", cfg.particle.c);
  r.numbers("particle.theta0", cfg.particle.theta0);
  if (auto* e = r.find("particle.convention")) {
    if (e->value == "mean") cfg.particle.convention = RapidityConvention::Mean;
    else if (e->value == "initial") cfg.particle.convention = RapidityConvention::Initial;
    else detail::Reader::fail("particle.convention", *e, "expected mean or initial");
  }
  if (auto* e = r.find("particle.v0")) {
    if (doc.contains("particle.theta0"))
      throw ConfigError("particle.theta0 and particle.v0 are mutually exclusive");
    cfg.particle.theta0.clear();
    for (auto part : detail::Reader::split(e->value)) {
      const double v0 = detail::Reader::to_double("particle.v0", *e, part);
      if (!(std::abs(v0) < cfg.particle.c))
        detail::Reader::fail("particle.v0", *e, "sub-luminality invariant violated: |v0| must be < c");
      cfg.particle.theta0.push_back(std::atanh(v0 / cfg.particle.c));
    }
  }

  r.number("sampling.horizon_periods", cfg.sampling.horizon_periods);
  r.count("sampling.n_samples", cfg.sampling.n_samples);
  r.count("sampling.n_bins", cfg.sampling.n_bins);
  r.number("sampling.tol", cfg.sampling.tol);
  if (auto* e = r.find("sampling.grid")) {
    if (e->value == "proper") cfg.sampling.grid = Sampling::ProperTime;
    else if (e->value == "lab") cfg.sampling.grid = Sampling::LabTime;
    else detail::Reader::fail("sampling.grid", *e, "expected proper or lab");
  }

  r.number("trajectory.t_end_periods", cfg.trajectory.t_end_periods);
  r.count("trajectory.n_steps", cfg.trajectory.n_steps);
  r.number("trajectory.x0", cfg.trajectory.x0);

  auto& s = cfg.shock;
  r.number("shock.alpha", s.alpha);
  r.number("shock.x1", s.x1);
  r.number("shock.x2", s.x2);
  r.number("shock.v1", s.v1);
  r.number("shock.v2", s.v2);
  r.number("shock.tau1", s.tau1);
  r.number("shock.tau2", s.tau2);
  r.number("shock.t0", s.t0);
  r.number("shock.t_end", s.t_end);
  r.number("shock.dt", s.dt);
  r.number("shock.min_separation", s.min_separation);
  r.number("shock.interaction_radius", s.interaction_radius);
  r.flag("shock.shared_realization", s.shared_realization);
  r.count("shock.seed2_offset", s.seed2_offset);
  r.count("shock.output_every", s.output_every);
  r.window("shock.pre_window", s.pre_window);
  r.window("shock.post_window", s.post_window);

  // semantic checks, named after the invariant they protect
  const auto invariant = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invariant violated: " + what);
  };
  invariant(cfg.noise.n_components >= 1, "noise.n_components >= 1");
  invariant(cfg.noise.bandwidth > 0.0, "noise.bandwidth > 0");
  invariant(!cfg.noise.f0 || *cfg.noise.f0 > 0.0, "noise.f0 > 0");
  invariant(cfg.noise.drive > 0.0, "noise.drive > 0");
  invariant(cfg.particle.m0 > 0.0, "particle.m0 > 0");
  invariant(cfg.particle.c > 0.0, "particle.c > 0");
  if (is_single_particle(cfg.kind))
    invariant(!cfg.particle.theta0.empty(), "particle.theta0 (or particle.v0) is required for kind " +
                                                std::string(kind_name(cfg.kind)));
  invariant(cfg.sampling.horizon_periods > 0.0, "sampling.horizon_periods > 0");
  invariant(cfg.sampling.n_bins >= 1, "sampling.n_bins >= 1");
  // force-dist pools n_samples per realization over all seeds
  const std::size_t total_samples =
      cfg.kind == Kind::ForceDist ? cfg.sampling.n_samples * cfg.seeds.size() : cfg.sampling.n_samples;
  invariant(total_samples >= 10 * cfg.sampling.n_bins,
            "sampling.n_samples >= 10 * sampling.n_bins (n_samples * number of seeds for force-dist)");
  invariant(cfg.sampling.tol > 0.0, "sampling.tol > 0");
  invariant(cfg.trajectory.t_end_periods > 0.0, "trajectory.t_end_periods > 0");
  invariant(cfg.trajectory.n_steps >= 2, "trajectory.n_steps >= 2");
  invariant(s.alpha >= 0.0, "shock.alpha >= 0 (repulsive coupling)");
  invariant(std::abs(s.v1) < 1.0 && std::abs(s.v2) < 1.0,
            "sub-luminality: |shock.v1| and |shock.v2| must be < 1 (units of c)");
  invariant(s.min_separation > 0.0, "shock.min_separation > 0");
  invariant(std::abs(s.x1 - s.x2) >= s.min_separation, "|shock.x1 - shock.x2| >= shock.min_separation");
  invariant(s.dt > 0.0, "shock.dt > 0");
  invariant(s.t_end > s.t0, "shock.t_end > shock.t0");
  invariant(s.interaction_radius > 0.0, "shock.interaction_radius > 0");
  invariant(s.output_every >= 1, "shock.output_every >= 1");
  invariant(s.pre_window.has_value() == s.post_window.has_value(),
            "shock.pre_window and shock.post_window are given together");

  // canonical resolved form: every known key that was set, sorted (std::map order)
  std::ostringstream canon;
  canon << "schema_version = " << kConfigSchemaVersion << "\n";
  for (const auto& [key, entry] : doc) canon << key << " = " << entry.value << "\n";
  cfg.canonical = canon.str();
  return cfg;
}

}  // namespace rsm::io
