// rsm: run stochastic-medium experiments from config files or built-in presets.
//
//   rsm run <config-path | preset:NAME> [--seed S] [--out DIR] [--override key=value]...
//   rsm presets list
//   rsm presets show NAME
//
// Exit status: 0 success, 1 configuration or I/O error, 2 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsm/io/config.hpp"
#include "rsm/io/presets.hpp"
#include "rsm/io/run.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

std::string load_config_text(const std::string& ref) {
  constexpr std::string_view prefix = "preset:";
  if (ref.starts_with(prefix)) {
    const auto name = std::string_view(ref).substr(prefix.size());
    if (auto text = rsm::io::find_preset(name)) return std::string(*text);
    throw rsm::ConfigError("unknown preset '" + std::string(name) + "' (see 'rsm presets list')");
  }
  std::ifstream in(ref, std::ios::binary);
  if (!in) {
    if (auto text = rsm::io::find_preset(ref)) return std::string(*text);
    throw rsm::ConfigError("cannot read config file '" + ref + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic particles in a proper-time stationary random medium"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config (a file path or preset:NAME)");
  std::string config_ref;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::vector<std::uint64_t> seeds;
  run_cmd->add_option("config", config_ref, "Config file or preset:NAME")->required();
  run_cmd->add_option("--seed", seeds, "Seed(s); replaces the config's seeds");
  run_cmd->add_option("--out", out_dir, "Output directory; replaces output.dir");
  run_cmd->add_option("--override", overrides, "key=value applied on top of the config (repeatable)");

  auto* presets_cmd = app.add_subcommand("presets", "List or print built-in presets");
  presets_cmd->require_subcommand(1);
  auto* list_cmd = presets_cmd->add_subcommand("list", "List preset names");
  auto* show_cmd = presets_cmd->add_subcommand("show", "Print a preset config");
  std::string show_name;
  show_cmd->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*list_cmd) {
    for (const auto& p : rsm::io::kPresetTexts) std::cout << p.name << "\n";
    return 0;
  }
  if (*show_cmd) {
    if (auto text = rsm::io::find_preset(show_name)) {
      std::cout << *text;
      return 0;
    }
    std::cerr << "error: unknown preset '" << show_name << "'\n";
    return kExitConfig;
  }

  try {
    const auto text = load_config_text(config_ref);
    if (!seeds.empty()) {
      std::string joined;
      for (std::size_t i = 0; i < seeds.size(); ++i) joined += (i ? "," : "") + std::to_string(seeds[i]);
      overrides.push_back("seeds=" + joined);
    }
    if (!out_dir.empty()) overrides.push_back("output.dir=" + out_dir);
    const auto cfg = rsm::io::parse_config(text, overrides);
    const auto result = rsm::io::run(cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : result.files) std::cout << (result.output_dir / f).string() << "\n";
    return 0;
  } catch (const rsm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rsm::io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rsm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const rsm::DomainError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
