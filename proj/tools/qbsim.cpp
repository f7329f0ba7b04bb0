// qbsim: run figure presets or config files and write CSV results.

#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qbsim/experiment.hpp"
#include "qbsim/trace_io.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

qbsim::ExperimentConfig resolve(const std::string& preset, const std::string& config_file,
                                const std::vector<std::string>& sets) {
  if (preset.empty() == config_file.empty()) {
    throw qbsim::ConfigError("", "give exactly one of --preset or --config");
  }
  qbsim::ExperimentConfig c = preset.empty() ? qbsim::load_config(config_file) : qbsim::preset(preset);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw qbsim::ConfigError(s, "--set expects key=value");
    qbsim::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-system quantum battery simulator"};
  app.set_version_flag("--version", std::string(qbsim::library_version()));
  app.require_subcommand(1);

  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;
  std::string out_dir = "out";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* run = app.add_subcommand("run", "Run a preset or a config file");
  run->add_option("--preset", preset, "Named preset (see list-presets)");
  run->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--set", sets, "Override one entry, key=value (repeatable)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("config", validate_file, "Config file")->required()->check(CLI::ExistingFile);

  bool show_config = false;
  auto* list = app.add_subcommand("list-presets", "Print the preset names");
  list->add_flag("--show", show_config, "Also print each resolved config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*list) {
      for (const auto& name : qbsim::preset_names()) {
        std::cout << name << '\n';
        if (show_config) std::cout << qbsim::to_text(qbsim::preset(name)) << '\n';
      }
      return 0;
    }
    if (*validate) {
      const auto c = qbsim::load_config(validate_file);
      qbsim::validate(c);
      std::cout << "ok: " << qbsim::to_string(c.kind) << '\n';
      return 0;
    }
    const auto c = resolve(preset, config_file, sets);
    qbsim::validate(c);
    const auto report = qbsim::run_experiment(c, out_dir, jobs);
    for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
    for (const auto& line : report.summary) std::cout << line << '\n';
    return 0;
  } catch (const qbsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const qbsim::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const qbsim::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}
