#ifndef QBSIM_EXPERIMENT_HPP
#define QBSIM_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qbsim/dynamics.hpp"

namespace qbsim {

/// Malformed or inconsistent experiment configuration. key() names the
/// offending entry when there is one.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class ExperimentKind { ideal_cycle, markov, dynamics, kappa_sweep, spectrum, asymptotic, perturbation, nonresonant };
enum class ScheduleKind { equal, optimal, explicit_durations };
enum class Route { exact, volterra };

/// Every knob of a run. Text form is one `key = value` per line; `#` starts
/// a comment; unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::dynamics;

  // Closed pair (ideal-cycle): battery frequency and the detunings to plot.
  Real omega_b = 1.0;
  std::vector<Real> ideal_deltas{0.0};

  // Open system: omega_b = omega_0 - delta, omega_c = omega_0 + delta.
  Real omega_0 = 2.0;
  Real delta = 0.0;
  Real kappa = 3.0;

  ScheduleKind schedule = ScheduleKind::equal;
  Real tau_c = 0.0;
  Real tau_s = 0.0;
  Real tau_d = 0.0;
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;

  std::size_t N = 30;
  Real varpi = 1.0;
  Real q = 0.5;
  Real g = 0.5;

  Route route = Route::exact;
  KernelVariant kernel = KernelVariant::discrete;
  Real dt = 0.0;  // Volterra step, 0 = automatic
  Real t_max_periods = 100.0;
  std::size_t n_samples = 20;  // samples per period

  std::optional<Real> kappa_min;
  std::optional<Real> kappa_max;
  Real kappa_step = 0.05;

  std::optional<Real> markov_gamma;
  Real weight_threshold = 0.05;
  Real gap_factor = 3.0;
  std::size_t max_memory_mb = 4096;
  std::uint64_t seed = 0;  // reserved; every computation is deterministic
};

const char* to_string(ExperimentKind k) noexcept;
const char* to_string(ScheduleKind k) noexcept;
const char* to_string(Route r) noexcept;

/// Sets one entry from text. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` text on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Resolved entries in a fixed order, values at full precision. Feeding
/// them back through apply_setting reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);
std::string to_text(const ExperimentConfig& config);

/// Semantic checks (positivity, schedule consistency, sweep range).
/// Throws ConfigError.
void validate(const ExperimentConfig& config);

/// The kappa values a run visits: the single `kappa`, or the inclusive
/// sweep when kappa_min/kappa_max are set. Throws ConfigError("empty sweep").
std::vector<Real> kappa_grid(const ExperimentConfig& config);

/// Protocol for one kappa value under the configured schedule rule.
ProtocolSchedule schedule_for(const ExperimentConfig& config, Real kappa);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name);

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> summary;  // human-readable lines
};

/// Runs `config`, writing CSVs (plus .meta.json sidecars) and the resolved
/// config into `out_dir`. Sweep points run on `jobs` worker threads.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir, unsigned jobs = 1);

/// Calls body(i) for i in [0, n) on up to `jobs` threads; rethrows the first
/// exception after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace qbsim

#endif  // QBSIM_EXPERIMENT_HPP
