#include "qbsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "qbsim/floquet.hpp"
#include "qbsim/ideal.hpp"
#include "qbsim/markovian.hpp"
#include "qbsim/perturbation.hpp"
#include "qbsim/trace_io.hpp"

namespace qbsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Real parse_real(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  Real out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

std::vector<Real> parse_list(const std::string& key, const std::string& text) {
  std::vector<Real> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

std::string join(const std::vector<Real>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
  return s;
}

template <typename Enum, std::size_t K>
Enum parse_enum(const std::string& key, const std::string& text, const std::pair<const char*, Enum> (&table)[K]) {
  const std::string v = trim(text);
  for (const auto& [name, value] : table) {
    if (v == name) return value;
  }
  std::string options;
  for (const auto& [name, value] : table) options += std::string(options.empty() ? "" : ", ") + name;
  throw ConfigError(key, "unknown value '" + v + "' (expected one of " + options + ")");
}

constexpr std::pair<const char*, ExperimentKind> kKinds[] = {
    {"ideal-cycle", ExperimentKind::ideal_cycle}, {"markov", ExperimentKind::markov},
    {"dynamics", ExperimentKind::dynamics},       {"kappa-sweep", ExperimentKind::kappa_sweep},
    {"spectrum", ExperimentKind::spectrum},       {"asymptotic", ExperimentKind::asymptotic},
    {"perturbation", ExperimentKind::perturbation}, {"nonresonant", ExperimentKind::nonresonant}};
constexpr std::pair<const char*, ScheduleKind> kSchedules[] = {
    {"equal", ScheduleKind::equal}, {"optimal", ScheduleKind::optimal}, {"explicit", ScheduleKind::explicit_durations}};
constexpr std::pair<const char*, Route> kRoutes[] = {{"exact", Route::exact}, {"volterra", Route::volterra}};
constexpr std::pair<const char*, KernelVariant> kKernels[] = {{"discrete", KernelVariant::discrete},
                                                              {"continuum", KernelVariant::continuum}};

// ---- running -------------------------------------------------------------

struct Output {
  const ExperimentConfig& config;
  std::filesystem::path dir;
  RunReport report;

  void write(const std::string& name, const CsvTable& table, TraceMetadata extra = {}) {
    const auto path = dir / name;
    write_csv(path, table);
    TraceMetadata meta;
    meta["code_version"] = library_version();
    std::string columns;
    for (const auto& c : table.columns) columns += (columns.empty() ? "" : ",") + c;
    meta["columns"] = columns;
    for (const auto& [k, v] : config_entries(config)) meta["config." + k] = v;
    for (auto& [k, v] : extra) meta[k] = std::move(v);
    write_metadata(path, meta);
    report.files.push_back(path);
  }
};

std::size_t memory_cap(const ExperimentConfig& c) { return c.max_memory_mb * (std::size_t{1} << 20); }

LatticeEnvironment environment_of(const ExperimentConfig& c) { return {c.N, c.varpi, c.q, c.g}; }

SystemParams params_of(const ExperimentConfig& c, Real kappa) {
  return SystemParams::from_center(c.omega_0, c.delta, kappa);
}

void check_spectrum_memory(const ExperimentConfig& c, unsigned concurrent) {
  const std::size_t full = 2 + 2 * c.N * c.N;
  const std::size_t need = std::size_t(concurrent) * full * full * sizeof(Complex) * 2;
  if (need > memory_cap(c)) {
    throw ResourceError("spectrum needs ~" + std::to_string(need >> 20) + " MiB, cap is " +
                        std::to_string(c.max_memory_mb) + " MiB");
  }
}

FbsCriteria criteria_of(const ExperimentConfig& c) {
  FbsCriteria f;
  f.weight_threshold = c.weight_threshold;
  f.gap_factor = c.gap_factor;
  return f;
}

Real exact_splitting(const QuasienergySpectrum& s) {
  if (s.fbs_indices.size() != 2) return std::numeric_limits<Real>::quiet_NaN();
  return quasienergy_gap(s.epsilon(Eigen::Index(s.fbs_indices[0])), s.epsilon(Eigen::Index(s.fbs_indices[1])),
                         s.omega_T);
}

void run_ideal_cycle(const ExperimentConfig& c, Output& out) {
  const ProtocolSchedule first = [&] {
    ExperimentConfig tmp = c;
    tmp.delta = c.ideal_deltas.front();
    tmp.omega_0 = c.omega_b + tmp.delta;
    return schedule_for(tmp, c.kappa);
  }();
  const Real T = first.period();
  const Real t_max = c.t_max_periods * T;
  const std::vector<Real> grid = aligned_time_grid(first, t_max, T / static_cast<Real>(c.n_samples));

  CsvTable table;
  table.columns.push_back("t");
  std::vector<std::pair<SystemParams, ProtocolSchedule>> cases;
  for (Real d : c.ideal_deltas) {
    ExperimentConfig tmp = c;
    tmp.delta = d;
    tmp.omega_0 = c.omega_b + d;
    cases.emplace_back(SystemParams(c.omega_b, c.omega_b + 2.0 * d, c.kappa), schedule_for(tmp, c.kappa));
    table.columns.push_back("E_delta_" + format_real(d));
  }
  if (c.markov_gamma) table.columns.push_back("E_markov");

  for (Real t : grid) {
    std::vector<Real> row{t};
    for (const auto& [p, s] : cases) row.push_back(ideal_energy(p, s, t) / c.omega_b);
    if (c.markov_gamma) {
      row.push_back(markov_energy(SystemParams(c.omega_b, c.omega_b, c.kappa), first, {*c.markov_gamma, 0.0}, t) /
                    c.omega_b);
    }
    table.rows.push_back(std::move(row));
  }
  out.write("ideal_cycle.csv", table, {{"energy_unit", "omega_b"}});
}

void run_markov(const ExperimentConfig& c, Output& out) {
  const auto env = environment_of(c);
  const SystemParams p = params_of(c, c.kappa);
  const ProtocolSchedule s = schedule_for(c, c.kappa);
  const MarkovRates rates = c.markov_gamma ? MarkovRates{*c.markov_gamma, 0.0} : markov_rates(env, p.omega_0());
  const Real T = s.period();
  CsvTable table{{"t", "energy", "envelope"}, {}};
  for (Real t : aligned_time_grid(s, c.t_max_periods * T, T / static_cast<Real>(c.n_samples))) {
    table.rows.push_back({t, markov_energy(p, s, rates, t), p.omega_0() * std::exp(-2.0 * rates.gamma * t)});
  }
  out.write("markov.csv", table, {{"gamma", format_real(rates.gamma)}, {"lamb_shift", format_real(rates.lamb_shift)}});
  out.report.summary.push_back("Gamma = " + format_real(rates.gamma));
}

EnergyTrace dynamics_trace(const ExperimentConfig& c, Real kappa) {
  const auto env = environment_of(c);
  const SystemParams p = params_of(c, kappa);
  const ProtocolSchedule s = schedule_for(c, kappa);
  const Real T = s.period();
  const Real t_max = c.t_max_periods * T;
  const Real sample_dt = T / static_cast<Real>(c.n_samples);
  if (c.route == Route::exact) {
    ExactOptions opt;
    opt.memory_cap_bytes = memory_cap(c);
    return propagate_exact(p, env, s, ExcitationState::charger_excited(c.N), t_max, sample_dt, opt).trace;
  }
  VolterraOptions opt;
  opt.dt = c.dt;
  opt.kernel = c.kernel;
  VolterraResult r = solve_volterra(p, env, s, t_max, opt);
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sample_dt / r.dt + 1e-9)));
  EnergyTrace thin;
  thin.metadata = r.trace.metadata;
  for (std::size_t i = 0; i < r.trace.times.size(); i += stride) {
    thin.times.push_back(r.trace.times[i]);
    thin.energies.push_back(r.trace.energies[i]);
  }
  return thin;
}

void run_dynamics(const ExperimentConfig& c, Output& out, unsigned jobs) {
  const auto kappas = kappa_grid(c);
  std::vector<EnergyTrace> traces(kappas.size());
  parallel_for(kappas.size(), jobs, [&](std::size_t i) { traces[i] = dynamics_trace(c, kappas[i]); });
  CsvTable table{{"kappa", "t", "energy"}, {}};
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    for (std::size_t j = 0; j < traces[i].times.size(); ++j) {
      table.rows.push_back({kappas[i], traces[i].times[j], traces[i].energies[j]});
    }
  }
  TraceMetadata extra;
  if (!traces.empty()) extra["route"] = traces.front().metadata["route"];
  out.write("dynamics.csv", table, extra);
}

QuasienergySpectrum spectrum_at(const ExperimentConfig& c, Real kappa) {
  const FloquetOperator U = one_period_operator(params_of(c, kappa), environment_of(c), schedule_for(c, kappa));
  return quasienergy_spectrum(U, criteria_of(c));
}

void add_spectrum_rows(CsvTable& table, const QuasienergySpectrum& s, std::optional<Real> kappa) {
  std::vector<bool> fbs(s.size(), false);
  for (std::size_t i : s.fbs_indices) fbs[i] = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<Real> row;
    if (kappa) row.push_back(*kappa);
    row.push_back(s.epsilon(Eigen::Index(i)));
    row.push_back(s.system_weight(Eigen::Index(i)));
    row.push_back(fbs[i] ? 1.0 : 0.0);
    table.rows.push_back(std::move(row));
  }
}

void run_kappa_sweep(const ExperimentConfig& c, Output& out, unsigned jobs) {
  const auto kappas = kappa_grid(c);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, unsigned(kappas.size())));
  check_spectrum_memory(c, workers);
  std::vector<QuasienergySpectrum> spectra(kappas.size());
  parallel_for(kappas.size(), workers, [&](std::size_t i) {
    spectra[i] = spectrum_at(c, kappas[i]);
    spectra[i].eigenvectors.resize(0, 0);  // not needed past FBS detection
  });
  CsvTable table{{"kappa", "epsilon", "system_weight", "is_fbs"}, {}};
  CsvTable summary{{"kappa", "omega_T", "fbs_count", "delta_eps0"}, {}};
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    add_spectrum_rows(table, spectra[i], kappas[i]);
    summary.rows.push_back({kappas[i], spectra[i].omega_T, static_cast<Real>(spectra[i].fbs_indices.size()),
                            exact_splitting(spectra[i])});
  }
  out.write("spectrum.csv", table);
  out.write("fbs_summary.csv", summary);
  for (std::size_t i = 1; i < kappas.size(); ++i) {
    if (spectra[i].fbs_indices.size() != spectra[i - 1].fbs_indices.size()) {
      out.report.summary.push_back("FBS count " + std::to_string(spectra[i - 1].fbs_indices.size()) + " -> " +
                                   std::to_string(spectra[i].fbs_indices.size()) + " between kappa = " +
                                   format_real(kappas[i - 1]) + " and " + format_real(kappas[i]));
    }
  }
}

void run_spectrum(const ExperimentConfig& c, Output& out) {
  check_spectrum_memory(c, 1);
  const auto s = spectrum_at(c, c.kappa);
  CsvTable table{{"epsilon", "system_weight", "is_fbs"}, {}};
  add_spectrum_rows(table, s, std::nullopt);
  out.write("spectrum.csv", table, {{"fbs_count", std::to_string(s.fbs_indices.size())}});
  out.report.summary.push_back("FBS count: " + std::to_string(s.fbs_indices.size()));
}

void run_asymptotic(const ExperimentConfig& c, Output& out) {
  check_spectrum_memory(c, 1);
  const SystemParams p = params_of(c, c.kappa);
  const auto env = environment_of(c);
  const ProtocolSchedule sched = schedule_for(c, c.kappa);
  const FloquetOperator U = one_period_operator(p, env, sched);
  const auto spectrum = quasienergy_spectrum(U, criteria_of(c));
  const auto modes = fbs_modes(U, spectrum);
  const auto initial = ExcitationState::charger_excited(c.N);
  const auto overlaps = fbs_overlaps(modes, initial);

  const Real T = sched.period();
  ExactOptions opt;
  opt.memory_cap_bytes = memory_cap(c);
  const ExactResult exact =
      propagate_exact(U.propagators(), initial, c.t_max_periods * T, T / static_cast<Real>(c.n_samples), opt);

  std::optional<Real> closed_splitting;
  if (modes.size() == 2 && p.delta() == 0.0) {
    try {
      require_equal_segments(p.kappa(), sched);
      closed_splitting = second_order_corrections(p, env, sched).splitting();
    } catch (const DomainError&) {
    }
  }

  CsvTable table{{"t", "energy_exact", "energy_asymptotic", "matrix_element_1", "matrix_element_2", "diagonal_1",
                  "diagonal_2", "interference", "energy_closed_form"},
                 {}};
  const Real nan = std::numeric_limits<Real>::quiet_NaN();
  for (std::size_t i = 0; i < exact.trace.times.size(); ++i) {
    const Real t = exact.trace.times[i];
    std::vector<Real> row{t, exact.trace.energies[i], asymptotic_energy(modes, initial, t)};
    if (modes.size() == 2) {
      const EnergyTerms e = decompose_energy_terms(modes, initial, t);
      row.insert(row.end(), {e.matrix_element[0], e.matrix_element[1], e.diagonal[0], e.diagonal[1], e.interference});
    } else {
      row.insert(row.end(), {nan, nan, nan, nan, nan});
    }
    row.push_back(closed_splitting ? p.omega_0() * asymptotic_energy_closed_form(*closed_splitting, p.kappa(), sched, t)
                                   : nan);
    table.rows.push_back(std::move(row));
  }
  out.write("asymptotic.csv", table, {{"fbs_count", std::to_string(modes.size())}});

  CsvTable fbs{{"index", "epsilon", "system_weight", "battery_weight", "charger_weight", "overlap_sq"}, {}};
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto k = Eigen::Index(spectrum.fbs_indices[j]);
    const VectorXc& phi = modes[j].initial();
    fbs.rows.push_back({static_cast<Real>(j + 1), spectrum.epsilon(k), spectrum.system_weight(k), std::norm(phi(0)),
                        std::norm(phi(1)), std::norm(overlaps[j])});
  }
  out.write("fbs.csv", fbs);
  out.report.summary.push_back("FBS count: " + std::to_string(modes.size()));
}

void run_perturbation(const ExperimentConfig& c, Output& out, unsigned jobs) {
  const auto kappas = kappa_grid(c);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, unsigned(kappas.size())));
  check_spectrum_memory(c, workers);
  const auto env = environment_of(c);
  std::vector<std::vector<Real>> rows(kappas.size());
  parallel_for(kappas.size(), workers, [&](std::size_t i) {
    const Real k = kappas[i];
    const SystemParams p = params_of(c, k);
    const ProtocolSchedule s = schedule_for(c, k);
    const Real exact = exact_splitting(spectrum_at(c, k));
    const SecondOrderResult second = second_order_corrections(p, env, s);
    const Real main_text = std::abs(delta_eps0_main_text(p, env, s, second.n_max));
    const Real large = delta_eps0_large_kappa(p, env, s);
    rows[i] = {k, exact, second.splitting(), second.eps2_plus, second.eps2_minus, main_text, large,
               std::abs(second.splitting() - exact) / exact};
  });
  CsvTable table{{"kappa", "delta_eps0_exact", "delta_eps0_second_order", "eps2_plus", "eps2_minus",
                  "delta_eps0_single_sum", "delta_eps0_large_kappa", "relative_error"},
                 std::move(rows)};
  out.write("perturbation.csv", table);
}

void run_nonresonant(const ExperimentConfig& c, Output& out) {
  check_spectrum_memory(c, 1);
  const SystemParams p = params_of(c, c.kappa);
  const ProtocolSchedule sched = schedule_for(c, c.kappa);
  const FloquetOperator U = one_period_operator(p, environment_of(c), sched);
  const auto spectrum = quasienergy_spectrum(U, criteria_of(c));
  const auto modes = fbs_modes(U, spectrum);
  const auto initial = ExcitationState::charger_excited(c.N);
  const auto overlaps = fbs_overlaps(modes, initial);
  const auto zeroth = nonresonant_zeroth_order(p.omega_0(), p.delta(), sched.omega_T());

  CsvTable fbs{{"index", "epsilon", "battery_weight", "charger_weight", "overlap_sq"}, {}};
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const VectorXc& phi = modes[j].initial();
    fbs.rows.push_back({static_cast<Real>(j + 1), modes[j].epsilon(), std::norm(phi(0)), std::norm(phi(1)),
                        std::norm(overlaps[j])});
  }
  out.write("fbs.csv", fbs,
            {{"epsilon_zeroth_battery", format_real(fold_quasienergy(zeroth.epsilon_plus, sched.omega_T()))},
             {"epsilon_zeroth_charger", format_real(fold_quasienergy(zeroth.epsilon_minus, sched.omega_T()))}});

  const Real T = sched.period();
  CsvTable trace{{"t", "energy_asymptotic"}, {}};
  for (Real t : aligned_time_grid(sched, c.t_max_periods * T, T / static_cast<Real>(c.n_samples))) {
    trace.rows.push_back({t, asymptotic_energy(modes, initial, t)});
  }
  out.write("asymptotic.csv", trace);
  out.report.summary.push_back("FBS count: " + std::to_string(modes.size()));
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept {
  for (const auto& [name, value] : kKinds) if (value == k) return name;
  return "?";
}

const char* to_string(ScheduleKind k) noexcept {
  for (const auto& [name, value] : kSchedules) if (value == k) return name;
  return "?";
}

const char* to_string(Route r) noexcept {
  for (const auto& [name, value] : kRoutes) if (value == r) return name;
  return "?";
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(value);
  if (key == "kind") c.kind = parse_enum(key, v, kKinds);
  else if (key == "omega_b") c.omega_b = parse_real(key, v);
  else if (key == "ideal_deltas") c.ideal_deltas = parse_list(key, v);
  else if (key == "omega_0") c.omega_0 = parse_real(key, v);
  else if (key == "delta") c.delta = parse_real(key, v);
  else if (key == "kappa") c.kappa = parse_real(key, v);
  else if (key == "schedule") c.schedule = parse_enum(key, v, kSchedules);
  else if (key == "tau_c") c.tau_c = parse_real(key, v);
  else if (key == "tau_s") c.tau_s = parse_real(key, v);
  else if (key == "tau_d") c.tau_d = parse_real(key, v);
  else if (key == "n1") c.n1 = parse_int<int>(key, v);
  else if (key == "n2") c.n2 = parse_int<int>(key, v);
  else if (key == "n3") c.n3 = parse_int<int>(key, v);
  else if (key == "N") c.N = parse_int<std::size_t>(key, v);
  else if (key == "varpi") c.varpi = parse_real(key, v);
  else if (key == "q") c.q = parse_real(key, v);
  else if (key == "g") c.g = parse_real(key, v);
  else if (key == "route") c.route = parse_enum(key, v, kRoutes);
  else if (key == "kernel") c.kernel = parse_enum(key, v, kKernels);
  else if (key == "dt") c.dt = parse_real(key, v);
  else if (key == "t_max_periods") c.t_max_periods = parse_real(key, v);
  else if (key == "n_samples") c.n_samples = parse_int<std::size_t>(key, v);
  else if (key == "kappa_min") c.kappa_min = parse_real(key, v);
  else if (key == "kappa_max") c.kappa_max = parse_real(key, v);
  else if (key == "kappa_step") c.kappa_step = parse_real(key, v);
  else if (key == "markov_gamma") c.markov_gamma = parse_real(key, v);
  else if (key == "weight_threshold") c.weight_threshold = parse_real(key, v);
  else if (key == "gap_factor") c.gap_factor = parse_real(key, v);
  else if (key == "max_memory_mb") c.max_memory_mb = parse_int<std::size_t>(key, v);
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, v);
  else throw ConfigError(key, "unknown key");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> e{
      {"kind", to_string(c.kind)},
      {"omega_b", format_real(c.omega_b)},
      {"ideal_deltas", join(c.ideal_deltas)},
      {"omega_0", format_real(c.omega_0)},
      {"delta", format_real(c.delta)},
      {"kappa", format_real(c.kappa)},
      {"schedule", to_string(c.schedule)},
      {"tau_c", format_real(c.tau_c)},
      {"tau_s", format_real(c.tau_s)},
      {"tau_d", format_real(c.tau_d)},
      {"n1", std::to_string(c.n1)},
      {"n2", std::to_string(c.n2)},
      {"n3", std::to_string(c.n3)},
      {"N", std::to_string(c.N)},
      {"varpi", format_real(c.varpi)},
      {"q", format_real(c.q)},
      {"g", format_real(c.g)},
      {"route", to_string(c.route)},
      {"kernel", to_string(c.kernel)},
      {"dt", format_real(c.dt)},
      {"t_max_periods", format_real(c.t_max_periods)},
      {"n_samples", std::to_string(c.n_samples)},
  };
  if (c.kappa_min) e.emplace_back("kappa_min", format_real(*c.kappa_min));
  if (c.kappa_max) e.emplace_back("kappa_max", format_real(*c.kappa_max));
  e.emplace_back("kappa_step", format_real(c.kappa_step));
  if (c.markov_gamma) e.emplace_back("markov_gamma", format_real(*c.markov_gamma));
  e.emplace_back("weight_threshold", format_real(c.weight_threshold));
  e.emplace_back("gap_factor", format_real(c.gap_factor));
  e.emplace_back("max_memory_mb", std::to_string(c.max_memory_mb));
  e.emplace_back("seed", std::to_string(c.seed));
  return e;
}

std::string to_text(const ExperimentConfig& c) {
  std::string s;
  for (const auto& [k, v] : config_entries(c)) s += k + " = " + v + "\n";
  return s;
}

std::vector<Real> kappa_grid(const ExperimentConfig& c) {
  if (!c.kappa_min && !c.kappa_max) return {c.kappa};
  if (!c.kappa_min || !c.kappa_max) throw ConfigError("kappa_min", "kappa_min and kappa_max must be set together");
  if (!(c.kappa_step > 0.0)) throw ConfigError("kappa_step", "must be positive");
  if (*c.kappa_max < *c.kappa_min) throw ConfigError("kappa_max", "empty sweep");
  std::vector<Real> out;
  const auto n = static_cast<long>(std::floor((*c.kappa_max - *c.kappa_min) / c.kappa_step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(*c.kappa_min + static_cast<Real>(i) * c.kappa_step);
  if (out.empty()) throw ConfigError("kappa_max", "empty sweep");
  return out;
}

ProtocolSchedule schedule_for(const ExperimentConfig& c, Real kappa) {
  switch (c.schedule) {
    case ScheduleKind::equal: return ProtocolSchedule::equal_segments(kappa);
    case ScheduleKind::optimal:
      return optimal_schedule(kappa, c.delta, c.n1, c.n2, c.n3,
                              c.delta == 0.0 ? std::optional<Real>(c.tau_s) : std::nullopt);
    case ScheduleKind::explicit_durations: return {c.tau_c, c.tau_s, c.tau_d};
  }
  throw ConfigError("schedule", "unknown schedule");
}

void validate(const ExperimentConfig& c) {
  auto positive = [](const char* key, Real v) {
    if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  };
  positive("omega_b", c.omega_b);
  positive("omega_0", c.omega_0);
  positive("t_max_periods", c.t_max_periods);
  positive("kappa_step", c.kappa_step);
  if (c.n_samples == 0) throw ConfigError("n_samples", "must be positive");
  if (c.N == 0) throw ConfigError("N", "must be positive");
  if (!(c.dt >= 0.0)) throw ConfigError("dt", "must be non-negative");
  if (!(c.weight_threshold > 0.0 && c.weight_threshold <= 1.0)) throw ConfigError("weight_threshold", "must lie in (0, 1]");
  if (!(c.gap_factor >= 0.0)) throw ConfigError("gap_factor", "must be non-negative");
  if (c.markov_gamma && !(*c.markov_gamma >= 0.0)) throw ConfigError("markov_gamma", "must be non-negative");

  const auto kappas = kappa_grid(c);
  for (Real k : kappas) {
    try {
      if (c.kind == ExperimentKind::ideal_cycle) {
        for (Real d : c.ideal_deltas) {
          ExperimentConfig tmp = c;
          tmp.delta = d;
          SystemParams(c.omega_b, c.omega_b + 2.0 * d, k);
          schedule_for(tmp, k);
        }
      } else {
        params_of(c, k);
        schedule_for(c, k);
      }
    } catch (const DomainError& e) {
      const char* key = c.schedule == ScheduleKind::explicit_durations ? "tau_c" : "schedule";
      throw ConfigError(key, e.what());
    }
  }
  if (c.kind != ExperimentKind::ideal_cycle) {
    try {
      environment_of(c);
    } catch (const DomainError& e) {
      throw ConfigError("q", e.what());
    }
  }
  if (c.kind == ExperimentKind::perturbation && c.schedule != ScheduleKind::equal) {
    throw ConfigError("schedule", "perturbation runs need the equal schedule");
  }
  if (c.kind == ExperimentKind::perturbation && c.delta != 0.0) {
    throw ConfigError("delta", "perturbation runs need a resonant pair");
  }
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

RunReport run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir, unsigned jobs) {
  validate(c);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream cfg(out_dir / "resolved.cfg");
    if (!cfg) throw std::runtime_error("cannot write to " + out_dir.string());
    cfg << to_text(c);
  }
  Output out{c, out_dir, {}};
  out.report.files.push_back(out_dir / "resolved.cfg");
  switch (c.kind) {
    case ExperimentKind::ideal_cycle: run_ideal_cycle(c, out); break;
    case ExperimentKind::markov: run_markov(c, out); break;
    case ExperimentKind::dynamics: run_dynamics(c, out, jobs); break;
    case ExperimentKind::kappa_sweep: run_kappa_sweep(c, out, jobs); break;
    case ExperimentKind::spectrum: run_spectrum(c, out); break;
    case ExperimentKind::asymptotic: run_asymptotic(c, out); break;
    case ExperimentKind::perturbation: run_perturbation(c, out, jobs); break;
    case ExperimentKind::nonresonant: run_nonresonant(c, out); break;
  }
  return out.report;
}

}  // namespace qbsim
