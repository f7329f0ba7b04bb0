#include <map>

#include "qbsim/experiment.hpp"

namespace qbsim {

namespace {

// Lattice and pair used by every open-system figure.
ExperimentConfig open_system(ExperimentKind kind, Real kappa) {
  ExperimentConfig c;
  c.kind = kind;
  c.N = 30;
  c.varpi = 1.0;
  c.q = 0.5;
  c.g = 0.5;
  c.omega_0 = 2.0;
  c.delta = 0.0;
  c.kappa = kappa;
  c.schedule = ScheduleKind::equal;
  return c;
}

ExperimentConfig with_sweep(ExperimentConfig c, Real lo, Real hi, Real step) {
  c.kappa_min = lo;
  c.kappa_max = hi;
  c.kappa_step = step;
  return c;
}

const std::map<std::string, ExperimentConfig (*)()>& registry() {
  static const std::map<std::string, ExperimentConfig (*)()> r{
      {"fig1b",
       [] {
         ExperimentConfig c;
         c.kind = ExperimentKind::ideal_cycle;
         c.omega_b = 1.0;
         c.kappa = 15.0;
         c.ideal_deltas = {0.0, 10.0};
         c.schedule = ScheduleKind::explicit_durations;
         c.tau_c = c.tau_d = kPi / (2.0 * c.kappa);
         c.tau_s = 2.0 * kPi / 10.0;
         c.markov_gamma = 0.5;
         c.t_max_periods = 3.0;
         c.n_samples = 600;
         return c;
       }},
      {"fig2a",
       [] {
         auto c = with_sweep(open_system(ExperimentKind::dynamics, 3.0), 3.0, 6.0, 0.1);
         c.t_max_periods = 100.0;
         c.n_samples = 12;
         return c;
       }},
      {"fig2b", [] { return with_sweep(open_system(ExperimentKind::kappa_sweep, 3.0), 3.0, 6.0, 0.05); }},
      {"fig3a",
       [] {
         auto c = open_system(ExperimentKind::asymptotic, 4.5);
         c.t_max_periods = 100.0;
         c.n_samples = 40;
         return c;
       }},
      {"fig3b",
       [] {
         auto c = open_system(ExperimentKind::asymptotic, 4.8);
         c.t_max_periods = 100.0;
         c.n_samples = 40;
         return c;
       }},
      {"fig4a", [] { return with_sweep(open_system(ExperimentKind::kappa_sweep, 5.0), 5.0, 15.0, 0.25); }},
      {"fig4b",
       [] {
         auto c = open_system(ExperimentKind::asymptotic, 15.0);
         c.t_max_periods = 5.0;
         c.n_samples = 200;
         return c;
       }},
      {"fig4c",
       [] {
         auto c = with_sweep(open_system(ExperimentKind::kappa_sweep, 5.0), 5.0, 15.0, 0.25);
         c.delta = 0.5;
         return c;
       }},
      {"fig4d",
       [] {
         auto c = open_system(ExperimentKind::asymptotic, 15.0);
         c.delta = 0.5;
         c.t_max_periods = 5.0;
         c.n_samples = 200;
         return c;
       }},
      {"sm-s1", [] { return with_sweep(open_system(ExperimentKind::perturbation, 5.0), 5.0, 15.0, 0.5); }},
      {"sm-s2",
       [] {
         auto c = open_system(ExperimentKind::nonresonant, 15.0);
         c.delta = 0.5;
         c.t_max_periods = 5.0;
         c.n_samples = 200;
         return c;
       }},
  };
  return r;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : registry()) names.push_back(name);
  return names;
}

ExperimentConfig preset(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("preset", "unknown preset '" + name + "'");
  return it->second();
}

}  // namespace qbsim
