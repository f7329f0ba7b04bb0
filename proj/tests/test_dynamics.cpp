#include <doctest.h>

#include <cmath>

#include "qbsim/dynamics.hpp"
#include "qbsim/ideal.hpp"
#include "qbsim/markovian.hpp"
#include "support.hpp"

using namespace qbsim;

namespace {

Real max_battery_difference(const std::vector<Complex>& a, const std::vector<Complex>& b, std::size_t stride_b = 1) {
  Real d = 0.0;
  for (std::size_t i = 0; i < a.size() && i * stride_b < b.size(); ++i) d = std::max(d, std::abs(a[i] - b[i * stride_b]));
  return d;
}

}  // namespace

TEST_CASE("segment propagators match dense exponentials of the full Hamiltonian") {
  const LatticeEnvironment env(3, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.2, 3.0);
  const ProtocolSchedule s(0.4, 0.3, 0.5);
  const SegmentPropagators props(p, env, s);
  CHECK(props.unitarity_defect() < 1e-12);

  VectorXc psi = VectorXc::Random(20);
  psi.normalize();
  const MatrixXc on = build_hamiltonian(p, env, 1).cast<Complex>();
  const MatrixXc off = build_hamiltonian(p, env, 0).cast<Complex>();
  // 0 -> 0.4 on, 0.4 -> 0.7 off, 0.7 -> 1.0 on
  const VectorXc oracle = test::expm_taylor(on, 0.3) * test::expm_taylor(off, 0.3) * test::expm_taylor(on, 0.4) * psi;
  CHECK((props.advance(psi, 0.0, 1.0) - oracle).norm() < 1e-11);
}

TEST_CASE("closed system: exact propagation reproduces the ideal cycle") {
  const LatticeEnvironment env(4, 1.0, 0.5, 0.0);
  const SystemParams p(2.0, 2.0, 3.0);
  const auto s = ProtocolSchedule::equal_segments(3.0);
  const auto r = propagate_exact(p, env, s, ExcitationState::charger_excited(4), 5.0 * s.period(), 0.05);
  for (std::size_t i = 0; i < r.trace.times.size(); ++i) {
    CHECK(std::abs(r.trace.energies[i] - ideal_energy(p, s, r.trace.times[i])) < 1e-10);
  }
}

TEST_CASE("norm is conserved over 100 periods") {
  const LatticeEnvironment env(30, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.0, 4.5);
  const auto s = ProtocolSchedule::equal_segments(4.5);
  const auto r = propagate_exact(p, env, s, ExcitationState::charger_excited(30), 100.0 * s.period(), s.period() / 4);
  CHECK(r.max_norm_drift < 1e-10);
  for (Real e : r.trace.energies) CHECK(e <= p.omega_b() + 1e-12);
  CHECK(r.trace.energies.front() == 0.0);
}

TEST_CASE("memory cap is enforced before allocation") {
  const LatticeEnvironment env(30, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.0, 4.5);
  const auto s = ProtocolSchedule::equal_segments(4.5);
  ExactOptions opt;
  opt.memory_cap_bytes = 1024;
  CHECK_THROWS_AS(propagate_exact(p, env, s, ExcitationState::charger_excited(30), 10.0, 0.01, opt), ResourceError);
  CHECK_THROWS_AS(ExcitationState(VectorXc::Zero(7)), DomainError);
}

TEST_CASE("Volterra with no bath reproduces the ideal amplitudes to O(dt^2)") {
  const LatticeEnvironment env(5, 1.0, 0.5, 0.0);
  const auto p = SystemParams::from_center(2.0, 0.3, 3.0);
  const auto s = ProtocolSchedule::equal_segments(3.0);
  VolterraOptions opt;
  opt.dt = s.tau_c() / 200.0;
  const auto r = solve_volterra(p, env, s, 3.0 * s.period(), opt);
  Real worst = 0.0;
  for (std::size_t i = 0; i < r.battery.size(); ++i) {
    const auto ideal = ideal_evolve(p, s, r.trace.times[i]);
    worst = std::max(worst, std::abs(r.battery[i] - ideal.battery));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("Volterra (discrete kernel) converges to exact propagation at second order") {
  const LatticeEnvironment env(6, 1.0, 0.5, 0.5);
  for (Real kappa : {1.0, 3.0, 4.5}) {
    const auto p = SystemParams::from_center(2.0, 0.0, kappa);
    const auto s = ProtocolSchedule::equal_segments(kappa);
    const Real t_max = 20.0 * s.period();
    const Real dt = s.tau_c() / 40.0;
    VolterraOptions opt;
    opt.dt = dt;
    opt.tolerance = 1.0;  // request the Richardson estimate only
    const auto coarse = solve_volterra(p, env, s, t_max, opt);
    opt.dt = dt / 2.0;
    opt.tolerance.reset();
    const auto fine = solve_volterra(p, env, s, t_max, opt);
    const auto exact = propagate_exact(p, env, s, ExcitationState::charger_excited(6), t_max, dt);
    REQUIRE(exact.battery.size() == coarse.battery.size());
    const Real e1 = max_battery_difference(exact.battery, coarse.battery);
    const Real e2 = max_battery_difference(exact.battery, fine.battery, 2);
    const Real order = std::log2(e1 / e2);
    CAPTURE(kappa);
    CHECK(order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(e1 < 10.0 * coarse.error_estimate);
  }
}

TEST_CASE("Volterra reports an unmet tolerance") {
  const LatticeEnvironment env(4, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.0, 3.0);
  const auto s = ProtocolSchedule::equal_segments(3.0);
  VolterraOptions opt;
  opt.dt = s.tau_c() / 4.0;
  opt.tolerance = 1e-12;
  try {
    solve_volterra(p, env, s, 5.0 * s.period(), opt);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.estimate() > 1e-12);
  }
}

TEST_CASE("decoupled v+- equations converge to the exact amplitudes") {
  const LatticeEnvironment env(10, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.0, 3.0);
  const auto s = ProtocolSchedule::equal_segments(3.0);
  const Real t_max = 10.0 * s.period();
  const Real dt = s.tau_c() / 50.0;
  const auto exact = propagate_exact(p, env, s, ExcitationState::charger_excited(10), t_max, dt);
  VolterraOptions opt;
  opt.dt = dt;
  const auto coarse = solve_vpm(p, env, s, t_max, opt);
  opt.dt = dt / 2.0;
  const auto fine = solve_vpm(p, env, s, t_max, opt);
  const auto ub = coarse.battery(p.omega_0());
  const auto uc = coarse.charger(p.omega_0());
  CHECK(std::abs(ub.front()) == 0.0);
  CHECK(std::abs(uc.front() - 1.0) < 1e-15);
  const Real e1 = max_battery_difference(exact.battery, ub);
  const Real e2 = max_battery_difference(exact.battery, fine.battery(p.omega_0()), 2);
  CHECK(e1 < 1e-2);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(max_battery_difference(exact.charger, uc) < 1e-2);
  CHECK_THROWS_AS(solve_vpm(SystemParams::from_center(2.0, 0.1, 3.0), env, s, 1.0, opt), DomainError);
}

TEST_CASE("v+- without a bath are pure phases up to the trapezoid error") {
  const LatticeEnvironment env(3, 1.0, 0.5, 0.0);
  const auto p = SystemParams::from_center(2.0, 0.0, 3.0);
  const auto s = ProtocolSchedule::equal_segments(3.0);
  VolterraOptions opt;
  opt.dt = s.tau_c() / 100.0;
  const auto v = solve_vpm(p, env, s, 2.0 * s.period(), opt);
  // Cayley step: unimodular, phase error (kappa dt)^3 / 12 per coupled step
  const Real per_step = std::pow(p.kappa() * v.dt, 3) / 12.0;
  for (std::size_t i = 0; i < v.times.size(); ++i) {
    const Real phase = p.kappa() * coupling_integral(s, v.times[i]);
    CHECK(std::abs(std::abs(v.v_plus[i]) - 1.0) < 1e-13);
    CHECK(std::abs(v.v_plus[i] - std::exp(-kI * phase)) < 1.01 * per_step * Real(i) + 1e-13);
    CHECK(std::abs(v.v_minus[i] - std::conj(v.v_plus[i])) < 1e-13);
  }
}

TEST_CASE("weak coupling deep in the band decays at the Markov rate") {
  const LatticeEnvironment env(1, 1.0, 0.5, 0.1);  // continuum kernel ignores N
  const Real w0 = 2.0;
  const auto rates = markov_rates(env, w0);
  const auto p = SystemParams::from_center(w0, 0.0, 1.0);
  const auto s = ProtocolSchedule::equal_segments(1.0);
  VolterraOptions opt;
  opt.kernel = KernelVariant::continuum;
  opt.dt = s.tau_c() / 20.0;
  const Real t_end = 5.0 / (2.0 * rates.gamma);
  const auto r = solve_volterra(p, env, s, t_end, opt);
  // Least-squares slope of log population after the initial non-Markovian slip.
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < r.battery.size(); ++i) {
    const Real t = r.trace.times[i];
    if (t < 0.1 * t_end) continue;
    const Real y = std::log(std::norm(r.battery[i]) + std::norm(r.charger[i]));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  const Real slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-slope == doctest::Approx(2.0 * rates.gamma).epsilon(0.25));
}

TEST_CASE("time step snapping") {
  const ProtocolSchedule s(0.3, 0.6, 0.3);
  const Real dt = aligned_time_step(s, 0.07);
  CHECK(dt <= 0.07);
  CHECK(std::abs(0.3 / dt - std::round(0.3 / dt)) < 1e-9);
  CHECK_THROWS_AS(aligned_time_step(ProtocolSchedule(0.3, std::sqrt(2.0), 0.3), 0.07), DomainError);
}
