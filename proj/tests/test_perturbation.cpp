#include <doctest.h>

#include <cmath>

#include "qbsim/perturbation.hpp"
#include "support.hpp"

using namespace qbsim;

TEST_CASE("Fourier coefficients: closed form against quadrature and a Riemann sum") {
  const Real kappa = 4.8;
  const auto s = ProtocolSchedule::equal_segments(kappa);
  const Real T = s.period();
  for (int n = -6; n <= 6; ++n) {
    const Complex a = fourier_coeff(kappa, s, n);
    CHECK(std::abs(a - fourier_coeff_quadrature(kappa, s, n)) < 1e-10);
    // midpoint rule on a fine grid, independent of the library integrators
    const int M = 300000;
    Complex r{0.0, 0.0};
    for (int i = 0; i < M; ++i) {
      const Real t = (i + 0.5) * T / M;
      r += std::exp(-kI * (n * s.omega_T() * t)) * y_of_t(kappa, s, t);
    }
    CHECK(std::abs(a - r / Real(M)) < 1e-8);
  }
}

TEST_CASE("Parseval: sum |f_n|^2 = 1") {
  const Real kappa = 7.0;
  const auto s = ProtocolSchedule::equal_segments(kappa);
  Real sum = 0.0;
  for (int n = -2000; n <= 2000; ++n) sum += std::norm(fourier_coeff(kappa, s, n));
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
  Real partial = 0.0;
  for (int n = -50; n <= 50; ++n) partial += std::norm(fourier_coeff(kappa, s, n));
  CHECK(partial <= 1.0 + 1e-12);
}

TEST_CASE("y(t) is continuous, unimodular and periodic") {
  const Real kappa = 5.0;
  const auto s = ProtocolSchedule::equal_segments(kappa);
  const Real T = s.period();
  for (Real b : {T / 3, 2 * T / 3, T}) {
    CHECK(std::abs(y_of_t(kappa, s, b - 1e-12) - y_of_t(kappa, s, b + 1e-12)) < 1e-9);
  }
  for (Real t : {0.1, 0.5, 1.7}) {
    CHECK(std::abs(std::abs(y_of_t(kappa, s, t)) - 1.0) < 1e-14);
    CHECK(std::abs(y_of_t(kappa, s, t) - y_of_t(kappa, s, t + 3 * T)) < 1e-12);
  }
  CHECK_THROWS_AS(y_of_t(kappa, ProtocolSchedule(0.1, 0.2, 0.1), 0.0), DomainError);
}

TEST_CASE("generic Fourier hook") {
  const Real T = 2.0;
  const auto one = [](Real) { return Complex(1.0, 0.0); };
  CHECK(std::abs(fourier_coeff_of(one, T, 0, {0.0, T}) - 1.0) < 1e-13);
  CHECK(std::abs(fourier_coeff_of(one, T, 3, {0.0, 0.7, T})) < 1e-13);
  const auto wave = [T](Real t) { return std::exp(kI * (2.0 * kPi * 2.0 * t / T)); };
  CHECK(std::abs(fourier_coeff_of(wave, T, 2, {0.0, T}) - 1.0) < 1e-12);
}

TEST_CASE("f_n is independent of kappa, so the large-kappa splitting scales as 1/kappa") {
  const LatticeEnvironment env(30, 1.0, 0.5, 0.5);
  const Complex f5 = fourier_coeff(5.0, ProtocolSchedule::equal_segments(5.0), 0);
  const Complex f15 = fourier_coeff(15.0, ProtocolSchedule::equal_segments(15.0), 0);
  CHECK(std::abs(f5 - f15) < 1e-13);
  const auto p10 = SystemParams::from_center(2.0, 0.0, 10.0);
  const auto p20 = SystemParams::from_center(2.0, 0.0, 20.0);
  const Real a = delta_eps0_large_kappa(p10, env, ProtocolSchedule::equal_segments(10.0));
  const Real b = delta_eps0_large_kappa(p20, env, ProtocolSchedule::equal_segments(20.0));
  CHECK(a / b == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a == doctest::Approx(3.0 * 0.25 * std::norm(f5) / 10.0).epsilon(1e-12));
}

TEST_CASE("second-order shifts") {
  const Real kappa = 12.0;
  const auto s = ProtocolSchedule::equal_segments(kappa);
  const auto p = SystemParams::from_center(2.0, 0.0, kappa);

  const LatticeEnvironment free(10, 1.0, 0.5, 0.0);
  const auto zero = second_order_corrections(p, free, s);
  CHECK(zero.eps2_plus == 0.0);
  CHECK(zero.eps2_minus == 0.0);

  const LatticeEnvironment env(10, 1.0, 0.5, 0.5);
  const auto r = second_order_corrections(p, env, s);
  CHECK(r.tail_bound < 1e-8);
  CHECK(r.n_max <= 200);
  const Real single = delta_eps0_main_text(p, env, s, r.n_max);
  CHECK(std::abs(single - (r.eps2_plus - r.eps2_minus)) < 1e-10);
  CHECK(r.splitting() == doctest::Approx(std::abs(r.eps2_plus - r.eps2_minus)));

  // large-kappa estimate approaches the full sum
  const Real big = 60.0;
  const auto sb = ProtocolSchedule::equal_segments(big);
  const auto pb = SystemParams::from_center(2.0, 0.0, big);
  const auto rb = second_order_corrections(pb, env, sb);
  CHECK(rb.splitting() == doctest::Approx(delta_eps0_large_kappa(pb, env, sb)).epsilon(0.1));

  CHECK_THROWS_AS(second_order_corrections(p, env, ProtocolSchedule(0.1, 0.1, 0.1)), DomainError);
}

TEST_CASE("first-order correction vanishes") {
  const LatticeEnvironment env(6, 1.0, 0.5, 0.5);
  const Real kappa = 9.0;
  const auto s = ProtocolSchedule::equal_segments(kappa);
  for (Branch b : {Branch::plus, Branch::minus}) {
    const auto mode = resonant_zeroth_order(2.0, s.omega_T(), b == Branch::plus ? -1 : 0, b);
    CHECK(first_order_correction(env, kappa, s, mode) < 1e-12);
    const auto st = zeroth_order_state(mode, kappa, s, 0.3);
    CHECK(st.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("zeroth-order pair is degenerate at eps0") {
  const Real wT = 2.0 * kPi / 0.5;
  const auto p = resonant_zeroth_order(2.0, wT, -1, Branch::plus);
  const auto m = resonant_zeroth_order(2.0, wT, 0, Branch::minus);
  CHECK(p.epsilon0 == doctest::Approx(2.0 - 0.5 * wT));
  CHECK(m.epsilon0 == doctest::Approx(2.0 - 0.5 * wT));
  CHECK(std::abs(p.system_at0.dot(m.system_at0)) < 1e-15);
}

TEST_CASE("closed-form asymptotic energy") {
  const Real kappa = 15.0;
  const auto s = ProtocolSchedule::equal_segments(kappa);
  const Real T = s.period();
  for (int i = 0; i < 100; ++i) {
    const Real t = 0.173 * i;
    const Real e = asymptotic_energy_closed_form(0.04, kappa, s, t);
    CHECK(e >= -1e-15);
    CHECK(e <= 1.0 + 1e-15);
    CHECK(e == doctest::Approx(0.5 + closed_form_interference(0.04, kappa, s, t)));
    CHECK(asymptotic_energy_closed_form(0.0, kappa, s, t) ==
          doctest::Approx(asymptotic_energy_closed_form(0.0, kappa, s, t + T)).epsilon(1e-10));
  }
  // storing window: battery full in the ideal limit
  CHECK(asymptotic_energy_closed_form(0.0, kappa, s, 0.5 * T) == doctest::Approx(1.0));
}

TEST_CASE("nonresonant zeroth order") {
  const auto z = nonresonant_zeroth_order(2.0, 0.5, 12.0);
  CHECK(z.splitting() == doctest::Approx(1.0));
  CHECK(z.epsilon_plus == doctest::Approx(2.0 - 6.0 + 0.5));
  CHECK(z.mode_plus(0) == Complex(1.0));
  CHECK(z.mode_minus(1) == Complex(1.0));
}
