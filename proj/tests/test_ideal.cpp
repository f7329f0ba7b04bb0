#include <doctest.h>

#include "qbsim/ideal.hpp"
#include "support.hpp"

using namespace qbsim;

TEST_CASE("pair propagator equals the matrix exponential") {
  for (Real delta : {0.0, 0.4, 1.5}) {
    const auto p = SystemParams::from_center(2.0, delta, 1.7);
    for (int f : {0, 1}) {
      MatrixXc H(2, 2);
      H << p.omega_b(), p.kappa() * f, p.kappa() * f, p.omega_c();
      const MatrixXc oracle = test::expm_taylor(H, 0.83);
      const MatrixXc U = pair_propagator(p, f, 0.83);
      CHECK((U - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("resonant ideal cycle charges fully and returns") {
  const SystemParams p(1.0, 1.0, 15.0);
  const auto s = optimal_schedule(15.0, 0.0, 0, 0, 0, 2.0 * kPi / 10.0);
  for (int n = 0; n <= 10; ++n) {
    CHECK(ideal_energy(p, s, n * s.period() + s.tau_c()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ideal_energy(p, s, n * s.period()) < 1e-12);
  }
}

TEST_CASE("detuned peak is kappa^2 / Omega^2") {
  const SystemParams p(1.0, 21.0, 15.0);
  const Real omega = p.rabi();
  const auto s = optimal_schedule(15.0, 10.0, 0, 2, 0);
  CHECK(ideal_energy(p, s, 0.5 * kPi / omega) == doctest::Approx(225.0 / 325.0).epsilon(1e-12));
}

TEST_CASE("ideal evolution is unitary and validates input") {
  const auto p = SystemParams::from_center(1.0, 0.3, 2.0);
  const ProtocolSchedule s(0.4, 0.3, 0.2);
  for (Real t : {0.1, 1.0, 7.3}) CHECK(ideal_evolve(p, s, t).norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(ideal_evolve(p, s, 1.0, {Complex(1.0), Complex(1.0)}), DomainError);
}
