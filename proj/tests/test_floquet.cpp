#include <doctest.h>

#include <algorithm>
#include <memory>

#include "qbsim/floquet.hpp"

using namespace qbsim;

namespace {

std::shared_ptr<const SegmentPropagators> make_props(std::size_t N, Real kappa, Real delta = 0.0) {
  const LatticeEnvironment env(N, 1.0, 0.5, 0.5);
  return std::make_shared<const SegmentPropagators>(SystemParams::from_center(2.0, delta, kappa), env,
                                                    ProtocolSchedule::equal_segments(kappa));
}

}  // namespace

TEST_CASE("factored U_T equals the dense product of full exponentials") {
  const LatticeEnvironment env(3, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.2, 4.8);
  const ProtocolSchedule s(0.3, 0.25, 0.4);
  const MatrixXc dense = one_period_operator_dense(p, env, s);
  const FloquetOperator U = one_period_operator(p, env, s);
  CHECK((U.dense() - dense).cwiseAbs().maxCoeff() < 1e-12);
  const MatrixXc I = MatrixXc::Identity(dense.rows(), dense.cols());
  CHECK((dense.adjoint() * dense - I).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("factored and dense spectra agree") {
  const LatticeEnvironment env(4, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.0, 4.8);
  const auto s = ProtocolSchedule::equal_segments(4.8);
  const auto a = quasienergy_spectrum(one_period_operator(p, env, s));
  const auto b = quasienergy_spectrum(one_period_operator_dense(p, env, s), s, {a.band_min, a.band_max});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto k = Eigen::Index(i);
    CHECK(quasienergy_gap(a.epsilon(k), b.epsilon(k), a.omega_T) < 1e-10);
  }
  for (Real e : a.epsilon) {
    CHECK(e > -0.5 * a.omega_T);
    CHECK(e <= 0.5 * a.omega_T);
  }
}

TEST_CASE("eigenvectors satisfy U phi = e^{-i eps T} phi") {
  const auto props = make_props(5, 4.8);
  const FloquetOperator U(props);
  const auto spec = quasienergy_spectrum(U);
  for (std::size_t i = 0; i < spec.size(); i += 7) {
    const auto k = Eigen::Index(i);
    const VectorXc v = spec.eigenvectors.col(k);
    const VectorXc Uv = U.apply(v);
    CHECK((Uv - std::exp(-kI * spec.epsilon(k) * U.period()) * v).norm() < 1e-9);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("folding") {
  CHECK(fold_quasienergy(0.0, 2.0) == 0.0);
  CHECK(fold_quasienergy(1.0, 2.0) == doctest::Approx(1.0));
  CHECK(fold_quasienergy(-1.0, 2.0) == doctest::Approx(1.0));
  CHECK(fold_quasienergy(2.3, 2.0) == doctest::Approx(0.3));
  CHECK(fold_quasienergy(-2.3, 2.0) == doctest::Approx(-0.3));
  CHECK(quasienergy_from_eigenvalue(std::exp(-kI * 0.7), 1.0) == doctest::Approx(0.7));
  CHECK(quasienergy_from_eigenvalue(Complex(-1.0, 0.0), 1.0) == doctest::Approx(kPi));
  CHECK(quasienergy_gap(0.95, -0.95, 2.0) == doctest::Approx(0.1));
}

TEST_CASE("no bound states when the folded band covers the zone") {
  const auto props = make_props(8, 1.0);  // omega_T = 2 < band width 4
  const auto spec = quasienergy_spectrum(FloquetOperator(props));
  CHECK(spec.fbs_indices.empty());
  CHECK(spec.distance_to_band(0.123) == 0.0);
}

TEST_CASE("Floquet modes are periodic and gauge choices cancel in the energy") {
  const auto props = make_props(6, 4.8);
  const FloquetOperator U(props);
  const auto spec = quasienergy_spectrum(U);
  const auto modes = fbs_modes(U, spec, 60);
  REQUIRE(!modes.empty());
  const Real T = U.period();
  for (const auto& m : modes) {
    CHECK((m.state_at(0.37 * T) - m.state_at(1.37 * T)).norm() < 1e-10);
    CHECK((m.state_at(T) - m.initial()).norm() < 1e-9);
    CHECK(std::abs(m.battery_amplitude(0.61 * T) - m.state_at(0.61 * T)(0)) < 1e-12);
  }
  const auto init = ExcitationState::charger_excited(6);
  const Real e = asymptotic_energy(modes, init, 3.3 * T);

  std::vector<FloquetMode> rephased;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const Complex phase = std::exp(kI * (0.9 + 1.3 * Real(j)));
    rephased.push_back(floquet_mode(U, phase * modes[j].initial(), modes[j].epsilon(), 60));
  }
  CHECK(std::abs(asymptotic_energy(rephased, init, 3.3 * T) - e) < 1e-12);
  CHECK(asymptotic_energy({}, init, 1.0) == 0.0);
}

TEST_CASE("floquet_mode rejects a non-eigenpair") {
  const auto props = make_props(3, 4.8);
  const FloquetOperator U(props);
  VectorXc v = VectorXc::Zero(20);
  v(0) = 1.0;
  CHECK_THROWS_AS(floquet_mode(U, v, 0.0), DomainError);
}

TEST_CASE("energy decomposition requires two modes and sums to the total") {
  const auto props = make_props(6, 4.8);
  const FloquetOperator U(props);
  const auto spec = quasienergy_spectrum(U);
  const auto modes = fbs_modes(U, spec, 40);
  const auto init = ExcitationState::charger_excited(6);
  if (modes.size() == 2) {
    const Real t = 2.2 * U.period();
    const auto terms = decompose_energy_terms(modes, init, t);
    CHECK(std::abs(terms.total() - asymptotic_energy(modes, init, t)) < 1e-12);
  }
  std::vector<FloquetMode> one(modes.begin(), modes.begin() + 1);
  CHECK_THROWS_AS(decompose_energy_terms(one, init, 0.0), DomainError);
}
