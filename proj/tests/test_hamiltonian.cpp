#include <doctest.h>

#include <algorithm>

#include "qbsim/hamiltonian.hpp"

using namespace qbsim;

TEST_CASE("N=2 Hamiltonian matches hand enumeration") {
  const LatticeEnvironment env(2, 1.0, 0.5, 0.6);
  const auto p = SystemParams::from_center(2.0, 0.25, 3.0);
  // Momenta (0,0), (0,pi), (pi,0), (pi,pi): omega_k = 1 - (cos kx + cos ky).
  const Real w[4] = {-1.0, 1.0, 1.0, 3.0};
  const Real gk = 0.3;
  MatrixXr hand = MatrixXr::Zero(10, 10);
  hand(0, 0) = 1.75;
  hand(1, 1) = 2.25;
  hand(0, 1) = hand(1, 0) = 3.0;
  for (int k = 0; k < 4; ++k) {
    hand(2 + k, 2 + k) = w[k];
    hand(6 + k, 6 + k) = w[k];
    hand(0, 2 + k) = hand(2 + k, 0) = gk;
    hand(1, 6 + k) = hand(6 + k, 1) = gk;
  }
  const MatrixXr H = build_hamiltonian(p, env, 1);
  CHECK((H - hand).cwiseAbs().maxCoeff() < 1e-14);
  const MatrixXr H0 = build_hamiltonian(p, env, 0);
  CHECK(H0(0, 1) == 0.0);
  CHECK(H0(1, 0) == 0.0);
}

TEST_CASE("bright/dark split reproduces the full spectrum") {
  const LatticeEnvironment env(6, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.3, 4.0);
  const BrightBasis basis(env);
  CHECK(basis.full_dimension() == 74);
  for (int f : {0, 1}) {
    Eigen::SelfAdjointEigenSolver<MatrixXr> full(build_hamiltonian(p, env, f));
    Eigen::SelfAdjointEigenSolver<MatrixXr> bright(build_bright_hamiltonian(p, basis, env, f));
    std::vector<Real> merged(bright.eigenvalues().data(), bright.eigenvalues().data() + bright.eigenvalues().size());
    const VectorXr dark = basis.dark_frequencies();
    merged.insert(merged.end(), dark.data(), dark.data() + dark.size());
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 0; i < merged.size(); ++i) CHECK(std::abs(merged[i] - full.eigenvalues()(Eigen::Index(i))) < 1e-12);
  }
}

TEST_CASE("dark vectors are orthonormal eigenvectors orthogonal to the bright space") {
  const LatticeEnvironment env(5, 1.0, 0.5, 0.5);
  const auto p = SystemParams::from_center(2.0, 0.0, 4.0);
  const BrightBasis basis(env);
  const MatrixXr D = basis.dark_vectors();
  const VectorXr w = basis.dark_frequencies();
  CHECK((D.transpose() * D - MatrixXr::Identity(D.cols(), D.cols())).cwiseAbs().maxCoeff() < 1e-13);
  const MatrixXr H = build_hamiltonian(p, env, 1);
  CHECK((H * D - D * w.asDiagonal()).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index j = 0; j < D.cols(); ++j) {
    const VectorXc v = D.col(j).cast<Complex>();
    CHECK(basis.project(v).norm() < 1e-13);
  }
  VectorXc x = VectorXc::Random(Eigen::Index(basis.full_dimension()));
  CHECK((basis.embed(basis.project(x)) + basis.dark_part(x) - x).norm() < 1e-13);
}
