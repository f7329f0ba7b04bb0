#ifndef QBSIM_ENVIRONMENT_HPP
#define QBSIM_ENVIRONMENT_HPP

#include <cstddef>
#include <limits>

#include "qbsim/types.hpp"

namespace qbsim {

/// N x N square-lattice boson bath seen from its (0,0) site, in momentum
/// space: omega_k = varpi - 2q (cos kx + cos ky), g_k = g / N.
///
/// The battery and the charger each couple to their own copy of this bath.
class LatticeEnvironment {
 public:
  LatticeEnvironment(std::size_t N, Real varpi, Real q, Real g);

  std::size_t N() const noexcept { return N_; }
  Real varpi() const noexcept { return varpi_; }
  Real q() const noexcept { return q_; }
  Real g() const noexcept { return g_; }

  std::size_t modes() const noexcept { return N_ * N_; }
  Real band_min() const noexcept { return varpi_ - 4.0 * q_; }
  Real band_max() const noexcept { return varpi_ + 4.0 * q_; }

  /// omega_k over the momentum grid, row-major in (mx, my).
  VectorXr mode_frequencies() const;
  /// Uniform coupling g / N.
  Real mode_coupling() const noexcept { return g_ / static_cast<Real>(N_); }

 private:
  std::size_t N_;
  Real varpi_;
  Real q_;
  Real g_;
};

/// K as a function of the complementary modulus k' = sqrt(1 - m), which
/// keeps full precision near the logarithmic singularity at m -> 1.
template <typename Scalar>
Scalar elliptic_k_complementary(Scalar kp) {
  using std::abs;
  using std::sqrt;
  if (!(kp > Scalar(0)) || !(kp <= Scalar(1))) {
    throw DomainError("elliptic_k: complementary modulus outside (0, 1]");
  }
  Scalar a = Scalar(1);
  Scalar b = kp;
  for (int it = 0; it < 64 && abs(a - b) > a * std::numeric_limits<Scalar>::epsilon(); ++it) {
    const Scalar an = (a + b) / Scalar(2);
    b = sqrt(a * b);
    a = an;
  }
  return Scalar(kPi) / (Scalar(2) * a);
}

/// Complete elliptic integral of the first kind in the parameter convention,
/// K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta), by the
/// arithmetic-geometric mean. Throws DomainError unless 0 <= m < 1.
template <typename Scalar>
Scalar elliptic_k(Scalar m) {
  using std::sqrt;
  if (!(m >= Scalar(0)) || !(m < Scalar(1))) {
    throw DomainError("elliptic_k: parameter outside [0, 1)");
  }
  return elliptic_k_complementary(sqrt(Scalar(1) - m));
}

/// Continuum spectral density
///   J(w) = g^2 / (2 q pi^2) * Theta(4q - |w - varpi|) * K(1 - (w - varpi)^2 / 16 q^2).
/// Zero outside the band. At w == varpi the logarithmic van Hove divergence
/// is reported as +infinity; check with is_van_hove_point().
Real spectral_density(const LatticeEnvironment& env, Real omega);

bool is_van_hove_point(const LatticeEnvironment& env, Real omega) noexcept;

/// Exact finite-lattice correlation function sum_k g_k^2 exp(-i omega_k x),
/// evaluated in O(N) through the per-axis factorization. Defined for any
/// real x; nu(-x) = conj(nu(x)).
Complex memory_kernel_discrete(const LatticeEnvironment& env, Real x);

/// Continuum correlation function int J(w) exp(-i w x) dw in closed form,
/// g^2 exp(-i varpi x) J_0(2 q x)^2.
Complex memory_kernel_continuum(const LatticeEnvironment& env, Real x);

/// The same transform by Gauss-Kronrod quadrature of J, one panel per
/// oscillation. Throws NumericalError carrying the residual estimate if
/// `tol` (absolute, relative to g^2) is not met.
Complex memory_kernel_continuum_quadrature(const LatticeEnvironment& env, Real x, Real tol = 1e-10);

/// int J(w) dw over the band; equals g^2 analytically.
Real spectral_weight(const LatticeEnvironment& env, Real tol = 1e-12);

}  // namespace qbsim

#endif  // QBSIM_ENVIRONMENT_HPP
