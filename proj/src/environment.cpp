#include "qbsim/environment.hpp"

#include <algorithm>
#include <cmath>

#include "qbsim/quadrature.hpp"

namespace qbsim {

LatticeEnvironment::LatticeEnvironment(std::size_t N, Real varpi, Real q, Real g)
    : N_(N), varpi_(varpi), q_(q), g_(g) {
  if (N < 1) throw DomainError("lattice size N must be at least 1");
  if (!(q > 0.0)) throw DomainError("hopping rate q must be positive");
  if (!(g >= 0.0)) throw DomainError("system-bath coupling g must be non-negative");
}

VectorXr LatticeEnvironment::mode_frequencies() const {
  VectorXr cosines(N_);
  for (std::size_t m = 0; m < N_; ++m) {
    cosines(m) = std::cos(2.0 * kPi * static_cast<Real>(m) / static_cast<Real>(N_));
  }
  VectorXr w(modes());
  for (std::size_t mx = 0; mx < N_; ++mx) {
    for (std::size_t my = 0; my < N_; ++my) {
      w(mx * N_ + my) = varpi_ - 2.0 * q_ * (cosines(mx) + cosines(my));
    }
  }
  return w;
}

bool is_van_hove_point(const LatticeEnvironment& env, Real omega) noexcept {
  return omega == env.varpi();
}

Real spectral_density(const LatticeEnvironment& env, Real omega) {
  const Real u = omega - env.varpi();
  const Real q = env.q();
  if (std::abs(u) > 4.0 * q) return 0.0;
  if (u == 0.0) return std::numeric_limits<Real>::infinity();
  return env.g() * env.g() / (2.0 * q * kPi * kPi) * elliptic_k_complementary(std::abs(u) / (4.0 * q));
}

Complex memory_kernel_discrete(const LatticeEnvironment& env, Real x) {
  const std::size_t N = env.N();
  // sum_k exp(-i w_k x) = exp(-i varpi x) * (sum_m exp(2 i q x cos k_m))^2
  Complex axis{0.0, 0.0};
  for (std::size_t m = 0; m < N; ++m) {
    const Real c = std::cos(2.0 * kPi * static_cast<Real>(m) / static_cast<Real>(N));
    axis += std::exp(kI * (2.0 * env.q() * x * c));
  }
  const Real gk = env.mode_coupling();
  return gk * gk * std::exp(-kI * (env.varpi() * x)) * axis * axis;
}

namespace {

// 2 * int_0^{4q} J(varpi + u) cos(u x) du: the band is symmetric about varpi,
// so the odd (sine) part vanishes.
quad::Result half_band_cosine_transform(const LatticeEnvironment& env, Real x, Real rel_tol) {
  const Real scale = env.g() * env.g() / (env.q() * kPi * kPi);
  const Real width = 4.0 * env.q();
  // u = width s^2 absorbs the log singularity at u = 0
  auto integrand = [&](Real s) {
    if (s <= 0.0) return 0.0;
    const Real u = width * s * s;
    return 2.0 * width * s * scale * elliptic_k_complementary(std::min<Real>(s * s, 1.0)) * std::cos(u * x);
  };
  const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(width * std::abs(x) / kPi)));
  quad::Result total{0.0, 0.0};
  for (std::size_t i = 0; i < panels; ++i) {
    const Real a = width * static_cast<Real>(i) / static_cast<Real>(panels);
    const Real b = width * static_cast<Real>(i + 1) / static_cast<Real>(panels);
    const auto r = quad::integrate(integrand, std::sqrt(a / width), std::sqrt(b / width), rel_tol, 15);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

}  // namespace

Complex memory_kernel_continuum(const LatticeEnvironment& env, Real x) {
  const Real j0 = std::cyl_bessel_j(0.0, 2.0 * env.q() * std::abs(x));
  return env.g() * env.g() * j0 * j0 * std::exp(-kI * (env.varpi() * x));
}

Complex memory_kernel_continuum_quadrature(const LatticeEnvironment& env, Real x, Real tol) {
  const Real g2 = env.g() * env.g();
  if (g2 == 0.0) return {0.0, 0.0};
  const auto r = half_band_cosine_transform(env, x, std::min(tol, 1e-8));
  if (r.error > tol * g2) {
    throw NumericalError("continuum memory kernel quadrature did not converge", r.error);
  }
  return r.value * std::exp(-kI * (env.varpi() * x));
}

Real spectral_weight(const LatticeEnvironment& env, Real tol) {
  return half_band_cosine_transform(env, 0.0, tol).value;
}

}  // namespace qbsim
