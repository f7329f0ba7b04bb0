#include "qbsim/markovian.hpp"

#include <cmath>

#include "qbsim/quadrature.hpp"

namespace qbsim {

namespace {

// int_a^b h(w) dw for h with at most a log singularity at varpi. Pieces
// touching varpi use w = varpi +- s^2.
template <typename F>
Real band_integral(const LatticeEnvironment& env, F&& h, Real a, Real b) {
  const Real v = env.varpi();
  auto right = [&](Real s) { return s == 0.0 ? 0.0 : 2.0 * s * h(v + s * s); };
  auto left = [&](Real s) { return s == 0.0 ? 0.0 : 2.0 * s * h(v - s * s); };
  Real total = 0.0;
  if (a < v) total += quad::integrate(left, std::sqrt(v - std::min(b, v)), std::sqrt(v - a), 1e-11, 15).value;
  if (b > v) total += quad::integrate(right, std::sqrt(std::max(a, v) - v), std::sqrt(b - v), 1e-11, 15).value;
  return total;
}

// Principal value P int J(w) / (omega_0 - w) dw. Inside the band the pole is
// removed by subtracting J(omega_0), whose principal value is a logarithm.
Real lamb_shift(const LatticeEnvironment& env, Real omega_0) {
  const Real lo = env.band_min();
  const Real hi = env.band_max();
  if (omega_0 <= lo || omega_0 >= hi) {
    return band_integral(env, [&](Real w) { return spectral_density(env, w) / (omega_0 - w); }, lo, hi);
  }
  const Real j0 = spectral_density(env, omega_0);
  auto regular = [&](Real w) {
    if (w == omega_0) return 0.0;
    return (spectral_density(env, w) - j0) / (omega_0 - w);
  };
  return band_integral(env, regular, lo, hi) + j0 * std::log((omega_0 - lo) / (hi - omega_0));
}

}  // namespace

MarkovRates markov_rates(const LatticeEnvironment& env, Real omega_0) {
  if (is_van_hove_point(env, omega_0)) throw DomainError("rate undefined at van Hove point");
  return {kPi * spectral_density(env, omega_0), lamb_shift(env, omega_0)};
}

Real markov_energy(const SystemParams& params, const ProtocolSchedule& schedule,
                   const MarkovRates& rates, Real t) {
  const Real s = std::sin(params.kappa() * coupling_integral(schedule, t));
  return params.omega_0() * std::exp(-2.0 * rates.gamma * t) * s * s;
}

}  // namespace qbsim
