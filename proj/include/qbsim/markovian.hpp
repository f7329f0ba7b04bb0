#ifndef QBSIM_MARKOVIAN_HPP
#define QBSIM_MARKOVIAN_HPP

#include "qbsim/core_model.hpp"
#include "qbsim/environment.hpp"

namespace qbsim {

/// Weak-coupling rates of a resonant pair: decay Gamma = pi J(omega_0) and
/// Lamb shift Delta = P int J(w) / (omega_0 - w) dw.
struct MarkovRates {
  Real gamma = 0.0;
  Real lamb_shift = 0.0;
};

/// Throws DomainError at the van Hove point omega_0 == varpi, where J is
/// singular and the rate is undefined.
MarkovRates markov_rates(const LatticeEnvironment& env, Real omega_0);

/// Markovian battery energy omega_0 exp(-2 Gamma t) sin^2(kappa int_0^t f).
/// The Lamb shift only rotates the phase of u_b and does not enter.
Real markov_energy(const SystemParams& params, const ProtocolSchedule& schedule,
                   const MarkovRates& rates, Real t);

}  // namespace qbsim

#endif  // QBSIM_MARKOVIAN_HPP
