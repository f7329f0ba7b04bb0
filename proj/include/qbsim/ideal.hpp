#ifndef QBSIM_IDEAL_HPP
#define QBSIM_IDEAL_HPP

#include "qbsim/core_model.hpp"

namespace qbsim {

/// State of the closed battery-charger pair in the single-excitation sector.
struct TwoLevelAmplitudes {
  Complex battery{0.0, 0.0};
  Complex charger{1.0, 0.0};

  Real norm_squared() const noexcept { return std::norm(battery) + std::norm(charger); }
};

/// Exact 2x2 propagator of the isolated pair over `duration` with the switch
/// held at f. The common phase exp(-i omega_0 t) is kept.
Eigen::Matrix2cd pair_propagator(const SystemParams& params, int f, Real duration);

/// Closed-system amplitudes at time t, composed from exact segment
/// propagators. Throws DomainError if `initial` is not normalized.
TwoLevelAmplitudes ideal_evolve(const SystemParams& params, const ProtocolSchedule& schedule, Real t,
                                const TwoLevelAmplitudes& initial = {});

/// Evolves `state`, known at time t0, to time t1 >= t0.
TwoLevelAmplitudes ideal_advance(const SystemParams& params, const ProtocolSchedule& schedule,
                                 const TwoLevelAmplitudes& state, Real t0, Real t1);

/// Battery energy omega_b |c_b(t)|^2.
Real ideal_energy(const SystemParams& params, const ProtocolSchedule& schedule, Real t,
                  const TwoLevelAmplitudes& initial = {});

}  // namespace qbsim

#endif  // QBSIM_IDEAL_HPP
