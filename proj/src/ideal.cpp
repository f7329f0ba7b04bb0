#include "qbsim/ideal.hpp"

#include <cmath>

namespace qbsim {

Eigen::Matrix2cd pair_propagator(const SystemParams& params, int f, Real duration) {
  const Real w0 = params.omega_0();
  const Real d = params.delta();
  const Real k = params.kappa() * f;
  const Real omega = std::hypot(k, d);
  const Complex common = std::exp(-kI * w0 * duration);

  // H - omega_0 = [[-d, k], [k, d]] squares to omega^2 I.
  Eigen::Matrix2cd U;
  if (omega == 0.0) {
    U.setIdentity();
  } else {
    const Real c = std::cos(omega * duration);
    const Real s = std::sin(omega * duration) / omega;
    U(0, 0) = Complex(c, d * s);
    U(1, 1) = Complex(c, -d * s);
    U(0, 1) = Complex(0.0, -k * s);
    U(1, 0) = U(0, 1);
  }
  return common * U;
}

TwoLevelAmplitudes ideal_advance(const SystemParams& params, const ProtocolSchedule& schedule,
                                 const TwoLevelAmplitudes& state, Real t0, Real t1) {
  Eigen::Vector2cd v(state.battery, state.charger);
  for (const Segment& seg : schedule.pieces(t0, t1)) {
    v = pair_propagator(params, seg.f(), seg.length()) * v;
  }
  return {v(0), v(1)};
}

TwoLevelAmplitudes ideal_evolve(const SystemParams& params, const ProtocolSchedule& schedule, Real t,
                                const TwoLevelAmplitudes& initial) {
  if (std::abs(initial.norm_squared() - 1.0) > 1e-12) {
    throw DomainError("initial two-level state is not normalized");
  }
  return ideal_advance(params, schedule, initial, 0.0, t);
}

Real ideal_energy(const SystemParams& params, const ProtocolSchedule& schedule, Real t,
                  const TwoLevelAmplitudes& initial) {
  return params.omega_b() * std::norm(ideal_evolve(params, schedule, t, initial).battery);
}

}  // namespace qbsim
