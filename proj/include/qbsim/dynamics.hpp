#ifndef QBSIM_DYNAMICS_HPP
#define QBSIM_DYNAMICS_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbsim/core_model.hpp"
#include "qbsim/environment.hpp"
#include "qbsim/hamiltonian.hpp"

namespace qbsim {

/// Amplitudes (u_b, u_c, eta_b,k, eta_c,k) over BasisIndex.
class ExcitationState {
 public:
  explicit ExcitationState(VectorXc amplitudes);

  /// |g_b, e_c> with both baths empty.
  static ExcitationState charger_excited(std::size_t N);

  const VectorXc& amplitudes() const noexcept { return amplitudes_; }
  Complex battery() const { return amplitudes_(0); }
  Complex charger() const { return amplitudes_(1); }
  Real norm() const { return amplitudes_.norm(); }
  std::size_t dimension() const noexcept { return std::size_t(amplitudes_.size()); }

 private:
  VectorXc amplitudes_;
};

/// Ordered key/value description of how a trace was produced.
using TraceMetadata = std::map<std::string, std::string>;

/// Battery energy omega_b |u_b(t)|^2 on a time grid.
struct EnergyTrace {
  std::vector<Real> times;
  std::vector<Real> energies;
  TraceMetadata metadata;
};

/// Exact propagators for the two piecewise-constant Hamiltonians H(f=1) and
/// H(f=0). Both are diagonalized once in the bright space; the dark space
/// only picks up phases. Immutable after construction.
class SegmentPropagators {
 public:
  SegmentPropagators(const SystemParams& params, const LatticeEnvironment& env,
                     const ProtocolSchedule& schedule);

  const SystemParams& params() const noexcept { return params_; }
  const LatticeEnvironment& env() const noexcept { return env_; }
  const ProtocolSchedule& schedule() const noexcept { return schedule_; }
  const BrightBasis& basis() const noexcept { return basis_; }

  /// Eigenpairs of the bright-space H(f).
  const VectorXr& energies(int f) const noexcept { return f ? energies_on_ : energies_off_; }
  const MatrixXr& eigenvectors(int f) const noexcept { return f ? vectors_on_ : vectors_off_; }

  /// Bright-space exp(-i H(f) duration).
  MatrixXc unitary(int f, Real duration) const;
  /// Cached bright-space propagator of a whole stage.
  const MatrixXc& stage_unitary(Stage s) const;

  /// Evolves bright coordinates known at t0 to t1, splitting at every
  /// segment boundary.
  VectorXc advance_bright(const VectorXc& bright, Real t0, Real t1) const;
  /// Full-basis evolution from t0 to t1.
  VectorXc advance(const VectorXc& full, Real t0, Real t1) const;

  /// Largest max-norm deviation of U^dagger U from the identity over the
  /// cached stage propagators.
  Real unitarity_defect() const;

 private:
  SystemParams params_;
  LatticeEnvironment env_;
  ProtocolSchedule schedule_;
  BrightBasis basis_;
  VectorXr energies_on_;
  VectorXr energies_off_;
  MatrixXr vectors_on_;
  MatrixXr vectors_off_;
  MatrixXc stage_charging_;
  MatrixXc stage_storing_;
  MatrixXc stage_discharging_;
};

struct ExactOptions {
  /// Abort before allocating if the estimated working set exceeds this.
  std::size_t memory_cap_bytes = std::size_t{4} << 30;
  /// Keep the full state at every sample.
  bool keep_states = false;
};

struct ExactResult {
  EnergyTrace trace;
  std::vector<Complex> battery;
  std::vector<Complex> charger;
  std::vector<VectorXc> states;  // only with ExactOptions::keep_states
  Real max_norm_drift = 0.0;
};

/// Working-set estimate of propagate_exact in bytes.
std::size_t exact_memory_estimate(const LatticeEnvironment& env, std::size_t samples, bool keep_states);

/// Exact propagation of the full single-excitation state. Samples lie on a
/// grid that contains every segment boundary with spacing at most sample_dt.
ExactResult propagate_exact(const SystemParams& params, const LatticeEnvironment& env,
                            const ProtocolSchedule& schedule, const ExcitationState& initial,
                            Real t_max, Real sample_dt, const ExactOptions& options = {});

/// Same, reusing prebuilt propagators.
ExactResult propagate_exact(const SegmentPropagators& propagators, const ExcitationState& initial,
                            Real t_max, Real sample_dt, const ExactOptions& options = {});

enum class KernelVariant { discrete, continuum };

const char* to_string(KernelVariant k) noexcept;

struct VolterraOptions {
  /// Step; zero selects default_time_step().
  Real dt = 0.0;
  KernelVariant kernel = KernelVariant::discrete;
  /// When set, the run is repeated at dt/2 and the Richardson estimate of
  /// the dt run's error must not exceed this.
  std::optional<Real> tolerance;
};

struct VolterraResult {
  EnergyTrace trace;
  std::vector<Complex> battery;
  std::vector<Complex> charger;
  Real dt = 0.0;
  /// Richardson error estimate (NaN unless a tolerance was requested).
  Real error_estimate = std::numeric_limits<Real>::quiet_NaN();
};

/// min(tau_c, tau_s, tau_d, 2 pi / (varpi + 4q + omega_0 + 2 kappa)) / 40,
/// ignoring an empty storing window, snapped so that every segment holds a
/// whole number of steps.
Real default_time_step(const SystemParams& params, const LatticeEnvironment& env,
                       const ProtocolSchedule& schedule);

/// Snaps a requested step so each segment holds an integer number of steps.
/// Throws DomainError if the segments are incommensurate at that step.
Real aligned_time_step(const ProtocolSchedule& schedule, Real requested);

/// Integrates
///   du_l/dt + i w_l u_l + i kappa f(t) u_l' + int_0^t nu(t - s) u_l(s) ds = 0
/// for l = b, c with u_b(0) = 0, u_c(0) = 1, by the implicit trapezoidal rule
/// with a trapezoidal history sum (second order).
VolterraResult solve_volterra(const SystemParams& params, const LatticeEnvironment& env,
                              const ProtocolSchedule& schedule, Real t_max,
                              const VolterraOptions& options = {});

struct VpmResult {
  std::vector<Real> times;
  std::vector<Complex> v_plus;
  std::vector<Complex> v_minus;
  Real dt = 0.0;

  /// u_b = (v+ - v-) e^{-i w0 t} / 2 and u_c = (v+ + v-) e^{-i w0 t} / 2.
  std::vector<Complex> battery(Real omega_0) const;
  std::vector<Complex> charger(Real omega_0) const;
};

/// Resonant pair only: the decoupled scalar equations
///   dv/dt +- i kappa f(t) v + int_0^t nu(t - s) e^{i w0 (t - s)} v(s) ds = 0,
/// v(0) = 1. Throws DomainError if delta != 0.
VpmResult solve_vpm(const SystemParams& params, const LatticeEnvironment& env,
                    const ProtocolSchedule& schedule, Real t_max, const VolterraOptions& options = {});

}  // namespace qbsim

#endif  // QBSIM_DYNAMICS_HPP
