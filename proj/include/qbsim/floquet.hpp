#ifndef QBSIM_FLOQUET_HPP
#define QBSIM_FLOQUET_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "qbsim/dynamics.hpp"

namespace qbsim {

/// One-period evolution operator U_T = U(tau_d) U(tau_s) U(tau_c), held in
/// factored form: a dense block on the bright space and a phase per dark
/// state. Immutable and cheap to share.
class FloquetOperator {
 public:
  explicit FloquetOperator(std::shared_ptr<const SegmentPropagators> propagators);

  const SegmentPropagators& propagators() const noexcept { return *propagators_; }
  std::shared_ptr<const SegmentPropagators> shared_propagators() const noexcept { return propagators_; }
  Real period() const noexcept { return propagators_->schedule().period(); }

  /// U_T restricted to the bright space.
  const MatrixXc& bright() const noexcept { return bright_; }

  /// U_T applied to a full-basis vector.
  VectorXc apply(const VectorXc& full) const;

  /// Full-basis matrix. Intended for small lattices.
  MatrixXc dense() const;

 private:
  std::shared_ptr<const SegmentPropagators> propagators_;
  MatrixXc bright_;
};

FloquetOperator one_period_operator(const SystemParams& params, const LatticeEnvironment& env,
                                    const ProtocolSchedule& schedule);

/// U_T from dense exponentials of the full 2 + 2N^2 Hamiltonians, without
/// the bright/dark reduction.
MatrixXc one_period_operator_dense(const SystemParams& params, const LatticeEnvironment& env,
                                   const ProtocolSchedule& schedule);

/// eps = i ln(lambda) / T with the branch placing eps in (-omega_T/2, omega_T/2].
Real quasienergy_from_eigenvalue(Complex lambda, Real period);

/// Folds an energy into (-omega_T/2, omega_T/2].
Real fold_quasienergy(Real energy, Real omega_T);

/// Eigen-decomposition of U_T, sorted by quasienergy.
struct QuasienergySpectrum {
  Real omega_T = 0.0;
  VectorXr epsilon;
  VectorXr system_weight;  // |u_b|^2 + |u_c|^2 of each eigenvector
  MatrixXc eigenvectors;   // one full-basis column per entry
  Real band_min = 0.0;     // unfolded continuum support
  Real band_max = 0.0;
  std::vector<std::size_t> fbs_indices;

  std::size_t size() const noexcept { return std::size_t(epsilon.size()); }

  /// Distance on the quasienergy circle from eps to the folded band.
  Real distance_to_band(Real eps) const;
  /// Folded band as arcs inside the first zone.
  std::vector<std::array<Real, 2>> folded_band() const;
  /// Band length over the number of entries lying on the folded band.
  Real mean_band_spacing() const;
};

/// Spectrum of a general unitary via its complex Schur form. `band` gives
/// the unfolded continuum support. Throws NumericalError if the triangular
/// factor is not diagonal to within `normality_tol`.
QuasienergySpectrum quasienergy_spectrum(const MatrixXc& U_T, const ProtocolSchedule& schedule,
                                         std::array<Real, 2> band, Real normality_tol = 1e-6);

struct FbsCriteria {
  Real weight_threshold = 0.05;
  /// Defaults to gap_factor times the mean folded-band level spacing.
  std::optional<Real> gap_tolerance;
  Real gap_factor = 3.0;
};

/// Spectrum of the factored operator; FBS indices are filled using `criteria`.
QuasienergySpectrum quasienergy_spectrum(const FloquetOperator& U_T, const FbsCriteria& criteria = {});

/// Entries with system weight >= threshold that sit farther than the gap
/// tolerance from the folded continuum. Empty is a valid answer.
std::vector<std::size_t> identify_fbs(const QuasienergySpectrum& spectrum, const FbsCriteria& criteria = {});

/// A T-periodic Floquet mode phi(t) = e^{i eps t} U_t phi(0).
class FloquetMode {
 public:
  FloquetMode(std::shared_ptr<const SegmentPropagators> propagators, const VectorXc& phi0, Real epsilon,
              std::size_t n_samples);

  Real epsilon() const noexcept { return epsilon_; }
  const VectorXc& initial() const noexcept { return phi0_; }
  /// Sample grid over [0, T] and the mode on it.
  const std::vector<Real>& times() const noexcept { return times_; }
  const std::vector<VectorXc>& samples() const noexcept { return samples_; }

  /// Exact mode at any t (periodically extended).
  VectorXc state_at(Real t) const;
  /// Battery component <b|phi(t)>, O(bright dimension) per call.
  Complex battery_amplitude(Real t) const;

  Real omega_b() const noexcept { return propagators_->params().omega_b(); }

 private:
  std::shared_ptr<const SegmentPropagators> propagators_;
  VectorXc phi0_;
  Real epsilon_;
  std::vector<Real> times_;
  std::vector<VectorXc> samples_;
  // Bright-space mode at each stage start, in the eigenbasis of that stage.
  std::array<VectorXc, 3> stage_coefficients_;
  std::array<Real, 3> stage_start_;
};

/// Throws DomainError if (phi0, epsilon) is not an eigenpair of U_T to 1e-6.
FloquetMode floquet_mode(const FloquetOperator& U_T, const VectorXc& phi0, Real epsilon,
                         std::size_t n_samples = 200);

/// Floquet modes of the spectrum's FBS entries, in ascending quasienergy.
std::vector<FloquetMode> fbs_modes(const FloquetOperator& U_T, const QuasienergySpectrum& spectrum,
                                   std::size_t n_samples = 200);

/// c_j = <phi_j(0)|Psi(0)>.
std::vector<Complex> fbs_overlaps(const std::vector<FloquetMode>& modes, const ExcitationState& initial);

/// Long-time battery energy carried by the bound states,
///   omega_b sum_{j,j'} c_j c_j'^* e^{-i(eps_j - eps_j')t} <phi_j'(t)|s_b^+ s_b|phi_j(t)>.
/// Zero when there are no modes. At resonance omega_b equals omega_0.
Real asymptotic_energy(const std::vector<FloquetMode>& modes, const ExcitationState& initial, Real t);

/// Split of the two-FBS energy into its diagonal and interference parts.
struct EnergyTerms {
  std::array<Real, 2> matrix_element{};  // <phi_j(t)|s_b^+ s_b|phi_j(t)>
  std::array<Real, 2> weight{};          // |c_j|^2
  std::array<Real, 2> diagonal{};        // omega_b |c_j|^2 <phi_j|s_b^+ s_b|phi_j>
  Real interference = 0.0;               // omega_b sum_{j != j'} ...
  Real total() const noexcept { return diagonal[0] + diagonal[1] + interference; }
};

/// Throws DomainError unless exactly two modes are given.
EnergyTerms decompose_energy_terms(const std::vector<FloquetMode>& modes, const ExcitationState& initial, Real t);

/// Circular distance between two quasienergies.
Real quasienergy_gap(Real a, Real b, Real omega_T);

}  // namespace qbsim

#endif  // QBSIM_FLOQUET_HPP
