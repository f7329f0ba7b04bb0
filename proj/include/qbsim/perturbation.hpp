#ifndef QBSIM_PERTURBATION_HPP
#define QBSIM_PERTURBATION_HPP

#include <functional>
#include <string>
#include <vector>

#include "qbsim/core_model.hpp"
#include "qbsim/environment.hpp"

namespace qbsim {

// Floquet perturbation theory for the equal-segment protocol
// tau_c = tau_s = tau_d = pi / (2 kappa), treating the system-bath coupling
// as the perturbation.

/// Throws DomainError unless the three windows are equal and kappa T / 3 = pi / 2.
void require_equal_segments(Real kappa, const ProtocolSchedule& schedule);

/// T-periodic phase of the unperturbed system modes:
///   e^{-i kappa t/3}         on (nT, nT + T/3]
///   e^{-i kappa (T - 2t)/3}  on (nT + T/3, nT + 2T/3]
///   e^{-i kappa (t - T)/3}   on (nT + 2T/3, (n+1)T]
/// with t reduced modulo T.
Complex y_of_t(Real kappa, const ProtocolSchedule& schedule, Real t);

/// f_n = (1/T) int_0^T e^{-i n omega_T t} y(t) dt, exact piecewise integrals.
Complex fourier_coeff(Real kappa, const ProtocolSchedule& schedule, int n);

/// Same integral by adaptive quadrature over each window.
Complex fourier_coeff_quadrature(Real kappa, const ProtocolSchedule& schedule, int n);

/// Fourier coefficient of an arbitrary T-periodic function, integrated
/// piecewise between `breakpoints` (which must start at 0 and end at T).
Complex fourier_coeff_of(const std::function<Complex(Real)>& y, Real period, int n,
                         const std::vector<Real>& breakpoints);

enum class Branch { plus, minus };

/// Unperturbed system Floquet state: quasienergy
/// omega_0 + (m +- 1/2) omega_T and system amplitudes (b, c).
struct ZerothOrderMode {
  int m = 0;
  Branch branch = Branch::plus;
  Real epsilon0 = 0.0;
  Eigen::Vector2cd system_at0;  // (battery, charger) at t = 0
  std::string description;
};

/// m-th replica of the resonant pair: (b + c)/sqrt(2) with phase y(t) for
/// the plus branch, (b - c)/sqrt(2) with y*(t) for the minus branch.
ZerothOrderMode resonant_zeroth_order(Real omega_0, Real omega_T, int m, Branch branch);

/// (battery, charger) amplitudes of a resonant zeroth-order mode at t.
Eigen::Vector2cd zeroth_order_state(const ZerothOrderMode& mode, Real kappa, const ProtocolSchedule& schedule,
                                    Real t);

/// Time average over one period of <phi0(t)| H_I |phi0(t)> for a resonant
/// zeroth-order mode embedded in the full single-excitation basis, sampled
/// at `samples` points. Returns the largest magnitude seen.
Real first_order_correction(const LatticeEnvironment& env, Real kappa, const ProtocolSchedule& schedule,
                            const ZerothOrderMode& mode, std::size_t samples = 64);

struct SecondOrderResult {
  Real eps2_plus = 0.0;   // correction of the (m = -1, +) state
  Real eps2_minus = 0.0;  // correction of the (m = 0, -) state
  int n_max = 0;
  Real tail_bound = 0.0;

  Real splitting() const noexcept;
};

/// Second-order quasienergy shifts of the degenerate pair
///   eps2_+ = sum_{k,n} g_k^2 |f_n|^2 / (eps0 - omega_k - (n - 1) omega_T)
///   eps2_- = sum_{k,n} g_k^2 |f_n|^2 / (eps0 - omega_k + n omega_T)
/// with eps0 = omega_0 - omega_T / 2 and the lattice modes of `env`. |n| is
/// raised until the Parseval tail bound drops below `tail_tol`; throws
/// NumericalError past `n_cap` and DomainError on a vanishing denominator.
SecondOrderResult second_order_corrections(const SystemParams& params, const LatticeEnvironment& env,
                                           const ProtocolSchedule& schedule, Real tail_tol = 1e-8,
                                           int n_cap = 200);

/// The splitting as a single sum
///   sum_{k,n} (1 - 2n) g_k^2 |f_n|^2 / ((1/2 - n)^2 omega_T - (omega_0 - omega_k)^2 / omega_T),
/// signed. Uses the same truncation as second_order_corrections.
Real delta_eps0_main_text(const SystemParams& params, const LatticeEnvironment& env,
                          const ProtocolSchedule& schedule, int n_max = 200);

/// Leading n = 0 term of the single sum at large kappa, where
/// omega_T >> |omega_0 - omega_k|: 3 g^2 |f_0|^2 / kappa.
Real delta_eps0_large_kappa(const SystemParams& params, const LatticeEnvironment& env,
                            const ProtocolSchedule& schedule);

/// E(t) / omega_0 = (1 - cos(d t) Re[y(t)^2 e^{-i omega_T t}]) / 2.
Real asymptotic_energy_closed_form(Real delta_eps0, Real kappa, const ProtocolSchedule& schedule, Real t);

/// The interference part of the same expression, -cos(d t) Re[y^2 e^{-i omega_T t}] / 2.
Real closed_form_interference(Real delta_eps0, Real kappa, const ProtocolSchedule& schedule, Real t);

/// Detuned pair: the degenerate levels split into battery- and
/// charger-localized states.
struct NonresonantZerothOrder {
  Real epsilon_plus = 0.0;   // omega_0 - omega_T/2 + delta, battery state
  Real epsilon_minus = 0.0;  // omega_0 - omega_T/2 - delta, charger state
  Eigen::Vector2cd mode_plus{1.0, 0.0};
  Eigen::Vector2cd mode_minus{0.0, 1.0};
  Real splitting() const noexcept { return std::abs(epsilon_plus - epsilon_minus); }
};

NonresonantZerothOrder nonresonant_zeroth_order(Real omega_0, Real delta, Real omega_T);

}  // namespace qbsim

#endif  // QBSIM_PERTURBATION_HPP
