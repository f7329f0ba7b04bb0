#include "qbsim/perturbation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "qbsim/hamiltonian.hpp"
#include "qbsim/quadrature.hpp"

namespace qbsim {

namespace {

// y(t) = exp(i (alpha + beta t)) on each third of the period.
struct PhaseSegment {
  Real a;
  Real b;
  Real alpha;
  Real beta;
};

std::array<PhaseSegment, 3> phase_segments(Real kappa, Real T) {
  const Real third = T / 3.0;
  return {{{0.0, third, 0.0, -kappa / 3.0},
           {third, 2.0 * third, -kappa * T / 3.0, 2.0 * kappa / 3.0},
           {2.0 * third, T, kappa * T / 3.0, -kappa / 3.0}}};
}

Complex integrate_complex(const std::function<Complex(Real)>& f, Real a, Real b) {
  const auto re = quad::integrate([&](Real t) { return f(t).real(); }, a, b, 1e-14);
  const auto im = quad::integrate([&](Real t) { return f(t).imag(); }, a, b, 1e-14);
  return {re.value, im.value};
}

struct ModeSums {
  Real plus = 0.0;
  Real minus = 0.0;
};

// Lattice sums for a single Fourier index n.
ModeSums sums_for(const VectorXr& wk, Real gk2, Real eps0, Real omega_T, Real weight, int n) {
  ModeSums s;
  const Real scale = std::max<Real>(1.0, std::abs(eps0) + omega_T);
  for (Eigen::Index k = 0; k < wk.size(); ++k) {
    const Real dp = eps0 - wk(k) - (n - 1) * omega_T;
    const Real dm = eps0 - wk(k) + n * omega_T;
    if (std::abs(dp) < 1e-12 * scale || std::abs(dm) < 1e-12 * scale) {
      std::ostringstream os;
      os << "vanishing denominator: Floquet replica n=" << n << " resonant with bath mode k=" << k;
      throw DomainError(os.str());
    }
    s.plus += gk2 * weight / dp;
    s.minus += gk2 * weight / dm;
  }
  return s;
}

}  // namespace

void require_equal_segments(Real kappa, const ProtocolSchedule& schedule) {
  const Real tau = schedule.tau_c();
  const Real tol = 1e-9 * schedule.period();
  if (std::abs(schedule.tau_s() - tau) > tol || std::abs(schedule.tau_d() - tau) > tol ||
      std::abs(kappa * tau - 0.5 * kPi) > 1e-9) {
    throw DomainError("perturbation theory needs tau_c = tau_s = tau_d = pi / (2 kappa)");
  }
}

Complex y_of_t(Real kappa, const ProtocolSchedule& schedule, Real t) {
  require_equal_segments(kappa, schedule);
  const Real T = schedule.period();
  Real tt = t - T * std::floor(t / T);
  if (tt == 0.0 && t != 0.0) tt = T;  // t = nT closes the previous period
  if (tt <= T / 3.0) return std::exp(-kI * (kappa * tt / 3.0));
  if (tt <= 2.0 * T / 3.0) return std::exp(-kI * (kappa * (T - 2.0 * tt) / 3.0));
  return std::exp(-kI * (kappa * (tt - T) / 3.0));
}

Complex fourier_coeff(Real kappa, const ProtocolSchedule& schedule, int n) {
  require_equal_segments(kappa, schedule);
  const Real T = schedule.period();
  const Real wT = schedule.omega_T();
  Complex sum{0.0, 0.0};
  for (const auto& s : phase_segments(kappa, T)) {
    const Real b = s.beta - n * wT;
    const Complex front = std::exp(kI * s.alpha);
    if (std::abs(b) * T < 1e-12) {
      sum += front * Complex(s.b - s.a, 0.0);
    } else {
      sum += front * (std::exp(kI * (b * s.b)) - std::exp(kI * (b * s.a))) / (kI * b);
    }
  }
  return sum / T;
}

Complex fourier_coeff_of(const std::function<Complex(Real)>& y, Real period, int n,
                         const std::vector<Real>& breakpoints) {
  if (breakpoints.size() < 2 || breakpoints.front() != 0.0 || std::abs(breakpoints.back() - period) > 1e-12 * period) {
    throw DomainError("breakpoints must run from 0 to the period");
  }
  const Real wT = 2.0 * kPi / period;
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    sum += integrate_complex([&](Real t) { return std::exp(-kI * (n * wT * t)) * y(t); }, breakpoints[i],
                             breakpoints[i + 1]);
  }
  return sum / period;
}

Complex fourier_coeff_quadrature(Real kappa, const ProtocolSchedule& schedule, int n) {
  require_equal_segments(kappa, schedule);
  const Real T = schedule.period();
  // Evaluate each window by its own branch so the junctions never matter.
  const auto segs = phase_segments(kappa, T);
  const Real wT = schedule.omega_T();
  Complex sum{0.0, 0.0};
  for (const auto& s : segs) {
    sum += integrate_complex([&](Real t) { return std::exp(kI * (s.alpha + s.beta * t - n * wT * t)); }, s.a, s.b);
  }
  return sum / T;
}

ZerothOrderMode resonant_zeroth_order(Real omega_0, Real omega_T, int m, Branch branch) {
  ZerothOrderMode z;
  z.m = m;
  z.branch = branch;
  const Real r = 1.0 / std::sqrt(2.0);
  if (branch == Branch::plus) {
    z.epsilon0 = omega_0 + (m + 0.5) * omega_T;
    z.system_at0 = Eigen::Vector2cd(r, r);
    z.description = "y(t) exp(i m omega_T t) (b + c)/sqrt(2)";
  } else {
    z.epsilon0 = omega_0 + (m - 0.5) * omega_T;
    z.system_at0 = Eigen::Vector2cd(r, -r);
    z.description = "conj(y(t)) exp(i m omega_T t) (b - c)/sqrt(2)";
  }
  return z;
}

Eigen::Vector2cd zeroth_order_state(const ZerothOrderMode& mode, Real kappa, const ProtocolSchedule& schedule,
                                    Real t) {
  const Complex y = y_of_t(kappa, schedule, t);
  const Complex phase = (mode.branch == Branch::plus ? y : std::conj(y)) *
                        std::exp(kI * (mode.m * schedule.omega_T() * t));
  return phase * mode.system_at0;
}

Real first_order_correction(const LatticeEnvironment& env, Real kappa, const ProtocolSchedule& schedule,
                            const ZerothOrderMode& mode, std::size_t samples) {
  // H_I: system-bath couplings only.
  const BasisIndex idx{env.N()};
  const Real gk = env.mode_coupling();
  const Real T = schedule.period();
  Real worst = 0.0;
  for (std::size_t i = 0; i < std::max<std::size_t>(samples, 1); ++i) {
    const Real t = T * (static_cast<Real>(i) + 0.5) / static_cast<Real>(samples);
    VectorXc phi = VectorXc::Zero(Eigen::Index(idx.dimension()));
    phi.head<2>() = zeroth_order_state(mode, kappa, schedule, t);
    VectorXc hphi = VectorXc::Zero(phi.size());
    for (std::size_t k = 0; k < idx.modes(); ++k) {
      const auto b = Eigen::Index(idx.battery_bath(k));
      const auto c = Eigen::Index(idx.charger_bath(k));
      hphi(b) += gk * phi(0);
      hphi(c) += gk * phi(1);
      hphi(0) += gk * phi(b);
      hphi(1) += gk * phi(c);
    }
    worst = std::max(worst, std::abs(phi.dot(hphi)));
  }
  return worst;
}

Real SecondOrderResult::splitting() const noexcept { return std::abs(eps2_plus - eps2_minus); }

SecondOrderResult second_order_corrections(const SystemParams& params, const LatticeEnvironment& env,
                                           const ProtocolSchedule& schedule, Real tail_tol, int n_cap) {
  const Real kappa = params.kappa();
  require_equal_segments(kappa, schedule);
  const Real wT = schedule.omega_T();
  const Real eps0 = params.omega_0() - 0.5 * wT;
  const VectorXr wk = env.mode_frequencies();
  const Real gk2 = env.mode_coupling() * env.mode_coupling();
  const Real g2 = env.g() * env.g();
  const Real spread = (eps0 - wk.array()).abs().maxCoeff();

  SecondOrderResult r;
  Real parseval = 0.0;
  for (int n = 0; n <= n_cap; ++n) {
    for (int sn : n == 0 ? std::vector<int>{0} : std::vector<int>{n, -n}) {
      const Real w = std::norm(fourier_coeff(kappa, schedule, sn));
      parseval += w;
      const ModeSums s = sums_for(wk, gk2, eps0, wT, w, sn);
      r.eps2_plus += s.plus;
      r.eps2_minus += s.minus;
    }
    // Every omitted term has |denominator| >= n omega_T - spread.
    const Real dmin = n * wT - spread;
    r.n_max = n;
    r.tail_bound = dmin > 0.0 ? g2 * std::max<Real>(0.0, 1.0 - parseval) / dmin : HUGE_VAL;
    if (n >= 1 && r.tail_bound < tail_tol) return r;
  }
  throw NumericalError("second-order sums did not converge within |n| <= " + std::to_string(n_cap), r.tail_bound);
}

Real delta_eps0_main_text(const SystemParams& params, const LatticeEnvironment& env,
                          const ProtocolSchedule& schedule, int n_max) {
  const Real kappa = params.kappa();
  require_equal_segments(kappa, schedule);
  const Real wT = schedule.omega_T();
  const VectorXr wk = env.mode_frequencies();
  const Real gk2 = env.mode_coupling() * env.mode_coupling();
  Real sum = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    const Real w = std::norm(fourier_coeff(kappa, schedule, n));
    const Real a = 0.5 - n;
    for (Eigen::Index k = 0; k < wk.size(); ++k) {
      const Real D = params.omega_0() - wk(k);
      sum += (1.0 - 2.0 * n) * gk2 * w / (a * a * wT - D * D / wT);
    }
  }
  return sum;
}

Real delta_eps0_large_kappa(const SystemParams& params, const LatticeEnvironment& env,
                            const ProtocolSchedule& schedule) {
  const Real f0 = std::norm(fourier_coeff(params.kappa(), schedule, 0));
  return 3.0 * env.g() * env.g() * f0 / params.kappa();
}

Real closed_form_interference(Real delta_eps0, Real kappa, const ProtocolSchedule& schedule, Real t) {
  const Complex y = y_of_t(kappa, schedule, t);
  return -0.5 * std::cos(delta_eps0 * t) * std::real(y * y * std::exp(-kI * (schedule.omega_T() * t)));
}

Real asymptotic_energy_closed_form(Real delta_eps0, Real kappa, const ProtocolSchedule& schedule, Real t) {
  return 0.5 + closed_form_interference(delta_eps0, kappa, schedule, t);
}

NonresonantZerothOrder nonresonant_zeroth_order(Real omega_0, Real delta, Real omega_T) {
  NonresonantZerothOrder z;
  z.epsilon_plus = omega_0 - 0.5 * omega_T + delta;
  z.epsilon_minus = omega_0 - 0.5 * omega_T - delta;
  return z;
}

}  // namespace qbsim
