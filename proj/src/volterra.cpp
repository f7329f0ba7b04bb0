#include <array>
#include <cmath>
#include <vector>

#include "qbsim/dynamics.hpp"
#include "qbsim/trace_io.hpp"

namespace qbsim {

namespace {

// History of one component split into real and imaginary parts so the
// convolution sums reduce to plain real dot products.
struct SplitHistory {
  VectorXr re;
  VectorXr im;
};

// Kernel samples nu(j dt), j = 0..steps, stored reversed for the dot
// products: rev(k) = nu((steps - k) dt).
struct ReversedKernel {
  Complex at0;
  VectorXr re;
  VectorXr im;
};

template <typename KernelFn>
ReversedKernel sample_kernel(KernelFn&& nu, Real dt, std::size_t steps) {
  ReversedKernel k;
  const auto n = Eigen::Index(steps + 1);
  k.re.resize(n);
  k.im.resize(n);
  for (std::size_t j = 0; j <= steps; ++j) {
    const Complex v = nu(static_cast<Real>(j) * dt);
    k.re(Eigen::Index(steps - j)) = v.real();
    k.im(Eigen::Index(steps - j)) = v.imag();
    if (j == 0) k.at0 = v;
  }
  return k;
}

// du/dt = -i A(t) u - int_0^t nu(t - s) u(s) ds, kernel acting diagonally.
// A is constant across each step (steps never straddle a segment boundary),
// so the implicit trapezoidal update is a Dim x Dim linear solve.
template <int Dim, typename GeneratorFn>
std::vector<Eigen::Matrix<Complex, Dim, 1>> integrate_volterra(const ReversedKernel& kernel, Real dt,
                                                               std::size_t steps,
                                                               const Eigen::Matrix<Complex, Dim, 1>& u0,
                                                               GeneratorFn&& generator) {
  using Vec = Eigen::Matrix<Complex, Dim, 1>;
  using Mat = Eigen::Matrix<Complex, Dim, Dim>;

  std::vector<Vec> u;
  u.reserve(steps + 1);
  u.push_back(u0);

  std::array<SplitHistory, Dim> hist;
  for (auto& h : hist) {
    h.re = VectorXr::Zero(Eigen::Index(steps + 1));
    h.im = VectorXr::Zero(Eigen::Index(steps + 1));
  }
  for (int c = 0; c < Dim; ++c) {
    hist[c].re(0) = u0(c).real();
    hist[c].im(0) = u0(c).imag();
  }

  const auto last = Eigen::Index(steps);
  Vec memory = Vec::Zero();  // I_n = int_0^{t_n} nu(t_n - s) u(s) ds
  for (std::size_t n = 0; n < steps; ++n) {
    const Mat A = generator(n);
    const auto len = Eigen::Index(n);
    const Eigen::Index start = last - len;  // rev index of nu_n
    const Complex nu_next(kernel.re(last - len - 1), kernel.im(last - len - 1));

    // S = dt (nu_{n+1} u_0 / 2 + sum_{j=1}^{n} nu_{n+1-j} u_j)
    Vec S;
    for (int c = 0; c < Dim; ++c) {
      Real re = 0.0;
      Real im = 0.0;
      if (len > 0) {
        const auto kr = kernel.re.segment(start, len);
        const auto ki = kernel.im.segment(start, len);
        const auto ur = hist[c].re.segment(1, len);
        const auto ui = hist[c].im.segment(1, len);
        re = kr.dot(ur) - ki.dot(ui);
        im = kr.dot(ui) + ki.dot(ur);
      }
      S(c) = dt * (0.5 * nu_next * u0(c) + Complex(re, im));
    }

    const Vec& un = u.back();
    const Vec rhs = un + 0.5 * dt * (-kI * (A * un) - memory) - 0.5 * dt * S;
    const Mat M = Mat::Identity() * (1.0 + 0.25 * dt * dt * kernel.at0) + (0.5 * dt) * kI * A;
    const Vec next = M.partialPivLu().solve(rhs);

    memory = S + 0.5 * dt * kernel.at0 * next;
    for (int c = 0; c < Dim; ++c) {
      hist[c].re(len + 1) = next(c).real();
      hist[c].im(len + 1) = next(c).imag();
    }
    u.push_back(next);
  }
  return u;
}

struct Grid {
  Real dt;
  std::size_t steps;
};

Grid make_grid(const SystemParams& params, const LatticeEnvironment& env, const ProtocolSchedule& schedule,
               Real t_max, Real requested_dt) {
  if (!(t_max >= 0.0)) throw DomainError("t_max must be non-negative");
  const Real dt = requested_dt > 0.0 ? aligned_time_step(schedule, requested_dt)
                                     : default_time_step(params, env, schedule);
  const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
  return {dt, steps};
}

template <typename Fn>
ReversedKernel kernel_for(const LatticeEnvironment& env, KernelVariant variant, Real dt, std::size_t steps,
                          Fn&& modulate) {
  if (variant == KernelVariant::discrete) {
    return sample_kernel([&](Real x) { return memory_kernel_discrete(env, x) * modulate(x); }, dt, steps);
  }
  return sample_kernel([&](Real x) { return memory_kernel_continuum(env, x) * modulate(x); }, dt, steps);
}

VolterraResult volterra_once(const SystemParams& params, const LatticeEnvironment& env,
                             const ProtocolSchedule& schedule, Real t_max, Real dt_request,
                             KernelVariant variant) {
  const Grid grid = make_grid(params, env, schedule, t_max, dt_request);
  const auto kernel = kernel_for(env, variant, grid.dt, grid.steps, [](Real) { return Complex(1.0, 0.0); });

  using Vec2 = Eigen::Matrix<Complex, 2, 1>;
  using Mat2 = Eigen::Matrix<Complex, 2, 2>;
  auto generator = [&](std::size_t n) {
    const Real mid = (static_cast<Real>(n) + 0.5) * grid.dt;
    const Real k = params.kappa() * evaluate_protocol(schedule, mid);
    Mat2 A;
    A << params.omega_b(), k, k, params.omega_c();
    return A;
  };
  const auto u = integrate_volterra<2>(kernel, grid.dt, grid.steps, Vec2(0.0, 1.0), generator);

  VolterraResult out;
  out.dt = grid.dt;
  out.trace.times.reserve(u.size());
  out.trace.energies.reserve(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    out.trace.times.push_back(static_cast<Real>(n) * grid.dt);
    out.trace.energies.push_back(params.omega_b() * std::norm(u[n](0)));
    out.battery.push_back(u[n](0));
    out.charger.push_back(u[n](1));
  }
  out.trace.metadata = describe_run(params, env, schedule);
  out.trace.metadata["route"] = "volterra";
  out.trace.metadata["kernel"] = to_string(variant);
  out.trace.metadata["dt"] = format_real(grid.dt);
  out.trace.metadata["t_max"] = format_real(t_max);
  return out;
}

}  // namespace

const char* to_string(KernelVariant k) noexcept {
  return k == KernelVariant::discrete ? "discrete" : "continuum";
}

Real aligned_time_step(const ProtocolSchedule& schedule, Real requested) {
  if (!(requested > 0.0)) throw DomainError("time step must be positive");
  const Real base = std::min(schedule.tau_c(), schedule.tau_d());
  const Real n = std::max<Real>(1.0, std::ceil(base / requested - 1e-9));
  const Real dt = base / n;
  for (Real len : {schedule.tau_c(), schedule.tau_s(), schedule.tau_d()}) {
    const Real steps = len / dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) {
      throw DomainError("segment durations are not commensurate with a uniform step");
    }
  }
  return dt;
}

Real default_time_step(const SystemParams& params, const LatticeEnvironment& env,
                       const ProtocolSchedule& schedule) {
  Real shortest = std::min(schedule.tau_c(), schedule.tau_d());
  if (schedule.tau_s() > 0.0) shortest = std::min(shortest, schedule.tau_s());
  const Real fastest = 2.0 * kPi / (env.varpi() + 4.0 * env.q() + params.omega_0() + 2.0 * params.kappa());
  return aligned_time_step(schedule, std::min(shortest, fastest) / 40.0);
}

VolterraResult solve_volterra(const SystemParams& params, const LatticeEnvironment& env,
                              const ProtocolSchedule& schedule, Real t_max, const VolterraOptions& options) {
  VolterraResult coarse = volterra_once(params, env, schedule, t_max, options.dt, options.kernel);
  if (!options.tolerance) return coarse;

  const VolterraResult fine = volterra_once(params, env, schedule, t_max, 0.5 * coarse.dt, options.kernel);
  Real diff = 0.0;
  for (std::size_t n = 0; n < coarse.battery.size() && 2 * n < fine.battery.size(); ++n) {
    diff = std::max(diff, std::abs(coarse.battery[n] - fine.battery[2 * n]));
    diff = std::max(diff, std::abs(coarse.charger[n] - fine.charger[2 * n]));
  }
  coarse.error_estimate = diff * 4.0 / 3.0;
  coarse.trace.metadata["error_estimate"] = format_real(coarse.error_estimate);
  if (coarse.error_estimate > *options.tolerance) {
    throw NumericalError("Volterra step did not meet the requested tolerance (estimate " +
                             format_real(coarse.error_estimate) + ")",
                         coarse.error_estimate);
  }
  return coarse;
}

std::vector<Complex> VpmResult::battery(Real omega_0) const {
  std::vector<Complex> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i] = 0.5 * (v_plus[i] - v_minus[i]) * std::exp(-kI * (omega_0 * times[i]));
  }
  return out;
}

std::vector<Complex> VpmResult::charger(Real omega_0) const {
  std::vector<Complex> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i] = 0.5 * (v_plus[i] + v_minus[i]) * std::exp(-kI * (omega_0 * times[i]));
  }
  return out;
}

VpmResult solve_vpm(const SystemParams& params, const LatticeEnvironment& env,
                    const ProtocolSchedule& schedule, Real t_max, const VolterraOptions& options) {
  if (params.delta() != 0.0) throw DomainError("decoupled v+- equations need a resonant pair");
  const Grid grid = make_grid(params, env, schedule, t_max, options.dt);
  const Real w0 = params.omega_0();
  const auto kernel = kernel_for(env, options.kernel, grid.dt, grid.steps,
                                 [w0](Real x) { return std::exp(kI * (w0 * x)); });

  using Vec1 = Eigen::Matrix<Complex, 1, 1>;
  auto solve_branch = [&](Real sign) {
    auto generator = [&](std::size_t n) {
      const Real mid = (static_cast<Real>(n) + 0.5) * grid.dt;
      return Vec1(sign * params.kappa() * evaluate_protocol(schedule, mid));
    };
    return integrate_volterra<1>(kernel, grid.dt, grid.steps, Vec1(1.0), generator);
  };
  const auto plus = solve_branch(+1.0);
  const auto minus = solve_branch(-1.0);

  VpmResult out;
  out.dt = grid.dt;
  for (std::size_t n = 0; n < plus.size(); ++n) {
    out.times.push_back(static_cast<Real>(n) * grid.dt);
    out.v_plus.push_back(plus[n](0));
    out.v_minus.push_back(minus[n](0));
  }
  return out;
}

}  // namespace qbsim
