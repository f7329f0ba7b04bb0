#include "qbsim/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qbsim {

namespace {

// Boundary snapping tolerance relative to the period. Times handed in by
// callers are sums of durations and carry a few ulps of round-off.
constexpr Real kBoundaryTol = 1e-12;

struct CyclePosition {
  Real period_start;
  Real offset;  // in [0, T)
};

// Position of t for the interval that begins at t (left-closed view).
CyclePosition position_after(const ProtocolSchedule& s, Real t) {
  const Real T = s.period();
  Real n = std::floor(t / T);
  Real r = t - n * T;
  if (r >= T - kBoundaryTol * T) {
    n += 1.0;
    r = 0.0;
  } else if (r < kBoundaryTol * T) {
    r = 0.0;
  }
  return {n * T, r};
}

Segment segment_after(const ProtocolSchedule& s, Real t) {
  const auto [t0, r] = position_after(s, t);
  const Real tol = kBoundaryTol * s.period();
  const Real b1 = s.tau_c();
  const Real b2 = s.tau_c() + s.tau_s();
  if (r < b1 - tol) return {t0, t0 + b1, Stage::charging};
  if (r < b2 - tol) return {t0 + b1, t0 + b2, Stage::storing};
  return {t0 + b2, t0 + s.period(), Stage::discharging};
}

}  // namespace

SystemParams::SystemParams(Real omega_b, Real omega_c, Real kappa)
    : omega_b_(omega_b), omega_c_(omega_c), kappa_(kappa) {
  if (!(omega_b > 0.0) || !(omega_c > 0.0)) {
    throw DomainError("system frequencies must be positive");
  }
  if (!(kappa >= 0.0)) throw DomainError("coupling kappa must be non-negative");
}

SystemParams SystemParams::from_center(Real omega_0, Real delta, Real kappa) {
  return {omega_0 - delta, omega_0 + delta, kappa};
}

Real SystemParams::rabi() const noexcept { return std::hypot(kappa_, delta()); }

ProtocolSchedule::ProtocolSchedule(Real tau_c, Real tau_s, Real tau_d)
    : tau_c_(tau_c), tau_s_(tau_s), tau_d_(tau_d) {
  if (!(tau_c > 0.0) || !(tau_d > 0.0)) {
    throw DomainError("charging and discharging durations must be positive");
  }
  if (!(tau_s >= 0.0)) throw DomainError("storing duration must be non-negative");
}

ProtocolSchedule ProtocolSchedule::equal_segments(Real kappa) {
  if (!(kappa > 0.0)) throw DomainError("equal-segment schedule needs kappa > 0");
  const Real tau = kPi / (2.0 * kappa);
  return {tau, tau, tau};
}

Real ProtocolSchedule::duration(Stage s) const noexcept {
  switch (s) {
    case Stage::charging: return tau_c_;
    case Stage::storing: return tau_s_;
    case Stage::discharging: return tau_d_;
  }
  return 0.0;
}

Segment ProtocolSchedule::segment_at(Real t) const {
  if (t < 0.0) throw DomainError("protocol evaluated at negative time");
  if (t == 0.0) return {0.0, tau_c_, Stage::charging};
  // (a, b] membership: the segment containing t is the one that starts
  // strictly before it.
  const Real T = period();
  Real n = std::floor(t / T);
  Real r = t - n * T;
  const Real tol = kBoundaryTol * T;
  if (r <= tol) {
    n -= 1.0;
    r = T;
  }
  const Real t0 = n * T;
  if (r <= tau_c_ + tol) return {t0, t0 + tau_c_, Stage::charging};
  if (r <= tau_c_ + tau_s_ + tol) return {t0 + tau_c_, t0 + tau_c_ + tau_s_, Stage::storing};
  return {t0 + tau_c_ + tau_s_, t0 + T, Stage::discharging};
}

std::vector<Segment> ProtocolSchedule::pieces(Real t0, Real t1) const {
  if (t0 < 0.0 || t1 < t0) throw DomainError("invalid time window");
  std::vector<Segment> out;
  const Real tol = kBoundaryTol * period();
  Real cursor = t0;
  while (t1 - cursor > tol) {
    Segment seg = segment_after(*this, cursor);
    const Real end = std::min(seg.end, t1);
    out.push_back({cursor, end, seg.stage});
    cursor = (t1 - seg.end > tol) ? seg.end : t1;
  }
  return out;
}

int evaluate_protocol(const ProtocolSchedule& schedule, Real t) {
  return schedule.segment_at(t).f();
}

Real coupling_integral(const ProtocolSchedule& schedule, Real t) {
  if (t < 0.0) throw DomainError("coupling integral at negative time");
  const Real T = schedule.period();
  const Real n = std::floor(t / T);
  const Real r = t - n * T;
  const Real per_cycle = schedule.tau_c() + schedule.tau_d();
  const Real b1 = schedule.tau_c();
  const Real b2 = schedule.tau_c() + schedule.tau_s();
  Real partial = 0.0;
  if (r <= b1) {
    partial = r;
  } else if (r <= b2) {
    partial = b1;
  } else {
    partial = b1 + (r - b2);
  }
  return n * per_cycle + partial;
}

ProtocolSchedule optimal_schedule(Real kappa, Real delta, int n1, int n2, int n3,
                                  std::optional<Real> tau_s) {
  if (!(kappa > 0.0)) throw DomainError("optimal schedule needs kappa > 0");
  if (n1 < 0 || n3 < 0) throw DomainError("n1 and n3 must be non-negative");
  const Real omega = std::hypot(kappa, delta);
  const Real tc = (0.5 + n1) * kPi / omega;
  const Real td = (0.5 + n3) * kPi / omega;
  Real ts = 0.0;
  if (tau_s) {
    ts = *tau_s;
  } else if (delta == 0.0) {
    throw DomainError("storing duration unconstrained at resonance");
  } else {
    if (n2 < 1) throw DomainError("n2 must be positive");
    ts = n2 * kPi / std::abs(delta);
  }
  return {tc, ts, td};
}

std::vector<Real> aligned_time_grid(const ProtocolSchedule& schedule, Real t_max, Real max_dt) {
  if (!(max_dt > 0.0)) throw DomainError("grid spacing must be positive");
  std::vector<Real> grid{0.0};
  for (const Segment& seg : schedule.pieces(0.0, t_max)) {
    const auto steps = static_cast<std::size_t>(std::ceil(seg.length() / max_dt - 1e-9));
    const std::size_t n = std::max<std::size_t>(steps, 1);
    for (std::size_t j = 1; j < n; ++j) {
      grid.push_back(seg.start + seg.length() * static_cast<Real>(j) / static_cast<Real>(n));
    }
    grid.push_back(seg.end);
  }
  return grid;
}

}  // namespace qbsim
