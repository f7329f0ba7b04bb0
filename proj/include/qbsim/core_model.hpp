#ifndef QBSIM_CORE_MODEL_HPP
#define QBSIM_CORE_MODEL_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "qbsim/types.hpp"

namespace qbsim {

/// Battery/charger frequencies and their coupling. The centre frequency and
/// the detuning are always derived, never stored.
class SystemParams {
 public:
  SystemParams(Real omega_b, Real omega_c, Real kappa);

  /// Builds the pair from centre frequency omega_0 and half-detuning delta.
  static SystemParams from_center(Real omega_0, Real delta, Real kappa);

  Real omega_b() const noexcept { return omega_b_; }
  Real omega_c() const noexcept { return omega_c_; }
  Real kappa() const noexcept { return kappa_; }
  Real omega_0() const noexcept { return 0.5 * (omega_c_ + omega_b_); }
  Real delta() const noexcept { return 0.5 * (omega_c_ - omega_b_); }
  /// Rabi frequency sqrt(kappa^2 + delta^2) of the coupled pair.
  Real rabi() const noexcept;

  SystemParams with_kappa(Real kappa) const { return {omega_b_, omega_c_, kappa}; }

 private:
  Real omega_b_;
  Real omega_c_;
  Real kappa_;
};

/// One of the three windows of a charging-storing-discharging cycle.
enum class Stage { charging, storing, discharging };

/// Coupling switch value during a stage.
constexpr int switch_value(Stage s) noexcept { return s == Stage::storing ? 0 : 1; }

/// A maximal time interval on which the switching function is constant.
struct Segment {
  Real start;
  Real end;
  Stage stage;
  int f() const noexcept { return switch_value(stage); }
  Real length() const noexcept { return end - start; }
};

/// The cyclic switching protocol f(t). Intervals are half-open on the left:
/// f = 1 on (nT, nT+tc], 0 on (nT+tc, nT+tc+ts], 1 on (nT+tc+ts, (n+1)T].
class ProtocolSchedule {
 public:
  ProtocolSchedule(Real tau_c, Real tau_s, Real tau_d);

  /// tau_c = tau_s = tau_d = pi / (2 kappa).
  static ProtocolSchedule equal_segments(Real kappa);

  Real tau_c() const noexcept { return tau_c_; }
  Real tau_s() const noexcept { return tau_s_; }
  Real tau_d() const noexcept { return tau_d_; }
  Real period() const noexcept { return tau_c_ + tau_s_ + tau_d_; }
  Real omega_T() const noexcept { return 2.0 * kPi / period(); }

  /// Stage durations in cycle order.
  Real duration(Stage s) const noexcept;

  /// The segment containing t under the half-open convention. t = 0 belongs
  /// to the charging window of the first period.
  Segment segment_at(Real t) const;

  /// All constant-f pieces covering [t0, t1], zero-length stages skipped.
  std::vector<Segment> pieces(Real t0, Real t1) const;

  bool operator==(const ProtocolSchedule&) const = default;

 private:
  Real tau_c_;
  Real tau_s_;
  Real tau_d_;
};

/// f(t) in {0, 1}. Throws DomainError for t < 0.
int evaluate_protocol(const ProtocolSchedule& schedule, Real t);

/// Closed form of the integral of f over [0, t].
Real coupling_integral(const ProtocolSchedule& schedule, Real t);

/// Durations that bring the ideal cycle back to its initial state:
/// Omega tau_c = (1/2 + n1) pi, delta tau_s = n2 pi, Omega tau_d = (1/2 + n3) pi.
/// At delta = 0 the storing time is free and must be given in tau_s.
ProtocolSchedule optimal_schedule(Real kappa, Real delta, int n1, int n2, int n3,
                                  std::optional<Real> tau_s = std::nullopt);

/// Sample times on [0, t_max] that contain every segment boundary, with each
/// segment split into equal steps no longer than max_dt.
std::vector<Real> aligned_time_grid(const ProtocolSchedule& schedule, Real t_max, Real max_dt);

/// Fixed enumeration of the single-excitation sector:
/// 0 battery, 1 charger, then the battery bath and the charger bath, each in
/// row-major momentum order k = (2 pi mx / N, 2 pi my / N).
struct BasisIndex {
  std::size_t N;

  static constexpr std::size_t battery = 0;
  static constexpr std::size_t charger = 1;

  std::size_t modes() const noexcept { return N * N; }
  std::size_t dimension() const noexcept { return 2 + 2 * N * N; }
  std::size_t momentum(std::size_t mx, std::size_t my) const noexcept { return mx * N + my; }
  std::size_t battery_bath(std::size_t k) const noexcept { return 2 + k; }
  std::size_t charger_bath(std::size_t k) const noexcept { return 2 + N * N + k; }
};

}  // namespace qbsim

#endif  // QBSIM_CORE_MODEL_HPP
