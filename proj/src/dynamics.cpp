#include "qbsim/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "qbsim/trace_io.hpp"

namespace qbsim {

namespace {

// Real matrix times complex vector without promoting the matrix.
VectorXc apply_real(const MatrixXr& A, const VectorXc& v) {
  VectorXc out(A.rows());
  out.real() = A * v.real();
  out.imag() = A * v.imag();
  return out;
}

VectorXc apply_real_transposed(const MatrixXr& A, const VectorXc& v) {
  VectorXc out(A.cols());
  out.real() = A.transpose() * v.real();
  out.imag() = A.transpose() * v.imag();
  return out;
}

}  // namespace

ExcitationState::ExcitationState(VectorXc amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2 || (amplitudes_.size() - 2) % 2 != 0) {
    throw DomainError("excitation state has an invalid dimension");
  }
  const auto modes = std::size_t(amplitudes_.size() - 2) / 2;
  const auto N = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<Real>(modes))));
  if (N * N != modes) throw DomainError("excitation state dimension is not 2 + 2N^2");
}

ExcitationState ExcitationState::charger_excited(std::size_t N) {
  VectorXc v = VectorXc::Zero(Eigen::Index(BasisIndex{N}.dimension()));
  v(BasisIndex::charger) = 1.0;
  return ExcitationState(std::move(v));
}

SegmentPropagators::SegmentPropagators(const SystemParams& params, const LatticeEnvironment& env,
                                       const ProtocolSchedule& schedule)
    : params_(params), env_(env), schedule_(schedule), basis_(env) {
  for (int f : {0, 1}) {
    Eigen::SelfAdjointEigenSolver<MatrixXr> es(build_bright_hamiltonian(params, basis_, env, f));
    if (es.info() != Eigen::Success) throw NumericalError("bright Hamiltonian diagonalization failed");
    (f ? energies_on_ : energies_off_) = es.eigenvalues();
    (f ? vectors_on_ : vectors_off_) = es.eigenvectors();
  }
  stage_charging_ = unitary(1, schedule.tau_c());
  stage_storing_ = unitary(0, schedule.tau_s());
  stage_discharging_ = unitary(1, schedule.tau_d());
}

MatrixXc SegmentPropagators::unitary(int f, Real duration) const {
  const MatrixXr& V = eigenvectors(f);
  const VectorXr& E = energies(f);
  const VectorXr c = (E.array() * duration).cos().matrix();
  const VectorXr s = (-(E.array() * duration).sin()).matrix();
  MatrixXc U(V.rows(), V.cols());
  U.real() = V * c.asDiagonal() * V.transpose();
  U.imag() = V * s.asDiagonal() * V.transpose();
  return U;
}

const MatrixXc& SegmentPropagators::stage_unitary(Stage s) const {
  switch (s) {
    case Stage::charging: return stage_charging_;
    case Stage::storing: return stage_storing_;
    case Stage::discharging: return stage_discharging_;
  }
  return stage_charging_;
}

VectorXc SegmentPropagators::advance_bright(const VectorXc& bright, Real t0, Real t1) const {
  VectorXc v = bright;
  for (const Segment& seg : schedule_.pieces(t0, t1)) {
    const int f = seg.f();
    VectorXc c = apply_real_transposed(eigenvectors(f), v);
    const VectorXr& E = energies(f);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-kI * (E(i) * seg.length()));
    v = apply_real(eigenvectors(f), c);
  }
  return v;
}

VectorXc SegmentPropagators::advance(const VectorXc& full, Real t0, Real t1) const {
  const VectorXc bright = advance_bright(basis_.project(full), t0, t1);
  return basis_.embed(bright) + basis_.evolve_dark(basis_.dark_part(full), t1 - t0);
}

Real SegmentPropagators::unitarity_defect() const {
  Real worst = 0.0;
  for (Stage s : {Stage::charging, Stage::storing, Stage::discharging}) {
    const MatrixXc& U = stage_unitary(s);
    const MatrixXc D = U.adjoint() * U - MatrixXc::Identity(U.rows(), U.cols());
    worst = std::max(worst, D.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::size_t exact_memory_estimate(const LatticeEnvironment& env, std::size_t samples, bool keep_states) {
  const BrightBasis basis(env);
  const std::size_t d = basis.dimension();
  const std::size_t full = basis.full_dimension();
  std::size_t bytes = d * d * (2 * sizeof(Real) + 3 * sizeof(Complex));
  bytes += samples * (2 * sizeof(Real) + 2 * sizeof(Complex));
  if (keep_states) bytes += samples * full * sizeof(Complex);
  return bytes;
}

ExactResult propagate_exact(const SystemParams& params, const LatticeEnvironment& env,
                            const ProtocolSchedule& schedule, const ExcitationState& initial,
                            Real t_max, Real sample_dt, const ExactOptions& options) {
  if (!(t_max >= 0.0) || !(sample_dt > 0.0)) throw DomainError("invalid propagation window");
  const auto samples = static_cast<std::size_t>(t_max / sample_dt) + 4 * static_cast<std::size_t>(t_max / schedule.period() + 2);
  const std::size_t need = exact_memory_estimate(env, samples, options.keep_states);
  if (need > options.memory_cap_bytes) {
    std::ostringstream os;
    os << "exact propagation needs ~" << need / (1 << 20) << " MiB, cap is "
       << options.memory_cap_bytes / (1 << 20) << " MiB";
    throw ResourceError(os.str());
  }
  const SegmentPropagators propagators(params, env, schedule);
  return propagate_exact(propagators, initial, t_max, sample_dt, options);
}

ExactResult propagate_exact(const SegmentPropagators& propagators, const ExcitationState& initial,
                            Real t_max, Real sample_dt, const ExactOptions& options) {
  const BrightBasis& basis = propagators.basis();
  if (initial.dimension() != basis.full_dimension()) {
    throw DomainError("initial state does not match the lattice size");
  }
  const std::vector<Real> grid = aligned_time_grid(propagators.schedule(), t_max, sample_dt);
  const Real omega_b = propagators.params().omega_b();

  ExactResult out;
  out.trace.times = grid;
  out.trace.energies.reserve(grid.size());
  out.battery.reserve(grid.size());
  out.charger.reserve(grid.size());

  VectorXc bright = basis.project(initial.amplitudes());
  const VectorXc dark = basis.dark_part(initial.amplitudes());
  const Real dark_norm2 = dark.squaredNorm();
  const Real norm0 = initial.amplitudes().squaredNorm();

  Real previous = 0.0;
  for (Real t : grid) {
    if (t > previous) bright = propagators.advance_bright(bright, previous, t);
    previous = t;
    out.battery.push_back(bright(0));
    out.charger.push_back(bright(1));
    out.trace.energies.push_back(omega_b * std::norm(bright(0)));
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(bright.squaredNorm() + dark_norm2 - norm0));
    if (options.keep_states) out.states.push_back(basis.embed(bright) + basis.evolve_dark(dark, t));
  }

  out.trace.metadata = describe_run(propagators.params(), propagators.env(), propagators.schedule());
  out.trace.metadata["route"] = "exact";
  out.trace.metadata["sample_dt"] = format_real(sample_dt);
  out.trace.metadata["t_max"] = format_real(t_max);
  return out;
}

}  // namespace qbsim
