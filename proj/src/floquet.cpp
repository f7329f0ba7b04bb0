#include "qbsim/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace qbsim {

namespace {

MatrixXc expm_hermitian(const MatrixXr& H, Real duration) {
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian diagonalization failed");
  const MatrixXr& V = es.eigenvectors();
  const auto phase = (es.eigenvalues().array() * duration);
  MatrixXc U(V.rows(), V.cols());
  U.real() = V * phase.cos().matrix().asDiagonal() * V.transpose();
  U.imag() = -(V * phase.sin().matrix().asDiagonal() * V.transpose());
  return U;
}

std::vector<std::size_t> ascending_order(const std::vector<Real>& key) {
  std::vector<std::size_t> order(key.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return order;
}

Real strict_upper_max(const MatrixXc& T) {
  Real worst = 0.0;
  for (Eigen::Index j = 0; j < T.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) worst = std::max(worst, std::abs(T(i, j)));
  return worst;
}

int stage_index(Stage s) { return static_cast<int>(s); }

}  // namespace

FloquetOperator::FloquetOperator(std::shared_ptr<const SegmentPropagators> propagators)
    : propagators_(std::move(propagators)) {
  if (!propagators_) throw DomainError("null propagators");
  const auto& p = *propagators_;
  bright_ = p.stage_unitary(Stage::discharging) * p.stage_unitary(Stage::storing) *
            p.stage_unitary(Stage::charging);
}

VectorXc FloquetOperator::apply(const VectorXc& full) const {
  const BrightBasis& basis = propagators_->basis();
  if (std::size_t(full.size()) != basis.full_dimension()) throw DomainError("vector does not match the lattice size");
  return basis.embed(bright_ * basis.project(full)) + basis.evolve_dark(basis.dark_part(full), period());
}

MatrixXc FloquetOperator::dense() const {
  const auto n = Eigen::Index(propagators_->basis().full_dimension());
  MatrixXc U(n, n);
  VectorXc e = VectorXc::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    U.col(j) = apply(e);
    e(j) = 0.0;
  }
  return U;
}

FloquetOperator one_period_operator(const SystemParams& params, const LatticeEnvironment& env,
                                    const ProtocolSchedule& schedule) {
  return FloquetOperator(std::make_shared<const SegmentPropagators>(params, env, schedule));
}

MatrixXc one_period_operator_dense(const SystemParams& params, const LatticeEnvironment& env,
                                   const ProtocolSchedule& schedule) {
  const MatrixXr on = build_hamiltonian(params, env, 1);
  const MatrixXr off = build_hamiltonian(params, env, 0);
  return expm_hermitian(on, schedule.tau_d()) * expm_hermitian(off, schedule.tau_s()) *
         expm_hermitian(on, schedule.tau_c());
}

Real fold_quasienergy(Real energy, Real omega_T) {
  if (!(omega_T > 0.0)) throw DomainError("omega_T must be positive");
  Real r = energy - omega_T * std::ceil(energy / omega_T - 0.5);
  if (r <= -0.5 * omega_T) r += omega_T;
  if (r > 0.5 * omega_T) r -= omega_T;
  return r;
}

Real quasienergy_from_eigenvalue(Complex lambda, Real period) {
  if (!(period > 0.0)) throw DomainError("period must be positive");
  return fold_quasienergy(-std::arg(lambda) / period, 2.0 * kPi / period);
}

Real quasienergy_gap(Real a, Real b, Real omega_T) { return std::abs(fold_quasienergy(a - b, omega_T)); }

std::vector<std::array<Real, 2>> QuasienergySpectrum::folded_band() const {
  const Real half = 0.5 * omega_T;
  const Real length = band_max - band_min;
  if (length >= omega_T) return {{-half, half}};
  const Real a = fold_quasienergy(band_min, omega_T);
  const Real b = a + length;
  if (b <= half) return {{a, b}};
  return {{a, half}, {-half, b - omega_T}};
}

Real QuasienergySpectrum::distance_to_band(Real eps) const {
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto& arc : folded_band()) {
    if (eps >= arc[0] && eps <= arc[1]) return 0.0;
    best = std::min({best, quasienergy_gap(eps, arc[0], omega_T), quasienergy_gap(eps, arc[1], omega_T)});
  }
  return best;
}

Real QuasienergySpectrum::mean_band_spacing() const {
  const Real covered = std::min(band_max - band_min, omega_T);
  std::size_t inside = 0;
  for (Eigen::Index i = 0; i < epsilon.size(); ++i) {
    if (distance_to_band(epsilon(i)) == 0.0) ++inside;
  }
  return inside ? covered / static_cast<Real>(inside) : covered;
}

QuasienergySpectrum quasienergy_spectrum(const MatrixXc& U_T, const ProtocolSchedule& schedule,
                                         std::array<Real, 2> band, Real normality_tol) {
  if (U_T.rows() != U_T.cols() || U_T.rows() < 2) throw DomainError("U_T must be square");
  Eigen::ComplexSchur<MatrixXc> schur(U_T);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const MatrixXc& T = schur.matrixT();
  const Real off = strict_upper_max(T);
  if (off > normality_tol) throw NumericalError("U_T is not normal to working precision", off);

  const Real period = schedule.period();
  const auto n = std::size_t(T.rows());
  std::vector<Real> eps(n);
  for (std::size_t i = 0; i < n; ++i) eps[i] = quasienergy_from_eigenvalue(T(Eigen::Index(i), Eigen::Index(i)), period);
  const auto order = ascending_order(eps);

  QuasienergySpectrum s;
  s.omega_T = schedule.omega_T();
  s.band_min = band[0];
  s.band_max = band[1];
  s.epsilon.resize(Eigen::Index(n));
  s.system_weight.resize(Eigen::Index(n));
  s.eigenvectors.resize(T.rows(), T.cols());
  const MatrixXc& Q = schur.matrixU();
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = Eigen::Index(order[i]);
    const auto dst = Eigen::Index(i);
    s.epsilon(dst) = eps[order[i]];
    s.eigenvectors.col(dst) = Q.col(src);
    s.system_weight(dst) = std::norm(Q(0, src)) + std::norm(Q(1, src));
  }
  return s;
}

QuasienergySpectrum quasienergy_spectrum(const FloquetOperator& U_T, const FbsCriteria& criteria) {
  const SegmentPropagators& p = U_T.propagators();
  const BrightBasis& basis = p.basis();
  const Real period = U_T.period();
  const Real omega_T = p.schedule().omega_T();

  Eigen::ComplexSchur<MatrixXc> schur(U_T.bright());
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const MatrixXc& T = schur.matrixT();
  const Real off = strict_upper_max(T);
  if (off > 1e-8) throw NumericalError("bright U_T is not normal to working precision", off);

  const auto nb = std::size_t(T.rows());
  const auto nd = basis.dark_dimension();
  const VectorXr dark_w = basis.dark_frequencies();
  std::vector<Real> eps(nb + nd);
  for (std::size_t i = 0; i < nb; ++i) eps[i] = quasienergy_from_eigenvalue(T(Eigen::Index(i), Eigen::Index(i)), period);
  for (std::size_t i = 0; i < nd; ++i) eps[nb + i] = fold_quasienergy(dark_w(Eigen::Index(i)), omega_T);
  const auto order = ascending_order(eps);

  const auto full = Eigen::Index(basis.full_dimension());
  const MatrixXc& Q = schur.matrixU();
  const MatrixXr D = basis.dark_vectors();

  QuasienergySpectrum s;
  s.omega_T = omega_T;
  s.band_min = p.env().band_min();
  s.band_max = p.env().band_max();
  s.epsilon.resize(full);
  s.system_weight.resize(full);
  s.eigenvectors.resize(full, full);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t src = order[i];
    const auto dst = Eigen::Index(i);
    s.epsilon(dst) = eps[src];
    if (src < nb) {
      const auto c = Eigen::Index(src);
      s.eigenvectors.col(dst) = basis.embed(Q.col(c));
      s.system_weight(dst) = std::norm(Q(0, c)) + std::norm(Q(1, c));
    } else {
      s.eigenvectors.col(dst) = D.col(Eigen::Index(src - nb)).cast<Complex>();
      s.system_weight(dst) = 0.0;
    }
  }
  s.fbs_indices = identify_fbs(s, criteria);
  return s;
}

std::vector<std::size_t> identify_fbs(const QuasienergySpectrum& spectrum, const FbsCriteria& criteria) {
  std::vector<std::size_t> out;
  if (spectrum.band_max - spectrum.band_min >= spectrum.omega_T) return out;
  const Real gap = criteria.gap_tolerance ? *criteria.gap_tolerance
                                          : criteria.gap_factor * spectrum.mean_band_spacing();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto k = Eigen::Index(i);
    if (spectrum.system_weight(k) >= criteria.weight_threshold &&
        spectrum.distance_to_band(spectrum.epsilon(k)) > gap) {
      out.push_back(i);
    }
  }
  return out;
}

FloquetMode::FloquetMode(std::shared_ptr<const SegmentPropagators> propagators, const VectorXc& phi0,
                         Real epsilon, std::size_t n_samples)
    : propagators_(std::move(propagators)), phi0_(phi0), epsilon_(epsilon) {
  const auto& p = *propagators_;
  const ProtocolSchedule& sched = p.schedule();
  const BrightBasis& basis = p.basis();

  // Bright coordinates at the start of each stage, rotated into the eigenbasis
  // of that stage's Hamiltonian so the battery amplitude is one dot product.
  VectorXc bright = basis.project(phi0_);
  Real start = 0.0;
  for (Stage s : {Stage::charging, Stage::storing, Stage::discharging}) {
    const int f = switch_value(s);
    const MatrixXr& V = p.eigenvectors(f);
    VectorXc c(V.cols());
    c.real() = V.transpose() * bright.real();
    c.imag() = V.transpose() * bright.imag();
    stage_coefficients_[std::size_t(stage_index(s))] = c;
    stage_start_[std::size_t(stage_index(s))] = start;
    bright = p.stage_unitary(s) * bright;
    start += sched.duration(s);
  }

  const Real T = sched.period();
  const std::size_t n = std::max<std::size_t>(n_samples, 2);
  times_.reserve(n);
  samples_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Real t = T * static_cast<Real>(i) / static_cast<Real>(n - 1);
    times_.push_back(t);
    samples_.push_back(state_at(t));
  }
}

VectorXc FloquetMode::state_at(Real t) const {
  const Real T = propagators_->schedule().period();
  const Real tt = t - T * std::floor(t / T);
  return std::exp(kI * (epsilon_ * tt)) * propagators_->advance(phi0_, 0.0, tt);
}

Complex FloquetMode::battery_amplitude(Real t) const {
  const auto& p = *propagators_;
  const Real T = p.schedule().period();
  const Real tt = t - T * std::floor(t / T);
  const Stage s = tt <= 0.0 ? Stage::charging : p.schedule().segment_at(tt).stage;
  const auto k = std::size_t(stage_index(s));
  const int f = switch_value(s);
  const VectorXr& E = p.energies(f);
  const MatrixXr& V = p.eigenvectors(f);
  const VectorXc& c = stage_coefficients_[k];
  const Real dt = tt - stage_start_[k];
  Complex amp{0.0, 0.0};
  for (Eigen::Index i = 0; i < c.size(); ++i) amp += V(0, i) * c(i) * std::exp(-kI * (E(i) * dt));
  return std::exp(kI * (epsilon_ * tt)) * amp;
}

FloquetMode floquet_mode(const FloquetOperator& U_T, const VectorXc& phi0, Real epsilon, std::size_t n_samples) {
  const VectorXc image = U_T.apply(phi0);
  const Real residual = (image - std::exp(-kI * (epsilon * U_T.period())) * phi0).norm();
  if (residual > 1e-6 * std::max<Real>(1.0, phi0.norm())) {
    throw DomainError("not a Floquet eigenpair (residual " + std::to_string(residual) + ")");
  }
  return FloquetMode(U_T.shared_propagators(), phi0, epsilon, n_samples);
}

std::vector<FloquetMode> fbs_modes(const FloquetOperator& U_T, const QuasienergySpectrum& spectrum,
                                   std::size_t n_samples) {
  std::vector<FloquetMode> out;
  out.reserve(spectrum.fbs_indices.size());
  for (std::size_t i : spectrum.fbs_indices) {
    const auto k = Eigen::Index(i);
    out.push_back(floquet_mode(U_T, spectrum.eigenvectors.col(k), spectrum.epsilon(k), n_samples));
  }
  return out;
}

std::vector<Complex> fbs_overlaps(const std::vector<FloquetMode>& modes, const ExcitationState& initial) {
  std::vector<Complex> c;
  c.reserve(modes.size());
  for (const auto& m : modes) {
    if (std::size_t(m.initial().size()) != initial.dimension()) throw DomainError("initial state does not match the lattice size");
    c.push_back(m.initial().dot(initial.amplitudes()));
  }
  return c;
}

Real asymptotic_energy(const std::vector<FloquetMode>& modes, const ExcitationState& initial, Real t) {
  if (modes.empty()) return 0.0;
  const auto c = fbs_overlaps(modes, initial);
  Complex amp{0.0, 0.0};
  for (std::size_t j = 0; j < modes.size(); ++j) {
    amp += c[j] * std::exp(-kI * (modes[j].epsilon() * t)) * modes[j].battery_amplitude(t);
  }
  return modes.front().omega_b() * std::norm(amp);
}

EnergyTerms decompose_energy_terms(const std::vector<FloquetMode>& modes, const ExcitationState& initial, Real t) {
  if (modes.size() != 2) {
    throw DomainError("energy decomposition needs exactly two bound states, found " + std::to_string(modes.size()));
  }
  const auto c = fbs_overlaps(modes, initial);
  const Real wb = modes.front().omega_b();
  std::array<Complex, 2> a{};
  EnergyTerms out;
  for (std::size_t j = 0; j < 2; ++j) {
    const Complex phi_b = modes[j].battery_amplitude(t);
    a[j] = c[j] * std::exp(-kI * (modes[j].epsilon() * t)) * phi_b;
    out.matrix_element[j] = std::norm(phi_b);
    out.weight[j] = std::norm(c[j]);
    out.diagonal[j] = wb * out.weight[j] * out.matrix_element[j];
  }
  out.interference = wb * 2.0 * std::real(a[0] * std::conj(a[1]));
  return out;
}

}  // namespace qbsim
