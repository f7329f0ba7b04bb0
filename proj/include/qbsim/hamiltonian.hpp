#ifndef QBSIM_HAMILTONIAN_HPP
#define QBSIM_HAMILTONIAN_HPP

#include <cstddef>
#include <vector>

#include "qbsim/core_model.hpp"
#include "qbsim/environment.hpp"

namespace qbsim {

/// Single-excitation Hamiltonian at switch value f, in the BasisIndex order:
/// system block [[omega_b, kappa f], [kappa f, omega_c]], diag(omega_k) for
/// each bath, and g_k couplings battery <-> battery bath, charger <-> charger
/// bath only. Real symmetric; dimension 2 + 2N^2.
MatrixXr build_hamiltonian(const SystemParams& params, const LatticeEnvironment& env, int f);

/// Bath momenta sharing one frequency.
struct ModeGroup {
  Real omega;
  std::vector<std::size_t> members;  // momentum indices
};

/// Exact reduction of the single-excitation sector.
///
/// Within a group of degenerate bath modes only the uniform superposition
/// couples to the system; every orthogonal combination is an eigenvector of
/// H(f) for both f with eigenvalue omega_group. The "bright" space holds the
/// two system states plus one uniform mode per group and per bath, ordered
/// [battery, charger, battery groups..., charger groups...].
class BrightBasis {
 public:
  explicit BrightBasis(const LatticeEnvironment& env);

  std::size_t full_dimension() const noexcept { return 2 + 2 * modes_; }
  std::size_t dimension() const noexcept { return 2 + 2 * groups_.size(); }
  std::size_t dark_dimension() const noexcept { return full_dimension() - dimension(); }
  const std::vector<ModeGroup>& groups() const noexcept { return groups_; }

  /// Frequency of every full-basis bath index (system entries are zero).
  const VectorXr& full_frequencies() const noexcept { return full_frequencies_; }

  /// Coordinates of a full-basis vector in the bright space.
  VectorXc project(const VectorXc& full) const;
  /// Full-basis vector of bright coordinates.
  VectorXc embed(const VectorXc& bright) const;
  /// full - embed(project(full)): the component that never meets the system.
  VectorXc dark_part(const VectorXc& full) const;
  /// Dark components evolve by a phase per bath mode.
  VectorXc evolve_dark(const VectorXc& dark, Real duration) const;

  /// Orthonormal basis of the dark space (Helmert vectors within each group),
  /// one column per dark state, with the matching frequencies.
  MatrixXr dark_vectors() const;
  VectorXr dark_frequencies() const;

 private:
  std::size_t modes_;
  std::vector<ModeGroup> groups_;
  VectorXr full_frequencies_;
};

/// H(f) restricted to the bright space of `basis`.
MatrixXr build_bright_hamiltonian(const SystemParams& params, const BrightBasis& basis,
                                  const LatticeEnvironment& env, int f);

}  // namespace qbsim

#endif  // QBSIM_HAMILTONIAN_HPP
