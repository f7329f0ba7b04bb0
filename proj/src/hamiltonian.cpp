#include "qbsim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbsim {

MatrixXr build_hamiltonian(const SystemParams& params, const LatticeEnvironment& env, int f) {
  const BasisIndex basis{env.N()};
  const std::size_t dim = basis.dimension();
  const auto n = static_cast<Eigen::Index>(dim);
  MatrixXr H = MatrixXr::Zero(n, n);
  H(0, 0) = params.omega_b();
  H(1, 1) = params.omega_c();
  H(0, 1) = H(1, 0) = params.kappa() * f;

  const VectorXr w = env.mode_frequencies();
  const Real gk = env.mode_coupling();
  for (std::size_t k = 0; k < basis.modes(); ++k) {
    const auto b = static_cast<Eigen::Index>(basis.battery_bath(k));
    const auto c = static_cast<Eigen::Index>(basis.charger_bath(k));
    H(b, b) = w(static_cast<Eigen::Index>(k));
    H(c, c) = w(static_cast<Eigen::Index>(k));
    H(0, b) = H(b, 0) = gk;
    H(1, c) = H(c, 1) = gk;
  }
  return H;
}

BrightBasis::BrightBasis(const LatticeEnvironment& env)
    : modes_(env.modes()) {
  const VectorXr w = env.mode_frequencies();
  std::vector<std::size_t> order(modes_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w(Eigen::Index(a)) < w(Eigen::Index(b)); });

  // Equal frequencies differ only by cosine round-off.
  const Real tol = 1e-11 * std::max<Real>(1.0, std::abs(env.varpi()) + 4.0 * env.q());
  for (std::size_t k : order) {
    const Real wk = w(Eigen::Index(k));
    if (groups_.empty() || wk - w(Eigen::Index(groups_.back().members.front())) > tol) {
      groups_.push_back({wk, {k}});
    } else {
      groups_.back().members.push_back(k);
    }
  }
  for (auto& g : groups_) {
    Real sum = 0.0;
    for (std::size_t k : g.members) sum += w(Eigen::Index(k));
    g.omega = sum / static_cast<Real>(g.members.size());
    std::sort(g.members.begin(), g.members.end());
  }

  full_frequencies_ = VectorXr::Zero(Eigen::Index(full_dimension()));
  for (const auto& g : groups_) {
    for (std::size_t k : g.members) {
      full_frequencies_(Eigen::Index(2 + k)) = g.omega;
      full_frequencies_(Eigen::Index(2 + modes_ + k)) = g.omega;
    }
  }
}

VectorXc BrightBasis::project(const VectorXc& full) const {
  const std::size_t D = groups_.size();
  VectorXc out = VectorXc::Zero(Eigen::Index(dimension()));
  out(0) = full(0);
  out(1) = full(1);
  for (std::size_t gi = 0; gi < D; ++gi) {
    const auto& members = groups_[gi].members;
    const Real norm = 1.0 / std::sqrt(static_cast<Real>(members.size()));
    Complex sb{0.0, 0.0};
    Complex sc{0.0, 0.0};
    for (std::size_t k : members) {
      sb += full(Eigen::Index(2 + k));
      sc += full(Eigen::Index(2 + modes_ + k));
    }
    out(Eigen::Index(2 + gi)) = norm * sb;
    out(Eigen::Index(2 + D + gi)) = norm * sc;
  }
  return out;
}

VectorXc BrightBasis::embed(const VectorXc& bright) const {
  const std::size_t D = groups_.size();
  VectorXc out = VectorXc::Zero(Eigen::Index(full_dimension()));
  out(0) = bright(0);
  out(1) = bright(1);
  for (std::size_t gi = 0; gi < D; ++gi) {
    const auto& members = groups_[gi].members;
    const Real norm = 1.0 / std::sqrt(static_cast<Real>(members.size()));
    for (std::size_t k : members) {
      out(Eigen::Index(2 + k)) = norm * bright(Eigen::Index(2 + gi));
      out(Eigen::Index(2 + modes_ + k)) = norm * bright(Eigen::Index(2 + D + gi));
    }
  }
  return out;
}

VectorXc BrightBasis::dark_part(const VectorXc& full) const { return full - embed(project(full)); }

VectorXc BrightBasis::evolve_dark(const VectorXc& dark, Real duration) const {
  VectorXc out = dark;
  for (Eigen::Index i = 2; i < out.size(); ++i) {
    out(i) *= std::exp(-kI * (full_frequencies_(i) * duration));
  }
  return out;
}

MatrixXr BrightBasis::dark_vectors() const {
  MatrixXr V = MatrixXr::Zero(Eigen::Index(full_dimension()), Eigen::Index(dark_dimension()));
  Eigen::Index col = 0;
  for (std::size_t offset : {std::size_t{2}, 2 + modes_}) {
    for (const auto& g : groups_) {
      // Helmert: (e_1 + ... + e_j - j e_{j+1}) / sqrt(j (j + 1))
      for (std::size_t j = 1; j < g.members.size(); ++j) {
        const Real norm = 1.0 / std::sqrt(static_cast<Real>(j * (j + 1)));
        for (std::size_t i = 0; i < j; ++i) V(Eigen::Index(offset + g.members[i]), col) = norm;
        V(Eigen::Index(offset + g.members[j]), col) = -static_cast<Real>(j) * norm;
        ++col;
      }
    }
  }
  return V;
}

VectorXr BrightBasis::dark_frequencies() const {
  VectorXr w(static_cast<Eigen::Index>(dark_dimension()));
  Eigen::Index col = 0;
  for (int bath = 0; bath < 2; ++bath) {
    for (const auto& g : groups_) {
      for (std::size_t j = 1; j < g.members.size(); ++j) w(col++) = g.omega;
    }
  }
  return w;
}

MatrixXr build_bright_hamiltonian(const SystemParams& params, const BrightBasis& basis,
                                  const LatticeEnvironment& env, int f) {
  const auto& groups = basis.groups();
  const auto D = static_cast<Eigen::Index>(groups.size());
  const auto n = static_cast<Eigen::Index>(basis.dimension());
  MatrixXr H = MatrixXr::Zero(n, n);
  H(0, 0) = params.omega_b();
  H(1, 1) = params.omega_c();
  H(0, 1) = H(1, 0) = params.kappa() * f;
  const Real gk = env.mode_coupling();
  for (Eigen::Index gi = 0; gi < D; ++gi) {
    const auto& g = groups[std::size_t(gi)];
    const Real coupling = gk * std::sqrt(static_cast<Real>(g.members.size()));
    H(2 + gi, 2 + gi) = g.omega;
    H(2 + D + gi, 2 + D + gi) = g.omega;
    H(0, 2 + gi) = H(2 + gi, 0) = coupling;
    H(1, 2 + D + gi) = H(2 + D + gi, 1) = coupling;
  }
  return H;
}

}  // namespace qbsim
