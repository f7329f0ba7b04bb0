#ifndef QBSIM_TYPES_HPP
#define QBSIM_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qbsim {

// Units throughout: hbar = 1. Open-system quantities are measured in units of
// the bath frequency varpi, the closed-system cycle in units of omega_b.

using Real = double;
using Complex = std::complex<Real>;

using VectorXr = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using MatrixXr = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Real kPi = 3.141592653589793238462643383279502884;
inline constexpr Complex kI{0.0, 1.0};

/// Invalid argument or violated precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance. Carries the
/// achieved error estimate when one is available.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, Real estimate = -1.0)
      : std::runtime_error(what), estimate_(estimate) {}
  Real estimate() const noexcept { return estimate_; }

 private:
  Real estimate_;
};

/// A requested computation would exceed the configured memory cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbsim

#endif  // QBSIM_TYPES_HPP
