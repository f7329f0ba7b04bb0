#ifndef QBSIM_TESTS_SUPPORT_HPP
#define QBSIM_TESTS_SUPPORT_HPP

#include <functional>

#include "qbsim/types.hpp"

namespace qbsim::test {

// exp(-i H t) by Taylor series with scaling and squaring; independent of the
// eigen-decomposition used by the library.
inline MatrixXc expm_taylor(const MatrixXc& H, Real t) {
  MatrixXc A = -kI * t * H;
  const Real norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  A /= std::pow(2.0, squarings);
  MatrixXc term = MatrixXc::Identity(H.rows(), H.cols());
  MatrixXc sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * A / static_cast<Real>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Composite Simpson rule with n (even) panels.
inline Real simpson(const std::function<Real(Real)>& f, Real a, Real b, int n) {
  const Real h = (b - a) / n;
  Real s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace qbsim::test

#endif
