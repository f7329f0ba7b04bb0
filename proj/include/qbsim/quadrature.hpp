#ifndef QBSIM_QUADRATURE_HPP
#define QBSIM_QUADRATURE_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbsim/types.hpp"

namespace qbsim::quad {

struct Result {
  Real value;
  Real error;
};

/// Adaptive 31-point Gauss-Kronrod on [a, b]; `rel_tol` is relative to the
/// L1 norm of the integrand. Integrable endpoint singularities are fine.
template <typename F>
Result integrate(F&& f, Real a, Real b, Real rel_tol = 1e-12, unsigned max_depth = 15) {
  Real error = 0.0;
  const Real value = boost::math::quadrature::gauss_kronrod<Real, 31>::integrate(
      std::forward<F>(f), a, b, max_depth, rel_tol, &error);
  return {value, error};
}

}  // namespace qbsim::quad

#endif  // QBSIM_QUADRATURE_HPP
