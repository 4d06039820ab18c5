#include "bagcv/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "bagcv/error.hpp"

namespace bagcv {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol) {
  QuadratureResult r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol,
                                                                          &r.error_estimate, &l1);
  // Near-cancelling integrands are judged against the L1 norm.
  if (!std::isfinite(r.value) || r.error_estimate > 10.0 * rel_tol * std::max(std::abs(r.value), l1)) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not converge: value " << r.value
        << ", error estimate " << r.error_estimate << ", L1 " << l1;
    throw NumericalError(msg.str());
  }
  return r;
}

}  // namespace bagcv
