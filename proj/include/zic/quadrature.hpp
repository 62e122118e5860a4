#ifndef ZIC_QUADRATURE_HPP
#define ZIC_QUADRATURE_HPP

#include <functional>

namespace zic {

// Adaptive Gauss-Kronrod (61 point) on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

// Integral over the real line of a Gaussian-decaying integrand centred near `centre`
// with spread `scale`; the range is cut at +-half_width*scale and split into panels.
double integrate_line(const std::function<double(double)>& f, double centre, double scale, double half_width = 40.0,
                      double rel_tol = 1e-13);

}  // namespace zic

#endif
