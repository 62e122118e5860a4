#include "zic/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace zic {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 6, rel_tol, &err);
}

double integrate_line(const std::function<double(double)>& f, double centre, double scale, double half_width,
                      double rel_tol) {
    // panels of width ~2 scale keep each piece well resolved
    const int panels = int(std::ceil(half_width));
    const double h = 2.0 * half_width * scale / panels;
    double total = 0.0;
    double lo = centre - half_width * scale;
    for (int i = 0; i < panels; ++i) total += integrate(f, lo + i * h, lo + (i + 1) * h, rel_tol);
    return total;
}

}  // namespace zic
