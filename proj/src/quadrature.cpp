#include "abspec/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <stdexcept>

namespace abspec {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol)
{
    if (!(b >= a))
        throw std::invalid_argument("integrate: bad interval");
    if (a == b) return 0.0;
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 20, rel_tol, &error);
    return value;
}

} // namespace abspec
