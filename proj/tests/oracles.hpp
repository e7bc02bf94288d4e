// Independent oracles used by the tests: every frozen expected value is
// recomputed here through a route that does not share code with the
// implementation it checks.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// Bisection to ~1e-13 on a sign-changing bracket.
inline double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (flo * f(hi) > 0.0) throw std::runtime_error("oracle bisect: bad bracket");
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (flo * fm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Roots of tan z = 2z: J_{1/2}'(z) = 0 reduces to this equation.
inline double tan2z_root(int branch)
{
    const auto g = [](double z) { return std::tan(z) - 2.0 * z; };
    if (branch == 1) return bisect(g, 1.0, 1.5);           // inside (1, pi/2)
    if (branch == 2) return bisect(g, 3.2, 4.7);           // inside (pi, 3pi/2)
    const double lo = (branch - 0.5) * M_PI + 0.1;
    const double hi = (branch + 0.5) * M_PI - 1e-6;
    return bisect(g, lo, hi);
}

// Long-double ascending series for J_mu, independent of the implementation
// (no shared truncation rule, no asymptotic branch).
inline long double bessel_series(long double mu, long double x, int terms = 400)
{
    if (x == 0.0L) return mu == 0.0L ? 1.0L : 0.0L;
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < terms; ++k) {
        term *= -q / (static_cast<long double>(k) * (mu + k));
        sum += term;
    }
    return std::pow(x / 2.0L, mu) / std::tgamma(mu + 1.0L) * sum;
}

inline long double bessel_series_deriv(long double mu, long double x,
                                       int terms = 400)
{
    const long double h = 1e-7L * (1.0L + x);
    return (bessel_series(mu, x + h, terms) - bessel_series(mu, x - h, terms)) /
           (2.0L * h);
}

} // namespace oracles
