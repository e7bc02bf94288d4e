#pragma once

#include <functional>

namespace abspec {

/// Bessel function of the first kind J_mu(x), mu >= 0, x >= 0.
///
/// Power series (accumulated in long double) for x <= max(12, 2 mu),
/// Hankel large-argument expansion beyond. Relative accuracy ~1e-12 over
/// the orders and arguments this toolkit uses (mu <~ 12, x <~ 80).
double bessel_j(double mu, double x);

/// d/dx J_mu(x). Uses (J_{mu-1} - J_{mu+1})/2 for mu >= 1 and the
/// term-wise differentiated series for mu < 1 in the series region.
double bessel_j_deriv(double mu, double x);

/// j-th positive zero z'_{mu,j} of J_mu'. Brackets sign changes on a scan
/// grid of step min(0.1, mu/4), then bisects with a bracket-guarded Newton
/// polish to absolute tolerance 1e-11. For mu = 0 returns the j-th positive
/// zero of J_0' (the first trivial zero at 0 is not counted).
double bessel_deriv_zero(double mu, int j);

/// j-th positive zero z_{mu,j} of J_mu itself (same bracketing machinery).
double bessel_zero(double mu, int j);

namespace detail {
/// Generic bracket-scan zero finder used by the two functions above:
/// j-th sign change of f on (start, +inf) scanned with `step`.
double find_jth_zero(const std::function<double(double)>& f,
                     const std::function<double(double)>& fprime,
                     double start, double step, int j, double scan_limit);
}

} // namespace abspec
