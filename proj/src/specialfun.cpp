#include "abspec/specialfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace abspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSeriesTerms = 200;

// Ascending series sum_k (-1)^k (x^2/4)^k / (k! Gamma(mu+k+1)), times the
// prefactor (x/2)^mu. Long double accumulation buys headroom against the
// alternating-series cancellation near x ~ 2 mu.
double series_j(double mu, double x)
{
    if (x == 0.0) return mu == 0.0 ? 1.0 : 0.0;
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L;
    long double sum = term;
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        term *= -q / (static_cast<long double>(k) * (mu + k));
        sum += term;
        if (std::abs(static_cast<double>(term)) <
            1e-17 * std::abs(static_cast<double>(sum)))
            break;
    }
    const long double pref =
        std::pow(static_cast<long double>(x) / 2.0L, static_cast<long double>(mu)) /
        std::tgamma(static_cast<long double>(mu) + 1.0L);
    return static_cast<double>(pref * sum);
}

// Term-wise differentiated series: J_mu'(x) = (1/x) sum_k (mu+2k) t_k where
// t_k are the series terms of J_mu. Used for mu < 1 at small arguments.
double series_j_deriv(double mu, double x)
{
    if (x == 0.0) {
        if (mu == 0.0) return 0.0;
        if (mu == 1.0) return 0.5;
        if (mu < 1.0) return std::numeric_limits<double>::infinity();
        return 0.0;
    }
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L;
    long double sum = term * static_cast<long double>(mu);
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        term *= -q / (static_cast<long double>(k) * (mu + k));
        const long double contrib = term * (mu + 2.0L * k);
        sum += contrib;
        if (std::abs(static_cast<double>(contrib)) <
            1e-17 * (std::abs(static_cast<double>(sum)) + 1e-300))
            break;
    }
    const long double pref =
        std::pow(static_cast<long double>(x) / 2.0L, static_cast<long double>(mu)) /
        std::tgamma(static_cast<long double>(mu) + 1.0L);
    return static_cast<double>(pref * sum / x);
}

// Hankel expansion J_mu(x) ~ sqrt(2/(pi x)) (P cos w - Q sin w),
// w = x - mu pi/2 - pi/4. Truncated at the smallest term.
double asymptotic_j(double mu, double x)
{
    const double mu2 = 4.0 * mu * mu;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k < 60; ++k) {
        const double num = mu2 - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= num / (8.0 * k * x);
        if (std::abs(term) >= prev) break; // divergent tail reached
        prev = std::abs(term);
        const int phase = (k / 2) % 2 ? -1 : 1; // + + - - + + ...
        if (k % 2 == 1)
            q += phase * term;
        else
            p += phase * term;
        if (std::abs(term) < 1e-18) break;
    }
    const double w = x - mu * kPi / 2.0 - kPi / 4.0;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(w) - q * std::sin(w));
}

double series_threshold(double mu) { return std::max(12.0, 2.0 * mu); }

} // namespace

double bessel_j(double mu, double x)
{
    if (mu < 0.0 || x < 0.0 || !std::isfinite(mu) || !std::isfinite(x))
        throw std::invalid_argument("bessel_j: require finite mu >= 0, x >= 0");
    if (x <= series_threshold(mu)) return series_j(mu, x);
    return asymptotic_j(mu, x);
}

double bessel_j_deriv(double mu, double x)
{
    if (mu < 0.0 || x < 0.0 || !std::isfinite(mu) || !std::isfinite(x))
        throw std::invalid_argument("bessel_j_deriv: require finite mu >= 0, x >= 0");
    if (mu >= 1.0)
        return 0.5 * (bessel_j(mu - 1.0, x) - bessel_j(mu + 1.0, x));
    if (x <= series_threshold(mu)) return series_j_deriv(mu, x);
    // mu < 1 at large argument: recurrence on non-negative orders only.
    return mu / x * bessel_j(mu, x) - bessel_j(mu + 1.0, x);
}

namespace detail {

double find_jth_zero(const std::function<double(double)>& f,
                     const std::function<double(double)>& fprime,
                     double start, double step, int j, double scan_limit)
{
    int found = 0;
    double a = start;
    double fa = f(a);
    while (a < scan_limit) {
        const double b = a + step;
        const double fb = f(b);
        if (fa == 0.0) {
            ++found;
            if (found == j) return a;
        } else if (fa * fb < 0.0) {
            ++found;
            if (found == j) {
                double lo = a, hi = b, flo = fa;
                for (int it = 0; it < 80 && (hi - lo) > 1e-13; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = f(mid);
                    if (flo * fm <= 0.0)
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                }
                // Newton polish, falling back to bisection steps whenever the
                // iterate leaves the bracket.
                double z = 0.5 * (lo + hi);
                for (int it = 0; it < 40; ++it) {
                    const double fz = f(z);
                    const double dz = fprime(z);
                    double znew = (dz != 0.0) ? z - fz / dz : 0.5 * (lo + hi);
                    if (!(znew > lo && znew < hi)) znew = 0.5 * (lo + hi);
                    const double fznew = f(znew);
                    if (fznew * flo <= 0.0)
                        hi = znew;
                    else {
                        lo = znew;
                        flo = fznew;
                    }
                    if (std::abs(znew - z) < 5e-12 + 1e-14 * z) {
                        z = znew;
                        break;
                    }
                    z = znew;
                }
                return z;
            }
        }
        a = b;
        fa = fb;
    }
    throw std::runtime_error("find_jth_zero: bracketing failed before scan limit");
}

} // namespace detail

double bessel_deriv_zero(double mu, int j)
{
    if (mu < 0.0 || !std::isfinite(mu))
        throw std::invalid_argument("bessel_deriv_zero: require finite mu >= 0");
    if (j < 1) throw std::invalid_argument("bessel_deriv_zero: require j >= 1");

    const double step = (mu > 0.0) ? std::min(0.1, mu / 4.0) : 0.1;
    const double start = std::max(1e-4, 0.05 * mu);
    // Zeros of J_mu' are spaced ~pi for large x; the scan cap stays well past
    // the asymptotic estimate of the j-th zero.
    const double limit = mu + (j + 2) * kPi + 10.0;
    const auto f = [mu](double x) { return bessel_j_deriv(mu, x); };
    // J'' from the Bessel ODE, used for the Newton polish of J' zeros.
    const auto fp = [mu](double x) {
        return -bessel_j_deriv(mu, x) / x -
               (1.0 - mu * mu / (x * x)) * bessel_j(mu, x);
    };
    return detail::find_jth_zero(f, fp, start, step, j, limit);
}

double bessel_zero(double mu, int j)
{
    if (mu < 0.0 || !std::isfinite(mu))
        throw std::invalid_argument("bessel_zero: require finite mu >= 0");
    if (j < 1) throw std::invalid_argument("bessel_zero: require j >= 1");

    const double step = (mu > 0.0) ? std::min(0.1, mu / 4.0) : 0.1;
    const double start = std::max(1e-4, 0.05 * mu);
    const double limit = mu + (j + 2) * kPi + 10.0;
    const auto f = [mu](double x) { return bessel_j(mu, x); };
    const auto fp = [mu](double x) { return bessel_j_deriv(mu, x); };
    return detail::find_jth_zero(f, fp, start, step, j, limit);
}

} // namespace abspec
