#include "abspec/theory.hpp"

#include "abspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace abspec {

namespace {

double first_critical_radius(const RevolutionProfile& profile, double R)
{
    return profile_geometry(profile, R).first_critical_radius;
}

void require_inside_rbar(const RevolutionProfile& profile, const FluxData& nu,
                         double R, const char* who)
{
    if (nu.is_integer || !(nu.canonical > 0))
        throw std::invalid_argument(std::string(who) + ": flux must not be an integer");
    if (!(R > 0) || !(R < profile.diameter()))
        throw std::invalid_argument(std::string(who) + ": R outside (0, diameter)");
    const double rbar = first_critical_radius(profile, R);
    if (R > rbar * (1.0 + 1e-9))
        throw std::invalid_argument(std::string(who) +
                                    ": R beyond the first critical radius");
}

// Ground-state mode (k = 0, j = 1) sampled densely.
RadialEigenpair ground_state(const RevolutionProfile& profile, const FluxData& nu,
                             double R, int samples)
{
    return neumann_radial_eigen(profile, nu, 0, R, 1, samples).front();
}

// Index of the native sample closest to x (the dense grid is r_i = h(i+1)).
// Samples are used directly; interpolating u ~ r^nu between grid points
// would bias the ratio quantities near the origin.
int snap_index(const std::vector<double>& r, double x)
{
    const double h = r[0];
    const int n = static_cast<int>(r.size());
    return std::clamp(static_cast<int>(std::lround(x / h)) - 1, 0, n - 1);
}

MonotonicityReport monotone_report(std::vector<double> grid,
                                   std::vector<double> values)
{
    MonotonicityReport rep;
    rep.grid = std::move(grid);
    rep.values = std::move(values);
    double vmax = 0.0;
    for (double v : rep.values) vmax = std::max(vmax, std::abs(v));
    const double tol = 1e-8 * std::max(vmax, 1e-300);
    for (size_t i = 0; i + 1 < rep.values.size(); ++i) {
        const double d = rep.values[i + 1] - rep.values[i];
        rep.max_forward_difference = std::max(rep.max_forward_difference, d);
        if (d > tol) rep.violations.push_back(rep.grid[i]);
    }
    rep.holds = rep.violations.empty();
    return rep;
}

} // namespace

MonotonicityReport check_F_monotone(const RevolutionProfile& profile,
                                    const FluxData& nu, double R, int grid_size)
{
    require_inside_rbar(profile, nu, R, "check_F_monotone");
    if (grid_size < 4)
        throw std::invalid_argument("check_F_monotone: grid_size too small");

    const int dense = std::max(2048, 4 * grid_size);
    const auto gs = ground_state(profile, nu, R, dense);
    const double v = nu.canonical;

    const double delta = R / (10.0 * grid_size);
    std::vector<double> grid(grid_size), values(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        const int s = snap_index(gs.r, delta + (R - 2 * delta) * i / (grid_size - 1));
        const double r = gs.r[s];
        const double th = profile.theta(r);
        grid[i] = r;
        values[i] = gs.du[s] * gs.du[s] + v * v * gs.u[s] * gs.u[s] / (th * th);
    }
    return monotone_report(std::move(grid), std::move(values));
}

MonotonicityReport check_q_monotone(const RevolutionProfile& profile,
                                    const FluxData& nu, double R, int grid_size)
{
    require_inside_rbar(profile, nu, R, "check_q_monotone");
    const int dense = std::max(2048, 4 * grid_size);
    const auto gs = ground_state(profile, nu, R, dense);

    const double delta = R / (10.0 * grid_size);
    std::vector<double> grid(grid_size), values(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        const int s = snap_index(gs.r, delta + (R - 2 * delta) * i / (grid_size - 1));
        grid[i] = gs.r[s];
        values[i] = profile.theta(gs.r[s]) * gs.du[s] / gs.u[s];
    }
    return monotone_report(std::move(grid), std::move(values));
}

EigenfunctionShape check_eigenfunction_shape(const RevolutionProfile& profile,
                                             const FluxData& nu, double R)
{
    require_inside_rbar(profile, nu, R, "check_eigenfunction_shape");
    const auto gs = ground_state(profile, nu, R, 2048);

    EigenfunctionShape out;
    out.lambda = gs.value;
    const double thR = profile.theta(R);
    out.bound = nu.canonical * nu.canonical / (thR * thR);
    out.lambda_exceeds = gs.value > out.bound;

    out.u_positive = true;
    out.u_increasing = true;
    for (size_t i = 0; i + 1 < gs.r.size(); ++i) { // skip the endpoint u'(R)=0
        if (!(gs.u[i] > 0)) out.u_positive = false;
        if (!(gs.du[i] > 0)) out.u_increasing = false;
    }
    if (!(gs.u.back() > 0)) out.u_positive = false;
    return out;
}

LambdaSweep lambda_R_monotone(const RevolutionProfile& profile, const FluxData& nu,
                              const std::vector<double>& R_grid)
{
    if (R_grid.size() < 2)
        throw std::invalid_argument("lambda_R_monotone: need at least two radii");
    for (size_t i = 0; i + 1 < R_grid.size(); ++i)
        if (!(R_grid[i] < R_grid[i + 1]))
            throw std::invalid_argument("lambda_R_monotone: grid must be ascending");
    const double rbar = first_critical_radius(profile, R_grid.back());
    if (R_grid.back() > rbar * (1.0 + 1e-9))
        throw std::invalid_argument("lambda_R_monotone: grid leaves (0, first critical radius)");

    LambdaSweep sweep;
    sweep.radii = R_grid;
    for (double R : R_grid)
        sweep.lambdas.push_back(ground_state(profile, nu, R, 64).value);

    sweep.strictly_decreasing = true;
    for (size_t i = 0; i + 1 < sweep.lambdas.size(); ++i)
        if (!(sweep.lambdas[i + 1] < sweep.lambdas[i]))
            sweep.strictly_decreasing = false;

    // Local central difference vs the eigenvalue-derivative formula, with
    // the L^2(theta)-normalized eigenfunction (so the denominator is 1).
    const double v = nu.canonical;
    for (size_t i = 1; i + 1 < R_grid.size(); ++i) {
        const double R = R_grid[i];
        const double h = 1e-3 * R;
        const double lp = ground_state(profile, nu, R + h, 64).value;
        const double lm = ground_state(profile, nu, R - h, 64).value;
        const double fd = (lp - lm) / (2 * h);

        const auto gs = ground_state(profile, nu, R, 2048);
        const double uR = gs.u.back();
        const double thR = profile.theta(R);
        const double formula = (v * v / (thR * thR) - gs.value) * uR * uR * thR;
        const double mismatch = std::abs(fd - formula) / std::abs(formula);
        sweep.max_derivative_mismatch = std::max(sweep.max_derivative_mismatch, mismatch);
    }
    return sweep;
}

namespace {

// lambda at the first critical radius, cached per built-in profile and flux.
double lambda_bar_cached(const RevolutionProfile& profile, const FluxData& nu,
                         double R)
{
    const double rbar = first_critical_radius(profile, R);
    if (!std::isfinite(rbar)) return 0.0; // infimum over growing disks

    static std::mutex mtx;
    static std::map<std::pair<int, double>, double> cache;
    const auto key = std::make_pair(static_cast<int>(profile.kind()), nu.canonical);
    if (profile.kind() != ProfileKind::custom) {
        std::lock_guard lock(mtx);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double val =
        neumann_radial_eigen(profile, nu, 0, rbar, 1, 16).front().value;
    if (profile.kind() != ProfileKind::custom) {
        std::lock_guard lock(mtx);
        cache[key] = val;
    }
    return val;
}

} // namespace

SufficientConditions sufficient_conditions(const RevolutionProfile& profile,
                                           const FluxData& nu, double R)
{
    require_inside_rbar(profile, nu, R, "sufficient_conditions");
    const double v = nu.canonical;

    SufficientConditions out;
    out.lambda_bar = lambda_bar_cached(profile, nu, R);

    const int n = 512;
    double min_a = std::numeric_limits<double>::infinity();
    double min_b = min_a, min_s = min_a;
    for (int i = 1; i <= n; ++i) {
        const double r = R * i / (n + 1);
        const double th = profile.theta(r);
        const double t1 = profile.theta1(r);
        const double t2 = profile.theta2(r);
        min_a = std::min(min_a, t1 - v);
        min_b = std::min(min_b, out.lambda_bar * th * th - v * v +
                                    v * v * t1 * t1 + v * th * t2);
        min_s = std::min(min_s, v * (v + 1) * th * th - v * v + v * v * t1 * t1 +
                                    v * th * t2);
    }
    out.cond_a_margin = min_a;
    out.cond_b_margin = min_b;
    out.sphere_form_margin = min_s;
    out.cond_a = min_a >= 0.0;
    out.cond_b = min_b >= -1e-12;
    out.sphere_form = min_s >= -1e-12;
    return out;
}

std::vector<HardyReport> hardy_check(const FluxData& nu, double R,
                                     const std::vector<RadialTestFunction>& fs)
{
    if (nu.is_integer)
        throw std::invalid_argument("hardy_check: flux must not be an integer");
    if (!(R > 0))
        throw std::invalid_argument("hardy_check: R must be positive");

    const double C2 = nu.canonical * nu.canonical;
    std::vector<HardyReport> out;
    out.reserve(fs.size());
    for (const auto& tf : fs) {
        if (!tf.f || !tf.df)
            throw std::invalid_argument("hardy_check: test function needs f and f'");
        // f must vanish at the pole
        double fmax = 0.0;
        for (int i = 1; i <= 16; ++i)
            fmax = std::max(fmax, std::abs(tf.f(R * i / 16.0)));
        if (!(std::abs(tf.f(1e-6 * R)) <= 0.05 * fmax))
            throw std::invalid_argument("hardy_check: test function must vanish at the pole");

        // Substitution r = s^2 regularizes the endpoint for f ~ r^a, a >= 1/4.
        const double kv = static_cast<double>(tf.k) - nu.nu;
        const auto radial = [&](double s) {
            const double r = s * s;
            const double d = tf.df(r);
            return d * d * r * 2.0 * s;
        };
        const auto angular = [&](double s) {
            const double r = s * s;
            const double f = tf.f(r);
            return kv * kv * f * f / r * 2.0 * s;
        };
        const auto pole_moment = [&](double s) {
            const double r = s * s;
            const double f = tf.f(r);
            return f * f / r * 2.0 * s;
        };
        const double sR = std::sqrt(R);
        const double two_pi = 2.0 * std::numbers::pi;
        const double radial_part = two_pi * integrate(radial, 0.0, sR, 1e-11);
        const double angular_part = two_pi * integrate(angular, 0.0, sR, 1e-11);

        HardyReport rep;
        rep.lhs = radial_part + angular_part;
        rep.rhs = two_pi * integrate(pole_moment, 0.0, sR, 1e-11);
        rep.ratio = rep.lhs / rep.rhs;
        rep.angular_ratio = angular_part / rep.rhs;
        rep.holds = rep.lhs >= C2 * rep.rhs * (1.0 - 1e-9);
        out.push_back(rep);
    }
    return out;
}

} // namespace abspec
