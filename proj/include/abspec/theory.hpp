#pragma once

#include "abspec/gauge.hpp"
#include "abspec/radial.hpp"
#include "abspec/revolution.hpp"

#include <functional>
#include <vector>

namespace abspec {

/// Sampled monotonicity check of a scalar function of the radius.
/// `violations` lists the grid radii where a forward difference exceeds
/// the tolerance (1e-8 relative to the sampled maximum).
struct MonotonicityReport {
    std::vector<double> grid;
    std::vector<double> values;
    double max_forward_difference = 0.0;
    std::vector<double> violations;
    bool holds = true;
};

/// F(r) = u'(r)^2 + nu^2 u(r)^2 / theta(r)^2 along the ground-state
/// eigenfunction must be non-increasing on (0, R) for R <= first critical
/// radius. Sampled on a uniform grid of (delta, R - delta) with
/// delta = R / (10 * grid_size).
MonotonicityReport check_F_monotone(const RevolutionProfile& profile,
                                    const FluxData& nu, double R, int grid_size);

/// q(r) = theta u'/u along the ground state: decreasing from q(0+) = nu.
MonotonicityReport check_q_monotone(const RevolutionProfile& profile,
                                    const FluxData& nu, double R, int grid_size);

struct EigenfunctionShape {
    bool u_positive = false;
    bool u_increasing = false;
    bool lambda_exceeds = false; ///< lambda > nu^2 / theta(R)^2
    double lambda = 0.0;
    double bound = 0.0;
};
EigenfunctionShape check_eigenfunction_shape(const RevolutionProfile& profile,
                                             const FluxData& nu, double R);

/// lambda(R) sweep: strict decrease plus a derivative check against
///   lambda'(R) = (nu^2/theta(R)^2 - lambda) u(R)^2 theta(R) / int u^2 theta
/// via a local central difference at each interior grid point.
struct LambdaSweep {
    std::vector<double> radii;
    std::vector<double> lambdas;
    bool strictly_decreasing = false;
    double max_derivative_mismatch = 0.0; ///< relative, worst interior point
};
LambdaSweep lambda_R_monotone(const RevolutionProfile& profile, const FluxData& nu,
                              const std::vector<double>& R_grid);

/// Margins of the sufficient conditions for the ground-state monotonicity:
///   a) theta' - nu >= 0,
///   b) lambda_bar theta^2 - nu^2 + nu^2 theta'^2 + nu theta theta'' >= 0
/// with lambda_bar computed at the first critical radius, and the same
/// form with the literal nu(nu+1) coefficient. Both margins are reported;
/// on the sphere they coincide numerically.
struct SufficientConditions {
    double cond_a_margin = 0.0;
    double cond_b_margin = 0.0;
    double sphere_form_margin = 0.0;
    bool cond_a = false;
    bool cond_b = false;
    bool sphere_form = false;
    double lambda_bar = 0.0;
};
SufficientConditions sufficient_conditions(const RevolutionProfile& profile,
                                           const FluxData& nu, double R);

/// Separable test function f(r) e^{i k t} for the Hardy inequality.
struct RadialTestFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;
    int k = 0;
};

/// Quadrature check of the magnetic Hardy inequality on the flat disk:
///   int |grad_A u|^2 >= C^2 int |u|^2/r^2,  C = inf_k |nu - k|.
/// `ratio` is lhs/rhs; `angular_ratio` isolates the angular term, which
/// equals (k - nu)^2 exactly.
struct HardyReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double angular_ratio = 0.0;
    bool holds = false;
};
std::vector<HardyReport> hardy_check(const FluxData& nu, double R,
                                     const std::vector<RadialTestFunction>& fs);

} // namespace abspec
