#pragma once

#include "abspec/gauge.hpp"
#include "abspec/revolution.hpp"

#include <functional>
#include <vector>

namespace abspec {

/// One separated mode of the radial problem
///   u'' + (theta'/theta) u' + (lambda - V(r)) u = 0 on (0, R), u'(R) = 0,
/// with V = (k - nu)^2 / theta^2 for the magnetic problems. `value` holds
/// lambda_{kj} (Neumann) or eta_k (Steklov). The eigenfunction is sampled on
/// a uniform grid of (0, R] and normalized in L^2(theta dr).
struct RadialEigenpair {
    int k = 0;
    int j = 1;
    double value = 0.0;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
};

struct SpectrumEntry {
    double value;
    int k;
    int j;
};

/// Merged, ascending eigenvalue list with multiplicity clusters (indices
/// into `entries`, grouped at relative tolerance 1e-8).
struct SpectrumTable {
    std::vector<SpectrumEntry> entries;
    std::vector<std::vector<int>> multiplicity_groups;
};

/// Generic radial problem handed to the shooting machinery. `frobenius_mu`
/// is the exponent of the r^mu behavior at the singular origin.
struct RadialProblem {
    const RevolutionProfile* profile;
    std::function<double(double)> potential; ///< V(r), finite on (0, R]
    double frobenius_mu;
};

/// Shooting state at r = R for a trial lambda (used by oracle tests).
struct ShootState {
    double u_end;
    double du_end;
    int interior_zeros;
};

/// Integrate the radial equation at a fixed lambda from the Frobenius start
/// at eps = eps_scale * R; adaptive Runge-Kutta with local tolerance 1e-11.
ShootState shoot_radial(const RadialProblem& problem, double lambda, double R,
                        double eps_scale = 1e-6);

/// Dense solution samples at fixed lambda (not necessarily an eigenvalue),
/// normalized in L^2(theta dr). Used by oracle tests and theory checks.
RadialEigenpair integrate_radial_dense(const RadialProblem& problem,
                                       double lambda, double R, int samples);

/// First j_max Neumann eigenpairs of the angular-momentum-k mode on the
/// geodesic disk B(x0, R). The flux enters through its canonical
/// representative; | k - nu* | sets both the potential and the Frobenius
/// index. For integer flux the k = nu mode starts at lambda = 0 with a
/// constant eigenfunction.
std::vector<RadialEigenpair> neumann_radial_eigen(const RevolutionProfile& profile,
                                                  const FluxData& nu, int k,
                                                  double R, int j_max,
                                                  int samples = 512);

/// First `count` entries of the full Neumann spectrum, merged over k with a
/// Hardy-type lower bound mu^2/max(theta)^2 deciding when the k-range is
/// exhausted.
SpectrumTable neumann_spectrum(const RevolutionProfile& profile, const FluxData& nu,
                               double R, int count);

/// Flat-disk Neumann spectrum in closed form: lambda_{kj} = (z'_{|k-nu|,j}/R)^2.
/// For integer flux the k = nu mode follows the Laplacian convention
/// (lambda = 0 with constant eigenfunction first).
SpectrumTable neumann_disk_closed_form(const FluxData& nu, double R, int count);

/// Steklov spectrum of a geodesic disk: eta_k = |k - nu*| / theta(R), exact.
SpectrumTable steklov_disk_revolution(const RevolutionProfile& profile,
                                      const FluxData& nu, double R, int count);

/// The Steklov mode function u_k(r) = exp(int_R^r |k-nu*|/theta), sampled.
RadialEigenpair steklov_radial_mode(const RevolutionProfile& profile,
                                    const FluxData& nu, int k, double R,
                                    int samples = 512);

/// Steklov spectrum of the circular annulus r_in < r < r_out with the pole
/// in the hole: per k a 2x2 pencil in the basis r^{+-|k-nu|}.
SpectrumTable steklov_annulus(const FluxData& nu, double r_in, double r_out,
                              int count);

/// Steklov spectrum of the flat cylinder S^1 x (-L, L) with flux nu through
/// the circle; sigma_1 = nu* tanh(nu* L).
SpectrumTable steklov_cylinder(const FluxData& nu, double L, int count);

/// Neumann eigenpairs of the Schroedinger operator with radial potential V
/// (same shooting machinery; Frobenius index from lim r^2 V(r)).
std::vector<RadialEigenpair> schrodinger_radial_eigen(
    const RevolutionProfile& profile, const std::function<double(double)>& V,
    double R, int j_max, int samples = 512);

/// Second-eigenvalue closed forms on the flat disk of radius R, compared
/// against the flux-free Laplacian values.
struct SecondEigenvalueSummary {
    double lambda2;
    double sigma2;
    double laplacian_lambda2;
    double laplacian_sigma2;
};
SecondEigenvalueSummary second_eigenvalue_remarks(const FluxData& nu, double R);

/// Cluster ascending entries at relative tolerance 1e-8 (exposed for tests).
std::vector<std::vector<int>> cluster_multiplicities(
    const std::vector<SpectrumEntry>& entries, double rel_tol = 1e-8);

} // namespace abspec
