#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace abspec {

/// Explicit conformal map given as a value/derivative evaluator pair.
struct ConformalMap {
    std::function<std::complex<double>(std::complex<double>)> f;
    std::function<std::complex<double>(std::complex<double>)> df;
    std::string description;
};

ConformalMap identity_map();
ConformalMap rotation_map(double alpha);  ///< z -> e^{i alpha} z
ConformalMap quadratic_map(double c);     ///< z -> z + c z^2 (|c| < 1/2 on the unit disk)

/// Map by CLI name: "identity", "rotation:<alpha>", "quad:<c>".
ConformalMap map_by_name(const std::string& name);

/// Stereographic chart z = tan(r/2) e^{it} with the spherical density
/// sigma(z) = 4 / (1 + |z|^2)^2. r is the geodesic distance from the pole,
/// r in [0, pi).
std::complex<double> stereographic_forward(double r, double t);
std::pair<double, double> stereographic_inverse(std::complex<double> z);
double spherical_density(std::complex<double> z);

/// Spherical area of the stereographic disk of radius r: 4 pi r^2/(1+r^2).
double cap_area(double r);
/// Same quantity by polar quadrature of the density (identity check).
double cap_area_quadrature(double r);

/// Magnetic energy of u = r^nu transplanted through a pole-fixing conformal
/// map, against the image-side energy computed independently via a boundary
/// integral. The two agree exactly in the continuum.
struct EnergyInvariance {
    double energy_source = 0.0; ///< pullback side (2-D polar quadrature)
    double energy_target = 0.0; ///< image side (boundary-flux quadrature)
    double rel_diff = 0.0;
};
EnergyInvariance energy_invariance_check(const ConformalMap& map, double nu,
                                         double T = 1.0, int n_radial = 512,
                                         int n_angular = 256);

/// Szego-style functionals of a pole-fixing conformal map g on the disk B_T:
/// a(r) = int_{B_r} |g'|^2 (sigma o g), compared against the cap-area
/// profile v(r). The map is pre-scaled so the image spherical area matches
/// the cap (a(T) = v(T)); the reported margins are the differential
/// inequality a' >= a (4 pi - a) / (2 pi r), the cap bound a <= v, and the
/// monotonicity of a / (r^2 (4 pi - a)).
struct SzegoCheck {
    std::vector<double> radii;
    std::vector<double> a_samples;
    std::vector<double> v_samples;
    double dineq_min_margin = 0.0;
    double cap_bound_min_margin = 0.0;
    double ratio_monotone_min_margin = 0.0;
    double transplanted_rayleigh = 0.0; ///< upper bound for lambda_1 of the image
    double map_scale = 1.0;
};
SzegoCheck szego_functional_check(const ConformalMap& map, double nu, double T,
                                  int n_grid = 48);

} // namespace abspec
