#include "abspec/conformal.hpp"

#include "abspec/gauge.hpp"
#include "abspec/quadrature.hpp"
#include "abspec/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace abspec {

namespace {

constexpr double kPi = std::numbers::pi;
using Cplx = std::complex<double>;

} // namespace

ConformalMap identity_map()
{
    return {[](Cplx z) { return z; }, [](Cplx) { return Cplx(1.0, 0.0); },
            "identity"};
}

ConformalMap rotation_map(double alpha)
{
    const Cplx phase = std::polar(1.0, alpha);
    return {[phase](Cplx z) { return phase * z; },
            [phase](Cplx) { return phase; },
            "rotation:" + std::to_string(alpha)};
}

ConformalMap quadratic_map(double c)
{
    if (!(std::abs(c) < 0.5))
        throw std::invalid_argument("quadratic_map: need |c| < 1/2 for injectivity");
    return {[c](Cplx z) { return z + c * z * z; },
            [c](Cplx z) { return Cplx(1.0, 0.0) + 2.0 * c * z; },
            "quad:" + std::to_string(c)};
}

ConformalMap map_by_name(const std::string& name)
{
    if (name == "identity") return identity_map();
    const auto colon = name.find(':');
    if (colon != std::string::npos) {
        const std::string kind = name.substr(0, colon);
        const double arg = std::stod(name.substr(colon + 1));
        if (kind == "rotation") return rotation_map(arg);
        if (kind == "quad") return quadratic_map(arg);
    }
    throw std::invalid_argument("unknown conformal map '" + name +
                                "' (expected identity|rotation:a|quad:c)");
}

std::complex<double> stereographic_forward(double r, double t)
{
    if (!(r >= 0) || !(r < kPi))
        throw std::invalid_argument("stereographic_forward: r must lie in [0, pi)");
    return std::polar(std::tan(r / 2.0), t);
}

std::pair<double, double> stereographic_inverse(Cplx z)
{
    return {2.0 * std::atan(std::abs(z)), std::arg(z)};
}

double spherical_density(Cplx z)
{
    const double n = std::norm(z);
    return 4.0 / ((1.0 + n) * (1.0 + n));
}

double cap_area(double r)
{
    if (!(r >= 0)) throw std::invalid_argument("cap_area: r must be >= 0");
    return 4.0 * kPi * r * r / (1.0 + r * r);
}

double cap_area_quadrature(double r)
{
    if (!(r >= 0)) throw std::invalid_argument("cap_area_quadrature: r must be >= 0");
    return integrate(
        [](double s) {
            const double d = 1.0 + s * s;
            return 8.0 * kPi * s / (d * d);
        },
        0.0, r, 1e-13);
}

namespace {

// 5-point Gauss-Legendre nodes/weights on [0, 1].
constexpr double kG5x[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                            0.76923465505284155, 0.95308992296933200};
constexpr double kG5w[5] = {0.11846344252809454, 0.23931433524968324,
                            0.28444444444444444, 0.23931433524968324,
                            0.11846344252809454};

// Integral over the ring a < |z| < b of F(z), polar quadrature with
// geometric radial panels and a uniform (spectral) angular grid.
template <typename F>
double ring_integral(const F& f, double a, double b, int n_panels, int n_angular)
{
    const double ratio = std::pow(b / a, 1.0 / n_panels);
    std::vector<double> ct(n_angular), st(n_angular);
    for (int j = 0; j < n_angular; ++j) {
        const double t = 2 * kPi * j / n_angular;
        ct[j] = std::cos(t);
        st[j] = std::sin(t);
    }
    const double wang = 2 * kPi / n_angular;
    double total = 0.0;
    double lo = a;
    for (int p = 0; p < n_panels; ++p) {
        const double hi = (p == n_panels - 1) ? b : lo * ratio;
        const double h = hi - lo;
        for (int g = 0; g < 5; ++g) {
            const double r = lo + kG5x[g] * h;
            const double wr = kG5w[g] * h * r; // includes polar Jacobian
            double ang = 0.0;
            for (int j = 0; j < n_angular; ++j) ang += f(Cplx(r * ct[j], r * st[j]));
            total += wr * wang * ang;
        }
        lo = hi;
    }
    return total;
}

// Magnetic energy of r^nu transplanted through g: the integrand carries the
// r^{2nu-2} singularity, so the inner disk enters through an analytic stub.
double transplanted_energy(const ConformalMap& map, double nu, double T,
                           int n_radial, int n_angular)
{
    const double rmin = T * 1e-12;
    const auto f = [&](Cplx z) {
        const Cplx w = map.f(z);
        const Cplx dw = map.df(z);
        return 2.0 * nu * nu * std::pow(std::abs(w), 2.0 * nu - 2.0) * std::norm(dw);
    };
    const double g0 = std::abs(map.df(Cplx(0, 0)));
    const double stub = 2.0 * kPi * nu * std::pow(g0 * rmin, 2.0 * nu);
    return stub + ring_integral(f, rmin, T, n_radial, n_angular);
}

// Same energy over the image region by the divergence identity
//   int_Omega 2 nu^2 r^{2nu-2} dA = nu oint r^{2nu-2} Im(conj(w) dw).
double image_energy_boundary(const ConformalMap& map, double nu, double T)
{
    const int m = 4096;
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        const double t = 2 * kPi * j / m;
        const Cplx z = std::polar(T, t);
        const Cplx w = map.f(z);
        const Cplx dwdt = map.df(z) * Cplx(0, 1) * z;
        total += std::pow(std::abs(w), 2.0 * nu - 2.0) *
                 std::imag(std::conj(w) * dwdt);
    }
    return nu * total * 2 * kPi / m;
}

} // namespace

EnergyInvariance energy_invariance_check(const ConformalMap& map, double nu,
                                         double T, int n_radial, int n_angular)
{
    if (!map.f || !map.df)
        throw std::invalid_argument("energy_invariance_check: map needs f and f'");
    if (std::abs(map.f(Cplx(0, 0))) > 1e-13)
        throw std::invalid_argument("energy_invariance_check: map must fix the pole");
    const double vstar = canonicalize_flux(nu).canonical;
    if (!(vstar > 0))
        throw std::invalid_argument("energy_invariance_check: integer flux has zero energy");

    EnergyInvariance out;
    out.energy_source = transplanted_energy(map, vstar, T, n_radial, n_angular);
    out.energy_target = image_energy_boundary(map, vstar, T);
    out.rel_diff = std::abs(out.energy_source - out.energy_target) /
                   std::max(std::abs(out.energy_target), 1e-300);
    return out;
}

namespace {

// Spherical area of the image of B_T under s * g.
double image_cap_area(const ConformalMap& map, double scale, double T,
                      int n_radial, int n_angular)
{
    const auto f = [&](Cplx z) {
        const Cplx w = scale * map.f(z);
        const Cplx dw = scale * map.df(z);
        return std::norm(dw) * spherical_density(w);
    };
    const double rmin = T * 1e-8;
    const double g0 = scale * std::abs(map.df(Cplx(0, 0)));
    const double stub = kPi * rmin * rmin * g0 * g0 * 4.0; // sigma(0) = 4
    return stub + ring_integral(f, rmin, T, n_radial, n_angular);
}

} // namespace

SzegoCheck szego_functional_check(const ConformalMap& map, double nu, double T,
                                  int n_grid)
{
    if (!map.f || !map.df)
        throw std::invalid_argument("szego_functional_check: map needs f and f'");
    if (std::abs(map.f(Cplx(0, 0))) > 1e-13)
        throw std::invalid_argument("szego_functional_check: map must fix zero");
    if (!(T > 0) || n_grid < 8)
        throw std::invalid_argument("szego_functional_check: bad T or grid");
    const double vstar = canonicalize_flux(nu).canonical;
    if (!(vstar > 0))
        throw std::invalid_argument("szego_functional_check: flux must not be an integer");

    SzegoCheck out;

    // Pre-scale so the image spherical area matches the cap: a(T) = v(T).
    const double target = cap_area(T);
    double scale = 1.0;
    {
        const double raw = image_cap_area(map, 1.0, T, 128, 128);
        if (std::abs(raw - target) > 1e-8 * target) {
            double slo = 1.0, shi = 1.0;
            while (image_cap_area(map, slo, T, 128, 128) > target) slo *= 0.5;
            while (image_cap_area(map, shi, T, 128, 128) < target) shi *= 2.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (slo + shi);
                (image_cap_area(map, mid, T, 128, 128) < target ? slo : shi) = mid;
            }
            scale = 0.5 * (slo + shi);
        }
    }
    out.map_scale = scale;

    const auto dens = [&](Cplx z) {
        const Cplx w = scale * map.f(z);
        const Cplx dw = scale * map.df(z);
        return std::norm(dw) * spherical_density(w);
    };

    // a(r) on the grid: accumulate ring integrals between consecutive radii.
    const int na = 256;
    out.radii.resize(n_grid);
    out.a_samples.resize(n_grid);
    out.v_samples.resize(n_grid);
    double acc = 0.0;
    double prev = T * 1e-8;
    {
        const double g0 = scale * std::abs(map.df(Cplx(0, 0)));
        acc += kPi * prev * prev * g0 * g0 * 4.0;
    }
    for (int q = 0; q < n_grid; ++q) {
        const double r = T * (q + 1) / n_grid;
        acc += ring_integral(dens, prev, r, 48, na);
        prev = r;
        out.radii[q] = r;
        out.a_samples[q] = acc;
        out.v_samples[q] = cap_area(r);
    }

    // Margins of the proof chain.
    double dineq = std::numeric_limits<double>::infinity();
    double capm = dineq, ratm = dineq;
    double prev_ratio = 0.0;
    for (int q = 0; q < n_grid; ++q) {
        const double r = out.radii[q];
        const double a = out.a_samples[q];
        // a'(r) by the independent angular quadrature at radius r
        double aprime = 0.0;
        for (int j = 0; j < na; ++j) {
            const double t = 2 * kPi * j / na;
            aprime += dens(std::polar(r, t));
        }
        aprime *= r * 2 * kPi / na;
        dineq = std::min(dineq, aprime - a * (4 * kPi - a) / (2 * kPi * r));
        capm = std::min(capm, out.v_samples[q] - a);
        const double ratio = a / (r * r * (4 * kPi - a));
        if (q > 0) ratm = std::min(ratm, ratio - prev_ratio);
        prev_ratio = ratio;
    }
    out.dineq_min_margin = dineq;
    out.cap_bound_min_margin = capm;
    out.ratio_monotone_min_margin = ratm;

    // Transplanted Rayleigh quotient for the cap ground state: the energy
    // side equals lambda (L^2(theta)-normalized eigenfunction), the mass
    // side is the transplantation integral int_{B_T} U |g'|^2 (sigma o g).
    const double R = 2.0 * std::atan(T);
    const FluxData fd = canonicalize_flux(vstar);
    const auto cap_mode = neumann_radial_eigen(RevolutionProfile::spherical(), fd,
                                               0, R, 1, 4096);
    const auto& gs = cap_mode.front();
    const auto u_at = [&](double r) {
        const double h = gs.r[0];
        if (r <= h) return gs.u[0] * std::pow(r / h, vstar);
        const double idx = r / h - 1.0;
        const int i0 = std::min(static_cast<int>(idx),
                                static_cast<int>(gs.r.size()) - 2);
        const double t = std::clamp(idx - i0, 0.0, 1.0);
        return gs.u[i0] * (1.0 - t) + gs.u[i0 + 1] * t;
    };
    const auto mass_integrand = [&](Cplx z) {
        const Cplx w = scale * map.f(z);
        const Cplx dw = scale * map.df(z);
        const double rr = 2.0 * std::atan(std::abs(w));
        const double u = u_at(std::min(rr, gs.r.back()));
        return u * u * std::norm(dw) * spherical_density(w);
    };
    // Energy side: 2 pi lambda (the mode is L^2(theta dr)-normalized, so the
    // 2-D cap mass is 2 pi).
    const double rmin = T * 1e-8;
    const double mass = ring_integral(mass_integrand, rmin, T, 256, na);
    out.transplanted_rayleigh = 2.0 * kPi * gs.value / mass;
    return out;
}

} // namespace abspec
