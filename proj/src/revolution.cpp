#include "abspec/revolution.hpp"

#include "abspec/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace abspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
} // namespace

RevolutionProfile::RevolutionProfile(ProfileKind kind, Fn t, Fn t1, Fn t2,
                                     double diameter, std::string name)
    : kind_(kind),
      theta_(std::move(t)),
      theta1_(std::move(t1)),
      theta2_(std::move(t2)),
      diameter_(diameter),
      name_(std::move(name))
{
}

RevolutionProfile RevolutionProfile::euclidean()
{
    return RevolutionProfile(
        ProfileKind::euclidean, [](double r) { return r; },
        [](double) { return 1.0; }, [](double) { return 0.0; }, kInf,
        "euclidean");
}

RevolutionProfile RevolutionProfile::spherical()
{
    return RevolutionProfile(
        ProfileKind::spherical, [](double r) { return std::sin(r); },
        [](double r) { return std::cos(r); },
        [](double r) { return -std::sin(r); }, kPi, "spherical");
}

RevolutionProfile RevolutionProfile::hyperbolic()
{
    return RevolutionProfile(
        ProfileKind::hyperbolic, [](double r) { return std::sinh(r); },
        [](double r) { return std::cosh(r); },
        [](double r) { return std::sinh(r); }, kInf, "hyperbolic");
}

RevolutionProfile RevolutionProfile::custom(Fn theta, Fn theta1, Fn theta2,
                                            double diameter, std::string name)
{
    if (!theta || !theta1 || !theta2)
        throw std::invalid_argument("RevolutionProfile::custom: null evaluator");
    if (!(diameter > 0))
        throw std::invalid_argument("RevolutionProfile::custom: diameter must be positive");
    return RevolutionProfile(ProfileKind::custom, std::move(theta),
                             std::move(theta1), std::move(theta2), diameter,
                             std::move(name));
}

RevolutionProfile profile_by_name(const std::string& name)
{
    if (name == "euclidean") return RevolutionProfile::euclidean();
    if (name == "spherical") return RevolutionProfile::spherical();
    if (name == "hyperbolic") return RevolutionProfile::hyperbolic();
    throw std::invalid_argument("unknown geometry '" + name +
                                "' (expected euclidean|spherical|hyperbolic)");
}

namespace {

// Smallest positive root of theta' on (0, cap), or +inf when none.
double find_first_critical(const RevolutionProfile& p, double cap)
{
    const double scan_end = std::isfinite(p.diameter())
                                ? p.diameter() * (1.0 - 1e-12)
                                : cap;
    const int n = 4096;
    double prev_r = scan_end / n * 1e-3; // skip r = 0 where theta'(0) = 1
    double prev_v = p.theta1(prev_r);
    if (prev_v == 0.0) return prev_r;
    for (int i = 1; i <= n; ++i) {
        const double r = scan_end * i / n;
        const double v = p.theta1(r);
        if (v == 0.0) return r;
        if (prev_v > 0 && v < 0) {
            double lo = prev_r, hi = r;
            for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (p.theta1(mid) > 0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_r = r;
        prev_v = v;
    }
    return kInf;
}

} // namespace

ProfileGeometry profile_geometry(const RevolutionProfile& profile, double R)
{
    if (!(R > 0) || !(R < profile.diameter()))
        throw std::invalid_argument("profile_geometry: R outside (0, diameter)");

    ProfileGeometry out;
    out.volume = 2.0 * kPi *
                 integrate([&](double s) { return profile.theta(s); }, 0.0, R);
    if (!std::isfinite(out.volume))
        throw std::runtime_error("profile_geometry: volume quadrature failed");
    out.curvature_at = [profile](double r) {
        return -profile.theta2(r) / profile.theta(r);
    };

    double rbar = find_first_critical(profile, std::max(4.0 * R, 64.0));
    if (!std::isfinite(rbar)) rbar = profile.diameter();
    out.first_critical_radius = rbar;
    return out;
}

double radius_for_area(const RevolutionProfile& profile, double area)
{
    if (!(area > 0))
        throw std::invalid_argument("radius_for_area: area must be positive");

    const auto volume = [&](double R) {
        return 2.0 * kPi *
               integrate([&](double s) { return profile.theta(s); }, 0.0, R);
    };

    double hi = 1.0;
    const double cap = std::isfinite(profile.diameter())
                           ? profile.diameter() * (1.0 - 1e-12)
                           : kInf;
    if (std::isfinite(cap)) {
        const double total = volume(cap);
        if (area >= total)
            throw std::invalid_argument("radius_for_area: area exceeds total volume");
        hi = cap;
    } else {
        while (volume(hi) < area) {
            hi *= 2.0;
            if (hi > 1e6)
                throw std::runtime_error("radius_for_area: expansion failed");
        }
    }

    double lo = 0.0;
    for (int it = 0; it < 240; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = volume(mid);
        if (std::abs(v - area) <= 1e-12 * area) return mid;
        (v < area ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace abspec
