#pragma once

#include <functional>
#include <string>

namespace abspec {

enum class ProfileKind { euclidean, spherical, hyperbolic, custom };

/// Geometry of a 2-D manifold of revolution, described by the density
/// theta(r) of the metric dr^2 + theta(r)^2 dt^2 around the pole.
///
/// theta > 0 on (0, D) and theta'(0) = 1. The built-in profiles are
/// theta = r (flat), sin r (sphere, D = pi) and sinh r (hyperbolic).
/// Custom profiles supply closed-form theta, theta', theta''; tabulated
/// profiles are not supported, the eigenvalue shooting needs smooth
/// derivatives.
class RevolutionProfile {
public:
    using Fn = std::function<double(double)>;

    static RevolutionProfile euclidean();
    static RevolutionProfile spherical();
    static RevolutionProfile hyperbolic();
    static RevolutionProfile custom(Fn theta, Fn theta1, Fn theta2,
                                    double diameter, std::string name = "custom");

    double theta(double r) const { return theta_(r); }
    double theta1(double r) const { return theta1_(r); }
    double theta2(double r) const { return theta2_(r); }

    ProfileKind kind() const { return kind_; }
    double diameter() const { return diameter_; } ///< may be +infinity
    const std::string& name() const { return name_; }

private:
    RevolutionProfile(ProfileKind kind, Fn t, Fn t1, Fn t2, double diameter,
                      std::string name);

    ProfileKind kind_;
    Fn theta_, theta1_, theta2_;
    double diameter_;
    std::string name_;
};

/// Profile by CLI name ("euclidean", "spherical", "hyperbolic").
RevolutionProfile profile_by_name(const std::string& name);

struct ProfileGeometry {
    double volume;                              ///< |B(x0, R)| = 2 pi int_0^R theta
    std::function<double(double)> curvature_at; ///< K(r) = -theta''/theta
    double first_critical_radius;               ///< smallest root of theta', else D
};

/// Volume, Gaussian curvature and first critical radius of the geodesic
/// disk B(x0, R). Requires 0 < R < diameter.
ProfileGeometry profile_geometry(const RevolutionProfile& profile, double R);

/// Invert R -> |B(x0, R)| by bisection; |volume(R) - area| <= 1e-12 * area.
double radius_for_area(const RevolutionProfile& profile, double area);

} // namespace abspec
