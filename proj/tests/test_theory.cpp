#include "abspec/theory.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

using namespace abspec;
namespace {
constexpr double kPi = std::numbers::pi;
const auto kEuclid = RevolutionProfile::euclidean();
const auto kSphere = RevolutionProfile::spherical();
const auto kHyper = RevolutionProfile::hyperbolic();
}

TEST_CASE("F is non-increasing under the stated hypotheses")
{
    CHECK(check_F_monotone(kSphere, canonicalize_flux(0.5), kPi / 2, 256).holds);
    CHECK(check_F_monotone(kEuclid, canonicalize_flux(0.25), 1.0, 256).holds);
    CHECK(check_F_monotone(kHyper, canonicalize_flux(0.5), 1.0, 256).holds);

    CHECK_THROWS_AS(check_F_monotone(kSphere, canonicalize_flux(0.5), 2.0, 64),
                    std::invalid_argument); // beyond the critical radius
    CHECK_THROWS_AS(check_F_monotone(kSphere, canonicalize_flux(1.0), 1.0, 64),
                    std::invalid_argument); // integer flux
}

TEST_CASE("q = theta u'/u decreases from nu")
{
    const auto rep = check_q_monotone(kSphere, canonicalize_flux(0.5), kPi / 2, 256);
    CHECK(rep.holds);
    CHECK(rep.values.front() <= 0.5 + 1e-6);
    CHECK(rep.values.front() > 0.45); // starts near nu
    for (double q : rep.values) CHECK(q <= 0.5 + 1e-6);
}

TEST_CASE("ground state shape")
{
    const auto e = check_eigenfunction_shape(kEuclid, canonicalize_flux(0.5), 1.0);
    CHECK(e.u_positive);
    CHECK(e.u_increasing);
    CHECK(e.lambda_exceeds);
    CHECK(e.lambda == doctest::Approx(1.3585).epsilon(1e-4));
    CHECK(e.bound == doctest::Approx(0.25).epsilon(1e-14));

    const auto s = check_eigenfunction_shape(kSphere, canonicalize_flux(0.5), kPi / 2);
    CHECK(s.lambda == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(s.bound == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.u_positive);
    CHECK(s.u_increasing);

    const auto q = check_eigenfunction_shape(kSphere, canonicalize_flux(0.25), kPi / 4);
    CHECK(q.u_positive);
    CHECK(q.u_increasing);
    CHECK(q.lambda_exceeds);
}

TEST_CASE("lambda(R) strictly decreasing with matching derivative")
{
    const auto e = lambda_R_monotone(kEuclid, canonicalize_flux(0.25),
                                     {0.5, 1.0, 1.5, 2.0});
    CHECK(e.strictly_decreasing);
    CHECK(e.max_derivative_mismatch <= 1e-4);
    CHECK(e.lambdas[0] == doctest::Approx(4.0 * e.lambdas[1]).epsilon(1e-9));
    CHECK(e.lambdas[1] == doctest::Approx(4.0 * e.lambdas[3]).epsilon(1e-9));

    const auto s = lambda_R_monotone(kSphere, canonicalize_flux(0.5),
                                     {kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2});
    CHECK(s.strictly_decreasing);
    CHECK(s.max_derivative_mismatch <= 1e-4);
    CHECK(s.lambdas.back() == doctest::Approx(0.75).epsilon(1e-7));

    const auto h =
        lambda_R_monotone(kHyper, canonicalize_flux(0.5), {0.5, 1.0, 2.0});
    CHECK(h.strictly_decreasing);
    CHECK(h.max_derivative_mismatch <= 1e-4);

    CHECK_THROWS_AS(lambda_R_monotone(kSphere, canonicalize_flux(0.5), {1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("sufficient conditions")
{
    const auto e = sufficient_conditions(kEuclid, canonicalize_flux(0.25), 1.0);
    CHECK(e.cond_a); // theta' = 1 >= nu
    CHECK(e.cond_a_margin == doctest::Approx(0.75).epsilon(1e-12));

    const auto s = sufficient_conditions(kSphere, canonicalize_flux(0.5), kPi / 2);
    CHECK(s.sphere_form);
    CHECK(s.sphere_form_margin >= -1e-12);
    // lambda_bar at the critical radius equals nu(nu+1) on the sphere, so
    // the two condition-b forms coincide
    CHECK(s.lambda_bar == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(s.cond_b);

    const auto s3 = sufficient_conditions(kSphere, canonicalize_flux(0.5), kPi / 3);
    CHECK(s3.cond_a); // cos >= 1/2 on (0, pi/3)

    const auto h = sufficient_conditions(kHyper, canonicalize_flux(0.5), 1.0);
    CHECK(h.cond_a);
}

TEST_CASE("hardy inequality by quadrature")
{
    const double R = 1.0;
    const auto fd = canonicalize_flux(0.25);
    const std::vector<RadialTestFunction> tfs = {
        {[](double r) { return std::pow(r, 0.25); },
         [](double r) { return 0.25 * std::pow(r, -0.75); }, 0},
        {[](double r) { return r; }, [](double) { return 1.0; }, 1},
    };
    const auto reps = hardy_check(fd, R, tfs);
    REQUIRE(reps.size() == 2);

    // radial f with the k = 0 phase: angular part is exactly nu^2 |u|^2/r^2
    CHECK(reps[0].holds);
    CHECK(reps[0].angular_ratio == doctest::Approx(0.0625).epsilon(1e-8));
    CHECK(reps[0].ratio == doctest::Approx(2 * 0.0625).epsilon(1e-8));

    CHECK(reps[1].holds);
    CHECK(reps[1].lhs > 0.0625 * reps[1].rhs * (1 + 1e-6)); // strict

    const auto fd2 = canonicalize_flux(0.5);
    const auto r2 = hardy_check(
        fd2, R,
        {{[](double r) { return r * (1 - r); }, [](double r) { return 1 - 2 * r; }, 0}});
    CHECK(r2[0].holds);

    CHECK_THROWS_AS(hardy_check(canonicalize_flux(1.0), R, tfs), std::invalid_argument);
    CHECK_THROWS_AS(
        hardy_check(fd, R,
                    {{[](double) { return 1.0; }, [](double) { return 0.0; }, 0}}),
        std::invalid_argument); // does not vanish at the pole
}
