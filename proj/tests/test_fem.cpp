#include "abspec/fem.hpp"

#include "abspec/gauge.hpp"
#include "abspec/radial.hpp"
#include "abspec/specialfun.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

using namespace abspec;
namespace {
constexpr double kPi = std::numbers::pi;

TriMesh disk_mesh(int level, int n0 = 12, int rings = 8)
{
    MeshOptions mo;
    mo.grading_rings = rings;
    return mesh_generate(disk_domain(1.0, {0, 0}, n0), level, mo);
}

Eigen::VectorXcd to_vec(const ComplexField& f)
{
    Eigen::VectorXcd v(f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i) v[i] = f.values[i];
    return v;
}
} // namespace

TEST_CASE("assembled forms: mass, hermiticity, gauge reduction")
{
    const auto mesh = disk_mesh(1);
    const auto forms = assemble(mesh, 0.25, {0, 0});

    // mass(1,1) = area
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(forms.n);
    const std::complex<double> m11 = ones.adjoint() * (forms.mass * ones);
    CHECK(m11.real() == doctest::Approx(mesh_area(mesh)).epsilon(1e-12));
    CHECK(std::abs(m11.imag()) < 1e-14);

    // Hermiticity to machine precision
    const SparseC diff = SparseC(forms.stiffness.adjoint()) - forms.stiffness;
    double h = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseC::InnerIterator it(diff, k); it; ++it)
            h = std::max(h, std::abs(it.value()));
    CHECK(h < 1e-14);

    // boundary mass total = perimeter
    const std::complex<double> b11 = ones.adjoint() * (forms.boundary_mass * ones);
    CHECK(b11.real() == doctest::Approx(mesh_boundary_length(mesh)).epsilon(1e-12));

    // integer flux assembles exactly the flux-free Laplacian
    const auto gauged = assemble(mesh, 1.0, {0, 0});
    const auto plain = assemble(mesh, 0.0, {0, 0});
    const SparseC gdiff = gauged.stiffness - plain.stiffness;
    double gmax = 0.0;
    for (int k = 0; k < gdiff.outerSize(); ++k)
        for (SparseC::InnerIterator it(gdiff, k); it; ++it)
            gmax = std::max(gmax, std::abs(it.value()));
    CHECK(gmax == 0.0);
    CHECK_FALSE(gauged.pole_constrained);

    // constant field has zero flux-free energy
    const std::complex<double> k11 = ones.adjoint() * (plain.stiffness * ones);
    CHECK(std::abs(k11) < 1e-12);
}

TEST_CASE("assembly is bit-stable across thread counts")
{
    const auto mesh = disk_mesh(2);
    AssembleOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = assemble(mesh, 0.25, {0, 0}, one);
    const auto b = assemble(mesh, 0.25, {0, 0}, four);
    const SparseC diff = a.stiffness - b.stiffness;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseC::InnerIterator it(diff, k); it; ++it)
            CHECK(it.value() == Complex(0.0, 0.0));
}

TEST_CASE("pole handling")
{
    const auto mesh = disk_mesh(1);
    const auto forms = assemble(mesh, 0.25, {0, 0});
    CHECK(forms.location == PoleLocation::vertex);
    CHECK(forms.pole_constrained);

    CHECK_THROWS_AS(assemble(mesh, 0.25, {0.0123, 0.0456}), std::invalid_argument);

    const auto far = assemble(mesh, 0.25, {5.0, 0.0});
    CHECK(far.location == PoleLocation::outside);
    CHECK(far.flux == 0.0);

    const auto ann = annulus_mesh(0.5, 1.0, 6, 32);
    const auto hole = assemble(ann, 0.25, {0, 0});
    CHECK(hole.location == PoleLocation::hole);
    CHECK(hole.flux == 0.25);
}

TEST_CASE("neumann eigenvalues on the unit disk")
{
    const auto mesh = disk_mesh(3);
    const double exact = std::pow(oracles::tan2z_root(1), 2);

    const auto eig = neumann_eigs(mesh, 0.5, {0, 0}, 2);
    CHECK(eig.eigenvalues[0] == doctest::Approx(exact).epsilon(2e-2));
    CHECK(eig.eigenvalues[1] == doctest::Approx(exact).epsilon(2e-2));

    // field vanishes at the pole vertex and the Rayleigh quotient matches
    const auto forms = assemble(mesh, 0.5, {0, 0});
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(eig.fields[i].values[mesh.pole_vertex]) == 0.0);
        const Eigen::VectorXcd u = to_vec(eig.fields[i]);
        const std::complex<double> num = u.adjoint() * (forms.stiffness * u);
        const std::complex<double> den = u.adjoint() * (forms.mass * u);
        CHECK(num.real() / den.real() ==
              doctest::Approx(eig.eigenvalues[i]).epsilon(1e-10));
        CHECK(std::abs(num.imag() / num.real()) < 1e-12);
        CHECK(eig.residuals[i] <= 1e-9 * std::max((forms.stiffness * u).norm(),
                                                  (forms.mass * u).norm()));
    }

    // integer flux reproduces the Neumann Laplacian ground state
    const auto zero = neumann_eigs(mesh, 1.0, {0, 0}, 1);
    CHECK(std::abs(zero.eigenvalues[0]) < 1e-6);

    // Hardy positivity: fractional flux with the pole inside gives lambda_1 > 0
    CHECK(neumann_eigs(mesh, 0.25, {0, 0}, 1).eigenvalues[0] > 0.05);
}

TEST_CASE("offset pole strictly lowers the first eigenvalue")
{
    const auto centered = disk_mesh(2);
    const auto offset = mesh_generate(disk_domain(1.0, {0.3, 0.0}, 12), 2);
    const double lc = neumann_eigs(centered, 0.25, {0, 0}, 1).eigenvalues[0];
    const double lo = neumann_eigs(offset, 0.25, {0, 0}, 1).eigenvalues[0];
    CHECK(lo < lc);
}

TEST_CASE("steklov eigenvalues on the unit disk")
{
    const auto mesh = disk_mesh(3);
    const auto eig = steklov_eigs(mesh, 0.25, {0, 0}, 2);
    CHECK(eig.eigenvalues[0] == doctest::Approx(0.25).epsilon(2e-2));
    CHECK(eig.eigenvalues[1] == doctest::Approx(0.75).epsilon(2e-2));
    CHECK(eig.eigenvalues[0] > 0.0);

    // residuals of the recovered full-space fields; the constrained pole row
    // carries the constraint reaction and is excluded
    CHECK(eig.residuals[0] <= 1e-8);
    const auto forms = assemble(mesh, 0.25, {0, 0});
    const Eigen::VectorXcd u = to_vec(eig.fields[0]);
    Eigen::VectorXcd r =
        forms.stiffness * u - eig.eigenvalues[0] * (forms.boundary_mass * u);
    r[mesh.pole_vertex] = 0.0;
    CHECK(r.norm() <= 1e-8 * (forms.stiffness * u).norm());
    CHECK(std::abs(u[mesh.pole_vertex]) == 0.0);
}

TEST_CASE("annulus steklov matches the separable pencil")
{
    const auto mesh = annulus_mesh(0.5, 1.0, 24, 96);
    const auto fem = steklov_eigs(mesh, 0.25, {0, 0}, 3);
    const auto pencil = steklov_annulus(canonicalize_flux(0.25), 0.5, 1.0, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(fem.eigenvalues[i] ==
              doctest::Approx(pencil.entries[i].value).epsilon(1e-2));
}

TEST_CASE("gauge convergence under refinement")
{
    // nu and nu + 1 agree only in the continuum; the discrete gap shrinks
    double prev_gap = 0.0;
    for (int L : {2, 3}) {
        const auto mesh = disk_mesh(L);
        const double a = neumann_eigs(mesh, 0.25, {0, 0}, 1).eigenvalues[0];
        const double b = neumann_eigs(mesh, 1.25, {0, 0}, 1).eigenvalues[0];
        const double gap = std::abs(a - b) / a;
        if (L == 2)
            prev_gap = gap;
        else {
            CHECK(gap < prev_gap);
            CHECK(gap < 0.02);
        }
    }
}

TEST_CASE("isoperimetric checks on small meshes")
{
    // centered disk: near equality in every mode
    const auto disk_chk =
        verify_isoperimetric(disk_domain(1.0, {0, 0}, 12), 0.25,
                             IsoMode::neumann_area, 3);
    CHECK(disk_chk.holds);
    CHECK(std::abs(disk_chk.margin) <= 0.02 * disk_chk.rhs);

    const auto sq = square_domain(2.0);
    const auto brock = verify_isoperimetric(sq, 0.25, IsoMode::brock_area, 2);
    CHECK(brock.holds);
    CHECK(brock.margin > 0.0);
    CHECK(brock.rhs ==
          doctest::Approx(std::sqrt(kPi) * 0.25 / std::sqrt(brock.area)).epsilon(1e-12));

    const auto wein = verify_isoperimetric(sq, 0.25, IsoMode::weinstock_perimeter, 2);
    CHECK(wein.holds);
    CHECK(wein.rhs == doctest::Approx(2 * kPi * 0.25 / wein.perimeter).epsilon(1e-12));

    const auto schro = verify_isoperimetric(
        star_domain(1.0, 3, 12), 0.0, IsoMode::schrodinger, 2,
        std::function<double(double)>([](double r) { return 1.0 / (1.0 + r * r); }));
    CHECK(schro.holds);

    CHECK_THROWS_AS(verify_isoperimetric_mesh(annulus_mesh(0.5, 1.0, 4, 24), 0.25,
                                              IsoMode::weinstock_perimeter, {}),
                    std::invalid_argument);
}
