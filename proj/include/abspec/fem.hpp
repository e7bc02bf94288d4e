#pragma once

#include "abspec/planar.hpp"

#include <Eigen/SparseCore>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace abspec {

using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

/// Per-vertex complex field; exactly zero at the pole vertex whenever the
/// flux is not an integer (the pole degree of freedom is constrained).
struct ComplexField {
    std::vector<Complex> values;
};

struct EigResult {
    std::vector<double> eigenvalues;
    std::vector<ComplexField> fields;
    std::vector<double> residuals;     ///< ||K u - lambda M u||
    double diagonal_shift = 0.0;       ///< regularization applied, if any
};

/// Where the pole sits relative to the meshed region.
enum class PoleLocation { vertex, hole, outside };

struct AssembledForms {
    SparseC stiffness;      ///< (grad - iA) Hermitian form (+ potential term)
    SparseC mass;
    SparseC boundary_mass;
    Point pole;
    PoleLocation location = PoleLocation::outside;
    double flux = 0.0;          ///< flux actually assembled (0 when gauged away)
    bool pole_constrained = false;
    int n = 0;
};

struct AssembleOptions {
    std::optional<std::function<double(double)>> radial_potential;
    int threads = 0; ///< 0: from ABSPEC_THREADS, else hardware-bounded
};

/// Assemble the Hermitian forms of the Aharonov-Bohm operator with flux nu
/// and the given pole on a P1 triangle mesh. Element integrals use the
/// 3-point edge-midpoint rule; the vector potential is evaluated directly at
/// quadrature points (never at the pole itself). Integer flux is gauged to
/// zero potential, as is a pole in the unbounded complement.
AssembledForms assemble(const TriMesh& mesh, double nu, Point pole,
                        const AssembleOptions& options = {});

/// Smallest `count` magnetic Neumann eigenpairs; deterministic shift-invert
/// subspace iteration (dense solve below 500 unknowns). Residuals satisfy
/// ||K u - lambda M u|| <= 1e-9 max(||K u||, ||M u||).
EigResult neumann_eigs(const TriMesh& mesh, double nu, Point pole, int count,
                       const AssembleOptions& options = {});

/// Smallest `count` magnetic Steklov eigenpairs via the boundary Schur
/// complement (discrete Dirichlet-to-Neumann map).
EigResult steklov_eigs(const TriMesh& mesh, double nu, Point pole, int count,
                       const AssembleOptions& options = {});

enum class IsoMode { neumann_area, brock_area, weinstock_perimeter, schrodinger };

struct IsoperimetricCheck {
    double lhs = 0.0;    ///< FEM first eigenvalue on the meshed domain
    double rhs = 0.0;    ///< matched pole-centered disk value
    double margin = 0.0; ///< rhs - lhs
    double allowance = 0.0;
    bool holds = false;
    double area = 0.0;
    double perimeter = 0.0;
};

/// Check one isoperimetric upper bound on a meshed domain against the
/// matched disk (closed forms for the magnetic modes, radial shooting for
/// the Schroedinger mode). The discretization allowance is 2% of rhs.
IsoperimetricCheck verify_isoperimetric(
    const PlanarDomain& domain, double nu, IsoMode mode, int refinement_level,
    const std::optional<std::function<double(double)>>& potential = {});

/// Same check on an already meshed domain.
IsoperimetricCheck verify_isoperimetric_mesh(
    const TriMesh& mesh, double nu, IsoMode mode,
    const std::optional<std::function<double(double)>>& potential = {});

} // namespace abspec
