#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace abspec {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// A planar domain given by closed polylines (outer loop counterclockwise,
/// holes clockwise) together with the pole of the magnetic potential. An
/// optional projector snaps refined boundary vertices onto the exact curve
/// the polyline discretizes.
struct PlanarDomain {
    std::vector<std::vector<Point>> loops;
    Point pole;
    std::function<Point(const Point&)> boundary_projector; // outer loop only

    /// Throws on open/self-intersecting loops, wrong orientation, or a pole
    /// sitting on the boundary.
    void validate() const;
};

struct DomainMeasures {
    double area = 0.0;      ///< shoelace, holes subtracted
    double perimeter = 0.0; ///< total arc length of all loops
};
DomainMeasures domain_measures(const PlanarDomain& domain);

/// int_{boundary} r^p ds with r measured from the pole; 5-point Gauss
/// quadrature per segment.
double boundary_moment(const PlanarDomain& domain, double p);

/// Boundary-moment lower bound: int r^p >= 2 pi^{(1-p)/2} |Omega|^{(p+1)/2},
/// with equality for the pole-centered disk.
struct MomentCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
MomentCheck brock_moment_check(const PlanarDomain& domain, double p);

/// Conforming triangulation with a distinguished pole vertex (or -1 when
/// the pole lies outside the meshed region).
struct TriMesh {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;       // counterclockwise
    std::vector<std::array<int, 2>> boundary_edges;  // domain on the left
    int pole_vertex = -1;
};

struct MeshOptions {
    /// Geometric rings between boundary and pole fan, each at half the
    /// radius of the previous; resolves the r^nu eigenfunction behavior
    /// while keeping elements isotropic at every depth.
    int grading_rings = 12;
    /// Optional extra radial remap f -> f^beta (1.0 = none).
    double grade_exponent = 1.0;
};

/// Graded template (pole fan at the innermost ring, then rings doubling in
/// radius out to the boundary polyline) plus `refinement_level` rounds of
/// uniform 4-way refinement; boundary midpoints are projected back onto the
/// exact boundary when the domain carries a projector. Triangle count is
/// 4^level times the template count. Requires a single loop, star-shaped
/// with respect to the pole.
TriMesh mesh_generate(const PlanarDomain& domain, int refinement_level,
                      const MeshOptions& options = {});

/// Structured annulus mesh r_in < r < r_out (pole in the hole, not meshed).
TriMesh annulus_mesh(double r_in, double r_out, int n_radial, int n_angular);

/// Plain-text mesh format, bit-exact round trip:
///   ABMESH 1
///   V T B pole_index
///   x y            (V lines)
///   i j k          (T lines)
///   i j            (B lines)
void write_mesh(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh(const std::string& path);

/// Structural validation: conforming, oriented, boundary consistent.
void validate_mesh(const TriMesh& mesh);

double mesh_area(const TriMesh& mesh);
double mesh_boundary_length(const TriMesh& mesh);
double min_triangle_angle(const TriMesh& mesh); ///< degrees

// Built-in domain constructors. Poles sit at the origin.

/// Circle of radius R centered at `center` (pole at origin must be inside).
PlanarDomain disk_domain(double R, Point center = {0, 0}, int n_boundary = 16);

/// Axis-aligned square of side `side` centered at the origin.
PlanarDomain square_domain(double side, int points_per_side = 8);

/// Star-shaped perturbation of the unit-ish circle:
/// rho(t) = R (1 + sum a_m cos(m t + phi_m)), deterministic in `seed`.
PlanarDomain star_domain(double R, unsigned seed, int n_boundary = 16,
                         int max_mode = 4, double amplitude = 0.25);

/// Annulus r_in < r < r_out as two loops (for measures; meshing is
/// structured via annulus_mesh).
PlanarDomain annulus_domain(double r_in, double r_out, int n_boundary = 64);

} // namespace abspec
