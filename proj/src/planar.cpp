#include "abspec/planar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace abspec {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double loop_signed_area(const std::vector<Point>& loop)
{
    double s = 0.0;
    for (size_t i = 0; i < loop.size(); ++i) {
        const Point& a = loop[i];
        const Point& b = loop[(i + 1) % loop.size()];
        s += a.x * b.y - a.y * b.x;
    }
    return 0.5 * s;
}

bool segments_intersect(const Point& a, const Point& b, const Point& c,
                        const Point& d)
{
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double point_segment_distance(const Point& p, const Point& a, const Point& b)
{
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

} // namespace

void PlanarDomain::validate() const
{
    if (loops.empty()) throw std::invalid_argument("PlanarDomain: no boundary loops");

    for (size_t li = 0; li < loops.size(); ++li) {
        const auto& loop = loops[li];
        if (loop.size() < 3)
            throw std::invalid_argument("PlanarDomain: loop with fewer than 3 vertices");
        const double sa = loop_signed_area(loop);
        if (li == 0 && !(sa > 0))
            throw std::invalid_argument("PlanarDomain: outer loop must be counterclockwise");
        if (li > 0 && !(sa < 0))
            throw std::invalid_argument("PlanarDomain: holes must be clockwise");
    }

    // Simplicity: no proper crossing between non-adjacent segments.
    std::vector<std::array<Point, 2>> segs;
    for (const auto& loop : loops)
        for (size_t i = 0; i < loop.size(); ++i)
            segs.push_back({loop[i], loop[(i + 1) % loop.size()]});
    for (size_t i = 0; i < segs.size(); ++i) {
        for (size_t j = i + 1; j < segs.size(); ++j) {
            // skip segments sharing an endpoint
            const bool share = dist(segs[i][0], segs[j][0]) < 1e-14 ||
                               dist(segs[i][0], segs[j][1]) < 1e-14 ||
                               dist(segs[i][1], segs[j][0]) < 1e-14 ||
                               dist(segs[i][1], segs[j][1]) < 1e-14;
            if (share) continue;
            if (segments_intersect(segs[i][0], segs[i][1], segs[j][0], segs[j][1]))
                throw std::invalid_argument("PlanarDomain: self-intersecting boundary");
        }
    }

    for (const auto& s : segs)
        if (point_segment_distance(pole, s[0], s[1]) < 1e-12)
            throw std::invalid_argument("PlanarDomain: pole lies on the boundary");
}

DomainMeasures domain_measures(const PlanarDomain& domain)
{
    domain.validate();
    DomainMeasures m;
    for (const auto& loop : domain.loops) {
        m.area += loop_signed_area(loop); // holes are clockwise, so negative
        for (size_t i = 0; i < loop.size(); ++i)
            m.perimeter += dist(loop[i], loop[(i + 1) % loop.size()]);
    }
    return m;
}

double boundary_moment(const PlanarDomain& domain, double p)
{
    if (!(p >= 0)) throw std::invalid_argument("boundary_moment: p must be >= 0");
    // 5-point Gauss-Legendre on [0, 1]
    static const double xs[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                                 0.76923465505284155, 0.95308992296933200};
    static const double ws[5] = {0.11846344252809454, 0.23931433524968324,
                                 0.28444444444444444, 0.23931433524968324,
                                 0.11846344252809454};
    double total = 0.0;
    for (const auto& loop : domain.loops) {
        for (size_t i = 0; i < loop.size(); ++i) {
            const Point& a = loop[i];
            const Point& b = loop[(i + 1) % loop.size()];
            const double len = dist(a, b);
            double acc = 0.0;
            for (int q = 0; q < 5; ++q) {
                const double x = a.x + xs[q] * (b.x - a.x);
                const double y = a.y + xs[q] * (b.y - a.y);
                const double r = std::hypot(x - domain.pole.x, y - domain.pole.y);
                acc += ws[q] * std::pow(r, p);
            }
            total += acc * len;
        }
    }
    return total;
}

MomentCheck brock_moment_check(const PlanarDomain& domain, double p)
{
    MomentCheck out;
    out.lhs = boundary_moment(domain, p);
    const double area = domain_measures(domain).area;
    out.rhs = 2.0 * std::pow(kPi, (1.0 - p) / 2.0) * std::pow(area, (p + 1.0) / 2.0);
    out.holds = out.lhs >= out.rhs * (1.0 - 1e-12);
    return out;
}

namespace {

struct EdgeKey {
    int a, b;
    bool operator<(const EdgeKey& o) const
    {
        return a != o.a ? a < o.a : b < o.b;
    }
};

EdgeKey make_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Radial grading relative to the boundary polygon: vertex at polar fraction
// f moves to fraction f^beta along its pole ray.
void apply_grading(TriMesh& mesh, const Point& pole, double beta)
{
    if (beta == 1.0) return;

    // Boundary vertices ordered by angle around the pole.
    std::set<int> bset;
    for (const auto& e : mesh.boundary_edges) {
        bset.insert(e[0]);
        bset.insert(e[1]);
    }
    std::vector<std::pair<double, int>> ring;
    for (int idx : bset) {
        const Point& v = mesh.vertices[idx];
        ring.emplace_back(std::atan2(v.y - pole.y, v.x - pole.x), idx);
    }
    std::sort(ring.begin(), ring.end());

    const auto boundary_radius = [&](double t) {
        auto it = std::upper_bound(ring.begin(), ring.end(),
                                   std::make_pair(t, std::numeric_limits<int>::max()));
        const auto& hi = (it == ring.end()) ? ring.front() : *it;
        const auto& lo = (it == ring.begin()) ? ring.back() : *(it - 1);
        const Point& p1 = mesh.vertices[lo.second];
        const Point& p2 = mesh.vertices[hi.second];
        // intersect ray pole + s (cos t, sin t) with segment p1-p2
        const double ux = std::cos(t), uy = std::sin(t);
        const double ex = p2.x - p1.x, ey = p2.y - p1.y;
        const double det = ux * (-ey) - uy * (-ex);
        if (std::abs(det) < 1e-30) return std::hypot(p1.x - pole.x, p1.y - pole.y);
        const double bx = p1.x - pole.x, by = p1.y - pole.y;
        const double s = (bx * (-ey) + by * ex) / det;
        return s;
    };

    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        if (static_cast<int>(i) == mesh.pole_vertex) continue;
        if (bset.count(static_cast<int>(i))) continue;
        Point& v = mesh.vertices[i];
        const double dx = v.x - pole.x, dy = v.y - pole.y;
        const double r = std::hypot(dx, dy);
        if (r == 0.0) continue;
        const double t = std::atan2(dy, dx);
        const double d = boundary_radius(t);
        if (!(d > 0)) continue;
        const double f = std::min(r / d, 1.0);
        const double rnew = d * std::pow(f, beta);
        v.x = pole.x + dx / r * rnew;
        v.y = pole.y + dy / r * rnew;
    }
}

} // namespace

TriMesh mesh_generate(const PlanarDomain& domain, int refinement_level,
                      const MeshOptions& options)
{
    domain.validate();
    if (domain.loops.size() != 1)
        throw std::invalid_argument(
            "mesh_generate: built-in mesher handles a single loop (no holes)");
    if (refinement_level < 0 || refinement_level > 10)
        throw std::invalid_argument("mesh_generate: refinement_level out of range");

    const auto& loop = domain.loops[0];
    const Point pole = domain.pole;

    // Star-shapedness w.r.t. the pole: boundary angles strictly monotone.
    {
        double prev = std::atan2(loop[0].y - pole.y, loop[0].x - pole.x);
        double turned = 0.0;
        for (size_t i = 1; i <= loop.size(); ++i) {
            const Point& v = loop[i % loop.size()];
            const double t = std::atan2(v.y - pole.y, v.x - pole.x);
            double dt = t - prev;
            while (dt <= -kPi) dt += 2 * kPi;
            while (dt > kPi) dt -= 2 * kPi;
            if (!(dt > 0))
                throw std::invalid_argument(
                    "mesh_generate: domain is not star-shaped about the pole");
            turned += dt;
            prev = t;
        }
        if (std::abs(turned - 2 * kPi) > 1e-9)
            throw std::invalid_argument("mesh_generate: boundary does not wind once");
    }

    TriMesh mesh;
    mesh.pole_vertex = 0;
    mesh.vertices.push_back(pole);
    const int n0 = static_cast<int>(loop.size());
    const int rings = std::max(options.grading_rings, 0);

    // Rings at fractions 2^-m of each spoke, boundary ring first (m = 0).
    const auto ring_vertex = [&](int m, int i) {
        return 1 + m * n0 + i;
    };
    for (int m = 0; m <= rings; ++m) {
        const double f = std::ldexp(1.0, -m); // 2^-m
        for (int i = 0; i < n0; ++i) {
            mesh.vertices.push_back({pole.x + f * (loop[i].x - pole.x),
                                     pole.y + f * (loop[i].y - pole.y)});
        }
    }
    // Pole fan on the innermost ring.
    for (int i = 0; i < n0; ++i)
        mesh.triangles.push_back(
            {0, ring_vertex(rings, i), ring_vertex(rings, (i + 1) % n0)});
    // Annulus bands, two triangles per quad, counterclockwise.
    for (int m = rings; m >= 1; --m) {
        for (int i = 0; i < n0; ++i) {
            const int in0 = ring_vertex(m, i);
            const int in1 = ring_vertex(m, (i + 1) % n0);
            const int out0 = ring_vertex(m - 1, i);
            const int out1 = ring_vertex(m - 1, (i + 1) % n0);
            mesh.triangles.push_back({in0, out0, out1});
            mesh.triangles.push_back({in0, out1, in1});
        }
    }
    for (int i = 0; i < n0; ++i)
        mesh.boundary_edges.push_back(
            {ring_vertex(0, i), ring_vertex(0, (i + 1) % n0)});

    for (int level = 0; level < refinement_level; ++level) {
        std::set<EdgeKey> boundary;
        for (const auto& e : mesh.boundary_edges)
            boundary.insert(make_key(e[0], e[1]));

        std::map<EdgeKey, int> midpoint;
        const auto mid_of = [&](int a, int b) {
            const EdgeKey key = make_key(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Point m{0.5 * (mesh.vertices[a].x + mesh.vertices[b].x),
                    0.5 * (mesh.vertices[a].y + mesh.vertices[b].y)};
            if (boundary.count(key) && domain.boundary_projector)
                m = domain.boundary_projector(m);
            const int idx = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(m);
            midpoint.emplace(key, idx);
            return idx;
        };

        std::vector<std::array<int, 3>> tris;
        tris.reserve(mesh.triangles.size() * 4);
        for (const auto& t : mesh.triangles) {
            const int ab = mid_of(t[0], t[1]);
            const int bc = mid_of(t[1], t[2]);
            const int ca = mid_of(t[2], t[0]);
            tris.push_back({t[0], ab, ca});
            tris.push_back({ab, t[1], bc});
            tris.push_back({ca, bc, t[2]});
            tris.push_back({ab, bc, ca});
        }
        mesh.triangles = std::move(tris);

        std::vector<std::array<int, 2>> bedges;
        bedges.reserve(mesh.boundary_edges.size() * 2);
        for (const auto& e : mesh.boundary_edges) {
            const int m = mid_of(e[0], e[1]);
            bedges.push_back({e[0], m});
            bedges.push_back({m, e[1]});
        }
        mesh.boundary_edges = std::move(bedges);
    }

    apply_grading(mesh, pole, options.grade_exponent);
    return mesh;
}

TriMesh annulus_mesh(double r_in, double r_out, int n_radial, int n_angular)
{
    if (!(r_in > 0) || !(r_out > r_in))
        throw std::invalid_argument("annulus_mesh: require 0 < r_in < r_out");
    if (n_radial < 1 || n_angular < 3)
        throw std::invalid_argument("annulus_mesh: grid too coarse");

    TriMesh mesh;
    mesh.pole_vertex = -1;
    const auto vid = [&](int i, int j) { return i * n_angular + (j % n_angular); };
    for (int i = 0; i <= n_radial; ++i) {
        const double r = r_in + (r_out - r_in) * i / n_radial;
        for (int j = 0; j < n_angular; ++j) {
            const double t = 2 * kPi * j / n_angular;
            mesh.vertices.push_back({r * std::cos(t), r * std::sin(t)});
        }
    }
    for (int i = 0; i < n_radial; ++i) {
        for (int j = 0; j < n_angular; ++j) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    for (int j = 0; j < n_angular; ++j) {
        mesh.boundary_edges.push_back({vid(n_radial, j), vid(n_radial, j + 1)});
        mesh.boundary_edges.push_back({vid(0, j + 1), vid(0, j)}); // hole, clockwise
    }
    return mesh;
}

void write_mesh(const TriMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
    out << "ABMESH 1\n";
    out << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' '
        << mesh.boundary_edges.size() << ' ' << mesh.pole_vertex << '\n';
    char buf[80];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        out << buf;
    }
    for (const auto& t : mesh.triangles)
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
    if (!out) throw std::runtime_error("write_mesh: write failed for " + path);
}

TriMesh read_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh: cannot open " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "ABMESH" || version != 1)
        throw std::runtime_error("read_mesh: not an ABMESH 1 file: " + path);
    size_t nv = 0, nt = 0, nb = 0;
    TriMesh mesh;
    in >> nv >> nt >> nb >> mesh.pole_vertex;
    if (!in) throw std::runtime_error("read_mesh: malformed header in " + path);
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) in >> v.x >> v.y;
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
    mesh.boundary_edges.resize(nb);
    for (auto& e : mesh.boundary_edges) in >> e[0] >> e[1];
    if (!in) throw std::runtime_error("read_mesh: truncated mesh file " + path);
    validate_mesh(mesh);
    return mesh;
}

void validate_mesh(const TriMesh& mesh)
{
    const int nv = static_cast<int>(mesh.vertices.size());
    if (mesh.pole_vertex >= nv)
        throw std::runtime_error("mesh: pole index out of range");

    std::map<EdgeKey, int> edge_count;
    std::set<std::pair<int, int>> directed;
    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i)
            if (t[i] < 0 || t[i] >= nv)
                throw std::runtime_error("mesh: triangle vertex out of range");
        const Point& a = mesh.vertices[t[0]];
        const Point& b = mesh.vertices[t[1]];
        const Point& c = mesh.vertices[t[2]];
        if (!(cross(a, b, c) > 0))
            throw std::runtime_error("mesh: triangle not counterclockwise");
        for (int i = 0; i < 3; ++i) {
            ++edge_count[make_key(t[i], t[(i + 1) % 3])];
            directed.insert({t[i], t[(i + 1) % 3]});
        }
    }
    for (const auto& [key, cnt] : edge_count)
        if (cnt > 2) throw std::runtime_error("mesh: non-conforming edge");

    std::set<EdgeKey> boundary_keys;
    for (const auto& e : mesh.boundary_edges) {
        if (e[0] < 0 || e[0] >= nv || e[1] < 0 || e[1] >= nv)
            throw std::runtime_error("mesh: boundary edge vertex out of range");
        const auto it = edge_count.find(make_key(e[0], e[1]));
        if (it == edge_count.end() || it->second != 1)
            throw std::runtime_error("mesh: boundary edge not on exactly one triangle");
        if (!directed.count({e[0], e[1]}))
            throw std::runtime_error("mesh: boundary edge orientation inconsistent");
        boundary_keys.insert(make_key(e[0], e[1]));
    }
    for (const auto& [key, cnt] : edge_count)
        if (cnt == 1 && !boundary_keys.count(key))
            throw std::runtime_error("mesh: unpaired edge missing from boundary list");
}

double mesh_area(const TriMesh& mesh)
{
    double s = 0.0;
    for (const auto& t : mesh.triangles)
        s += 0.5 * cross(mesh.vertices[t[0]], mesh.vertices[t[1]],
                         mesh.vertices[t[2]]);
    return s;
}

double mesh_boundary_length(const TriMesh& mesh)
{
    double s = 0.0;
    for (const auto& e : mesh.boundary_edges)
        s += dist(mesh.vertices[e[0]], mesh.vertices[e[1]]);
    return s;
}

double min_triangle_angle(const TriMesh& mesh)
{
    double best = 180.0;
    for (const auto& t : mesh.triangles) {
        const Point& a = mesh.vertices[t[0]];
        const Point& b = mesh.vertices[t[1]];
        const Point& c = mesh.vertices[t[2]];
        const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
        const auto angle = [](double opp, double s1, double s2) {
            const double cosv =
                std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
            return std::acos(cosv) * 180.0 / kPi;
        };
        best = std::min({best, angle(la, lb, lc), angle(lb, lc, la),
                         angle(lc, la, lb)});
    }
    return best;
}

PlanarDomain disk_domain(double R, Point center, int n_boundary)
{
    if (!(R > 0)) throw std::invalid_argument("disk_domain: R must be positive");
    if (n_boundary < 3) throw std::invalid_argument("disk_domain: too few vertices");
    if (std::hypot(center.x, center.y) >= R)
        throw std::invalid_argument("disk_domain: pole (origin) must lie inside");

    PlanarDomain d;
    d.pole = {0, 0};
    std::vector<Point> loop(n_boundary);
    for (int i = 0; i < n_boundary; ++i) {
        const double t = 2 * kPi * i / n_boundary;
        loop[i] = {center.x + R * std::cos(t), center.y + R * std::sin(t)};
    }
    d.loops.push_back(std::move(loop));
    d.boundary_projector = [R, center](const Point& p) {
        const double dx = p.x - center.x, dy = p.y - center.y;
        const double r = std::hypot(dx, dy);
        return Point{center.x + dx / r * R, center.y + dy / r * R};
    };
    return d;
}

PlanarDomain square_domain(double side, int points_per_side)
{
    if (!(side > 0)) throw std::invalid_argument("square_domain: side must be positive");
    if (points_per_side < 1)
        throw std::invalid_argument("square_domain: points_per_side must be >= 1");
    const double h = side / 2;
    const Point corners[4] = {{h, -h}, {h, h}, {-h, h}, {-h, -h}};
    PlanarDomain d;
    d.pole = {0, 0};
    std::vector<Point> loop;
    for (int c = 0; c < 4; ++c) {
        const Point& a = corners[c];
        const Point& b = corners[(c + 1) % 4];
        for (int i = 0; i < points_per_side; ++i) {
            const double t = static_cast<double>(i) / points_per_side;
            loop.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    d.loops.push_back(std::move(loop));
    return d;
}

PlanarDomain star_domain(double R, unsigned seed, int n_boundary, int max_mode,
                         double amplitude)
{
    if (!(R > 0)) throw std::invalid_argument("star_domain: R must be positive");
    if (!(amplitude >= 0 && amplitude < 0.5))
        throw std::invalid_argument("star_domain: amplitude out of range");

    std::minstd_rand rng(seed == 0 ? 1u : seed);
    const auto uniform = [&rng]() {
        return 2.0 * (static_cast<double>(rng()) - 1.0) /
                   (static_cast<double>(std::minstd_rand::max()) - 1.0) -
               1.0;
    };
    std::vector<double> a(max_mode), phi(max_mode);
    double total = 0.0;
    for (int m = 0; m < max_mode; ++m) {
        a[m] = uniform();
        phi[m] = kPi * uniform();
        total += std::abs(a[m]);
    }
    if (total > 0)
        for (double& v : a) v *= amplitude / total;

    const auto rho = [=](double t) {
        double s = 1.0;
        for (int m = 0; m < max_mode; ++m) s += a[m] * std::cos((m + 1) * t + phi[m]);
        return R * s;
    };

    PlanarDomain d;
    d.pole = {0, 0};
    std::vector<Point> loop(n_boundary);
    for (int i = 0; i < n_boundary; ++i) {
        const double t = 2 * kPi * i / n_boundary;
        loop[i] = {rho(t) * std::cos(t), rho(t) * std::sin(t)};
    }
    d.loops.push_back(std::move(loop));
    d.boundary_projector = [rho](const Point& p) {
        const double t = std::atan2(p.y, p.x);
        const double r = rho(t);
        return Point{r * std::cos(t), r * std::sin(t)};
    };
    return d;
}

PlanarDomain annulus_domain(double r_in, double r_out, int n_boundary)
{
    if (!(r_in > 0) || !(r_out > r_in))
        throw std::invalid_argument("annulus_domain: require 0 < r_in < r_out");
    PlanarDomain d;
    d.pole = {0, 0};
    std::vector<Point> outer(n_boundary), inner(n_boundary);
    for (int i = 0; i < n_boundary; ++i) {
        const double t = 2 * kPi * i / n_boundary;
        outer[i] = {r_out * std::cos(t), r_out * std::sin(t)};
        inner[i] = {r_in * std::cos(-t), r_in * std::sin(-t)}; // clockwise
    }
    d.loops.push_back(std::move(outer));
    d.loops.push_back(std::move(inner));
    return d;
}

} // namespace abspec
