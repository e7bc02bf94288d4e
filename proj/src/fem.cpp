#include "abspec/fem.hpp"

#include "abspec/gauge.hpp"
#include "abspec/radial.hpp"
#include "abspec/specialfun.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace abspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDenseThreshold = 500;
constexpr double kResidualTol = 1e-9;

int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ABSPEC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return std::min(v, 64);
    }
    return 1;
}

std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh)
{
    std::map<int, int> next;
    for (const auto& e : mesh.boundary_edges) next[e[0]] = e[1];
    std::vector<std::vector<int>> loops;
    std::map<int, bool> used;
    for (const auto& [start, _] : next) {
        if (used[start]) continue;
        std::vector<int> loop;
        int v = start;
        do {
            loop.push_back(v);
            used[v] = true;
            const auto it = next.find(v);
            if (it == next.end())
                throw std::runtime_error("boundary_loops: open boundary chain");
            v = it->second;
        } while (v != start && loop.size() <= next.size());
        loops.push_back(std::move(loop));
    }
    return loops;
}

double loop_area(const TriMesh& mesh, const std::vector<int>& loop)
{
    double s = 0.0;
    for (size_t i = 0; i < loop.size(); ++i) {
        const Point& a = mesh.vertices[loop[i]];
        const Point& b = mesh.vertices[loop[(i + 1) % loop.size()]];
        s += a.x * b.y - a.y * b.x;
    }
    return 0.5 * s;
}

bool point_in_loop(const TriMesh& mesh, const std::vector<int>& loop,
                   const Point& p)
{
    bool inside = false;
    for (size_t i = 0; i < loop.size(); ++i) {
        const Point& a = mesh.vertices[loop[i]];
        const Point& b = mesh.vertices[loop[(i + 1) % loop.size()]];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (x > p.x) inside = !inside;
        }
    }
    return inside;
}

PoleLocation locate_pole(const TriMesh& mesh, const Point& pole, int& pole_vertex)
{
    pole_vertex = -1;
    double scale = 1.0;
    for (const auto& v : mesh.vertices)
        scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    if (mesh.pole_vertex >= 0) {
        const Point& v = mesh.vertices[mesh.pole_vertex];
        if (std::hypot(v.x - pole.x, v.y - pole.y) < 1e-9 * scale) {
            pole_vertex = mesh.pole_vertex;
            return PoleLocation::vertex;
        }
    }
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Point& v = mesh.vertices[i];
        if (std::hypot(v.x - pole.x, v.y - pole.y) < 1e-12 * scale) {
            pole_vertex = static_cast<int>(i);
            return PoleLocation::vertex;
        }
    }
    for (const auto& t : mesh.triangles) {
        const Point& a = mesh.vertices[t[0]];
        const Point& b = mesh.vertices[t[1]];
        const Point& c = mesh.vertices[t[2]];
        const auto side = [&](const Point& p, const Point& q) {
            return (q.x - p.x) * (pole.y - p.y) - (q.y - p.y) * (pole.x - p.x);
        };
        if (side(a, b) >= -1e-14 && side(b, c) >= -1e-14 && side(c, a) >= -1e-14)
            throw std::invalid_argument(
                "assemble: pole lies inside the mesh but is not a vertex");
    }
    for (const auto& loop : boundary_loops(mesh)) {
        if (loop_area(mesh, loop) > 0 && point_in_loop(mesh, loop, pole))
            return PoleLocation::hole;
    }
    return PoleLocation::outside;
}

} // namespace

AssembledForms assemble(const TriMesh& mesh, double nu, Point pole,
                        const AssembleOptions& options)
{
    validate_mesh(mesh);
    const int n = static_cast<int>(mesh.vertices.size());

    AssembledForms forms;
    forms.n = n;
    int pole_vertex = -1;
    forms.location = locate_pole(mesh, pole, pole_vertex);
    forms.pole = forms.location == PoleLocation::vertex
                     ? mesh.vertices[pole_vertex]
                     : pole;

    const FluxData fd = canonicalize_flux(nu);
    // Integer flux (and a pole in the unbounded complement) is gauge
    // equivalent to the flux-free Laplacian; assemble it that way so the
    // spectra coincide to machine precision.
    forms.flux = (fd.is_integer || forms.location == PoleLocation::outside)
                     ? 0.0
                     : nu;

    bool singular_potential = false;
    if (options.radial_potential && forms.location == PoleLocation::vertex) {
        const auto& V = *options.radial_potential;
        singular_potential = V(1e-7) * 1e-14 > 1e-10;
    }
    forms.pole_constrained = forms.location == PoleLocation::vertex &&
                             (forms.flux != 0.0 || singular_potential);

    const double px = forms.pole.x, py = forms.pole.y;
    const double flux = forms.flux;
    const auto* potential =
        options.radial_potential ? &*options.radial_potential : nullptr;

    const int nt = static_cast<int>(mesh.triangles.size());
    std::vector<std::array<Complex, 9>> ke(nt);
    std::vector<std::array<double, 9>> me(nt);

    const auto element = [&](int ti) {
        const auto& t = mesh.triangles[ti];
        const Point& a = mesh.vertices[t[0]];
        const Point& b = mesh.vertices[t[1]];
        const Point& c = mesh.vertices[t[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        const double area = 0.5 * det;
        // constant P1 gradients
        const double gx[3] = {(b.y - c.y) / det, (c.y - a.y) / det,
                              (a.y - b.y) / det};
        const double gy[3] = {(c.x - b.x) / det, (a.x - c.x) / det,
                              (b.x - a.x) / det};
        // edge midpoints, weight area/3; phi values per midpoint
        const Point mids[3] = {{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)},
                               {0.5 * (b.x + c.x), 0.5 * (b.y + c.y)},
                               {0.5 * (c.x + a.x), 0.5 * (c.y + a.y)}};
        static const double phi[3][3] = {{0.5, 0.5, 0.0},
                                         {0.0, 0.5, 0.5},
                                         {0.5, 0.0, 0.5}};
        double ax[3], ay[3], w0[3];
        for (int m = 0; m < 3; ++m) {
            const double dx = mids[m].x - px;
            const double dy = mids[m].y - py;
            const double r2 = dx * dx + dy * dy;
            ax[m] = flux != 0.0 ? -flux * dy / r2 : 0.0;
            ay[m] = flux != 0.0 ? flux * dx / r2 : 0.0;
            w0[m] = ax[m] * ax[m] + ay[m] * ay[m];
            if (potential) w0[m] += (*potential)(std::sqrt(r2));
        }
        const double w = area / 3.0;
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) {
                double re = area * (gx[p] * gx[q] + gy[p] * gy[q]);
                double im = 0.0;
                double mm = 0.0;
                for (int m = 0; m < 3; ++m) {
                    re += w * w0[m] * phi[m][p] * phi[m][q];
                    im += w * (ax[m] * (phi[m][p] * gx[q] - phi[m][q] * gx[p]) +
                               ay[m] * (phi[m][p] * gy[q] - phi[m][q] * gy[p]));
                    mm += w * phi[m][p] * phi[m][q];
                }
                ke[ti][3 * p + q] = Complex(re, im);
                me[ti][3 * p + q] = mm;
            }
        }
    };

    const int threads = resolve_threads(options.threads);
    if (threads <= 1 || nt < 256) {
        for (int ti = 0; ti < nt; ++ti) element(ti);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> cursor{0};
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const int ti = cursor.fetch_add(64);
                    if (ti >= nt) return;
                    for (int i = ti; i < std::min(ti + 64, nt); ++i) element(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Serial reduction in element order keeps the result identical for any
    // thread count.
    std::vector<Eigen::Triplet<Complex>> kt, mt, bt;
    kt.reserve(nt * 9);
    mt.reserve(nt * 9);
    for (int ti = 0; ti < nt; ++ti) {
        const auto& t = mesh.triangles[ti];
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                kt.emplace_back(t[p], t[q], ke[ti][3 * p + q]);
                mt.emplace_back(t[p], t[q], Complex(me[ti][3 * p + q], 0.0));
            }
    }
    for (const auto& e : mesh.boundary_edges) {
        const Point& a = mesh.vertices[e[0]];
        const Point& b = mesh.vertices[e[1]];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        bt.emplace_back(e[0], e[0], Complex(len / 3.0, 0.0));
        bt.emplace_back(e[1], e[1], Complex(len / 3.0, 0.0));
        bt.emplace_back(e[0], e[1], Complex(len / 6.0, 0.0));
        bt.emplace_back(e[1], e[0], Complex(len / 6.0, 0.0));
    }

    forms.stiffness.resize(n, n);
    forms.mass.resize(n, n);
    forms.boundary_mass.resize(n, n);
    forms.stiffness.setFromTriplets(kt.begin(), kt.end());
    forms.mass.setFromTriplets(mt.begin(), mt.end());
    forms.boundary_mass.setFromTriplets(bt.begin(), bt.end());
    return forms;
}

namespace {

struct Reduction {
    std::vector<int> full_of_red; // reduced index -> full index
    std::vector<int> red_of_full; // full index -> reduced index or -1
};

Reduction make_reduction(int n, int constrained)
{
    Reduction red;
    red.red_of_full.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (i == constrained) continue;
        red.red_of_full[i] = static_cast<int>(red.full_of_red.size());
        red.full_of_red.push_back(i);
    }
    return red;
}

SparseC reduce_matrix(const SparseC& A, const Reduction& red)
{
    std::vector<Eigen::Triplet<Complex>> ts;
    ts.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseC::InnerIterator it(A, k); it; ++it) {
            const int r = red.red_of_full[it.row()];
            const int c = red.red_of_full[it.col()];
            if (r >= 0 && c >= 0) ts.emplace_back(r, c, it.value());
        }
    }
    SparseC out(red.full_of_red.size(), red.full_of_red.size());
    out.setFromTriplets(ts.begin(), ts.end());
    return out;
}

Eigen::VectorXcd expand_field(const Eigen::VectorXcd& x, const Reduction& red,
                              int n)
{
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n);
    for (size_t i = 0; i < red.full_of_red.size(); ++i)
        full[red.full_of_red[i]] = x[static_cast<int>(i)];
    return full;
}

double residual_norm(const SparseC& K, const SparseC& M, double lambda,
                     const Eigen::VectorXcd& x, double* denom = nullptr)
{
    const Eigen::VectorXcd ku = K * x;
    const Eigen::VectorXcd mu = M * x;
    if (denom) *denom = std::max(ku.norm(), mu.norm());
    return (ku - lambda * mu).norm();
}

// Deterministic start block: all-ones plus linear-congruential filler.
Eigen::MatrixXcd start_block(int n, int m)
{
    Eigen::MatrixXcd X(n, m);
    X.col(0).setOnes();
    std::minstd_rand rng(12345);
    for (int j = 1; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            const double u =
                2.0 * (static_cast<double>(rng()) /
                       static_cast<double>(std::minstd_rand::max())) -
                1.0;
            X(i, j) = Complex(u, 0.0);
        }
    return X;
}

struct ReducedEigs {
    std::vector<double> values;
    std::vector<Eigen::VectorXcd> vectors;
    double diagonal_shift = 0.0;
};

ReducedEigs solve_generalized(const SparseC& K, const SparseC& M, int count)
{
    const int n = static_cast<int>(K.rows());
    count = std::min(count, n);
    ReducedEigs out;

    if (n <= kDenseThreshold) {
        Eigen::MatrixXcd Kd(K), Md(M);
        Kd = 0.5 * (Kd + Kd.adjoint()).eval();
        Md = 0.5 * (Md + Md.adjoint()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(Kd, Md);
        if (ges.info() != Eigen::Success)
            throw std::runtime_error("fem eigensolver: dense factorization failed");
        for (int i = 0; i < count; ++i) {
            out.values.push_back(ges.eigenvalues()[i]);
            out.vectors.push_back(ges.eigenvectors().col(i));
        }
        return out;
    }

    // Shift-invert subspace iteration with deterministic start.
    const double scale = std::abs(K.diagonal().sum()) /
                         std::max(std::abs(M.diagonal().sum()), 1e-300);
    double shift = 1e-5 * scale;
    Eigen::SimplicialLDLT<SparseC> fact;
    for (int attempt = 0;; ++attempt) {
        SparseC Ks = K + shift * M;
        fact.compute(Ks);
        if (fact.info() == Eigen::Success) break;
        if (attempt >= 3)
            throw std::runtime_error("fem eigensolver: factorization failed");
        out.diagonal_shift = (out.diagonal_shift == 0 ? 1e-12 * scale
                                                      : out.diagonal_shift * 100);
        shift += out.diagonal_shift;
    }

    const int m = std::min(n, count + 8);
    Eigen::MatrixXcd X = start_block(n, m);
    Eigen::VectorXd ritz = Eigen::VectorXd::Zero(m);

    for (int iter = 0; iter < 500; ++iter) {
        Eigen::MatrixXcd Y(n, m);
        Y = fact.solve((M * X).eval());
        Eigen::MatrixXcd KY = K * Y;
        Eigen::MatrixXcd MY = M * Y;
        Eigen::MatrixXcd Ar = Y.adjoint() * KY;
        Eigen::MatrixXcd Br = Y.adjoint() * MY;
        Ar = 0.5 * (Ar + Ar.adjoint()).eval();
        Br = 0.5 * (Br + Br.adjoint()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> rr(Ar, Br);
        if (rr.info() != Eigen::Success)
            throw std::runtime_error("fem eigensolver: Rayleigh-Ritz failed");
        X = Y * rr.eigenvectors();
        ritz = rr.eigenvalues();

        bool converged = true;
        for (int i = 0; i < count; ++i) {
            double denom = 0.0;
            const double res = residual_norm(K, M, ritz[i], X.col(i), &denom);
            if (res > kResidualTol * denom) {
                converged = false;
                break;
            }
        }
        if (converged) break;
        if (iter == 499)
            throw std::runtime_error("fem eigensolver: subspace iteration stalled");
    }

    for (int i = 0; i < count; ++i) {
        out.values.push_back(ritz[i]);
        out.vectors.push_back(X.col(i));
    }
    return out;
}

int constrained_vertex(const TriMesh& mesh, const AssembledForms& forms)
{
    if (!forms.pole_constrained) return -1;
    int pv = -1;
    locate_pole(mesh, forms.pole, pv);
    return pv;
}

} // namespace

EigResult neumann_eigs(const TriMesh& mesh, double nu, Point pole, int count,
                       const AssembleOptions& options)
{
    if (count < 1) throw std::invalid_argument("neumann_eigs: count must be >= 1");
    const AssembledForms forms = assemble(mesh, nu, pole, options);
    const Reduction red = make_reduction(forms.n, constrained_vertex(mesh, forms));
    const SparseC K = reduce_matrix(forms.stiffness, red);
    const SparseC M = reduce_matrix(forms.mass, red);

    const ReducedEigs eig = solve_generalized(K, M, count);

    EigResult out;
    out.diagonal_shift = eig.diagonal_shift;
    for (size_t i = 0; i < eig.values.size(); ++i) {
        const double res = residual_norm(K, M, eig.values[i], eig.vectors[i]);
        const Eigen::VectorXcd full = expand_field(eig.vectors[i], red, forms.n);
        out.eigenvalues.push_back(eig.values[i]);
        out.residuals.push_back(res);
        ComplexField f;
        f.values.assign(full.data(), full.data() + full.size());
        out.fields.push_back(std::move(f));
    }
    return out;
}

EigResult steklov_eigs(const TriMesh& mesh, double nu, Point pole, int count,
                       const AssembleOptions& options)
{
    if (count < 1) throw std::invalid_argument("steklov_eigs: count must be >= 1");
    AssembleOptions opts = options;
    opts.radial_potential.reset(); // Steklov problem is potential-free inside
    const AssembledForms forms = assemble(mesh, nu, pole, opts);
    const Reduction red = make_reduction(forms.n, constrained_vertex(mesh, forms));
    const SparseC K = reduce_matrix(forms.stiffness, red);
    const SparseC Mb = reduce_matrix(forms.boundary_mass, red);

    const int nred = static_cast<int>(K.rows());

    // Split boundary/interior (reduced indexing).
    std::vector<bool> is_boundary(forms.n, false);
    for (const auto& e : mesh.boundary_edges)
        is_boundary[e[0]] = is_boundary[e[1]] = true;
    std::vector<int> bidx, iidx;
    for (int r = 0; r < nred; ++r) {
        (is_boundary[red.full_of_red[r]] ? bidx : iidx).push_back(r);
    }
    const int nb = static_cast<int>(bidx.size());
    const int ni = static_cast<int>(iidx.size());
    if (nb == 0) throw std::invalid_argument("steklov_eigs: mesh has no boundary");
    count = std::min(count, nb);

    std::vector<int> pos(nred, -1);
    for (int i = 0; i < nb; ++i) pos[bidx[i]] = i;
    for (int i = 0; i < ni; ++i) pos[iidx[i]] = i;
    std::vector<bool> bmask(nred, false);
    for (int r : bidx) bmask[r] = true;

    std::vector<Eigen::Triplet<Complex>> tii;
    Eigen::MatrixXcd Kib = Eigen::MatrixXcd::Zero(ni, nb);
    Eigen::MatrixXcd Kbb = Eigen::MatrixXcd::Zero(nb, nb);
    for (int k = 0; k < K.outerSize(); ++k) {
        for (SparseC::InnerIterator it(K, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (!bmask[r] && !bmask[c])
                tii.emplace_back(pos[r], pos[c], it.value());
            else if (!bmask[r] && bmask[c])
                Kib(pos[r], pos[c]) += it.value();
            else if (bmask[r] && bmask[c])
                Kbb(pos[r], pos[c]) += it.value();
        }
    }
    SparseC Kii(ni, ni);
    Kii.setFromTriplets(tii.begin(), tii.end());

    double diagonal_shift = 0.0;
    Eigen::SimplicialLDLT<SparseC> fact;
    for (int attempt = 0;; ++attempt) {
        fact.compute(Kii);
        if (fact.info() == Eigen::Success) break;
        if (attempt >= 3)
            throw std::runtime_error("steklov_eigs: interior factorization failed");
        diagonal_shift = diagonal_shift == 0 ? 1e-12 : diagonal_shift * 100;
        SparseC I(ni, ni);
        I.setIdentity();
        Kii = (Kii + diagonal_shift * I).eval();
    }

    // Discrete Dirichlet-to-Neumann map on boundary vertices.
    Eigen::MatrixXcd X(ni, nb);
    if (ni > 0) X = fact.solve(Kib);
    Eigen::MatrixXcd dtn = Kbb;
    if (ni > 0) dtn -= Kib.adjoint() * X;
    dtn = 0.5 * (dtn + dtn.adjoint()).eval();

    Eigen::MatrixXcd Mbb = Eigen::MatrixXcd::Zero(nb, nb);
    for (int k = 0; k < Mb.outerSize(); ++k)
        for (SparseC::InnerIterator it(Mb, k); it; ++it)
            if (bmask[it.row()] && bmask[it.col()])
                Mbb(pos[it.row()], pos[it.col()]) += it.value();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(dtn, Mbb);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("steklov_eigs: boundary pencil solve failed");

    EigResult out;
    out.diagonal_shift = diagonal_shift;
    for (int i = 0; i < count; ++i) {
        const double sigma = ges.eigenvalues()[i];
        const Eigen::VectorXcd ub = ges.eigenvectors().col(i);
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(nred);
        for (int bI = 0; bI < nb; ++bI) x[bidx[bI]] = ub[bI];
        if (ni > 0) {
            const Eigen::VectorXcd ui = -X * ub;
            for (int iI = 0; iI < ni; ++iI) x[iidx[iI]] = ui[iI];
        }
        const double res = residual_norm(K, Mb, sigma, x);
        const Eigen::VectorXcd full = expand_field(x, red, forms.n);
        out.eigenvalues.push_back(sigma);
        out.residuals.push_back(res);
        ComplexField f;
        f.values.assign(full.data(), full.data() + full.size());
        out.fields.push_back(std::move(f));
    }
    return out;
}

IsoperimetricCheck verify_isoperimetric_mesh(
    const TriMesh& mesh, double nu, IsoMode mode,
    const std::optional<std::function<double(double)>>& potential)
{
    IsoperimetricCheck out;
    out.area = mesh_area(mesh);
    out.perimeter = mesh_boundary_length(mesh);
    const FluxData fd = canonicalize_flux(nu);
    const double vstar = fd.canonical;
    const double R = std::sqrt(out.area / kPi);

    switch (mode) {
    case IsoMode::neumann_area: {
        out.lhs = neumann_eigs(mesh, nu, {0, 0}, 1).eigenvalues[0];
        out.rhs = fd.is_integer
                      ? 0.0
                      : std::pow(bessel_deriv_zero(vstar, 1) / R, 2);
        break;
    }
    case IsoMode::brock_area: {
        out.lhs = steklov_eigs(mesh, nu, {0, 0}, 1).eigenvalues[0];
        out.rhs = std::sqrt(kPi) * vstar / std::sqrt(out.area);
        break;
    }
    case IsoMode::weinstock_perimeter: {
        if (boundary_loops(mesh).size() != 1)
            throw std::invalid_argument(
                "verify_isoperimetric: Weinstock mode needs a simply connected domain");
        out.lhs = steklov_eigs(mesh, nu, {0, 0}, 1).eigenvalues[0];
        out.rhs = 2.0 * kPi * vstar / out.perimeter;
        break;
    }
    case IsoMode::schrodinger: {
        if (!potential)
            throw std::invalid_argument(
                "verify_isoperimetric: schrodinger mode needs a potential");
        AssembleOptions opts;
        opts.radial_potential = potential;
        out.lhs = neumann_eigs(mesh, 0.0, {0, 0}, 1, opts).eigenvalues[0];
        out.rhs = schrodinger_radial_eigen(RevolutionProfile::euclidean(),
                                           *potential, R, 1, 64)
                      .front()
                      .value;
        break;
    }
    }

    out.margin = out.rhs - out.lhs;
    out.allowance = std::max(0.02 * out.rhs, 1e-8);
    out.holds = out.margin >= -out.allowance;
    return out;
}

IsoperimetricCheck verify_isoperimetric(
    const PlanarDomain& domain, double nu, IsoMode mode, int refinement_level,
    const std::optional<std::function<double(double)>>& potential)
{
    const TriMesh mesh = mesh_generate(domain, refinement_level);
    return verify_isoperimetric_mesh(mesh, nu, mode, potential);
}

} // namespace abspec
