#include "abspec/radial.hpp"

#include "abspec/quadrature.hpp"
#include "abspec/specialfun.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace abspec {

namespace {

namespace ode = boost::numeric::odeint;
constexpr double kPi = std::numbers::pi;
constexpr double kEigRelTol = 1e-10;
constexpr int kMaxMu = 24; // r^{2 mu} must stay representable from eps on

// The shooting integrates w = u / r^mu, which is analytic at the origin
// (w ~ 1 + O(r^2)); the substituted equation is
//   w'' + [(2 mu + 1)/r + (r tau' - tau)/(r theta)] w'
//      + [lambda + (mu^2/theta^2 - V) + mu * S(r)] w = 0,
// with tau = theta - r and
//   S = [(2 mu - 1) r tau + (mu - 1) tau^2 + r^2 tau' + r tau tau'] / (r^2 theta^2).
// Written this way the 1/r^2 cancellations are explicit, so the
// coefficients stay accurate down to the Frobenius start.
struct RadialSystem {
    const RevolutionProfile* profile;
    const std::function<double(double)>* V;
    double mu;
    double lambda;

    void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy,
                    double r) const
    {
        const double th = profile->theta(r);
        const double th1 = profile->theta1(r);
        const double tau = th - r;
        const double tau1 = th1 - 1.0;
        const double p = (2.0 * mu + 1.0) / r + (r * tau1 - tau) / (r * th);
        const double s_num = (2.0 * mu - 1.0) * r * tau + (mu - 1.0) * tau * tau +
                             r * r * tau1 + r * tau * tau1;
        double q = lambda + mu * s_num / (r * r * th * th);
        q += mu * mu / (th * th) - (*V)(r);
        dy[0] = y[1];
        dy[1] = -p * y[1] - q * y[0];
    }
};

double oscillation_step_cap(double lambda, double R)
{
    const double rate = std::sqrt(std::max(lambda, 1.0));
    return std::min(R / 8.0, 1.2 / rate);
}

struct CountResult {
    int count;    // number of Neumann eigenvalues strictly below lambda
    double g;     // mismatch u'(R) * (-1)^zeros, continuous between eigenvalues
    ShootState state;
};

CountResult count_below(const RadialProblem& pr, double lambda, double R,
                        double eps_scale)
{
    const ShootState st = shoot_radial(pr, lambda, R, eps_scale);
    const double g = st.du_end * ((st.interior_zeros % 2) ? -1.0 : 1.0);
    const int cnt = st.interior_zeros + (g < 0.0 ? 1 : 0);
    return {cnt, g, st};
}

// j-th Neumann eigenvalue: bracket the jump of the spectral counting
// function, then regula falsi on the mismatch within the jump window.
double solve_radial_eigen(const RadialProblem& pr, double R, int target_j)
{
    if (pr.frobenius_mu > kMaxMu)
        throw std::runtime_error("solve_radial_eigen: Frobenius index too large");

    const auto cg = [&](double lam, double eps_scale = 1e-6) {
        return count_below(pr, lam, R, eps_scale);
    };

    const double zest = pr.frobenius_mu + (target_j + 1.0) * kPi;
    double hi = 4.0 * (zest / R) * (zest / R);
    double lo = 0.0;
    for (int grow = 0;; ++grow) {
        if (cg(hi).count >= target_j) break;
        hi *= 4.0;
        if (grow > 40)
            throw std::runtime_error("solve_radial_eigen: lambda bracket exhaustion");
    }

    const double abs_floor = 1e-14 * hi;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double width_goal = (attempt == 0) ? 1e-6 : 1e-9;
        while (hi - lo > width_goal * hi + abs_floor) {
            const double mid = 0.5 * (lo + hi);
            (cg(mid).count >= target_j ? hi : lo) = mid;
        }
        CountResult a = cg(lo), b = cg(hi);
        if (!(a.count < target_j && b.count >= target_j && a.g * b.g < 0.0))
            continue; // Dirichlet crossing inside; narrow further

        // Illinois regula falsi on the smooth mismatch.
        double xa = lo, xb = hi, ga = a.g, gb = b.g;
        for (int it = 0; it < 80 && (xb - xa) > kEigRelTol * std::abs(xb); ++it) {
            double xc = xb - gb * (xb - xa) / (gb - ga);
            if (!(xc > xa && xc < xb)) xc = 0.5 * (xa + xb);
            const double gc = cg(xc).g;
            if (gc == 0.0) {
                xa = xb = xc;
                break;
            }
            if (gc * gb < 0.0) {
                xa = xb;
                ga = gb;
            } else {
                ga *= 0.5; // stale-side damping
            }
            xb = xc;
            gb = gc;
        }
        const double lam = 0.5 * (xa + xb);

        // Validate the counting jump with the halved Frobenius offset; this
        // both confirms we refined the Neumann root (the counting function
        // is flat across Dirichlet values) and guards the start error.
        const double delta = std::max(1e-8 * std::abs(lam), 1e-13);
        if (cg(lam - delta, 5e-7).count == target_j - 1 &&
            cg(lam + delta, 5e-7).count == target_j)
            return lam;
    }
    throw std::runtime_error("solve_radial_eigen: start-offset validation failed");
}

std::function<double(double)> magnetic_potential(const RevolutionProfile& profile,
                                                 double mu)
{
    return [&profile, mu](double r) {
        const double th = profile.theta(r);
        return mu * mu / (th * th);
    };
}

} // namespace

ShootState shoot_radial(const RadialProblem& problem, double lambda, double R,
                        double eps_scale)
{
    const double eps = eps_scale * R;
    RadialSystem sys{problem.profile, &problem.potential, problem.frobenius_mu,
                     lambda};

    std::array<double, 2> y{1.0, 0.0}; // w(eps), w'(eps)
    double r = eps;
    double dt = eps * 0.25;
    const double hmax = oscillation_step_cap(lambda, R);

    auto ctrl = ode::make_controlled(1e-14, 1e-11,
                                     ode::runge_kutta_dopri5<std::array<double, 2>>());
    int zeros = 0;
    double prev_sign = 1.0;
    long steps = 0;
    while (R - r > 1e-15 * R) {
        dt = std::min({dt, hmax, R - r});
        if (!(dt > 1e-18 * R))
            throw std::runtime_error("shoot_radial: step size underflow");
        const auto res = ctrl.try_step(sys, y, r, dt);
        if (res == ode::success) {
            if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
                throw std::runtime_error("shoot_radial: non-finite state (profile fault?)");
            const double s = (y[0] > 0.0) ? 1.0 : (y[0] < 0.0 ? -1.0 : prev_sign);
            if (s * prev_sign < 0.0) ++zeros;
            prev_sign = s;
        }
        if (++steps > 5000000)
            throw std::runtime_error("shoot_radial: step limit exceeded");
    }

    ShootState out;
    out.u_end = y[0];
    out.du_end = y[1] + problem.frobenius_mu * y[0] / R; // u'(R) / R^mu
    out.interior_zeros = zeros;
    return out;
}

RadialEigenpair integrate_radial_dense(const RadialProblem& problem,
                                       double lambda, double R, int samples)
{
    if (samples < 8)
        throw std::invalid_argument("integrate_radial_dense: too few samples");
    const double mu = problem.frobenius_mu;
    const double eps = 1e-6 * R;
    RadialSystem sys2{problem.profile, &problem.potential, mu, lambda};
    const auto sys = [&](const std::array<double, 3>& y, std::array<double, 3>& dy,
                         double r) {
        std::array<double, 2> yy{y[0], y[1]}, dd{};
        sys2(yy, dd, r);
        dy[0] = dd[0];
        dy[1] = dd[1];
        dy[2] = std::pow(r, 2.0 * mu) * y[0] * y[0] * problem.profile->theta(r);
    };

    std::array<double, 3> y{1.0, 0.0, 0.0};
    double r = eps;
    double dt = eps * 0.25;
    const double hmax = oscillation_step_cap(lambda, R);
    auto ctrl = ode::make_controlled(1e-14, 1e-11,
                                     ode::runge_kutta_dopri5<std::array<double, 3>>());

    RadialEigenpair out;
    out.value = lambda;
    out.r.resize(samples);
    out.u.resize(samples);
    out.du.resize(samples);

    long steps = 0;
    for (int i = 0; i < samples; ++i) {
        const double target = R * (i + 1) / samples;
        while (target - r > 1e-15 * R) {
            dt = std::min({dt, hmax, target - r});
            if (!(dt > 1e-18 * R))
                throw std::runtime_error("integrate_radial_dense: step underflow");
            ctrl.try_step(sys, y, r, dt);
            if (++steps > 5000000)
                throw std::runtime_error("integrate_radial_dense: step limit");
        }
        const double rp = std::pow(target, mu);
        out.r[i] = target;
        out.u[i] = rp * y[0];
        out.du[i] = rp * (y[1] + mu * y[0] / target);
        if (!std::isfinite(out.u[i]))
            throw std::runtime_error("integrate_radial_dense: non-finite sample");
    }

    const double norm = std::sqrt(y[2]);
    if (norm > 0.0 && std::isfinite(norm)) {
        for (int i = 0; i < samples; ++i) {
            out.u[i] /= norm;
            out.du[i] /= norm;
        }
    }
    return out;
}

std::vector<RadialEigenpair> neumann_radial_eigen(const RevolutionProfile& profile,
                                                  const FluxData& nu, int k,
                                                  double R, int j_max, int samples)
{
    if (!(R > 0) || !(R < profile.diameter()))
        throw std::invalid_argument("neumann_radial_eigen: R outside (0, diameter)");
    if (j_max < 1)
        throw std::invalid_argument("neumann_radial_eigen: j_max must be >= 1");

    // The order |k - nu| is gauge-invariant; integer flux with k = nu gives
    // mu = 0 and the plain Neumann mode chain.
    const double mu = std::abs(static_cast<double>(k) - nu.nu);
    RadialProblem pr{&profile, magnetic_potential(profile, mu), mu};

    std::vector<RadialEigenpair> out;
    out.reserve(static_cast<size_t>(j_max));
    for (int j = 1; j <= j_max; ++j) {
        if (mu == 0.0 && j == 1) {
            // integer flux, k = nu: the plain Neumann ground state
            RadialEigenpair pair;
            pair.k = k;
            pair.j = 1;
            pair.value = 0.0;
            const double vol1d =
                integrate([&](double s) { return profile.theta(s); }, 0.0, R);
            const double c = 1.0 / std::sqrt(vol1d);
            pair.r.resize(samples);
            pair.u.assign(samples, c);
            pair.du.assign(samples, 0.0);
            for (int i = 0; i < samples; ++i) pair.r[i] = R * (i + 1) / samples;
            out.push_back(std::move(pair));
            continue;
        }
        const double lam = solve_radial_eigen(pr, R, j);
        RadialEigenpair pair = integrate_radial_dense(pr, lam, R, samples);
        pair.k = k;
        pair.j = j;
        out.push_back(std::move(pair));
    }
    return out;
}

std::vector<std::vector<int>> cluster_multiplicities(
    const std::vector<SpectrumEntry>& entries, double rel_tol)
{
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < static_cast<int>(entries.size()); ++i) {
        const double v = entries[i].value;
        if (!groups.empty()) {
            const double prev = entries[groups.back().back()].value;
            if (v - prev <= rel_tol * std::max(std::abs(v), 1e-9)) {
                groups.back().push_back(i);
                continue;
            }
        }
        groups.push_back({i});
    }
    return groups;
}

namespace {

SpectrumTable finalize_table(std::vector<SpectrumEntry> entries, int count)
{
    std::sort(entries.begin(), entries.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) {
                  if (a.value != b.value) return a.value < b.value;
                  if (std::abs(a.k) != std::abs(b.k))
                      return std::abs(a.k) < std::abs(b.k);
                  if (a.k != b.k) return a.k > b.k;
                  return a.j < b.j;
              });
    if (static_cast<int>(entries.size()) > count) entries.resize(count);
    SpectrumTable table;
    table.entries = std::move(entries);
    table.multiplicity_groups = cluster_multiplicities(table.entries);
    return table;
}

} // namespace

SpectrumTable neumann_spectrum(const RevolutionProfile& profile, const FluxData& nu,
                               double R, int count)
{
    if (count < 1)
        throw std::invalid_argument("neumann_spectrum: count must be >= 1");

    // Hardy-type lower bound: lambda_{k1} >= mu^2 / max(theta)^2.
    double theta_max = 0.0;
    for (int i = 1; i <= 512; ++i)
        theta_max = std::max(theta_max, profile.theta(R * i / 512.0));

    const auto orders = order_sequence(nu.canonical, std::max(count + 4, 16));
    std::vector<SpectrumEntry> entries;
    std::vector<double> sorted_values;
    std::map<double, std::vector<double>> cache; // mu -> eigenvalues found

    const auto cutoff = [&]() {
        return static_cast<int>(sorted_values.size()) >= count
                   ? sorted_values[count - 1]
                   : std::numeric_limits<double>::infinity();
    };
    const auto push = [&](double v, int k, int j) {
        entries.push_back({v, k, j});
        sorted_values.insert(
            std::lower_bound(sorted_values.begin(), sorted_values.end(), v), v);
    };

    for (const auto& [mu, k] : orders) {
        if (static_cast<int>(entries.size()) >= count &&
            mu * mu / (theta_max * theta_max) > cutoff())
            break;
        auto& lams = cache[mu];
        RadialProblem pr{&profile, magnetic_potential(profile, mu), mu};
        for (int j = 1;; ++j) {
            if (static_cast<int>(lams.size()) < j) {
                if (mu == 0.0 && j == 1)
                    lams.push_back(0.0);
                else
                    lams.push_back(solve_radial_eigen(pr, R, j));
            }
            const double lam = lams[j - 1];
            if (static_cast<int>(entries.size()) >= count && lam > cutoff()) break;
            push(lam, k, j);
            if (lam > cutoff()) break;
        }
    }
    return finalize_table(std::move(entries), count);
}

SpectrumTable neumann_disk_closed_form(const FluxData& nu, double R, int count)
{
    if (count < 1)
        throw std::invalid_argument("neumann_disk_closed_form: count must be >= 1");
    if (!(R > 0))
        throw std::invalid_argument("neumann_disk_closed_form: R must be positive");

    const auto orders = order_sequence(nu.canonical, count + 2);
    std::vector<SpectrumEntry> entries;
    std::map<double, std::vector<double>> zero_cache;
    // Enough radial indices per order: values (z'/R)^2 are increasing in j,
    // so j <= count always suffices.
    for (const auto& [mu, k] : orders) {
        for (int j = 1; j <= count; ++j) {
            double lam;
            if (mu == 0.0) {
                // Laplacian convention: constant mode first.
                lam = (j == 1) ? 0.0
                               : std::pow(bessel_deriv_zero(0.0, j - 1) / R, 2);
            } else {
                auto& zs = zero_cache[mu];
                if (static_cast<int>(zs.size()) < j)
                    zs.push_back(bessel_deriv_zero(mu, j));
                lam = std::pow(zs[j - 1] / R, 2);
            }
            entries.push_back({lam, k, j});
        }
    }
    return finalize_table(std::move(entries), count);
}

SpectrumTable steklov_disk_revolution(const RevolutionProfile& profile,
                                      const FluxData& nu, double R, int count)
{
    if (count < 1)
        throw std::invalid_argument("steklov_disk_revolution: count must be >= 1");
    if (!(R > 0) || !(R < profile.diameter()))
        throw std::invalid_argument("steklov_disk_revolution: R outside (0, diameter)");

    const double thR = profile.theta(R);
    const auto orders = order_sequence(nu.canonical, count);
    std::vector<SpectrumEntry> entries;
    for (const auto& [mu, k] : orders) entries.push_back({mu / thR, k, 1});
    return finalize_table(std::move(entries), count);
}

RadialEigenpair steklov_radial_mode(const RevolutionProfile& profile,
                                    const FluxData& nu, int k, double R,
                                    int samples)
{
    if (!(R > 0) || !(R < profile.diameter()))
        throw std::invalid_argument("steklov_radial_mode: R outside (0, diameter)");
    const double mu = std::abs(k - nu.canonical);

    RadialEigenpair out;
    out.k = k;
    out.j = 1;
    out.value = mu / profile.theta(R);
    out.r.resize(samples);
    out.u.resize(samples);
    out.du.resize(samples);

    // u(r) = exp(-int_r^R mu/theta), accumulated backwards over the grid.
    double acc = 0.0;
    for (int i = samples - 1; i >= 0; --i) {
        const double ri = R * (i + 1) / samples;
        const double rnext = (i == samples - 1) ? R : R * (i + 2) / samples;
        if (rnext > ri)
            acc += integrate([&](double s) { return mu / profile.theta(s); }, ri,
                             rnext, 1e-12);
        out.r[i] = ri;
        out.u[i] = std::exp(-acc);
        out.du[i] = out.u[i] * mu / profile.theta(ri);
    }

    // L^2(theta dr) normalization via Simpson-style sum on the sample grid.
    double nrm = 0.0;
    const double h = R / samples;
    for (int i = 0; i < samples; ++i) {
        const double w = (i == 0 || i == samples - 1) ? 0.5 : 1.0;
        nrm += w * out.u[i] * out.u[i] * profile.theta(out.r[i]) * h;
    }
    const double inv = 1.0 / std::sqrt(nrm);
    for (int i = 0; i < samples; ++i) {
        out.u[i] *= inv;
        out.du[i] *= inv;
    }
    return out;
}

SpectrumTable steklov_annulus(const FluxData& nu, double r_in, double r_out,
                              int count)
{
    if (!(r_in > 0) || !(r_out > r_in))
        throw std::invalid_argument("steklov_annulus: require 0 < r_in < r_out");
    if (count < 1)
        throw std::invalid_argument("steklov_annulus: count must be >= 1");

    const auto orders = order_sequence(nu.canonical, count + 2);
    std::vector<SpectrumEntry> entries;
    for (const auto& [mu, k] : orders) {
        // Variational 2x2 pencil in the harmonic basis {r^mu, r^-mu}
        // (or {1, log r} for mu = 0): a(u,v) = sigma b(u,v) on both circles.
        double a11, a12, a22, b11, b12, b22;
        if (mu == 0.0) {
            a11 = 0.0;
            a12 = 0.0;
            a22 = std::log(r_out / r_in);
            b11 = r_out + r_in;
            b12 = r_out * std::log(r_out) + r_in * std::log(r_in);
            b22 = r_out * std::pow(std::log(r_out), 2) +
                  r_in * std::pow(std::log(r_in), 2);
        } else {
            a11 = mu * (std::pow(r_out, 2 * mu) - std::pow(r_in, 2 * mu));
            a12 = 0.0;
            a22 = mu * (std::pow(r_in, -2 * mu) - std::pow(r_out, -2 * mu));
            b11 = std::pow(r_out, 2 * mu + 1) + std::pow(r_in, 2 * mu + 1);
            b12 = r_out + r_in;
            b22 = std::pow(r_out, 1 - 2 * mu) + std::pow(r_in, 1 - 2 * mu);
        }
        // Closed-form generalized symmetric 2x2 eigenvalues.
        const double detB = b11 * b22 - b12 * b12;
        if (!(detB > 0))
            throw std::runtime_error("steklov_annulus: degenerate boundary Gram matrix");
        // det(A - s B) = 0: quadratic c2 s^2 + c1 s + c0 = 0
        const double c2 = detB;
        const double c1 = -(a11 * b22 + a22 * b11 - 2 * a12 * b12);
        const double c0 = a11 * a22 - a12 * a12;
        const double disc = std::sqrt(std::max(0.0, c1 * c1 - 4 * c2 * c0));
        const double s1 = (-c1 - disc) / (2 * c2);
        const double s2 = (-c1 + disc) / (2 * c2);
        entries.push_back({s1, k, 1});
        entries.push_back({s2, k, 2});
    }
    return finalize_table(std::move(entries), count);
}

SpectrumTable steklov_cylinder(const FluxData& nu, double L, int count)
{
    if (!(L > 0))
        throw std::invalid_argument("steklov_cylinder: L must be positive");
    if (count < 1)
        throw std::invalid_argument("steklov_cylinder: count must be >= 1");

    const auto orders = order_sequence(nu.canonical, count + 2);
    std::vector<SpectrumEntry> entries;
    for (const auto& [mu, k] : orders) {
        if (mu == 0.0) {
            entries.push_back({0.0, k, 1});       // constant
            entries.push_back({1.0 / L, k, 2});   // odd linear mode
        } else {
            entries.push_back({mu * std::tanh(mu * L), k, 1}); // even in s
            entries.push_back({mu / std::tanh(mu * L), k, 2}); // odd in s
        }
    }
    return finalize_table(std::move(entries), count);
}

std::vector<RadialEigenpair> schrodinger_radial_eigen(
    const RevolutionProfile& profile, const std::function<double(double)>& V,
    double R, int j_max, int samples)
{
    if (!V)
        throw std::invalid_argument("schrodinger_radial_eigen: null potential");
    if (!(R > 0) || !(R < profile.diameter()))
        throw std::invalid_argument("schrodinger_radial_eigen: R outside (0, diameter)");

    // Frobenius index from the limit r^2 V(r) -> c >= 0.
    const double c1 = V(1e-6 * R) * std::pow(1e-6 * R, 2);
    const double c2 = V(1e-7 * R) * std::pow(1e-7 * R, 2);
    if (!std::isfinite(c1) || !std::isfinite(c2) ||
        std::abs(c2 - c1) > 0.05 * (1.0 + std::abs(c2)))
        throw std::invalid_argument(
            "schrodinger_radial_eigen: r^2 V(r) does not converge at the origin");
    double c = c2;
    if (c < 1e-10) c = 0.0;
    if (c < 0.0)
        throw std::invalid_argument("schrodinger_radial_eigen: potential must be >= 0");
    double vmax = 0.0;
    for (int i = 1; i <= 32; ++i) {
        const double v = V(R * i / 32.0);
        if (v < -1e-12)
            throw std::invalid_argument("schrodinger_radial_eigen: potential must be >= 0");
        vmax = std::max(vmax, std::abs(v));
    }

    RadialProblem pr{&profile, V, std::sqrt(c)};
    std::vector<RadialEigenpair> out;
    for (int j = 1; j <= j_max; ++j) {
        if (c == 0.0 && vmax < 1e-13 && j == 1) {
            // vanishing potential: plain Neumann ground state
            RadialEigenpair pair;
            pair.k = 0;
            pair.j = 1;
            pair.value = 0.0;
            const double vol1d =
                integrate([&](double s) { return profile.theta(s); }, 0.0, R);
            const double cc = 1.0 / std::sqrt(vol1d);
            pair.r.resize(samples);
            pair.u.assign(samples, cc);
            pair.du.assign(samples, 0.0);
            for (int i = 0; i < samples; ++i) pair.r[i] = R * (i + 1) / samples;
            out.push_back(std::move(pair));
            continue;
        }
        const double lam = solve_radial_eigen(pr, R, j);
        RadialEigenpair pair = integrate_radial_dense(pr, lam, R, samples);
        pair.k = 0;
        pair.j = j;
        out.push_back(std::move(pair));
    }
    return out;
}

SecondEigenvalueSummary second_eigenvalue_remarks(const FluxData& nu, double R)
{
    if (nu.is_integer)
        throw std::invalid_argument("second_eigenvalue_remarks: flux must not be an integer");
    if (!(R > 0))
        throw std::invalid_argument("second_eigenvalue_remarks: R must be positive");

    SecondEigenvalueSummary out;
    out.lambda2 = std::pow(bessel_deriv_zero(1.0 - nu.canonical, 1) / R, 2);
    out.sigma2 = (1.0 - nu.canonical) / R;
    out.laplacian_lambda2 = std::pow(bessel_deriv_zero(1.0, 1) / R, 2);
    out.laplacian_sigma2 = 1.0 / R;
    if (!(out.lambda2 < out.laplacian_lambda2) ||
        !(out.sigma2 < out.laplacian_sigma2))
        throw std::logic_error("second_eigenvalue_remarks: ordering violated");
    return out;
}

} // namespace abspec
