// abspec: spectra of the Aharonov-Bohm magnetic Laplacian on disks,
// annuli, cylinders and meshed planar domains, plus the verification
// suites for the isoperimetric bounds the toolkit is built around.

#include "abspec/conformal.hpp"
#include "abspec/fem.hpp"
#include "abspec/gauge.hpp"
#include "abspec/planar.hpp"
#include "abspec/radial.hpp"
#include "abspec/revolution.hpp"
#include "abspec/specialfun.hpp"
#include "abspec/theory.hpp"
#include "abspec/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

using json = nlohmann::json;
using namespace abspec;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kExitVerificationFailure = 2;

struct Output {
    std::string path; // empty: stdout
    void write(const std::string& text) const
    {
        if (path.empty()) {
            std::cout << text;
            if (text.empty() || text.back() != '\n') std::cout << '\n';
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file " + path);
        out << text;
        if (text.empty() || text.back() != '\n') out << '\n';
    }
};

json report_envelope(const std::string& subcommand, json config, json tolerances)
{
    json j;
    j["tool"] = "abspec";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["config"] = std::move(config);
    j["tolerances"] = std::move(tolerances);
    return j;
}

json table_to_json(const SpectrumTable& table)
{
    json entries = json::array();
    for (const auto& e : table.entries)
        entries.push_back({{"value", e.value}, {"k", e.k}, {"j", e.j}});
    json groups = json::array();
    for (const auto& g : table.multiplicity_groups) groups.push_back(g);
    return {{"entries", entries}, {"multiplicity_groups", groups}};
}

std::string table_to_csv(const SpectrumTable& table)
{
    std::ostringstream os;
    os << "value,k,j\n";
    os.precision(17);
    for (const auto& e : table.entries)
        os << e.value << ',' << e.k << ',' << e.j << '\n';
    return os.str();
}

std::function<double(double)> parse_potential(const std::string& text)
{
    // "a,b" meaning V(r) = a / (b + r^2); "invsq:c" meaning c / r^2
    if (text.rfind("invsq:", 0) == 0) {
        const double c = std::stod(text.substr(6));
        return [c](double r) { return c / (r * r); };
    }
    std::istringstream is(text);
    double a = 0, b = 0;
    char comma = 0;
    if (!(is >> a >> comma >> b) || comma != ',')
        throw CLI::ValidationError("--potential expects 'a,b' (a/(b+r^2)) or 'invsq:c'");
    return [a, b](double r) { return a / (b + r * r); };
}

PlanarDomain parse_domain(const std::string& text)
{
    // disk:R[:cx,cy] | square:side | star:R:seed
    const auto next = [&text](size_t& pos) {
        const size_t colon = text.find(':', pos);
        const std::string tok = colon == std::string::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, colon - pos);
        pos = colon == std::string::npos ? text.size() : colon + 1;
        return tok;
    };
    size_t pos = 0;
    const std::string kind = next(pos);
    if (kind == "disk") {
        const double R = std::stod(next(pos));
        Point center{0, 0};
        if (pos < text.size()) {
            const std::string c = next(pos);
            if (std::sscanf(c.c_str(), "%lf,%lf", &center.x, &center.y) != 2)
                throw CLI::ValidationError("disk center expects 'cx,cy'");
        }
        return disk_domain(R, center);
    }
    if (kind == "square") return square_domain(std::stod(next(pos)));
    if (kind == "star") {
        const double R = std::stod(next(pos));
        const unsigned seed = static_cast<unsigned>(std::stoul(next(pos)));
        return star_domain(R, seed);
    }
    throw CLI::ValidationError("unknown domain '" + text +
                               "' (expected disk:R[:cx,cy]|square:side|star:R:seed)");
}

void emit(const Output& out, const json& j) { out.write(j.dump(2)); }

// Expand a key=value config file into flags injected right after the
// subcommand, so explicit command-line flags (parsed take-last) win.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    std::string path;
    size_t at = 0;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            at = i;
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            at = i;
            break;
        }
    }
    if (path.empty() || args.size() < 2 || args[1].empty() || args[1][0] == '-')
        return args;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config file line without '=': " + line);
        injected.push_back("--" + line.substr(0, eq));
        injected.push_back(line.substr(eq + 1));
    }

    std::vector<std::string> out;
    out.push_back(args[0]);
    out.push_back(args[1]);
    for (auto& s : injected) out.push_back(std::move(s));
    for (size_t i = 2; i < args.size(); ++i) {
        if (i == at) {
            ++i; // skip "--config <path>" pair
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) continue;
        out.push_back(args[i]);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Aharonov-Bohm magnetic spectra toolkit"};
    app.require_subcommand(1);

    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string out_path;
    const auto common = [&out_path](CLI::App* sub) {
        sub->add_option("--out", out_path, "output file (default: stdout)");
        return sub;
    };

    // common option storage
    std::string geometry = "euclidean";
    double flux = 0.5;
    double radius = 1.0;
    double length = 1.0;
    double rin = 0.5, rout = 1.0;
    int count = 6;
    int refine = 3;
    std::string format = "json";
    std::string mesh_path, domain_text, mode_text, map_text, potential_text;
    std::string problem = "neumann";
    double pole_x = 0.0, pole_y = 0.0;

    auto* spectrum = common(app.add_subcommand("spectrum", "radial Neumann spectrum of a geodesic disk"));
    spectrum->add_option("--geometry", geometry, "euclidean|spherical|hyperbolic");
    spectrum->add_option("--flux", flux, "flux nu");
    spectrum->add_option("--radius", radius, "disk radius");
    spectrum->add_option("--count", count, "number of eigenvalues");
    spectrum->add_option("--format", format, "json|csv");

    auto* steklov = common(app.add_subcommand("steklov", "Steklov spectrum (disk, annulus or cylinder)"));
    steklov->add_option("--geometry", geometry, "euclidean|spherical|hyperbolic|annulus|cylinder");
    steklov->add_option("--flux", flux, "flux nu");
    steklov->add_option("--radius", radius, "disk radius");
    steklov->add_option("--length", length, "cylinder half-length L");
    steklov->add_option("--rin", rin, "annulus inner radius");
    steklov->add_option("--rout", rout, "annulus outer radius");
    steklov->add_option("--count", count, "number of eigenvalues");
    steklov->add_option("--format", format, "json|csv");

    auto* closed = common(app.add_subcommand("closed-form", "flat-disk Neumann spectrum from Bessel derivative zeros"));
    closed->add_option("--flux", flux, "flux nu");
    closed->add_option("--radius", radius, "disk radius");
    closed->add_option("--count", count, "number of eigenvalues");
    closed->add_option("--format", format, "json|csv");

    auto* fem = common(app.add_subcommand("fem", "finite-element eigensolve on a mesh"));
    fem->add_option("--mesh", mesh_path, "ABMESH file")->required();
    fem->add_option("--flux", flux, "flux nu");
    fem->add_option("--problem", problem, "neumann|steklov|schrodinger");
    fem->add_option("--count", count, "number of eigenvalues");
    fem->add_option("--potential", potential_text, "a,b for a/(b+r^2), or invsq:c");
    fem->add_option("--pole-x", pole_x, "pole x (when not a mesh vertex)");
    fem->add_option("--pole-y", pole_y, "pole y (when not a mesh vertex)");
    fem->add_option("--format", format, "json|csv");

    auto* verify = common(app.add_subcommand("verify-iso", "isoperimetric bound check against the matched disk"));
    verify->add_option("--mode", mode_text, "neumann|brock|weinstock|schrodinger")->required();
    verify->add_option("--mesh", mesh_path, "ABMESH file");
    verify->add_option("--domain", domain_text, "disk:R[:cx,cy]|square:side|star:R:seed|cylinder:L");
    verify->add_option("--flux", flux, "flux nu");
    verify->add_option("--level", refine, "refinement level for --domain");
    verify->add_option("--potential", potential_text, "potential for schrodinger mode");

    auto* check = common(app.add_subcommand("check-theory", "monotonicity and sufficient-condition suite"));
    check->add_option("--geometry", geometry, "euclidean|spherical|hyperbolic");
    check->add_option("--flux", flux, "flux nu");
    check->add_option("--radius", radius, "disk radius");
    int grid_size = 512;
    check->add_option("--grid", grid_size, "sample grid size");

    auto* sweep = common(app.add_subcommand("sweep", "lambda1 or sigma1 sweep as CSV"));
    std::string quantity = "lambda1", parameter = "radius";
    double from = 0.5, to = 2.0;
    int steps = 16;
    sweep->add_option("--quantity", quantity, "lambda1|sigma1");
    sweep->add_option("--parameter", parameter, "radius|flux|length");
    sweep->add_option("--geometry", geometry, "euclidean|spherical|hyperbolic|cylinder");
    sweep->add_option("--flux", flux, "flux nu");
    sweep->add_option("--radius", radius, "disk radius");
    sweep->add_option("--from", from, "sweep start");
    sweep->add_option("--to", to, "sweep end");
    sweep->add_option("--steps", steps, "number of samples");

    auto* mesh = common(app.add_subcommand("mesh", "generate a mesh for a built-in domain"));
    mesh->add_option("--domain", domain_text, "disk:R[:cx,cy]|square:side|star:R:seed|annulus:rin,rout")->required();
    mesh->add_option("--refine", refine, "refinement level");
    int grading_rings = MeshOptions{}.grading_rings;
    mesh->add_option("--rings", grading_rings, "geometric grading rings toward the pole");

    auto* conf = common(app.add_subcommand("conformal-check", "conformal energy invariance and transplantation functionals"));
    conf->add_option("--map", map_text, "identity|rotation:a|quad:c")->required();
    conf->add_option("--flux", flux, "flux nu");
    double radius_T = 1.0;
    conf->add_option("--radius-T", radius_T, "source disk radius");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<char*> argp;
    argp.reserve(args.size());
    for (auto& a : args) argp.push_back(a.data());
    try {
        app.parse(static_cast<int>(argp.size()), argp.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const Output out{out_path};
    try {
        if (*spectrum) {
            const auto profile = profile_by_name(geometry);
            const auto table =
                neumann_spectrum(profile, canonicalize_flux(flux), radius, count);
            if (format == "csv") {
                out.write(table_to_csv(table));
                return 0;
            }
            json j = report_envelope(
                "spectrum",
                {{"geometry", geometry}, {"flux", flux}, {"radius", radius}, {"count", count}},
                {{"eigenvalue_rel_tol", 1e-10}, {"cluster_rel_tol", 1e-8}});
            j["results"] = table_to_json(table);
            emit(out, j);
            return 0;
        }

        if (*steklov) {
            SpectrumTable table;
            json config{{"geometry", geometry}, {"flux", flux}, {"count", count}};
            if (geometry == "cylinder") {
                table = steklov_cylinder(canonicalize_flux(flux), length, count);
                config["length"] = length;
            } else if (geometry == "annulus") {
                table = steklov_annulus(canonicalize_flux(flux), rin, rout, count);
                config["rin"] = rin;
                config["rout"] = rout;
            } else {
                table = steklov_disk_revolution(profile_by_name(geometry),
                                                canonicalize_flux(flux), radius, count);
                config["radius"] = radius;
            }
            if (format == "csv") {
                out.write(table_to_csv(table));
                return 0;
            }
            json j = report_envelope("steklov", config, {{"cluster_rel_tol", 1e-8}});
            j["results"] = table_to_json(table);
            emit(out, j);
            return 0;
        }

        if (*closed) {
            const auto table =
                neumann_disk_closed_form(canonicalize_flux(flux), radius, count);
            if (format == "csv") {
                out.write(table_to_csv(table));
                return 0;
            }
            json j = report_envelope(
                "closed-form",
                {{"flux", flux}, {"radius", radius}, {"count", count}},
                {{"zero_abs_tol", 1e-11}, {"cluster_rel_tol", 1e-8}});
            j["results"] = table_to_json(table);
            emit(out, j);
            return 0;
        }

        if (*fem) {
            const TriMesh m = read_mesh(mesh_path);
            AssembleOptions opts;
            if (!potential_text.empty())
                opts.radial_potential = parse_potential(potential_text);
            EigResult eig;
            const Point pole{pole_x, pole_y};
            if (problem == "neumann")
                eig = neumann_eigs(m, flux, pole, count, opts);
            else if (problem == "steklov")
                eig = steklov_eigs(m, flux, pole, count, opts);
            else if (problem == "schrodinger") {
                if (!opts.radial_potential)
                    throw CLI::ValidationError("schrodinger problem needs --potential");
                eig = neumann_eigs(m, 0.0, pole, count, opts);
            } else
                throw CLI::ValidationError("unknown problem '" + problem + "'");

            if (format == "csv") {
                std::ostringstream os;
                os << "index,value,residual\n";
                os.precision(17);
                for (size_t i = 0; i < eig.eigenvalues.size(); ++i)
                    os << i + 1 << ',' << eig.eigenvalues[i] << ',' << eig.residuals[i] << '\n';
                out.write(os.str());
                return 0;
            }
            json j = report_envelope("fem",
                                     {{"mesh", mesh_path},
                                      {"flux", flux},
                                      {"problem", problem},
                                      {"count", count},
                                      {"potential", potential_text}},
                                     {{"residual_rel_tol", 1e-9}});
            j["results"]["eigenvalues"] = eig.eigenvalues;
            j["results"]["residuals"] = eig.residuals;
            j["results"]["diagonal_shift"] = eig.diagonal_shift;
            emit(out, j);
            return 0;
        }

        if (*verify) {
            IsoMode mode;
            if (mode_text == "neumann") mode = IsoMode::neumann_area;
            else if (mode_text == "brock") mode = IsoMode::brock_area;
            else if (mode_text == "weinstock") mode = IsoMode::weinstock_perimeter;
            else if (mode_text == "schrodinger") mode = IsoMode::schrodinger;
            else throw CLI::ValidationError("unknown mode '" + mode_text + "'");

            json config{{"mode", mode_text}, {"flux", flux}};
            IsoperimetricCheck chk;
            if (!domain_text.empty() && domain_text.rfind("cylinder:", 0) == 0) {
                // closed forms: the flat cylinder violates the perimeter bound
                // for L > atanh(1/2)/nu*
                if (mode != IsoMode::weinstock_perimeter)
                    throw CLI::ValidationError("cylinder domain supports --mode weinstock only");
                const double L = std::stod(domain_text.substr(9));
                const double vstar = canonicalize_flux(flux).canonical;
                chk.lhs = vstar * std::tanh(vstar * L);
                chk.perimeter = 4 * kPi;
                chk.rhs = 2 * kPi * vstar / chk.perimeter;
                chk.margin = chk.rhs - chk.lhs;
                chk.allowance = 0.0;
                chk.holds = chk.margin >= 0;
                config["domain"] = domain_text;
            } else if (!mesh_path.empty()) {
                std::optional<std::function<double(double)>> pot;
                if (!potential_text.empty()) pot = parse_potential(potential_text);
                chk = verify_isoperimetric_mesh(read_mesh(mesh_path), flux, mode, pot);
                config["mesh"] = mesh_path;
            } else if (!domain_text.empty()) {
                std::optional<std::function<double(double)>> pot;
                if (!potential_text.empty()) pot = parse_potential(potential_text);
                chk = verify_isoperimetric(parse_domain(domain_text), flux, mode,
                                           refine, pot);
                config["domain"] = domain_text;
                config["level"] = refine;
            } else {
                throw CLI::ValidationError("verify-iso needs --mesh or --domain");
            }

            json j = report_envelope("verify-iso", config,
                                     {{"discretization_allowance_rel", 0.02}});
            j["results"] = {{"lhs", chk.lhs},         {"rhs", chk.rhs},
                            {"margin", chk.margin},   {"allowance", chk.allowance},
                            {"holds", chk.holds},     {"area", chk.area},
                            {"perimeter", chk.perimeter}};
            emit(out, j);
            return chk.holds ? 0 : kExitVerificationFailure;
        }

        if (*check) {
            const auto profile = profile_by_name(geometry);
            const FluxData fd = canonicalize_flux(flux);
            const auto f_rep = check_F_monotone(profile, fd, radius, grid_size);
            const auto q_rep = check_q_monotone(profile, fd, radius, grid_size);
            const auto shape = check_eigenfunction_shape(profile, fd, radius);
            std::vector<double> grid;
            for (int i = 1; i <= 4; ++i) grid.push_back(radius * i / 4.0);
            const auto sw = lambda_R_monotone(profile, fd, grid);
            const auto cond = sufficient_conditions(profile, fd, radius);
            const std::vector<RadialTestFunction> tfs = {
                {[&](double r) { return std::pow(r, fd.canonical); },
                 [&](double r) { return fd.canonical * std::pow(r, fd.canonical - 1); },
                 0},
                {[](double r) { return r; }, [](double) { return 1.0; }, 1},
                {[&](double r) { return r * (radius - r); },
                 [&](double r) { return radius - 2 * r; }, 0}};
            const auto hardy = hardy_check(fd, radius, tfs);

            bool ok = f_rep.holds && q_rep.holds && shape.u_positive &&
                      shape.u_increasing && shape.lambda_exceeds &&
                      sw.strictly_decreasing &&
                      sw.max_derivative_mismatch <= 1e-4 && cond.cond_a;
            for (const auto& h : hardy) ok = ok && h.holds;

            json j = report_envelope("check-theory",
                                     {{"geometry", geometry},
                                      {"flux", flux},
                                      {"radius", radius},
                                      {"grid", grid_size}},
                                     {{"monotonicity_rel_tol", 1e-8},
                                      {"derivative_match_rel_tol", 1e-4}});
            j["results"]["F_monotone"] = {{"holds", f_rep.holds},
                                          {"max_forward_difference", f_rep.max_forward_difference},
                                          {"violations", f_rep.violations}};
            j["results"]["q_monotone"] = {{"holds", q_rep.holds},
                                          {"max_forward_difference", q_rep.max_forward_difference}};
            j["results"]["eigenfunction_shape"] = {{"u_positive", shape.u_positive},
                                                   {"u_increasing", shape.u_increasing},
                                                   {"lambda", shape.lambda},
                                                   {"lambda_exceeds_bound", shape.lambda_exceeds},
                                                   {"bound", shape.bound}};
            j["results"]["lambda_sweep"] = {{"radii", sw.radii},
                                            {"lambdas", sw.lambdas},
                                            {"strictly_decreasing", sw.strictly_decreasing},
                                            {"max_derivative_mismatch", sw.max_derivative_mismatch}};
            j["results"]["sufficient_conditions"] = {{"cond_a_margin", cond.cond_a_margin},
                                                     {"cond_b_margin", cond.cond_b_margin},
                                                     {"sphere_form_margin", cond.sphere_form_margin},
                                                     {"lambda_bar", cond.lambda_bar}};
            json hj = json::array();
            for (const auto& h : hardy)
                hj.push_back({{"lhs", h.lhs},
                              {"rhs", h.rhs},
                              {"ratio", h.ratio},
                              {"angular_ratio", h.angular_ratio},
                              {"holds", h.holds}});
            j["results"]["hardy"] = hj;
            j["results"]["all_hold"] = ok;
            emit(out, j);
            return ok ? 0 : kExitVerificationFailure;
        }

        if (*sweep) {
            std::ostringstream os;
            os << "parameter,value,eigenvalue,k,j\n";
            os.precision(17);
            for (int i = 0; i < steps; ++i) {
                const double v = from + (to - from) * i / std::max(steps - 1, 1);
                SpectrumEntry e{};
                if (parameter == "length" || geometry == "cylinder") {
                    const auto t = steklov_cylinder(canonicalize_flux(flux), v, 1);
                    e = t.entries[0];
                } else if (quantity == "sigma1") {
                    const double R = parameter == "radius" ? v : radius;
                    const double nu = parameter == "flux" ? v : flux;
                    const auto t = steklov_disk_revolution(
                        profile_by_name(geometry), canonicalize_flux(nu), R, 1);
                    e = t.entries[0];
                } else {
                    const double R = parameter == "radius" ? v : radius;
                    const double nu = parameter == "flux" ? v : flux;
                    const auto t = neumann_spectrum(profile_by_name(geometry),
                                                    canonicalize_flux(nu), R, 1);
                    e = t.entries[0];
                }
                os << parameter << ',' << v << ',' << e.value << ',' << e.k << ','
                   << e.j << '\n';
            }
            out.write(os.str());
            return 0;
        }

        if (*mesh) {
            TriMesh m;
            if (domain_text.rfind("annulus:", 0) == 0) {
                double a = 0, b = 0;
                if (std::sscanf(domain_text.c_str() + 8, "%lf,%lf", &a, &b) != 2)
                    throw CLI::ValidationError("annulus expects 'annulus:rin,rout'");
                const int n = 8 << refine;
                m = annulus_mesh(a, b, std::max(2, n / 8), n);
            } else {
                MeshOptions mo;
                mo.grading_rings = grading_rings;
                m = mesh_generate(parse_domain(domain_text), refine, mo);
            }
            if (out_path.empty())
                throw CLI::ValidationError("mesh subcommand needs --out");
            write_mesh(m, out_path);
            return 0;
        }

        if (*conf) {
            const ConformalMap cm = map_by_name(map_text);
            const auto energy = energy_invariance_check(cm, flux, radius_T);
            const auto sz = szego_functional_check(cm, flux, radius_T);
            double cap_dev = 0.0;
            for (double r : {0.25, 0.5, 1.0, 2.0})
                cap_dev = std::max(cap_dev,
                                   std::abs(cap_area_quadrature(r) - cap_area(r)));
            const bool ok = energy.rel_diff <= 1e-6 && cap_dev <= 1e-10 &&
                            sz.dineq_min_margin >= -1e-6 &&
                            sz.cap_bound_min_margin >= -1e-6 &&
                            sz.ratio_monotone_min_margin >= -1e-6;
            json j = report_envelope("conformal-check",
                                     {{"map", map_text},
                                      {"flux", flux},
                                      {"radius_T", radius_T}},
                                     {{"energy_rel_tol", 1e-6},
                                      {"cap_identity_tol", 1e-10},
                                      {"margin_tol", 1e-6}});
            j["results"]["energy_invariance"] = {{"source", energy.energy_source},
                                                 {"target", energy.energy_target},
                                                 {"rel_diff", energy.rel_diff}};
            j["results"]["cap_identity_max_dev"] = cap_dev;
            j["results"]["szego"] = {{"dineq_min_margin", sz.dineq_min_margin},
                                     {"cap_bound_min_margin", sz.cap_bound_min_margin},
                                     {"ratio_monotone_min_margin", sz.ratio_monotone_min_margin},
                                     {"transplanted_rayleigh", sz.transplanted_rayleigh},
                                     {"map_scale", sz.map_scale}};
            j["results"]["all_hold"] = ok;
            emit(out, j);
            return ok ? 0 : kExitVerificationFailure;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
