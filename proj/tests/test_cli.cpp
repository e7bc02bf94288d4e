#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

std::string cli_path()
{
    const char* p = std::getenv("ABSPEC_CLI");
    return p ? p : "";
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args)
{
    const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string temp(const char* name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("cli spectrum output and determinism")
{
    if (cli_path().empty()) {
        WARN("ABSPEC_CLI not set; skipping CLI tests");
        return;
    }

    const std::string args = "spectrum --geometry euclidean --flux 0.5 --radius 1 --count 2";
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output); // byte identical

    const auto j = nlohmann::json::parse(a.output);
    CHECK(j["tool"] == "abspec");
    CHECK(j["subcommand"] == "spectrum");
    CHECK(j["config"]["flux"] == 0.5);
    REQUIRE(j["results"]["entries"].size() == 2);
    CHECK(double(j["results"]["entries"][0]["value"]) ==
          doctest::Approx(1.358532).epsilon(1e-5));
    CHECK(double(j["results"]["entries"][1]["value"]) ==
          doctest::Approx(1.358532).epsilon(1e-5));
    CHECK(j["results"]["multiplicity_groups"].size() == 1);
}

TEST_CASE("cli steklov cylinder formula")
{
    if (cli_path().empty()) return;
    const auto r = run("steklov --geometry cylinder --flux 0.5 --length 1 --count 1");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(double(j["results"]["entries"][0]["value"]) ==
          doctest::Approx(0.231059).epsilon(1e-5));
}

TEST_CASE("cli sweep csv schema")
{
    if (cli_path().empty()) return;
    const auto r = run(
        "sweep --quantity sigma1 --parameter radius --geometry euclidean "
        "--flux 0.25 --from 0.5 --to 2 --steps 4");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("parameter,value,eigenvalue,k,j\n", 0) == 0);
    int lines = 0;
    for (char c : r.output)
        if (c == '\n') ++lines;
    CHECK(lines == 5);
}

TEST_CASE("cli mesh generation, fem solve, verify-iso exit codes")
{
    if (cli_path().empty()) return;
    const auto mesh_file = temp("abspec_cli_disk.abmesh");
    auto gen = run("mesh --domain disk:1 --refine 2 --out " + mesh_file);
    CHECK(gen.exit_code == 0);

    const auto fem = run("fem --mesh " + mesh_file +
                         " --flux 0.25 --problem steklov --count 1");
    CHECK(fem.exit_code == 0);
    const auto j = nlohmann::json::parse(fem.output);
    CHECK(double(j["results"]["eigenvalues"][0]) ==
          doctest::Approx(0.25).epsilon(3e-2));

    // FEM runs are fully deterministic: byte-identical reports
    const auto fem2 = run("fem --mesh " + mesh_file +
                          " --flux 0.25 --problem steklov --count 1");
    CHECK(fem2.output == fem.output);

    const auto ok = run("verify-iso --mode brock --mesh " + mesh_file + " --flux 0.25");
    CHECK(ok.exit_code == 0);

    // the long flat cylinder violates the perimeter bound: exit code 2
    const auto fail = run("verify-iso --mode weinstock --domain cylinder:4 --flux 0.5");
    CHECK(fail.exit_code == 2);
    const auto jf = nlohmann::json::parse(fail.output);
    CHECK_FALSE(bool(jf["results"]["holds"]));

    const auto short_cyl =
        run("verify-iso --mode weinstock --domain cylinder:0.5 --flux 0.5");
    CHECK(short_cyl.exit_code == 0);

    std::filesystem::remove(mesh_file);
}

TEST_CASE("cli check-theory and conformal-check")
{
    if (cli_path().empty()) return;
    const auto th = run(
        "check-theory --geometry euclidean --flux 0.25 --radius 1 --grid 64");
    CHECK(th.exit_code == 0);
    const auto jt = nlohmann::json::parse(th.output);
    CHECK(bool(jt["results"]["all_hold"]));
    CHECK(bool(jt["results"]["F_monotone"]["holds"]));
    CHECK(jt["version"].is_string());

    const auto cf = run("conformal-check --map quad:0.1 --flux 0.25");
    CHECK(cf.exit_code == 0);
    const auto jc = nlohmann::json::parse(cf.output);
    CHECK(bool(jc["results"]["all_hold"]));
    CHECK(double(jc["results"]["energy_invariance"]["rel_diff"]) <= 1e-6);
}

TEST_CASE("cli csv output formats")
{
    if (cli_path().empty()) return;
    const auto sp = run("spectrum --flux 0.25 --radius 1 --count 2 --format csv");
    CHECK(sp.exit_code == 0);
    CHECK(sp.output.rfind("value,k,j\n", 0) == 0);

    const auto st = run("steklov --flux 0.25 --radius 1 --count 3 --format csv");
    CHECK(st.exit_code == 0);
    CHECK(st.output.rfind("value,k,j\n", 0) == 0);
}

TEST_CASE("cli usage errors exit 1")
{
    if (cli_path().empty()) return;
    CHECK(run("spectrum --geometry klein-bottle").exit_code == 1);
    CHECK(run("verify-iso --mode brock").exit_code == 1);
    CHECK(run("nonsense").exit_code == 1);
}

TEST_CASE("cli config file with flag precedence")
{
    if (cli_path().empty()) return;
    const auto cfg = temp("abspec_cli.cfg");
    std::ofstream(cfg) << "flux=0.25\nradius=1\ncount=1\ngeometry=euclidean\n";
    const auto base = run("spectrum --config " + cfg);
    CHECK(base.exit_code == 0);
    const auto jb = nlohmann::json::parse(base.output);
    CHECK(jb["config"]["flux"] == 0.25);

    const auto override_run = run("spectrum --config " + cfg + " --flux 0.5");
    const auto jo = nlohmann::json::parse(override_run.output);
    CHECK(jo["config"]["flux"] == 0.5);
    std::filesystem::remove(cfg);
}
