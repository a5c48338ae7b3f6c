#include <filesystem>

#include "doctest.h"
#include "experiments.hpp"
#include "nullcone/kernels.hpp"

using namespace nc;
using namespace nc::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text, const std::string& exp = "") {
    return parse_run_config(Config::parse(text), exp);
}

std::string error_path(const std::string& text, const std::string& exp) {
    try {
        parse(text, exp);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nullcone_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("schema defaults and overrides") {
    const RunConfig rc = parse("[resolution]\nn_v = 32\ntwo_lmax = 5\n[oracle]\nkind = plane_wave\nmass = 2\n",
                               "goursat");
    CHECK(rc.experiment == "goursat");
    CHECK(rc.n_r == 32);
    CHECK(rc.mass == 2.0);
    CHECK(rc.evolution.lambdas == std::vector<double>{0.9, 0.95, 0.975});
    CHECK(rc.tol.round_trip == 5e-4);
    CHECK(parse("[tolerance]\nround_trip = 1e-3\n", "goursat").tol.round_trip == 1e-3);
}

TEST_CASE("schema violations name the field") {
    CHECK(error_path("", "") == "experiment");
    CHECK(error_path("experiment = goursat\n", "constraints") == "experiment");
    CHECK(error_path("[resolution]\nn_v = 33\n", "constraints").rfind("resolution.n_v", 0) == 0);
    CHECK(error_path("[resolution]\ntwo_lmax = 4\n", "constraints").rfind("resolution.two_lmax", 0) == 0);
    CHECK(error_path("[goursat]\nlambdas = 0.9\n", "goursat") == "goursat.lambdas");
    CHECK(error_path("[goursat]\nlambdas = 0.9, 1.2\n", "goursat") == "goursat.lambdas");
    CHECK(error_path("[convergence]\nladder = 32, 64\n", "convergence") == "convergence.ladder");
    CHECK(error_path("[convergence]\nladder = 64, 32, 128\n", "convergence") == "convergence.ladder");
    CHECK(error_path("[metric]\nkind = static_spherical\nA = 1, 1\n", "constraints") == "datum.kind");
    CHECK(error_path("[physics]\nmass = 3\n", "constraints") == "physics.mass");
    CHECK(error_path("[datum]\nkind = gaussian\npsi1 = 1, 3, 0.5, 0\n", "constraints").rfind("datum.psi1", 0) == 0);
    CHECK(error_path("[resolution]\nbogus = 1\n", "constraints").rfind("resolution.bogus", 0) == 0);
    // A single λ close enough to 1 is accepted.
    CHECK_NOTHROW(parse("[goursat]\nlambdas = 0.995\n", "goursat"));
}

TEST_CASE("constraints on the zero datum give zero output") {
    const RunConfig rc = parse("[datum]\nkind = zero\n[resolution]\nn_v = 16\ntwo_lmax = 3\n", "constraints");
    const Artifacts a = run_experiment(rc);
    CHECK(a.ok());
    CHECK(a.summary["psi2_sup"].get<double>() == 0.0);
    CHECK(a.summary["psi3_sup"].get<double>() == 0.0);
    CHECK(a.summary["cone_flux"].get<double>() == 0.0);
}

TEST_CASE("oracle-check passes on the constant spinor") {
    const Artifacts a = run_experiment(parse("[resolution]\nn_v = 32\ntwo_lmax = 3\n", "oracle-check"));
    CHECK(a.ok());
    CHECK(a.summary["isometry_gap"].get<double>() < 1e-5);
    CHECK(a.summary["matching_residual"].get<double>() < 1e-5);
}

TEST_CASE("tolerance failures are reported, not thrown") {
    const RunConfig rc = parse("[oracle]\nkind = plane_wave\n[resolution]\nn_v = 32\ntwo_lmax = 3\n"
                               "[tolerance]\nround_trip = 1e-12\n",
                               "goursat");
    const Artifacts a = run_experiment(rc);
    CHECK_FALSE(a.ok());
    CHECK(std::find(a.failures.begin(), a.failures.end(), "round trip error above tolerance") !=
          a.failures.end());
}

TEST_CASE("artifacts: files, manifest and bitwise repeatability") {
    const std::string text = "repro = true\n[oracle]\nkind = plane_wave\n[resolution]\nn_v = 32\ntwo_lmax = 3\n";
    const Config cfg = Config::parse(text);
    const RunConfig rc = parse_run_config(cfg, "goursat");
    const kernels::Isa saved = kernels::active_isa();
    kernels::force_isa(kernels::Isa::Scalar);
    const fs::path a = scratch("a"), b = scratch("b");
    const auto files = write_artifacts(run_experiment(rc), rc, cfg, a, 1.0);
    write_artifacts(run_experiment(rc), rc, cfg, b, 2.0);
    kernels::force_isa(saved);
    for (const char* f : {"sigma.json", "summary.json", "manifest.json", "config.echo", "lambda_report.csv",
                          "sigma_profile.csv"})
        CHECK(std::find(files.begin(), files.end(), f) != files.end());
    for (const auto& f : files) CHECK(io::read_text(a / f) == io::read_text(b / f));
    const io::Json m = io::Json::parse(io::read_text(a / "manifest.json"));
    CHECK_FALSE(m.contains("timings"));
    CHECK(m["config"]["experiment"] == "goursat");
    // The echo reproduces the run configuration.
    const RunConfig again = parse_run_config(Config::parse(io::read_text(a / "config.echo")));
    CHECK(again.experiment == "goursat");
    CHECK(again.n_v == 32);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("spectral series JSON round trip is exact") {
    SpectralSeries s(-1, 5, 3);
    for (size_t i = 0; i < s.c.size(); ++i) s.c[i] = cplx(1.0 / (i + 3), -std::sqrt(i + 0.1));
    const SpectralSeries r = io::series_from_json(io::Json::parse(io::series_json(s, {0.0, 0.5, 1.0}).dump()));
    CHECK(r.c == s.c);
    CHECK(r.two_s == -1);
    const io::Json j = io::series_json(s, {0.0, 0.5, 1.0});
    CHECK(j["nodes"][1][0].size() == 4);  // [2l, 2m, re, im]
    CHECK(j["nodes"][1][0][0] == 1);
}

TEST_CASE("output directory precedence") {
    ::setenv(io::kOutputEnv, "from_env", 1);
    CHECK(io::resolve_output_dir("cli", "cfg") == "cli");
    CHECK(io::resolve_output_dir("", "cfg") == "from_env");
    ::unsetenv(io::kOutputEnv);
    CHECK(io::resolve_output_dir("", "cfg") == "cfg");
    CHECK(io::resolve_output_dir("", "") == "nullcone_out");
}

TEST_CASE("csv formatting is shortest round trip") {
    const io::CsvTable t{"t", {"a", "b"}, {{0.1, 1e-300}, {std::nan(""), 3.0}}};
    CHECK(io::csv_text(t) == "a,b\n0.1,1e-300\nnan,3\n");
    CHECK_THROWS(io::csv_text(io::CsvTable{"t", {"a"}, {{1.0, 2.0}}}));
}
