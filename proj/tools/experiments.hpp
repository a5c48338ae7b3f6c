#pragma once
// Experiment layer behind the command-line runner: the run schema, its
// validation, one runner per experiment and artifact emission.
//
// Configuration keys (all optional unless noted):
//   experiment            constraints | goursat | cauchy | spincoeffs | convergence | oracle-check
//   T                     final time, default 1
//   repro                 pin the scalar kernels and omit timings from the manifest
//   output.dir            output directory
//   metric.kind           minkowski | static_spherical
//   metric.A, metric.B    coefficients of A(r), B(r) as polynomials in r²
//   datum.kind            oracle | zero | gaussian
//   datum.width           gaussian datum: Ψ(v) = Σ a_lm exp(-(v / width)²)
//   datum.psi1, psi4      gaussian datum: groups of (2l, 2m, re, im)
//   oracle.kind           constant_spinor | plane_wave
//   oracle.a, oracle.b    spinors as (re0, im0, re1, im1)
//   oracle.momentum       spatial momentum (plane wave)
//   oracle.mass           plane wave mass
//   physics.mass, physics.charge, physics.phi (coefficients in x²)
//   resolution.n_v, resolution.n_r, resolution.two_lmax
//   goursat.lambdas, goursat.single_lambda_gap
//   numerics.cfl, dissipation, margin, buffer_speed, mode_cutoff,
//            extension_order, blend_fraction
//   convergence.target    constraints | isometry | goursat | lambda | cauchy
//   convergence.ladder    at least three strictly increasing resolutions
//   convergence.joint     goursat target: halve 1 - λ with every grid doubling
//   spincoeffs.samples    points per axis
//   tolerance.*           overrides of the Tolerances fields

#include <filesystem>
#include <string>
#include <vector>

#include "nullcone/config.hpp"
#include "nullcone/evolution.hpp"
#include "nullcone/io.hpp"
#include "nullcone/oracle.hpp"

namespace nc::cli {

inline constexpr const char* kVersion = "1.0.0";

struct OracleSpec {
    std::string kind = "constant_spinor";
    Spinor2 a{cplx(0.6, 0.1), cplx(-0.3, 0.4)};
    Spinor2 b{cplx(0.2, -0.5), cplx(0.7, 0.1)};
    std::array<double, 3> momentum{0.0, 0.0, 0.0};
    double mass = 1.0;
};

struct GaussianDatum {
    double width = 0.7;
    std::vector<Mode> psi1, psi4;
};

struct Tolerances {
    double isometry = 1e-5;
    double constraint = 1e-6;
    double matching = 1e-5;
    double round_trip = 5e-4;
    double gh = 1e-8;  // relative to max |g|
    double cauchy = 1e-6;
    double spin = 1e-12;
    double asymptotics = 1e-4;
    double min_order = 3.5;
    double noise_floor = 1e-12;
};

struct RunConfig {
    std::string experiment;
    MetricSpec metric;
    std::string datum_kind = "oracle";
    OracleSpec oracle;
    GaussianDatum gaussian;
    double mass = 0.0, charge = 0.0;
    Potential phi;
    int n_v = 64, n_r = 64, two_lmax = 9;
    double T = 1.0;
    std::string out_dir;
    bool repro = false;
    Tolerances tol;
    EvolutionConfig evolution;  // T, n_r, two_lmax, physics mirrored from above
    std::string target = "isometry";
    std::vector<int> ladder;
    bool joint = true;
    int spin_samples = 4;
};

inline const std::vector<std::string> kExperiments{"constraints", "goursat",     "cauchy",
                                                   "spincoeffs",  "convergence", "oracle-check"};

// Schema validation with field paths; throws ConfigError.
RunConfig parse_run_config(const Config& cfg, const std::string& experiment_override = "");

struct Artifacts {
    io::Json summary;
    std::vector<io::CsvTable> tables;
    std::vector<std::pair<std::string, io::Json>> states;  // file stem, content
    std::vector<std::string> failures;                      // tolerance violations
    bool ok() const { return failures.empty(); }
};

Artifacts run_experiment(const RunConfig& rc);

// Writes tables (.csv), states (.json), summary.json, config.echo and
// manifest.json; returns the written file names.
std::vector<std::string> write_artifacts(const Artifacts& a, const RunConfig& rc, const Config& echo,
                                         const std::filesystem::path& dir, double seconds);

// Pieces shared with the tests.
MetricModel model_of(const RunConfig& rc);
ExactSolution oracle_of(const OracleSpec& o);
NullDatum datum_of(const RunConfig& rc, const MetricModel& model);

}  // namespace nc::cli
