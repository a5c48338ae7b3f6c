#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nullcone/constraints.hpp"
#include "nullcone/diagnostics.hpp"
#include "nullcone/kernels.hpp"

namespace nc::cli {

namespace {

ConfigError bad(const std::string& path, const std::string& what) { return ConfigError(path, what); }

Spinor2 spinor_of(const Config& c, const std::string& key, const Spinor2& fallback) {
    if (!c.has(key)) return fallback;
    const auto v = c.list(key, {});
    if (v.size() != 4) throw bad(key, "expected four numbers (re0, im0, re1, im1)");
    return {cplx(v[0], v[1]), cplx(v[2], v[3])};
}

std::vector<Mode> modes_of(const Config& c, const std::string& key, int two_s) {
    const auto v = c.list(key, {});
    if (v.size() % 4 != 0) throw bad(key, "expected groups of (2l, 2m, re, im)");
    std::vector<Mode> out;
    for (size_t i = 0; i < v.size(); i += 4) {
        const int tl = static_cast<int>(v[i]), tm = static_cast<int>(v[i + 1]);
        if (tl != v[i] || tm != v[i + 1] || !valid_mode(two_s, tl, tm))
            throw bad(key, "invalid mode (" + io::format_double(v[i]) + ", " +
                               io::format_double(v[i + 1]) + ") for this spin");
        out.push_back({tl, tm, cplx(v[i + 2], v[i + 3])});
    }
    return out;
}

void check(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw bad(path, what);
}

double sup_diff(const SpectralSeries& a, const SpectralSeries& b) {
    if (a.c.size() != b.c.size()) throw std::invalid_argument("sup_diff: shape mismatch");
    double e = 0.0;
    for (size_t i = 0; i < a.c.size(); ++i) e = std::max(e, std::abs(a.c[i] - b.c[i]));
    return e;
}

double sup_abs(const SpectralSeries& a) {
    double e = 0.0;
    for (const cplx& z : a.c) e = std::max(e, std::abs(z));
    return e;
}

// Per-node ℓ² norm over modes.
double node_norm(const SpectralSeries& s, int j) {
    double acc = 0.0;
    for (int m = 0; m < s.modes(); ++m) acc += std::norm(s.at(m, j));
    return std::sqrt(acc);
}

io::CsvTable profile_table(const std::string& name, const std::string& axis,
                           const std::vector<double>& grid,
                           const std::vector<const SpectralSeries*>& fields) {
    io::CsvTable t{name, {axis}, {}};
    for (size_t c = 0; c < fields.size(); ++c) t.header.push_back("abs_psi" + std::to_string(c + 1));
    for (size_t j = 0; j < grid.size(); ++j) {
        std::vector<double> row{grid[j]};
        for (const auto* f : fields) row.push_back(node_norm(*f, static_cast<int>(j)));
        t.rows.push_back(row);
    }
    return t;
}

std::vector<double> cone_grid(const NullDatum& d) {
    std::vector<double> v(d.nodes());
    for (int j = 0; j < d.nodes(); ++j) v[j] = d.v(j);
    return v;
}

bool has_oracle(const RunConfig& rc) { return rc.datum_kind == "oracle"; }

void require_oracle(const RunConfig& rc, const std::string& what) {
    if (!has_oracle(rc)) throw ConfigError("datum.kind", what + " needs datum.kind = oracle");
}

EvolutionConfig evolution_of(const RunConfig& rc, int n_r) {
    EvolutionConfig e = rc.evolution;
    e.T = rc.T;
    e.n_r = n_r;
    e.two_lmax = rc.two_lmax;
    e.mass = rc.mass;
    e.charge = rc.charge;
    e.phi = rc.phi;
    return e;
}

// 1 - λ multiplied by factor for every entry.
std::vector<double> scaled_lambdas(const std::vector<double>& l, double factor) {
    std::vector<double> out;
    for (double x : l) out.push_back(1.0 - (1.0 - x) * factor);
    return out;
}

void fail_if(Artifacts& a, bool bad_value, const std::string& what) {
    if (bad_value) a.failures.push_back(what);
}

RunConfig with_resolution(const RunConfig& rc, int n) {
    RunConfig r = rc;
    r.n_v = n;
    r.n_r = n;
    return r;
}

struct IsometryNumbers {
    EnergyReport report;
    double matching = 0.0;
    double constraint_error = 0.0;
    double aliasing = 0.0;
};

IsometryNumbers oracle_numbers(const RunConfig& rc) {
    const MetricModel model = model_of(rc);
    const ExactSolution s = oracle_of(rc.oracle);
    const OracleCone oc = restrict_to_cone(s, model, 1.0, 2.0 * rc.T, rc.n_v, rc.two_lmax);
    const SliceState sl = slice_state(s, model, rc.T, uniform_grid(0.0, rc.T, rc.n_r), rc.two_lmax);
    IsometryNumbers out;
    out.report = isometry_report(oc.datum, sl, model);
    const ConeSolution sol = solve_constraints(oc.datum, model);
    out.constraint_error = std::max(sup_diff(sol.psi[1], oc.psi2), sup_diff(sol.psi[2], oc.psi3));
    std::vector<Direction> dirs;
    const SphereQuadrature q(6, 12);
    for (double th : q.theta)
        for (double ph : q.phi) dirs.push_back({th, ph});
    out.matching = matching_residual(sol, conjugate_structure(model, dirs));
    out.aliasing = oc.aliasing;
    return out;
}

double round_trip_error(const NullDatum& d, const GoursatResult& r, const MetricModel& model) {
    const NullDatum tr = trace_on_cone(r.history, model);
    return std::max(sup_diff(tr.psi1, d.psi1), sup_diff(tr.psi4, d.psi4));
}

double max_gh_ratio(const GoursatResult& r) {
    double worst = 0.0;
    for (size_t i = 0; i < r.gH23.size(); ++i)
        if (r.g_norm[i] > 0.0) worst = std::max(worst, r.gH23[i] / r.g_norm[i]);
    return worst;
}

// Cauchy oracle run on a grid wide enough that the valid wedge covers [0, T].
struct CauchyNumbers {
    double slice_error = 0.0, trace_error = 0.0;
    CauchyResult run;
};

CauchyNumbers cauchy_numbers(const RunConfig& rc) {
    const MetricModel model = model_of(rc);
    const ExactSolution s = oracle_of(rc.oracle);
    const EvolutionConfig e = evolution_of(rc, rc.n_r);
    const double dx = rc.T / rc.n_r;
    const int J = static_cast<int>(std::ceil(rc.T * (1.0 + e.buffer_speed) / dx)) + 8;
    const std::vector<double> x = uniform_grid(0.0, J * dx, J);
    const SliceState init = slice_state(s, model, 0.0, x, rc.two_lmax);
    CauchyOptions opt;
    opt.record_cone = true;
    CauchyNumbers out;
    out.run = cauchy_run(init, rc.T, e, model, opt);
    const SliceState exact = slice_state(s, model, rc.T, out.run.state.x, rc.two_lmax);
    for (int c = 0; c < 4; ++c)
        out.slice_error = std::max(out.slice_error, sup_diff(out.run.state.psi[c], exact.psi[c]));
    const NullDatum tr = trace_on_cone(out.run.history, model);
    const OracleCone oc = restrict_to_cone(s, model, 1.0, 2.0 * rc.T, rc.n_r, rc.two_lmax);
    out.trace_error = std::max(sup_diff(tr.psi1, oc.datum.psi1), sup_diff(tr.psi4, oc.datum.psi4));
    return out;
}

// ---------------------------------------------------------------- experiments

Artifacts run_constraints(const RunConfig& rc) {
    Artifacts a;
    const MetricModel model = model_of(rc);
    const NullDatum d = datum_of(rc, model);
    const ConeSolution sol = solve_constraints(d, model);
    double hat0 = 0.0;
    for (int m = 0; m < sol.phi1_hat.modes(); ++m) hat0 = std::max(hat0, std::abs(sol.phi1_hat.at(m, 0)));
    for (int m = 0; m < sol.chi1_hat.modes(); ++m) hat0 = std::max(hat0, std::abs(sol.chi1_hat.at(m, 0)));
    a.summary["vertex_hat_max"] = hat0;
    a.summary["cone_flux"] = cone_flux(d, model);
    a.summary["psi2_sup"] = sup_abs(sol.psi[1]);
    a.summary["psi3_sup"] = sup_abs(sol.psi[2]);
    std::vector<Direction> dirs;
    const SphereQuadrature q(6, 12);
    for (double th : q.theta)
        for (double ph : q.phi) dirs.push_back({th, ph});
    const double match = matching_residual(sol, conjugate_structure(model, dirs));
    a.summary["matching_residual"] = match;
    fail_if(a, hat0 != 0.0, "vertex values of the hatted unknowns are not zero");
    if (has_oracle(rc)) {
        const OracleCone oc = restrict_to_cone(oracle_of(rc.oracle), model, 1.0, 2.0 * rc.T, rc.n_v,
                                               rc.two_lmax);
        const double err = std::max(sup_diff(sol.psi[1], oc.psi2), sup_diff(sol.psi[2], oc.psi3));
        a.summary["oracle_error"] = err;
        fail_if(a, !(err <= rc.tol.constraint), "constraint error above tolerance");
        fail_if(a, !(match <= rc.tol.matching), "matching residual above tolerance");
    }
    const auto v = cone_grid(d);
    a.tables.push_back(profile_table("cone_profile", "v", v,
                                     {&sol.psi[0], &sol.psi[1], &sol.psi[2], &sol.psi[3]}));
    a.states.emplace_back("cone_solution", io::cone_json(sol));
    return a;
}

Artifacts run_goursat(const RunConfig& rc) {
    Artifacts a;
    const MetricModel model = model_of(rc);
    const NullDatum d = datum_of(rc, model);
    const EvolutionConfig e = evolution_of(rc, rc.n_r);
    const GoursatResult r = goursat_solve(d, e, model);
    const double rt = round_trip_error(d, r, model);
    const double gh = max_gh_ratio(r);
    a.summary["round_trip_error"] = rt;
    a.summary["gH23_relative"] = gh;
    a.summary["observed_lambda_order"] = std::isfinite(r.observed_order) ? io::Json(r.observed_order)
                                                                        : io::Json(nullptr);
    a.summary["active_modes"] = r.active_modes;
    a.summary["steps"] = r.steps;
    a.summary["lambdas"] = e.lambdas;
    if (model.flat()) {
        const EnergyReport er = isometry_report(d, r.sigma, model);
        a.summary["isometry_gap"] = er.gap;
        a.summary["slice_energy"] = er.slice;
        a.summary["cone_flux"] = er.cone;
    }
    if (has_oracle(rc)) {
        const SliceState ex = slice_state(oracle_of(rc.oracle), model, rc.T, r.sigma.x, rc.two_lmax);
        double err = 0.0;
        for (int c = 0; c < 4; ++c) err = std::max(err, sup_diff(r.sigma.psi[c], ex.psi[c]));
        a.summary["sigma_oracle_error"] = err;
    }
    fail_if(a, !(rt <= rc.tol.round_trip), "round trip error above tolerance");
    fail_if(a, !(gh <= rc.tol.gh), "(g_H)_{2,3} residual above tolerance");
    io::CsvTable lam{"lambda_report", {"lambda", "gH23", "g_norm", "gH23_core"}, {}};
    for (size_t i = 0; i < e.lambdas.size(); ++i)
        lam.rows.push_back({e.lambdas[i], r.gH23[i], r.g_norm[i], r.gH23_core[i]});
    a.tables.push_back(lam);
    a.tables.push_back(profile_table("sigma_profile", "x", r.sigma.x,
                                     {&r.sigma.psi[0], &r.sigma.psi[1], &r.sigma.psi[2], &r.sigma.psi[3]}));
    a.states.emplace_back("sigma", io::slice_json(r.sigma));
    return a;
}

Artifacts run_cauchy(const RunConfig& rc) {
    require_oracle(rc, "the cauchy experiment");
    Artifacts a;
    const CauchyNumbers c = cauchy_numbers(rc);
    a.summary["slice_error"] = c.slice_error;
    a.summary["trace_error"] = c.trace_error;
    a.summary["valid_extent"] = c.run.state.x.back();
    a.summary["steps"] = c.run.steps;
    fail_if(a, !(c.slice_error <= rc.tol.cauchy), "cauchy slice error above tolerance");
    fail_if(a, !(c.trace_error <= rc.tol.cauchy), "cauchy trace error above tolerance");
    const SliceState& s = c.run.state;
    a.tables.push_back(profile_table("slice_profile", "x", s.x,
                                     {&s.psi[0], &s.psi[1], &s.psi[2], &s.psi[3]}));
    a.states.emplace_back("slice", io::slice_json(s));
    return a;
}

Artifacts run_spincoeffs(const RunConfig& rc) {
    Artifacts a;
    const MetricModel model = model_of(rc);
    const int n = rc.spin_samples;
    io::CsvTable t{"spin_coefficients", {"t", "x", "theta", "phi", "frame"}, {}};
    for (const char* name : {"kappa", "sigma", "rho", "tau", "epsilon", "beta", "alpha", "gamma", "pi",
                             "mu", "lambda", "nu"}) {
        t.header.push_back(std::string(name) + "_re");
        t.header.push_back(std::string(name) + "_im");
    }
    double kn = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tt = rc.T * (i + 1) / n;
        for (int j = 0; j < n; ++j) {
            const double x = tt * (j + 1) / (n + 1);
            for (int k = 0; k < n; ++k) {
                const double th = kPi * (k + 0.5) / n;
                const SlicePoint p{tt, x, th, 0.7};
                for (int frame = 0; frame < 2; ++frame) {
                    const auto choice = frame == 0 ? TetradChoice::Adapted : TetradChoice::GradientL;
                    const SpinCoefficientSet c = spin_coefficients(model, p, choice);
                    std::vector<double> row{tt, x, th, p.phi, static_cast<double>(frame)};
                    for (const cplx& z : {c.kappa, c.sigma, c.rho, c.tau, c.epsilon, c.beta, c.alpha,
                                          c.gamma, c.pi, c.mu, c.lambda_c, c.nu}) {
                        row.push_back(z.real());
                        row.push_back(z.imag());
                    }
                    kn = std::max({kn, std::abs(c.kappa), std::abs(c.nu)});
                    t.rows.push_back(row);
                }
            }
        }
    }
    const AsymptoticsFit fit = asymptotics_fit(model);
    a.summary["kappa_nu_max"] = kn;
    a.summary["K"] = fit.K;
    a.summary["rrho_limit"] = fit.rrho_limit;
    a.summary["r2k_limit"] = fit.r2k_limit;
    a.summary["r2k_smallest"] = fit.r2k_smallest;
    a.summary["fit_residual"] = fit.residual;
    a.summary["fit_flagged"] = fit.flagged;
    fail_if(a, !(kn <= rc.tol.spin), "kappa or nu above tolerance");
    fail_if(a, !(std::abs(fit.rrho_limit + 1.0) <= rc.tol.asymptotics), "R rho limit off -1");
    fail_if(a, !(std::abs(fit.r2k_limit - 1.0) <= rc.tol.asymptotics), "R^2 k limit off 1");
    a.tables.push_back(t);
    return a;
}

Artifacts run_oracle_check(const RunConfig& rc) {
    require_oracle(rc, "oracle-check");
    Artifacts a;
    const IsometryNumbers n = oracle_numbers(rc);
    a.summary["slice_energy"] = n.report.slice;
    a.summary["cone_flux"] = n.report.cone;
    a.summary["isometry_gap"] = n.report.gap;
    a.summary["constraint_error"] = n.constraint_error;
    a.summary["matching_residual"] = n.matching;
    a.summary["aliasing"] = n.aliasing;
    fail_if(a, !(n.report.gap <= rc.tol.isometry), "isometry gap above tolerance");
    fail_if(a, !(n.constraint_error <= rc.tol.constraint), "constraint error above tolerance");
    fail_if(a, !(n.matching <= rc.tol.matching), "matching residual above tolerance");
    return a;
}

Artifacts run_convergence(const RunConfig& rc) {
    Artifacts a;
    const int L = static_cast<int>(rc.ladder.size());
    std::vector<double> res, err;
    for (int i = 0; i < L; ++i) {
        const double factor = std::ldexp(1.0, L - 1 - i);
        double e = 0.0;
        if (rc.target == "constraints") {
            require_oracle(rc, "the constraints ladder");
            e = oracle_numbers(with_resolution(rc, rc.ladder[i])).constraint_error;
        } else if (rc.target == "isometry") {
            require_oracle(rc, "the isometry ladder");
            e = oracle_numbers(with_resolution(rc, rc.ladder[i])).report.gap;
        } else if (rc.target == "cauchy") {
            require_oracle(rc, "the cauchy ladder");
            e = cauchy_numbers(with_resolution(rc, rc.ladder[i])).slice_error;
        } else {
            // goursat: grid ladder (joint halves 1 - λ per level); lambda: fixed
            // grid, 1 - λ scaled by ladder.back() / ladder[i].
            RunConfig r = rc.target == "goursat" ? with_resolution(rc, rc.ladder[i]) : rc;
            const double f = rc.target == "goursat" ? (rc.joint ? factor : 1.0)
                                                    : static_cast<double>(rc.ladder.back()) / rc.ladder[i];
            r.evolution.lambdas = scaled_lambdas(rc.evolution.lambdas, f);
            EvolutionConfig e_cfg = evolution_of(r, r.n_r);
            validate_lambdas(e_cfg);
            const MetricModel model = model_of(r);
            const NullDatum d = datum_of(r, model);
            e = round_trip_error(d, goursat_solve(d, e_cfg, model), model);
        }
        res.push_back(rc.ladder[i]);
        err.push_back(e);
    }
    const ConvergenceTable t = convergence_table(rc.target, res, err);
    bool pass = true;
    if (rc.target == "goursat" || rc.target == "lambda") {
        for (int i = 1; i < L; ++i) pass = pass && err[i] < err[i - 1];
        a.summary["criterion"] = "strictly decreasing";
    } else {
        const OrderVerdict v = assess_order(t, rc.tol.min_order, rc.tol.noise_floor);
        a.summary["criterion"] = "order >= min_order or noise floor";
        a.summary["observed_order"] = std::isfinite(v.order) ? io::Json(v.order) : io::Json(nullptr);
        a.summary["noise_floor"] = v.noise_floor;
        pass = v.pass;
    }
    a.summary["table"] = io::table_json(t);
    a.summary["pass"] = pass;
    fail_if(a, !pass, "convergence criterion not met for " + rc.target);
    a.tables.push_back(io::convergence_csv(t));
    return a;
}

}  // namespace

// ---------------------------------------------------------------- schema

RunConfig parse_run_config(const Config& c, const std::string& experiment_override) {
    c.require_known({"experiment", "T", "repro", "output.dir", "metric.kind", "metric.A", "metric.B",
                     "datum.kind", "datum.width", "datum.psi1", "datum.psi4", "oracle.kind",
                     "oracle.a", "oracle.b", "oracle.momentum", "oracle.mass", "physics.mass",
                     "physics.charge", "physics.phi", "resolution.n_v", "resolution.n_r",
                     "resolution.two_lmax", "goursat.lambdas", "goursat.single_lambda_gap",
                     "numerics.cfl", "numerics.dissipation", "numerics.margin",
                     "numerics.buffer_speed", "numerics.mode_cutoff", "numerics.extension_order",
                     "numerics.blend_fraction", "convergence.target", "convergence.ladder",
                     "convergence.joint", "spincoeffs.samples", "tolerance.isometry",
                     "tolerance.constraint", "tolerance.matching", "tolerance.round_trip",
                     "tolerance.gh", "tolerance.cauchy", "tolerance.spin", "tolerance.asymptotics",
                     "tolerance.min_order", "tolerance.noise_floor"});
    RunConfig rc;
    rc.experiment = c.str("experiment", "");
    if (!experiment_override.empty()) {
        if (!rc.experiment.empty() && rc.experiment != experiment_override)
            throw bad("experiment", "config names '" + rc.experiment + "' but the command is '" +
                                        experiment_override + "'");
        rc.experiment = experiment_override;
    }
    check(std::find(kExperiments.begin(), kExperiments.end(), rc.experiment) != kExperiments.end(),
          "experiment", "unknown experiment '" + rc.experiment + "'");

    rc.T = c.num("T", 1.0);
    check(rc.T > 0.0 && rc.T <= 100.0, "T", "must lie in (0, 100]");
    rc.repro = c.flag("repro", false);
    rc.out_dir = c.str("output.dir", "");

    const std::string mk = c.str("metric.kind", "minkowski");
    rc.metric.A = c.list("metric.A", {1.0});
    rc.metric.B = c.list("metric.B", {1.0});
    if (mk == "minkowski") {
        rc.metric.kind = MetricSpec::Kind::Minkowski;
        check(!c.has("metric.A") && !c.has("metric.B"), "metric.A",
              "coefficients are only read for static_spherical");
    } else if (mk == "static_spherical") {
        rc.metric.kind = MetricSpec::Kind::StaticSpherical;
        check(!rc.metric.A.empty() && rc.metric.A[0] > 0.0, "metric.A", "A(0) must be positive");
        check(!rc.metric.B.empty() && rc.metric.B[0] > 0.0, "metric.B", "B(0) must be positive");
    } else {
        throw bad("metric.kind", "expected minkowski or static_spherical");
    }
    rc.metric.T_max = rc.T;

    rc.datum_kind = c.str("datum.kind", "oracle");
    check(rc.datum_kind == "oracle" || rc.datum_kind == "zero" || rc.datum_kind == "gaussian",
          "datum.kind", "expected oracle, zero or gaussian");
    rc.oracle.kind = c.str("oracle.kind", "constant_spinor");
    check(rc.oracle.kind == "constant_spinor" || rc.oracle.kind == "plane_wave", "oracle.kind",
          "expected constant_spinor or plane_wave");
    rc.oracle.a = spinor_of(c, "oracle.a", rc.oracle.a);
    rc.oracle.b = spinor_of(c, "oracle.b", rc.oracle.b);
    const auto mom = c.list("oracle.momentum", {0.0, 0.0, 0.0});
    check(mom.size() == 3, "oracle.momentum", "expected three numbers");
    rc.oracle.momentum = {mom[0], mom[1], mom[2]};
    rc.oracle.mass = c.num("oracle.mass", 1.0);
    if (rc.oracle.kind == "plane_wave") check(rc.oracle.mass > 0.0, "oracle.mass", "must be positive");
    rc.gaussian.width = c.num("datum.width", 0.7);
    check(rc.gaussian.width > 0.0, "datum.width", "must be positive");
    rc.gaussian.psi1 = modes_of(c, "datum.psi1", 1);
    rc.gaussian.psi4 = modes_of(c, "datum.psi4", -1);

    rc.charge = c.num("physics.charge", 0.0);
    rc.phi.c = c.list("physics.phi", {});
    if (rc.datum_kind == "oracle") {
        check(rc.metric.kind == MetricSpec::Kind::Minkowski, "datum.kind",
              "oracle data exist only on Minkowski");
        check(rc.charge == 0.0 && rc.phi.zero(), "physics.charge", "oracle data are uncharged");
        const double om = rc.oracle.kind == "plane_wave" ? rc.oracle.mass : 0.0;
        if (c.has("physics.mass"))
            check(c.num("physics.mass", 0.0) == om, "physics.mass", "disagrees with the oracle mass");
        rc.mass = om;
    } else {
        rc.mass = c.num("physics.mass", 0.0);
        check(rc.mass >= 0.0, "physics.mass", "must be non-negative");
    }

    rc.n_v = c.integer("resolution.n_v", 64);
    rc.n_r = c.integer("resolution.n_r", rc.n_v);
    rc.two_lmax = c.integer("resolution.two_lmax", 9);
    check(rc.n_v >= 8 && rc.n_v % 2 == 0 && rc.n_v <= 8192, "resolution.n_v",
          "must be even and in [8, 8192]");
    check(rc.n_r >= 8 && rc.n_r <= 8192, "resolution.n_r", "must lie in [8, 8192]");
    check(rc.two_lmax >= 1 && rc.two_lmax % 2 == 1 && rc.two_lmax <= 41, "resolution.two_lmax",
          "must be odd and in [1, 41]");

    EvolutionConfig& e = rc.evolution;
    e.lambdas = c.list("goursat.lambdas", e.lambdas);
    e.single_lambda_gap = c.num("goursat.single_lambda_gap", e.single_lambda_gap);
    check(!e.lambdas.empty(), "goursat.lambdas", "must not be empty");
    for (double l : e.lambdas) check(l > 0.0 && l < 1.0, "goursat.lambdas", "entries must lie in (0, 1)");
    e.cfl = c.num("numerics.cfl", e.cfl);
    check(e.cfl > 0.0 && e.cfl <= 1.0, "numerics.cfl", "must lie in (0, 1]");
    e.dissipation = c.num("numerics.dissipation", e.dissipation);
    check(e.dissipation >= 0.0 && e.dissipation <= 1.0, "numerics.dissipation", "must lie in [0, 1]");
    e.margin = c.integer("numerics.margin", e.margin);
    check(e.margin >= 8 && e.margin <= 1024, "numerics.margin", "must lie in [8, 1024]");
    e.buffer_speed = c.num("numerics.buffer_speed", e.buffer_speed);
    check(e.buffer_speed >= 1.0 && e.buffer_speed <= 4.0, "numerics.buffer_speed", "must lie in [1, 4]");
    e.mode_cutoff = c.num("numerics.mode_cutoff", e.mode_cutoff);
    check(e.mode_cutoff >= 0.0 && e.mode_cutoff < 1e-3, "numerics.mode_cutoff", "must lie in [0, 1e-3)");
    e.extension.order = c.integer("numerics.extension_order", e.extension.order);
    check(e.extension.order >= 0 && e.extension.order <= 4, "numerics.extension_order",
          "must lie in [0, 4]");
    e.extension.blend_fraction = c.num("numerics.blend_fraction", e.extension.blend_fraction);
    check(e.extension.blend_fraction > 0.0 && e.extension.blend_fraction <= 0.5,
          "numerics.blend_fraction", "must lie in (0, 0.5]");
    if (rc.experiment == "goursat") {
        try {
            validate_lambdas(evolution_of(rc, rc.n_r));
        } catch (const std::invalid_argument& ex) {
            throw bad("goursat.lambdas", ex.what());
        }
    }

    rc.target = c.str("convergence.target", "isometry");
    rc.ladder = c.int_list("convergence.ladder", {});
    rc.joint = c.flag("convergence.joint", true);
    if (rc.experiment == "convergence") {
        check(rc.target == "constraints" || rc.target == "isometry" || rc.target == "goursat" ||
                  rc.target == "lambda" || rc.target == "cauchy",
              "convergence.target", "expected constraints, isometry, goursat, lambda or cauchy");
        check(rc.ladder.size() >= 3, "convergence.ladder", "needs at least three resolutions");
        for (size_t i = 1; i < rc.ladder.size(); ++i)
            check(rc.ladder[i] > rc.ladder[i - 1], "convergence.ladder",
                  "resolutions must be strictly increasing");
        for (int n : rc.ladder) {
            if (rc.target == "lambda") {
                check(n >= 1, "convergence.ladder", "lambda ladder entries must be positive");
            } else {
                check(n >= 8 && n % 2 == 0 && n <= 8192, "convergence.ladder",
                      "resolutions must be even and in [8, 8192]");
            }
        }
        if (rc.target == "goursat" || rc.target == "lambda") {
            const double worst = rc.target == "lambda"
                                     ? static_cast<double>(rc.ladder.back()) / rc.ladder.front()
                                     : (rc.joint ? std::ldexp(1.0, static_cast<int>(rc.ladder.size()) - 1) : 1.0);
            for (double l : scaled_lambdas(e.lambdas, worst))
                check(l > 0.0, "convergence.ladder", "scaled lambdas leave (0, 1)");
        }
    }
    rc.spin_samples = c.integer("spincoeffs.samples", 4);
    check(rc.spin_samples >= 1 && rc.spin_samples <= 64, "spincoeffs.samples", "must lie in [1, 64]");

    Tolerances& t = rc.tol;
    const std::pair<const char*, double*> tols[] = {
        {"tolerance.isometry", &t.isometry},       {"tolerance.constraint", &t.constraint},
        {"tolerance.matching", &t.matching},       {"tolerance.round_trip", &t.round_trip},
        {"tolerance.gh", &t.gh},                   {"tolerance.cauchy", &t.cauchy},
        {"tolerance.spin", &t.spin},               {"tolerance.asymptotics", &t.asymptotics},
        {"tolerance.min_order", &t.min_order},     {"tolerance.noise_floor", &t.noise_floor}};
    for (const auto& [key, dst] : tols) {
        *dst = c.num(key, *dst);
        check(*dst >= 0.0, key, "must be non-negative");
    }
    return rc;
}

MetricModel model_of(const RunConfig& rc) { return build_metric(rc.metric); }

ExactSolution oracle_of(const OracleSpec& o) {
    if (o.kind == "plane_wave") return plane_wave(o.momentum, o.mass, o.a);
    return constant_spinor(o.a[0], o.a[1], o.b[0], o.b[1]);
}

NullDatum datum_of(const RunConfig& rc, const MetricModel& model) {
    if (rc.datum_kind == "oracle")
        return restrict_to_cone(oracle_of(rc.oracle), model, 1.0, 2.0 * rc.T, rc.n_v, rc.two_lmax).datum;
    NullDatum d(2.0 * rc.T, rc.n_v, rc.two_lmax);
    d.mass = rc.mass;
    d.charge = rc.charge;
    d.phi = rc.phi;
    if (rc.datum_kind == "gaussian") {
        for (int j = 0; j < d.nodes(); ++j) {
            const double s = d.v(j) / rc.gaussian.width;
            const double g = std::exp(-s * s);
            for (const Mode& m : rc.gaussian.psi1)
                if (m.two_l <= rc.two_lmax) d.psi1.at(mode_index(1, m.two_l, m.two_m), j) = g * m.a;
            for (const Mode& m : rc.gaussian.psi4)
                if (m.two_l <= rc.two_lmax) d.psi4.at(mode_index(-1, m.two_l, m.two_m), j) = g * m.a;
        }
    }
    return d;
}

Artifacts run_experiment(const RunConfig& rc) {
    if (rc.experiment == "constraints") return run_constraints(rc);
    if (rc.experiment == "goursat") return run_goursat(rc);
    if (rc.experiment == "cauchy") return run_cauchy(rc);
    if (rc.experiment == "spincoeffs") return run_spincoeffs(rc);
    if (rc.experiment == "oracle-check") return run_oracle_check(rc);
    if (rc.experiment == "convergence") return run_convergence(rc);
    throw ConfigError("experiment", "unknown experiment '" + rc.experiment + "'");
}

std::vector<std::string> write_artifacts(const Artifacts& a, const RunConfig& rc, const Config& echo,
                                         const std::filesystem::path& dir, double seconds) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    for (const auto& t : a.tables) {
        io::write_text(dir / (t.name + ".csv"), io::csv_text(t));
        files.push_back(t.name + ".csv");
    }
    for (const auto& [name, j] : a.states) {
        io::write_json(dir / (name + ".json"), j);
        files.push_back(name + ".json");
    }
    io::Json summary = a.summary;
    summary["experiment"] = rc.experiment;
    summary["within_tolerance"] = a.ok();
    summary["failures"] = a.failures;
    io::write_json(dir / "summary.json", summary);
    files.push_back("summary.json");

    // The echo is a complete config: re-running it reproduces the experiment.
    Config full = echo;
    full.set("experiment", rc.experiment);
    io::write_text(dir / "config.echo", full.dump());
    files.push_back("config.echo");

    io::Json m;
    m["program"] = "nullcone";
    m["version"] = kVersion;
    m["experiment"] = rc.experiment;
    m["repro"] = rc.repro;
    m["kernel_isa"] = kernels::isa_name(kernels::active_isa());
    io::Json cfg = io::Json::object();
    for (const auto& [k, v] : full.values()) cfg[k] = v;
    m["config"] = cfg;
    m["files"] = files;
    if (!rc.repro) m["timings"] = {{"wall_seconds", seconds}};
    io::write_json(dir / "manifest.json", m);
    files.push_back("manifest.json");
    return files;
}

}  // namespace nc::cli
