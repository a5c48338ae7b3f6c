#include <cmath>

#include "doctest.h"
#include "nullcone/evolution.hpp"
#include "nullcone/oracle.hpp"

using namespace nc;

namespace {

const MetricModel kFlat = build_metric(MetricSpec{});
const ExactSolution kRest = plane_wave({0, 0, 0}, 1.0, {cplx(0.4, 0.1), cplx(-0.3, 0.6)});
const ExactSolution kMoving = plane_wave({0.3, -0.5, 0.7}, 1.3, {cplx(0.4, 0.1), cplx(-0.2, 0.9)});
const ExactSolution kConst = constant_spinor({0.3, 0.1}, {-0.2, 0.5}, {0.7, -0.4}, {0.1, 0.2});

double sup_diff(const SpectralSeries& a, const SpectralSeries& b, int upto = -1) {
    double e = 0.0;
    const int n = upto < 0 ? a.n : upto + 1;
    for (int m = 0; m < a.modes(); ++m)
        for (int j = 0; j < n; ++j) e = std::max(e, std::abs(a.at(m, j) - b.at(m, j)));
    return e;
}

double slice_error(const SliceState& a, const SliceState& b, int upto = -1) {
    double e = 0.0;
    for (int c = 0; c < 4; ++c) e = std::max(e, sup_diff(a.psi[c], b.psi[c], upto));
    return e;
}

EvolutionConfig config(int n, int two_lmax, double mass, std::vector<double> lambdas = {0.9, 0.95, 0.975}) {
    EvolutionConfig cfg;
    cfg.n_r = n;
    cfg.two_lmax = two_lmax;
    cfg.mass = mass;
    cfg.lambdas = std::move(lambdas);
    return cfg;
}

}  // namespace

TEST_CASE("Richardson weights reproduce polynomials at s = 0") {
    const std::vector<double> lam{0.9, 0.95, 0.975};
    const auto w = richardson_weights(lam);
    double sum = 0.0, lin = 0.0, quad = 0.0;
    for (size_t i = 0; i < lam.size(); ++i) {
        const double s = 1 - lam[i];
        sum += w[i];
        lin += w[i] * s;
        quad += w[i] * s * s;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(lin) < 1e-13);
    CHECK(std::abs(quad) < 1e-13);
    // Closed form for nodes 0.1, 0.05, 0.025: w = (1/3, -2, 8/3).
    CHECK(w[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(8.0 / 3).epsilon(1e-12));
}

TEST_CASE("lambda list validation") {
    EvolutionConfig cfg;
    cfg.lambdas = {0.9};
    CHECK_THROWS_AS(validate_lambdas(cfg), std::invalid_argument);
    cfg.lambdas = {0.995};
    CHECK_NOTHROW(validate_lambdas(cfg));
    cfg.lambdas = {0.9, 0.9, 0.95};
    CHECK_THROWS(validate_lambdas(cfg));
    cfg.lambdas = {0.9, 0.95, 0.93};
    CHECK_THROWS(validate_lambdas(cfg));
    cfg.lambdas = {0.975, 0.95, 0.9};
    CHECK_NOTHROW(validate_lambdas(cfg));
    cfg.lambdas = {0.9, 1.0};
    CHECK_THROWS(validate_lambdas(cfg));
}

TEST_CASE("field scale is R f^(1/4)") {
    const auto x = uniform_grid(0.0, 1.0, 4);
    const auto s = field_scale(kFlat, x);
    for (int j = 0; j <= 4; ++j) CHECK(s[j] == doctest::Approx(x[j]));
    MetricSpec sp;
    sp.kind = MetricSpec::Kind::StaticSpherical;
    sp.A = {1, 1};
    const MetricModel m = build_metric(sp);
    const auto sc = field_scale(m, {std::asinh(0.5)});
    CHECK(sc[0] == doctest::Approx(0.5 * std::pow(1.25, 0.25)).epsilon(1e-12));
}

TEST_CASE("datum extension keeps the original nodes and ends constant") {
    NullDatum d(2.0, 32, 3);
    for (int j = 0; j <= 32; ++j) {
        const double v = d.v(j);
        d.psi1.at(0, j) = cplx(1 + v + 0.5 * v * v, -v * v * v / 6);
        d.psi4.at(1, j) = cplx(std::cos(v), 0.0);
    }
    for (int order : {0, 3}) {
        const NullDatum e = extend_datum(d, 1.0, 64, {order, 0.1});
        CHECK(e.n_v == 64);
        CHECK(e.v_max == doctest::Approx(4.0));
        for (int j = 0; j <= 32; ++j) CHECK(e.psi1.at(0, j) == d.psi1.at(0, j));
        // The blend returns to the value at v = 2 at the end of the range.
        CHECK(std::abs(e.psi1.at(0, 64) - d.psi1.at(0, 32)) < 1e-12);
        CHECK(std::abs(e.psi4.at(1, 64) - d.psi4.at(1, 32)) < 1e-12);
        if (order == 3) {
            // A cubic continues exactly until the blend starts.
            const double v = e.v(40);
            CHECK(std::abs(e.psi1.at(0, 40) - cplx(1 + v + 0.5 * v * v, -v * v * v / 6)) < 1e-8);
        } else {
            CHECK(std::abs(e.psi1.at(0, 40) - d.psi1.at(0, 32)) < 1e-14);
        }
    }
}

TEST_CASE("assemble_rhs matches the oracle time derivative") {
    std::vector<double> errs;
    for (int n : {32, 64}) {
        const auto x = uniform_grid(0.0, 1.0, n);
        const SliceState s = slice_state(kMoving, kFlat, 0.5, x, 15);
        const SliceState rhs = assemble_rhs(s, config(n, 15, kMoving.mass), kFlat);
        const double h = 1e-3;
        SliceState fd = s;
        const SliceState a = slice_state(kMoving, kFlat, 0.5 - 2 * h, x, 15), b = slice_state(kMoving, kFlat, 0.5 - h, x, 15),
                         c = slice_state(kMoving, kFlat, 0.5 + h, x, 15), d = slice_state(kMoving, kFlat, 0.5 + 2 * h, x, 15);
        for (int k = 0; k < 4; ++k)
            for (size_t i = 0; i < fd.psi[k].c.size(); ++i)
                fd.psi[k].c[i] = (a.psi[k].c[i] - 8.0 * b.psi[k].c[i] + 8.0 * c.psi[k].c[i] - d.psi[k].c[i]) / (12 * h);
        errs.push_back(slice_error(rhs, fd));
    }
    CHECK(errs[1] < 1e-5);
    CHECK(std::log2(errs[0] / errs[1]) > 3.0);
}

TEST_CASE("Cauchy evolution reproduces a moving plane wave") {
    std::vector<double> slice_err, trace_err;
    for (int n : {64, 128}) {
        const double dx = 1.0 / n;
        const int J = static_cast<int>(std::ceil(2.6 * n)) + 8;
        const SliceState init = slice_state(kMoving, kFlat, 0.0, uniform_grid(0.0, J * dx, J), 15);
        CauchyOptions opt;
        opt.record_cone = true;
        const CauchyResult r = cauchy_run(init, 1.0, config(n, 15, kMoving.mass), kFlat, opt);
        CHECK(r.state.x.back() >= 1.0);
        const SliceState ex = slice_state(kMoving, kFlat, 1.0, r.state.x, 15);
        slice_err.push_back(slice_error(r.state, ex));
        const NullDatum tr = trace_on_cone(r.history, kFlat);
        const OracleCone oc = restrict_to_cone(kMoving, kFlat, 1.0, 2.0, n, 15);
        trace_err.push_back(std::max(sup_diff(tr.psi1, oc.datum.psi1), sup_diff(tr.psi4, oc.datum.psi4)));
        if (n == 64) CHECK_THROWS_AS(cauchy_evolve(init, 2.0, config(n, 15, 1.3), kFlat), std::domain_error);
    }
    CHECK(slice_err[1] < 1e-7);
    CHECK(trace_err[1] < 1e-6);
    CHECK(std::log2(slice_err[0] / slice_err[1]) > 3.5);
    CHECK(std::log2(trace_err[0] / trace_err[1]) > 3.5);
}

TEST_CASE("sourced evolution follows a manufactured solution") {
    // Mode l = 1/2 of u = x g (c_a, c_a, c_b, c_b), g = (1 + t) e^{-x²}.
    const cplx ca(0.6, 0.2), cb(-0.3, 0.5);
    const double m = 1.0;
    const SourceField xi = [&](double t, const std::vector<double>& xs, std::array<SpectralSeries, 4>& out) {
        for (auto& s : out) std::fill(s.c.begin(), s.c.end(), cplx(0.0));
        for (size_t j = 0; j < xs.size(); ++j) {
            const double X = xs[j], e = std::exp(-X * X), g = (1 + t) * e, gs = -(1 + t) * e;
            const cplx S[4] = {e * ca - 2 * X * gs * ca - m * g * cb, e * ca + 2 * X * gs * ca - m * g * cb,
                               e * cb + 2 * X * gs * cb + m * g * ca, e * cb - 2 * X * gs * cb + m * g * ca};
            for (int c = 0; c < 4; ++c) out[c].at(mode_index(kComponentSpin[c], 1, 1), j) = S[c] / std::sqrt(2.0);
        }
    };
    std::vector<double> errs;
    for (int n : {32, 64}) {
        const int J = static_cast<int>(std::ceil(2.75 * n));
        const auto x = uniform_grid(0.0, static_cast<double>(J) / n, J);
        SliceState init(0.0, x, 1);
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j <= J; ++j)
                init.psi[c].at(mode_index(kComponentSpin[c], 1, 1), j) = std::exp(-x[j] * x[j]) * (c < 2 ? ca : cb);
        const SliceState out = source_evolve(init, xi, 1.0, config(n, 1, m), kFlat);
        double e = 0.0;
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < out.nodes(); ++j)
                e = std::max(e, std::abs(out.psi[c].at(mode_index(kComponentSpin[c], 1, 1), j) -
                                         2.0 * std::exp(-x[j] * x[j]) * (c < 2 ? ca : cb)));
        errs.push_back(e);
    }
    CHECK(errs[1] < 1e-6);
    CHECK(std::log2(errs[0] / errs[1]) > 3.0);
}

TEST_CASE("data carried to the opened cone") {
    // g^λ(x) is the cone solution at the same x; inside x ≤ T it is the oracle
    // restriction to {t = x}.
    const int n = 128;
    const double lam = 0.9;
    const OracleCone oc = restrict_to_cone(kRest, kFlat, 1.0, 2.0, n, 5);
    const InducedData g = induced_cone_data(oc.datum, lam, config(n, 5, 1.0), kFlat);
    CHECK(g.g.tilt == lam);
    CHECK(g.g.nodes() > n / lam);
    const OracleCone half = restrict_to_cone(kRest, kFlat, 1.0, 1.0, n / 2, 5);
    // x_j = j / n on the opened cone versus v = 2x on the oracle grid with n / 2 intervals.
    double e = 0.0;
    for (int m = 0; m < half.psi2.modes(); ++m)
        for (int j = 0; j <= n / 2; ++j) {
            e = std::max(e, std::abs(g.g.psi[0].at(m, j) - half.datum.psi1.at(m, j)));
            e = std::max(e, std::abs(g.g.psi[1].at(m, j) - half.psi2.at(m, j)));
            e = std::max(e, std::abs(g.g.psi[2].at(m, j) - half.psi3.at(m, j)));
            e = std::max(e, std::abs(g.g.psi[3].at(m, j) - half.datum.psi4.at(m, j)));
        }
    CHECK(e < 1e-8);
    CHECK(g.gH23 <= 1e-6 * g.g_norm);
    CHECK(g.gH23_core <= g.gH23);
}

TEST_CASE("Goursat solve: oracles, round trip and joint refinement") {
    SUBCASE("constant spinor is recovered to high accuracy") {
        const OracleCone oc = restrict_to_cone(kConst, kFlat, 1.0, 2.0, 64, 3);
        const GoursatResult r = goursat_solve(oc.datum, config(64, 3, 0.0), kFlat);
        const SliceState ex = slice_state(kConst, kFlat, 1.0, r.sigma.x, 3);
        CHECK(slice_error(r.sigma, ex) < 1e-6);
        CHECK(r.active_modes > 0);
    }
    SUBCASE("rest plane wave error decreases under joint refinement") {
        std::vector<double> errs, trace;
        const std::vector<std::vector<double>> lams{{0.6, 0.8, 0.9}, {0.8, 0.9, 0.95}};
        for (int i = 0; i < 2; ++i) {
            const int n = 32 << i;
            const OracleCone oc = restrict_to_cone(kRest, kFlat, 1.0, 2.0, n, 3);
            const GoursatResult r = goursat_solve(oc.datum, config(n, 3, 1.0, lams[i]), kFlat);
            const SliceState ex = slice_state(kRest, kFlat, 1.0, r.sigma.x, 3);
            errs.push_back(slice_error(r.sigma, ex));
            const NullDatum tr = trace_on_cone(r.history, kFlat);
            trace.push_back(std::max(sup_diff(tr.psi1, oc.datum.psi1), sup_diff(tr.psi4, oc.datum.psi4)));
        }
        CHECK(errs[1] < errs[0]);
        CHECK(trace[1] < trace[0]);
        CHECK(errs[1] < 2e-2);
    }
    SUBCASE("zero datum stays zero") {
        NullDatum d(2.0, 32, 3);
        const GoursatResult r = goursat_solve(d, config(32, 3, 0.0), kFlat);
        for (const auto& p : r.sigma.psi) CHECK(p.max_abs() == 0.0);
        CHECK(r.active_modes == 0);
    }
}
