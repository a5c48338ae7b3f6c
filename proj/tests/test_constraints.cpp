#include <cmath>

#include "doctest.h"
#include "nullcone/constraints.hpp"
#include "nullcone/oracle.hpp"

using namespace nc;

namespace {

const MetricModel kFlat = build_metric(MetricSpec{});

const ExactSolution kWave = plane_wave({0.3, -0.5, 0.7}, 1.3, {cplx(0.4, 0.1), cplx(-0.2, 0.9)});

double sup_diff(const SpectralSeries& a, const SpectralSeries& b) {
    double e = 0.0;
    for (size_t i = 0; i < a.c.size(); ++i) e = std::max(e, std::abs(a.c[i] - b.c[i]));
    return e;
}

double oracle_error(int n_v) {
    const OracleCone oc = restrict_to_cone(kWave, kFlat, 1.0, 2.0, n_v, 19);
    const ConeSolution sol = solve_constraints(oc.datum, kFlat);
    return std::max(sup_diff(sol.psi[1], oc.psi2), sup_diff(sol.psi[2], oc.psi3));
}

std::vector<Direction> sample_directions() {
    std::vector<Direction> d;
    const SphereQuadrature q(6, 12);
    for (double th : q.theta)
        for (double ph : q.phi) d.push_back({th, ph});
    return d;
}

}  // namespace

TEST_CASE("zero datum gives the zero solution") {
    NullDatum d(2.0, 32, 5);
    const ConeSolution sol = solve_constraints(d, kFlat);
    for (const auto& p : sol.psi) CHECK(p.max_abs() == 0.0);
}

TEST_CASE("oracle error converges at fourth order") {
    const double e1 = oracle_error(32), e2 = oracle_error(64), e3 = oracle_error(128);
    CHECK(e3 < 1e-6);
    CHECK(std::log2(e2 / e3) >= 3.5);
    CHECK(std::log2(e1 / e2) >= 3.5);
}

TEST_CASE("hatted unknowns vanish exactly at the vertex") {
    const OracleCone oc = restrict_to_cone(kWave, kFlat, 1.0, 2.0, 32, 7);
    for (int stencil : {3, 5}) {
        const ConeSolution sol = solve_constraints(oc.datum, kFlat, {stencil});
        for (int m = 0; m < sol.phi1_hat.modes(); ++m) CHECK(sol.phi1_hat.at(m, 0) == cplx(0.0));
        for (int m = 0; m < sol.chi1_hat.modes(); ++m) CHECK(sol.chi1_hat.at(m, 0) == cplx(0.0));
    }
}

TEST_CASE("K is linear") {
    const OracleCone a = restrict_to_cone(kWave, kFlat, 1.0, 2.0, 32, 7);
    const OracleCone b = restrict_to_cone(plane_wave({0.0, 0.2, 0.0}, 1.3, {cplx(1.0), cplx(0.0, -1.0)}),
                                          kFlat, 1.0, 2.0, 32, 7);
    const cplx alpha(0.7, -0.2), beta(-1.3, 0.5);
    NullDatum c = a.datum;
    for (size_t i = 0; i < c.psi1.c.size(); ++i) c.psi1.c[i] = alpha * a.datum.psi1.c[i] + beta * b.datum.psi1.c[i];
    for (size_t i = 0; i < c.psi4.c.size(); ++i) c.psi4.c[i] = alpha * a.datum.psi4.c[i] + beta * b.datum.psi4.c[i];
    const ConeSolution sa = solve_constraints(a.datum, kFlat), sb = solve_constraints(b.datum, kFlat);
    const ConeSolution sc = solve_constraints(c, kFlat);
    for (int k : {1, 2}) {
        SpectralSeries lin = sc.psi[k];
        for (size_t i = 0; i < lin.c.size(); ++i) lin.c[i] = alpha * sa.psi[k].c[i] + beta * sb.psi[k].c[i];
        CHECK(sup_diff(lin, sc.psi[k]) <= 1e-12 * sc.psi[k].max_abs());
    }
}

TEST_CASE("matching holds on oracle data and detects corruption") {
    const ConjugateStructure cs = conjugate_structure(kFlat, sample_directions());
    const OracleCone oc = restrict_to_cone(kWave, kFlat, 1.0, 2.0, 64, 13);
    const ConeSolution sol = solve_constraints(oc.datum, kFlat);
    CHECK(matching_residual(sol, cs) < 1e-5);
    NullDatum bad = oc.datum;
    const int m = mode_index(1, 3, 1);
    for (int j = 0; j < bad.nodes(); ++j) bad.psi1.at(m, j) += 0.1;
    CHECK(matching_residual(solve_constraints(bad, kFlat), cs) > 1e-2);
    const auto [t1, t2] = matching_terms(sol, cs);
    CHECK(t1 < 1e-5);
    CHECK(t2 < 1e-5);
}

TEST_CASE("L_n agrees with a finite-difference derivative of the oracle") {
    const int n_v = 64;
    const OracleCone oc = restrict_to_cone(kWave, kFlat, 1.0, 2.0, n_v, 19);
    const ConeSolution sol = solve_constraints(oc.datum, kFlat);
    const auto [a, b] = apply_L(LTag::n, oc.datum, sol, kFlat);
    CHECK(a.two_s == 1);
    CHECK(b.two_s == -1);
    const int j = n_v / 2;
    const double x = 0.5 * oc.datum.v(j), th = 1.0, ph = 2.0, h = 1e-4;
    auto F = [&](double t, double r) { return evaluate_np(kWave, {t, r, th, ph}, kFlat); };
    auto Dn = [&](int c) {
        auto f = [&](double e) { return F(x + e / std::sqrt(2.0), x - e / std::sqrt(2.0))[c]; };
        return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12 * h);
    };
    CHECK(std::abs(evaluate_frame(a.node(j), th, ph) - Dn(0)) < 1e-5);
    CHECK(std::abs(evaluate_frame(b.node(j), th, ph) - Dn(3)) < 1e-5);
    const auto [m1, m2] = apply_L(LTag::m, oc.datum, sol, kFlat);
    CHECK(m1.two_s == 3);
    CHECK(m2.two_s == 1);
}

TEST_CASE("cone flux against a brute-force sphere quadrature") {
    const ExactSolution cs = constant_spinor(cplx(0.3, 0.1), cplx(-0.2, 0.5), cplx(0.7, -0.4), cplx(0.1, 0.2));
    const OracleCone oc = restrict_to_cone(cs, kFlat, 1.0, 2.0, 32, 5);
    // ∫ (N/2) R² (|Ψ1|² + |Ψ4|²) dΩ dv with N = √2, R = v/2.
    const int nv = 64, nt = 200, np = 40;
    double flux = 0.0;
    for (int i = 0; i <= nv; ++i) {
        const double v = 2.0 * i / nv, x = v / 2;
        const double w = (i == 0 || i == nv) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        double sphere = 0.0;
        for (int a = 0; a < nt; ++a) {
            const double th = kPi * (a + 0.5) / nt;
            for (int b = 0; b < np; ++b) {
                const double ph = 2 * kPi * b / np;
                const auto val = evaluate_np(cs, {x, x, th, ph}, kFlat);
                sphere += (std::norm(val[0]) + std::norm(val[3])) * std::sin(th);
            }
        }
        sphere *= (kPi / nt) * (2 * kPi / np);
        flux += w * (2.0 / nv) / 3 * (std::sqrt(2.0) / 2) * x * x * sphere;
    }
    CHECK(cone_flux(oc.datum, kFlat) == doctest::Approx(flux).epsilon(2e-5));
}

TEST_CASE("a bracket without a vertex limit is rejected") {
    NullDatum d(2.0, 16, 3);
    const ConeProfile prof = [](double x) { return cone_coefficients(kFlat, x); };
    CHECK_THROWS_AS(solve_constraints(d, prof, std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_NOTHROW(solve_constraints(d, prof, 0.0));
}

TEST_CASE("simpson weights integrate cubics exactly") {
    const auto w = simpson_weights(8, 0.25);
    double acc = 0.0;
    for (int i = 0; i <= 8; ++i) acc += w[i] * std::pow(0.25 * i, 3);
    CHECK(acc == doctest::Approx(4.0).epsilon(1e-14));
}
