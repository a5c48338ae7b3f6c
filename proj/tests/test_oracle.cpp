#include <cmath>

#include "doctest.h"
#include "nullcone/oracle.hpp"

using namespace nc;

namespace {

const cplx I(0.0, 1.0);

// Residuals of the four NP Dirac equations on Minkowski in the adapted
// spherical frame, derivatives by fourth-order differences.
double np_dirac_residual(const ExactSolution& s, double t, double r, double th, double ph) {
    const MetricModel M = build_metric(MetricSpec{.T_max = 3.0});
    const double R2 = std::sqrt(2.0), h = 1e-4;
    // (φ0, φ1, χ0', χ1') from (Ψ1, Ψ2, Ψ3, Ψ4) = (φ0, φ1, χ1', -χ0').
    auto E = [&](double tt, double rr, double a, double b) {
        const auto v = evaluate_np(s, {tt, rr, a, b}, M);
        return std::array<cplx, 4>{v[0], v[1], -v[3], v[2]};
    };
    auto D = [&](int dir, int c) {
        auto f = [&](double e) {
            double tt = t, rr = r, a = th, b = ph;
            (dir == 0 ? tt : dir == 1 ? rr : dir == 2 ? a : b) += e;
            return E(tt, rr, a, b)[c];
        };
        return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12 * h);
    };
    auto Dl = [&](int c) { return (D(0, c) + D(1, c)) / R2; };
    auto Dn = [&](int c) { return (D(0, c) - D(1, c)) / R2; };
    auto Dm = [&](int c) { return (D(2, c) + I / std::sin(th) * D(3, c)) / (R2 * r); };
    auto Dmb = [&](int c) { return (D(2, c) - I / std::sin(th) * D(3, c)) / (R2 * r); };
    const double rho = -1 / (R2 * r), mu = rho, beta = 1 / std::tan(th) / (2 * R2 * r), alpha = -beta;
    const double ms = s.mass / R2;
    const auto v = E(t, r, th, ph);
    return std::max({std::abs(Dn(0) - Dm(1) + mu * v[0] - beta * v[1] - ms * v[3]),
                     std::abs(Dl(1) - Dmb(0) + alpha * v[0] - rho * v[1] + ms * v[2]),
                     std::abs(Dn(2) - Dmb(3) + mu * v[2] - beta * v[3] - ms * v[1]),
                     std::abs(Dl(3) - Dm(2) + alpha * v[2] - rho * v[3] + ms * v[0])});
}

}  // namespace

TEST_CASE("spherical dyad is normalized and follows m") {
    for (double th : {0.3, 1.5, 2.8})
        for (double ph : {0.0, 2.0, 7.0}) {
            const SpinDyad d = spherical_dyad(th, ph);
            CHECK(std::abs(spinor_bracket(d.o, d.iota) - 1.0) < 1e-15);
            // o(θ, φ) = (cos(θ/2) e^{-iφ/2}, sin(θ/2) e^{iφ/2}) without wrapping φ.
            CHECK(std::abs(d.o[0] - std::cos(th / 2) * std::exp(-I * ph / 2.0)) < 1e-15);
            CHECK(std::abs(d.o[1] - std::sin(th / 2) * std::exp(I * ph / 2.0)) < 1e-15);
        }
}

TEST_CASE("exact solutions satisfy the Dirac equation") {
    const ExactSolution pw = plane_wave({0.3, -0.5, 0.7}, 1.3, {cplx(0.4, 0.1), cplx(-0.2, 0.9)});
    CHECK(on_shell_residual(pw) < 1e-14);
    CHECK(pw.p[0] == doctest::Approx(std::sqrt(1.3 * 1.3 + 0.09 + 0.25 + 0.49)));
    CHECK(np_dirac_residual(pw, 1.1, 0.6, 1.0, 2.0) < 1e-8);
    CHECK(np_dirac_residual(pw, 0.4, 0.2, 2.2, 5.0) < 1e-8);
    const ExactSolution cs = constant_spinor(1.0, cplx(0, 2), 0.5, -1.0);
    CHECK(np_dirac_residual(cs, 0.5, 0.3, 1.0, 2.0) < 1e-8);
    const ExactSolution rest = plane_wave({0, 0, 0}, 1.0, {cplx(0.4, 0.1), cplx(-0.3, 0.6)});
    CHECK(np_dirac_residual(rest, 0.9, 0.5, 0.7, 0.4) < 1e-8);
}

TEST_CASE("constant spinor frame values at antipodal directions are related") {
    const MetricModel M = build_metric(MetricSpec{});
    const ExactSolution c = constant_spinor(1.0, cplx(0, 2), 0.5, -1.0);
    const double th = 1.0, ph = 2.0;
    const auto a = evaluate_np(c, {0.5, 0.3, th, ph}, M);
    const auto b = evaluate_np(c, {0.5, 0.3, kPi - th, ph + kPi}, M);
    CHECK(std::abs(a[1] + I * b[0]) < 1e-14);
    CHECK(std::abs(a[2] + I * b[3]) < 1e-14);
}

TEST_CASE("cone restriction reproduces pointwise values") {
    const MetricModel M = build_metric(MetricSpec{});
    const ExactSolution pw = plane_wave({0.2, 0.1, -0.3}, 1.0, {cplx(0.4, 0.1), cplx(-0.2, 0.9)});
    const OracleCone oc = restrict_to_cone(pw, M, 1.0, 2.0, 16, 21);
    CHECK(oc.aliasing < 1e-10);
    CHECK(oc.datum.mass == 1.0);
    for (int j : {4, 11, 16}) {
        const double x = oc.datum.v(j) / 2;
        const auto v = evaluate_np(pw, {x, x, 0.8, 1.9}, M);
        CHECK(std::abs(evaluate_frame(oc.datum.psi1.node(j), 0.8, 1.9) - v[0]) < 1e-10);
        CHECK(std::abs(evaluate_frame(oc.psi2.node(j), 0.8, 1.9) - v[1]) < 1e-10);
        CHECK(std::abs(evaluate_frame(oc.psi3.node(j), 0.8, 1.9) - v[2]) < 1e-10);
        CHECK(std::abs(evaluate_frame(oc.datum.psi4.node(j), 0.8, 1.9) - v[3]) < 1e-10);
    }
    // A truncated band limit is flagged.
    const ExactSolution fast = plane_wave({0.0, 0.0, 6.0}, 1.0, {cplx(1.0), cplx(0.5)});
    CHECK(restrict_to_cone(fast, M, 1.0, 2.0, 8, 1).aliasing > 1e-3);
}

TEST_CASE("slice restriction at rest: only l = 1/2 and a pure phase in t") {
    const MetricModel M = build_metric(MetricSpec{});
    const ExactSolution rest = plane_wave({0, 0, 0}, 1.0, {cplx(0.4, 0.1), cplx(-0.3, 0.6)});
    const auto x = uniform_grid(0.0, 1.0, 8);
    const SliceState a = slice_state(rest, M, 0.0, x, 5);
    const SliceState b = slice_state(rest, M, 0.7, x, 5);
    for (int c = 0; c < 4; ++c)
        for (int m = 0; m < a.psi[c].modes(); ++m)
            for (int j = 0; j < 9; ++j) {
                if (mode_lm(a.psi[c].two_s, m).first > 1) CHECK(std::abs(a.psi[c].at(m, j)) < 1e-13);
                // |Ψ| is time independent for the rest wave.
                CHECK(std::abs(b.psi[c].at(m, j)) == doctest::Approx(std::abs(a.psi[c].at(m, j))).epsilon(1e-12));
            }
}
