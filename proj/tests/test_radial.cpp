#include <cmath>

#include "doctest.h"
#include "nullcone/radial.hpp"

using namespace nc::radial;

namespace {

// Exact k = 1 mode on Minkowski: u = x e^{-imt} (1, 1, -i, -i).
cplx exact(int c, double t, double x, double m) {
    const cplx ph = std::exp(cplx(0, -m * t)) * x;
    return c < 2 ? ph : cplx(0, -1) * ph;
}

struct Errors {
    double sigma = 0.0, cone = 0.0, origin = 0.0;
};

Errors run(double lam, int N, double m = 1.0) {
    const double T = 1.0, dx = T / N;
    const int J = lam > 0 ? static_cast<int>(std::ceil(T / lam / dx)) + 16 : 3 * N + 16;
    std::vector<double> sfR(J + 1, 0.0), sf(J + 1, 1.0), q;
    for (int j = 1; j <= J; ++j) sfR[j] = 1.0 / (j * dx);
    const auto c = mode_coefficients(sfR, sf, 1.0, m, q);
    const ModeOperator op = lam > 0 ? ModeOperator::tilted(J, dx, lam, 1.0 / 24) : ModeOperator::cauchy(J, dx, -1);
    ModeState u(J);
    for (int j = 0; j <= J; ++j)
        for (int k = 0; k < 4; ++k) u.set(k, j, exact(k, lam * j * dx, j * dx, m));
    const double dt = stable_step(0.5, lam, dx, 1.0);
    std::vector<double> tS(N + 1), tC(N + 1);
    for (int j = 0; j <= N; ++j) {
        tS[j] = T - lam * j * dx;
        tC[j] = (1 - lam) * j * dx;
    }
    NodeSampler S(tS), C(tC);
    IntegrationPlan p;
    p.tau0 = 0;
    p.tau_end = T;
    p.steps = static_cast<int>(std::ceil(T / dt));
    p.samplers = {&S, &C};
    integrate(op, c, u, p);
    Errors e;
    for (int j = 0; j <= N; ++j) {
        const double x = j * dx;
        for (int k = 0; k < 4; ++k) e.sigma = std::max(e.sigma, std::abs(S.at(k, j) - exact(k, T, x, m)));
        for (int k : {0, 3}) e.cone = std::max(e.cone, std::abs(C.at(k, j) - exact(k, x, x, m)));
    }
    for (int k = 0; k < 4; ++k) e.origin = std::max(e.origin, std::abs(u.get(k, 0)));
    return e;
}

}  // namespace

TEST_CASE("SBP 2-4 operator: H D + (H D)^T = diag(-1, 0, ..., 0, 1)") {
    const int J = 20;
    const auto D = sbp_derivative_dense(J);
    const auto hb = sbp_norm_boundary();
    std::vector<double> H(J + 1, 1.0);
    for (int i = 0; i < 4; ++i) H[i] = H[J - i] = hb[i];
    double worst = 0.0;
    for (int i = 0; i <= J; ++i)
        for (int j = 0; j <= J; ++j) {
            const double b = (i == j && i == 0) ? -1.0 : (i == j && i == J) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(H[i] * D[i][j] + H[j] * D[j][i] - b));
        }
    CHECK(worst < 1e-14);
    // Exact on quadratics at the boundary, on quartics inside.
    for (int p = 0; p <= 4; ++p)
        for (int i = 0; i <= J; ++i) {
            if (p > 2 && (i < 4 || i > J - 4)) continue;
            double acc = 0.0;
            for (int j = 0; j <= J; ++j) acc += D[i][j] * std::pow(j, p);
            const double exact_d = p == 0 ? 0.0 : p * std::pow(i, p - 1);
            CHECK(acc == doctest::Approx(exact_d).epsilon(1e-12).scale(1.0));
        }
    // Positive norm.
    for (double h : hb) CHECK(h > 0.0);
}

TEST_CASE("tilted scheme converges on the exact mode") {
    const Errors a = run(0.9, 32), b = run(0.9, 64), c = run(0.9, 128);
    CHECK(c.sigma < 1e-6);
    CHECK(std::log2(a.sigma / b.sigma) > 2.7);
    CHECK(std::log2(b.sigma / c.sigma) > 2.7);
    CHECK(c.cone < 1e-6);
    CHECK(c.origin == 0.0);
}

TEST_CASE("Cauchy scheme with parity ghosts converges") {
    const Errors a = run(0.0, 32), b = run(0.0, 64);
    CHECK(b.sigma < 1e-9);
    CHECK(std::log2(a.sigma / b.sigma) > 3.5);
}

TEST_CASE("mode coefficients and step rule") {
    const auto c = mode_coefficients({0.0, 2.0, 1.0}, {1.0, 1.0, 2.0}, 2.5, 0.5, {});
    CHECK(c.wk[0] == 0.0);
    CHECK(c.wk[1] == 5.0);
    CHECK(c.mass[2] == 1.0);
    CHECK(c.qphi.empty());
    CHECK(stable_step(0.5, 0.9, 0.1, 0.5) == doctest::Approx(0.5 * 0.1 * 0.1));
    CHECK(stable_step(0.5, 0.0, 0.1, 9.5) == doctest::Approx(0.05 * 2.7 / 9.8));
    CHECK_THROWS(stable_step(0.0, 0.5, 0.1, 1.0));
    CHECK_THROWS(stable_step(1.5, 0.5, 0.1, 1.0));
}

TEST_CASE("operator is linear and has zero output for zero input") {
    const int J = 40;
    const double dx = 0.05;
    std::vector<double> sfR(J + 1, 0.0), sf(J + 1, 1.0);
    for (int j = 1; j <= J; ++j) sfR[j] = 1.0 / (j * dx);
    const auto c = mode_coefficients(sfR, sf, 2.0, 0.7, {});
    for (const ModeOperator& op : {ModeOperator::tilted(J, dx, 0.8, 1.0 / 24), ModeOperator::cauchy(J, dx, 1)}) {
        ModeState u(J), out(J), a(J), b(J), oa(J), ob(J);
        op.apply(u, c, out);
        for (double v : out.raw()) CHECK(v == 0.0);
        for (int j = 0; j <= J; ++j)
            for (int k = 0; k < 4; ++k) {
                a.set(k, j, {std::sin(j * 0.3 + k), std::cos(j * 0.1)});
                b.set(k, j, {j * 0.01 * k, -0.5});
                u.set(k, j, 2.0 * a.get(k, j) - 3.0 * b.get(k, j));
            }
        op.apply(a, c, oa);
        op.apply(b, c, ob);
        op.apply(u, c, out);
        double worst = 0.0;
        for (int j = 0; j <= J; ++j)
            for (int k = 0; k < 4; ++k)
                worst = std::max(worst, std::abs(out.get(k, j) - (2.0 * oa.get(k, j) - 3.0 * ob.get(k, j))));
        CHECK(worst < 1e-11);
    }
}
