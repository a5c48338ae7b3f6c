#include <cmath>

#include "doctest.h"
#include "nullcone/angular.hpp"

using namespace nc;

namespace {

// ð and ð' as differential operators, sixth-order central differences.
cplx d6(const std::function<cplx(double)>& f, double x, double h) {
    return (-f(x - 3 * h) + 9.0 * f(x - 2 * h) - 45.0 * f(x - h) + 45.0 * f(x + h) -
            9.0 * f(x + 2 * h) + f(x + 3 * h)) /
           (60 * h);
}

cplx eth_fd(int two_s, int two_l, int two_m, double th, double ph) {
    const double s = two_s / 2.0, h = 1e-3;
    const cplx I(0, 1);
    auto ft = [&](double t) { return swsh(two_s, two_l, two_m, t, ph); };
    auto fp = [&](double p) { return swsh(two_s, two_l, two_m, th, p); };
    return -(d6(ft, th, h) + I / std::sin(th) * d6(fp, ph, h) - s / std::tan(th) * ft(th));
}

cplx ethbar_fd(int two_s, int two_l, int two_m, double th, double ph) {
    const double s = two_s / 2.0, h = 1e-3;
    const cplx I(0, 1);
    auto ft = [&](double t) { return swsh(two_s, two_l, two_m, t, ph); };
    auto fp = [&](double p) { return swsh(two_s, two_l, two_m, th, p); };
    return -(d6(ft, th, h) - I / std::sin(th) * d6(fp, ph, h) + s / std::tan(th) * ft(th));
}

// Brute-force inner product on a product midpoint grid (independent of the
// library quadrature).
cplx brute_inner(int s1, int l1, int m1, int s2, int l2, int m2) {
    const int nt = 400, np = 64;
    cplx acc = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double th = kPi * (i + 0.5) / nt;
        for (int k = 0; k < np; ++k) {
            const double ph = 2 * kPi * k / np;
            acc += std::conj(swsh(s1, l1, m1, th, ph)) * swsh(s2, l2, m2, th, ph) * std::sin(th);
        }
    }
    return acc * (kPi / nt) * (2 * kPi / np);
}

}  // namespace

TEST_CASE("mode bookkeeping") {
    CHECK(mode_count(1, 9) == 2 + 4 + 6 + 8 + 10);
    CHECK(mode_count(3, 9) == 4 + 6 + 8 + 10);
    for (int two_s : {-3, -1, 1, 3})
        for (int i = 0; i < mode_count(two_s, 11); ++i) {
            const auto [tl, tm] = mode_lm(two_s, i);
            CHECK(mode_index(two_s, tl, tm) == i);
            CHECK(valid_mode(two_s, tl, tm));
        }
    CHECK_FALSE(valid_mode(3, 1, 1));
    CHECK_FALSE(valid_mode(1, 3, 5));
    CHECK_FALSE(valid_mode(1, 2, 0));
    CHECK_THROWS_AS(mode_index(3, 1, 1), std::invalid_argument);
}

TEST_CASE("wigner d closed forms") {
    for (double b : {0.0, 0.3, 1.2, 2.9}) {
        CHECK(wigner_d(1, 1, 1, b) == doctest::Approx(std::cos(b / 2)).epsilon(1e-14));
        CHECK(wigner_d(1, 1, -1, b) == doctest::Approx(-std::sin(b / 2)).epsilon(1e-14));
        CHECK(wigner_d(2, 0, 0, b) == doctest::Approx(std::cos(b)).epsilon(1e-14));
        CHECK(wigner_d(3, 3, 1, b) ==
              doctest::Approx(-std::sqrt(3.0) * std::pow(std::cos(b / 2), 2) * std::sin(b / 2))
                  .epsilon(1e-13));
    }
}

TEST_CASE("spin-weighted harmonics are orthonormal") {
    const int cases[][3] = {{1, 1, 1}, {1, 3, -1}, {-1, 3, 3}, {3, 5, -3}, {1, 9, 7}};
    for (const auto& a : cases)
        for (const auto& b : cases) {
            if (a[0] != b[0]) continue;
            const cplx ip = brute_inner(a[0], a[1], a[2], b[0], b[1], b[2]);
            const double expect = (a[1] == b[1] && a[2] == b[2]) ? 1.0 : 0.0;
            CHECK(std::abs(ip - expect) < 1e-5);
        }
}

TEST_CASE("ladder factors match the differential operators") {
    double worst = 0.0;
    for (int two_s : {-3, -1, 1, 3})
        for (int two_l = std::abs(two_s); two_l <= 9; two_l += 2)
            for (int two_m = -two_l; two_m <= two_l; two_m += 2)
                for (double th : {0.4, 1.3, 2.6}) {
                    const double ph = 0.9;
                    const cplx up = eth_fd(two_s, two_l, two_m, th, ph);
                    const cplx lad_up = two_l >= std::abs(two_s + 2)
                                            ? eth_factor(two_s, two_l) * swsh(two_s + 2, two_l, two_m, th, ph)
                                            : cplx(0.0);
                    const cplx dn = ethbar_fd(two_s, two_l, two_m, th, ph);
                    const cplx lad_dn = two_l >= std::abs(two_s - 2)
                                            ? ethbar_factor(two_s, two_l) * swsh(two_s - 2, two_l, two_m, th, ph)
                                            : cplx(0.0);
                    worst = std::max({worst, std::abs(up - lad_up), std::abs(dn - lad_dn)});
                }
    CHECK(worst < 1e-8);
}

TEST_CASE("ð'ð eigenvalue per mode") {
    for (int two_s : {-3, -1, 1, 3})
        for (int two_l = std::abs(two_s); two_l <= 15; two_l += 2) {
            SpectralField f(two_s, 15);
            for (int two_m = -two_l; two_m <= two_l; two_m += 2) f.set(two_l, two_m, cplx(1.0, -0.5));
            const SpectralField g = eth_lower(eth_raise(f));
            const double ls = (two_l - two_s) / 2.0, ls1 = (two_l + two_s) / 2.0 + 1.0;
            const double expect = -ls * ls1;
            for (int two_m = -two_l; two_m <= two_l; two_m += 2) {
                const cplx v = g.coeff(two_l, two_m) / cplx(1.0, -0.5);
                CHECK(std::abs(v - expect) <= 4e-16 * std::max(1.0, std::abs(expect)));
            }
        }
}

TEST_CASE("projection recovers coefficients and evaluation is consistent") {
    const SpectralField f = make_field(-1, 7, {{1, 1, {0.3, 0.2}}, {5, -3, {-1.0, 0.4}}, {7, 7, {0.0, 2.0}}});
    const SphereQuadrature q(12, 24);
    const SpectralField g = project([&](double th, double ph) { return evaluate_frame(f, th, ph); }, -1, 7, q);
    CHECK((g - f).norm() < 1e-13);
    const cplx direct = 0.3 * swsh(-1, 1, 1, 1.1, 0.4) + cplx(-1.0, 0.4) * swsh(-1, 5, -3, 1.1, 0.4) +
                        cplx(0.0, 2.0) * swsh(-1, 7, 7, 1.1, 0.4) + cplx(0, 0.2) * swsh(-1, 1, 1, 1.1, 0.4);
    CHECK(std::abs(evaluate_frame(f, 1.1, 0.4) - direct) < 1e-14);
    // Parseval.
    CHECK(std::real(inner_product(f, f)) == doctest::Approx(f.norm() * f.norm()).epsilon(1e-14));
}

TEST_CASE("north chart values are regular at the pole") {
    const SpectralField f = make_field(1, 5, {{1, 1, 1.0}, {3, -1, 0.5}, {5, 3, {0.2, 0.1}}});
    const cplx a = evaluate_at(f, 1e-7, 0.3, Chart::North);
    const cplx b = evaluate_at(f, 1e-7, 2.5, Chart::North);
    CHECK(std::abs(a - b) < 1e-6);
    CHECK_THROWS(evaluate_at(f, kPi, 0.0, Chart::North));
}

TEST_CASE("gauss legendre nodes integrate polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    for (int p = 0; p <= 15; ++p) {
        double acc = 0.0;
        for (size_t i = 0; i < x.size(); ++i) acc += w[i] * std::pow(x[i], p);
        const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        CHECK(acc == doctest::Approx(exact).epsilon(1e-14));
    }
}
