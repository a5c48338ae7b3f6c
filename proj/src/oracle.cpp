#include "nullcone/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace nc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;

using Mat2 = std::array<std::array<cplx, 2>, 2>;

// p^{AA'} for the soldering documented in the header.
Mat2 solder(const std::array<double, 4>& p) {
    const cplx i(0.0, 1.0);
    return {{{kInvSqrt2 * (p[0] + p[3]), kInvSqrt2 * (p[1] - i * p[2])},
             {kInvSqrt2 * (p[1] + i * p[2]), kInvSqrt2 * (p[0] - p[3])}}};
}

// Lowers A: x_A = x^B ε_BA, so x_0 = -x^1, x_1 = x^0.
Spinor2 lower(const Spinor2& x) { return {-x[1], x[0]}; }

}  // namespace

std::vector<double> uniform_grid(double a, double b, int intervals) {
    std::vector<double> x(static_cast<size_t>(intervals) + 1);
    for (int j = 0; j <= intervals; ++j) x[static_cast<size_t>(j)] = a + (b - a) * j / intervals;
    return x;
}

ExactSolution constant_spinor(cplx a0, cplx a1, cplx b0, cplx b1) {
    ExactSolution s;
    s.kind = ExactSolution::Kind::ConstantSpinor;
    s.a = {a0, a1};
    s.b = {b0, b1};
    return s;
}

ExactSolution plane_wave(const std::array<double, 3>& k, double mass, const Spinor2& a) {
    if (!(mass > 0.0)) throw std::invalid_argument("plane_wave: mass must be positive");
    ExactSolution s;
    s.kind = ExactSolution::Kind::PlaneWave;
    s.mass = mass;
    s.p = {std::sqrt(mass * mass + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), k[0], k[1], k[2]};
    s.a = a;
    const Mat2 P = solder(s.p);
    const Spinor2 al = lower(a);
    const cplx c = cplx(0.0, -std::sqrt(2.0) / mass);
    for (int Ap = 0; Ap < 2; ++Ap)
        s.b[static_cast<size_t>(Ap)] = c * (P[0][static_cast<size_t>(Ap)] * al[0] +
                                            P[1][static_cast<size_t>(Ap)] * al[1]);
    return s;
}

double on_shell_residual(const ExactSolution& s) {
    if (s.kind == ExactSolution::Kind::ConstantSpinor)
        return s.mass == 0.0 ? 0.0 : std::abs(s.mass) * (std::abs(s.a[0]) + std::abs(s.a[1]));
    const Mat2 P = solder(s.p);
    const double m = s.mass;
    // -i p^{AA'} φ_A = (m/√2) χ^{A'}
    const Spinor2 al = lower(s.a);
    double r = 0.0;
    for (size_t Ap = 0; Ap < 2; ++Ap) {
        const cplx lhs = cplx(0.0, -1.0) * (P[0][Ap] * al[0] + P[1][Ap] * al[1]);
        r = std::max(r, std::abs(lhs - m * kInvSqrt2 * s.b[Ap]));
    }
    // -i p_{AA'} χ^{A'} = -(m/√2) φ_A with p_{AA'} = ε_BA ε_B'A' p^{BB'}
    Mat2 Pl{};
    const double eps[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};
    for (int A = 0; A < 2; ++A)
        for (int Ap = 0; Ap < 2; ++Ap) {
            cplx v = 0.0;
            for (int B = 0; B < 2; ++B)
                for (int Bp = 0; Bp < 2; ++Bp)
                    v += eps[B][A] * eps[Bp][Ap] * P[static_cast<size_t>(B)][static_cast<size_t>(Bp)];
            Pl[static_cast<size_t>(A)][static_cast<size_t>(Ap)] = v;
        }
    for (size_t A = 0; A < 2; ++A) {
        const cplx lhs = cplx(0.0, -1.0) * (Pl[A][0] * s.b[0] + Pl[A][1] * s.b[1]);
        r = std::max(r, std::abs(lhs + m * kInvSqrt2 * al[A]));
    }
    const double mom = s.p[0] * s.p[0] - s.p[1] * s.p[1] - s.p[2] * s.p[2] - s.p[3] * s.p[3];
    return std::max(r, std::abs(mom - m * m));
}

SpinDyad spherical_dyad(double theta, double phi) {
    const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
    const cplx em = std::polar(1.0, -0.5 * phi), ep = std::polar(1.0, 0.5 * phi);
    return {{c * em, sn * ep}, {-sn * em, c * ep}};
}

cplx spinor_bracket(const Spinor2& x, const Spinor2& y) { return x[0] * y[1] - x[1] * y[0]; }

std::pair<Spinor2, Spinor2> cartesian_at(const ExactSolution& s, double t, double X, double Y,
                                         double Z) {
    if (s.kind == ExactSolution::Kind::ConstantSpinor) return {s.a, s.b};
    const double phase = s.p[0] * t - s.p[1] * X - s.p[2] * Y - s.p[3] * Z;
    const cplx e = std::polar(1.0, -phase);
    return {{s.a[0] * e, s.a[1] * e}, {s.b[0] * e, s.b[1] * e}};
}

std::array<cplx, 4> evaluate_np(const ExactSolution& s, const SlicePoint& p,
                                const MetricModel& model) {
    if (!model.flat()) throw std::invalid_argument("oracle: exact solutions need Minkowski");
    const double st = std::sin(p.theta);
    const auto [a, b] = cartesian_at(s, p.t, p.x * st * std::cos(p.phi), p.x * st * std::sin(p.phi),
                                     p.x * std::cos(p.theta));
    const SpinDyad d = spherical_dyad(p.theta, p.phi);
    const Spinor2 ob{std::conj(d.o[0]), std::conj(d.o[1])};
    const Spinor2 ib{std::conj(d.iota[0]), std::conj(d.iota[1])};
    return {spinor_bracket(a, d.o), spinor_bracket(a, d.iota), spinor_bracket(b, ib),
            -spinor_bracket(b, ob)};
}

SurfaceRestriction restrict_surface(const ExactSolution& s, const MetricModel& model,
                                    const std::vector<double>& t, const std::vector<double>& x,
                                    int two_lmax, const OracleQuadrature& q) {
    if (t.size() != x.size()) throw std::invalid_argument("restrict_surface: size mismatch");
    const SphereQuadrature sq(q.n_theta, q.n_phi);
    const Projector up(1, two_lmax, sq), dn(-1, two_lmax, sq);
    const int n = static_cast<int>(x.size());
    SurfaceRestriction out;
    for (size_t c = 0; c < 4; ++c) out.psi[c] = SpectralSeries(kComponentSpin[c], two_lmax, n);
    const size_t nt = sq.theta.size(), np = sq.phi.size();
    std::array<std::vector<cplx>, 4> samples;
    for (auto& v : samples) v.resize(nt * np);
    for (int j = 0; j < n; ++j) {
        std::array<double, 4> quad{};
        for (size_t i = 0; i < nt; ++i)
            for (size_t k = 0; k < np; ++k) {
                const auto v = evaluate_np(s, {t[static_cast<size_t>(j)], x[static_cast<size_t>(j)],
                                               sq.theta[i], sq.phi[k]}, model);
                for (size_t c = 0; c < 4; ++c) {
                    samples[c][i * np + k] = v[c];
                    quad[c] += sq.w_theta[i] * sq.w_phi * std::norm(v[c]);
                }
            }
        for (size_t c = 0; c < 4; ++c) {
            const SpectralField f = (kComponentSpin[c] > 0 ? up : dn).apply(samples[c]);
            out.psi[c].set_node(j, f);
            const double kept = f.norm() * f.norm();
            if (quad[c] > 1e-300) out.aliasing = std::max(out.aliasing, (quad[c] - kept) / quad[c]);
        }
    }
    return out;
}

OracleCone restrict_to_cone(const ExactSolution& s, const MetricModel& model, double lambda,
                            double v_max, int n_v, int two_lmax, const OracleQuadrature& q) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("restrict_to_cone: λ in (0,1]");
    std::vector<double> x = uniform_grid(0.0, 0.5 * v_max, n_v), t(x.size());
    for (size_t j = 0; j < x.size(); ++j) t[j] = lambda * x[j];
    SurfaceRestriction r = restrict_surface(s, model, t, x, two_lmax, q);
    OracleCone out;
    out.datum = NullDatum(v_max, n_v, two_lmax);
    out.datum.mass = s.mass;
    out.datum.psi1 = std::move(r.psi[0]);
    out.datum.psi4 = std::move(r.psi[3]);
    out.psi2 = std::move(r.psi[1]);
    out.psi3 = std::move(r.psi[2]);
    out.aliasing = r.aliasing;
    return out;
}

SliceState slice_state(const ExactSolution& s, const MetricModel& model, double t,
                       const std::vector<double>& x, int two_lmax, const OracleQuadrature& q) {
    SurfaceRestriction r =
        restrict_surface(s, model, std::vector<double>(x.size(), t), x, two_lmax, q);
    SliceState out(t, x, two_lmax);
    out.psi = std::move(r.psi);
    return out;
}

}  // namespace nc
