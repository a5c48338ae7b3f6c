#include "nullcone/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "nullcone/angular.hpp"

namespace nc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double poly_r2(const std::vector<double>& c, double r) {
    const double r2 = r * r;
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * r2 + c[i];
    return acc;
}

double dpoly_r2(const std::vector<double>& c, double r) {
    // d/dr Σ c_i r^(2i) = Σ 2 i c_i r^(2i-1)
    const double r2 = r * r;
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 1;) acc = acc * r2 + 2.0 * static_cast<double>(i) * c[i];
    return acc * r;
}

const std::vector<double>& gl_nodes() {
    static std::vector<double> x, w;
    if (x.empty()) gauss_legendre(12, x, w);
    return x;
}

const std::vector<double>& gl_weights() {
    static std::vector<double> x, w;
    if (w.empty()) gauss_legendre(12, x, w);
    return w;
}

}  // namespace

double MetricModel::A_of_r(double r) const { return poly_r2(A, r); }
double MetricModel::dA_dr(double r) const { return dpoly_r2(A, r); }
double MetricModel::B_of_r(double r) const { return poly_r2(B, r); }
double MetricModel::dB_dr(double r) const { return dpoly_r2(B, r); }

double MetricModel::x_of_r(double r) const {
    if (flat()) return r;
    const auto& xn = gl_nodes();
    const auto& wn = gl_weights();
    const int panels = 16;
    const double h = r / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        for (size_t i = 0; i < xn.size(); ++i) {
            const double s = a + 0.5 * h * (xn[i] + 1.0);
            acc += wn[i] * std::sqrt(B_of_r(s) / A_of_r(s));
        }
    }
    return scale_k * 0.5 * h * acc;
}

double MetricModel::r_of_x(double x) const {
    if (flat()) return x;
    if (x == 0.0) return 0.0;
    double r = x / scale_k;
    for (int it = 0; it < 60; ++it) {
        const double g = x_of_r(r) - x;
        const double dg = scale_k * std::sqrt(B_of_r(r) / A_of_r(r));
        const double dr = g / dg;
        r -= dr;
        if (std::abs(dr) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    return r;
}

RadialProfile MetricModel::profile(double x) const {
    RadialProfile p;
    p.x = x;
    if (flat()) {
        p.r = x;
        p.f = 1.0;
        p.f_x = 0.0;
        p.R_x = 1.0;
        p.N = kSqrt2;
        p.N_x = 0.0;
        return p;
    }
    const double k2 = scale_k * scale_k;
    p.r = r_of_x(x);
    p.f = A_of_r(p.r) / k2;
    p.R_x = std::sqrt(p.f / B_of_r(p.r));
    p.f_x = dA_dr(p.r) / k2 * p.R_x;
    p.N = std::sqrt(2.0 * p.f);
    p.N_x = p.f_x / p.N;
    return p;
}

std::array<double, 4> MetricModel::metric_diag(double x, double theta) const {
    const RadialProfile p = profile(std::abs(x));
    const double s = std::sin(theta);
    return {p.f, -p.f, -p.r * p.r, -p.r * p.r * s * s};
}

MetricModel build_metric(const MetricSpec& spec) {
    if (!(spec.T_max > 0.0)) throw std::invalid_argument("metric: T_max must be positive");
    MetricModel m;
    m.kind = spec.kind;
    m.T_max = spec.T_max;
    if (spec.kind == MetricSpec::Kind::Minkowski) return m;
    if (spec.A.empty() || spec.B.empty()) throw std::invalid_argument("metric: empty A or B");
    m.A = spec.A;
    m.B = spec.B;
    // Polynomials in r^2 are even by construction, so A'(0) = B'(0) = 0.
    if (!(m.A[0] > 0.0) || !(m.B[0] > 0.0))
        throw std::invalid_argument("metric: A(0) and B(0) must be positive");
    m.scale_k = std::sqrt(m.A[0]);
    // Positivity on [0, r_max]: r_max is the areal radius reached by x = 2 T_max
    // (the enlarged cone range), probed on a fine sample.
    const int samples = 2000;
    double r = 0.0;
    const double dr = 4.0 * spec.T_max / samples;
    for (int i = 0; i <= samples; ++i, r += dr) {
        if (!(m.A_of_r(r) > 0.0) || !(m.B_of_r(r) > 0.0))
            throw std::invalid_argument("metric: A or B not positive on the domain");
        if (m.x_of_r(r) > 2.0 * spec.T_max) break;
    }
    return m;
}

namespace {

using Vec4 = std::array<cplx, 4>;

NullTetrad tetrad_unchecked(const MetricModel& model, const SlicePoint& p, TetradChoice choice) {
    const RadialProfile rp = model.profile(std::abs(p.x));
    NullTetrad T;
    T.choice = choice;
    T.N = rp.N;
    const double a = 1.0 / std::sqrt(2.0 * rp.f);
    const double mr = 1.0 / (kSqrt2 * rp.r);
    const double csc = 1.0 / std::sin(p.theta);
    Vec4 l{a, a, 0.0, 0.0};
    Vec4 n{a, -a, 0.0, 0.0};
    Vec4 m{0.0, 0.0, mr, cplx(0.0, mr * csc)};
    if (choice == TetradChoice::GradientL || choice == TetradChoice::Hatted) {
        const double A = 2.0 / rp.N;
        for (auto& c : l) c *= A;
        for (auto& c : n) c /= A;
    }
    if (choice == TetradChoice::Hatted) {
        const double x = p.x;
        for (auto& c : n) c *= x * x;
        for (auto& c : m) c *= x;
    }
    Vec4 mb;
    for (int i = 0; i < 4; ++i) mb[i] = std::conj(m[i]);
    T.vec = {l, n, m, mb};
    return T;
}

void check_domain(const MetricModel& model, const SlicePoint& p) {
    const double tol = 1e-12 + 4.0 * fd_step(std::abs(p.x));
    if (p.x < -tol || p.t < -tol || p.x > p.t + tol || p.t > model.T_max + tol)
        throw std::domain_error("point outside D_T");
}

}  // namespace

double fd_step(double x) { return std::max(1e-5, 1e-3 * x); }

NullTetrad tetrad_at(const MetricModel& model, const SlicePoint& p, TetradChoice choice) {
    check_domain(model, p);
    if (p.x <= 0.0) throw std::domain_error("tetrad at the vertex is a directional limit only");
    return tetrad_unchecked(model, p, choice);
}

cplx metric_product(const MetricModel& model, const SlicePoint& p, const std::array<cplx, 4>& a,
                    const std::array<cplx, 4>& b) {
    const auto g = model.metric_diag(p.x, p.theta);
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += g[static_cast<size_t>(i)] * a[static_cast<size_t>(i)] *
                                     b[static_cast<size_t>(i)];
    return s;
}

namespace {

SpinCoefficientSet closed_form(const MetricModel& model, const SlicePoint& p,
                               TetradChoice choice) {
    const RadialProfile rp = model.profile(p.x);
    const double s2f = std::sqrt(2.0 * rp.f);
    SpinCoefficientSet s{};
    s.choice = choice;
    s.at = p;
    const double rho = -rp.R_x / (s2f * rp.r);
    const double eps = rp.f_x / (4.0 * rp.f * s2f);
    const double beta = 1.0 / std::tan(p.theta) / (2.0 * kSqrt2 * rp.r);
    s.rho = rho;
    s.mu = rho;
    s.epsilon = eps;
    s.gamma = eps;
    s.beta = beta;
    s.alpha = -beta;
    if (choice == TetradChoice::GradientL) {
        const double A = 2.0 / rp.N;
        // A = sqrt(2/f); D = l^a ∂_a = ∂_x / sqrt(2 f) on a static background.
        const double A_x = -0.5 * kSqrt2 * std::pow(rp.f, -1.5) * rp.f_x;
        const double DA = A_x / s2f;
        const double DeltaA = -DA;
        s.rho = A * rho;
        s.epsilon = A * eps + 0.5 * DA;
        s.gamma = eps / A + 0.5 * DeltaA / (A * A);
        s.mu = rho / A;
    }
    return s;
}

// ∇_b V_a for the four tetrad covectors by centered fourth-order differences.
SpinCoefficientSet finite_difference(const MetricModel& model, const SlicePoint& p,
                                     TetradChoice choice) {
    const double hx = fd_step(p.x);
    const double hang = 1e-3;
    const std::array<double, 4> h{hx, hx, hang, hang};

    auto point_shift = [&](int dir, double d) {
        SlicePoint q = p;
        if (dir == 0) q.t += d;
        if (dir == 1) q.x += d;
        if (dir == 2) q.theta += d;
        if (dir == 3) q.phi += d;
        return q;
    };
    auto covectors = [&](const SlicePoint& q) {
        const NullTetrad T = tetrad_unchecked(model, q, choice);
        const auto g = model.metric_diag(q.x, q.theta);
        std::array<Vec4, 4> low{};
        for (int k = 0; k < 4; ++k)
            for (int a = 0; a < 4; ++a)
                low[static_cast<size_t>(k)][static_cast<size_t>(a)] =
                    g[static_cast<size_t>(a)] * T.vec[static_cast<size_t>(k)][static_cast<size_t>(a)];
        return low;
    };
    auto d4 = [](auto fm2, auto fm1, auto fp1, auto fp2, double step) {
        return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step);
    };

    // dg[b][a] = ∂_b g_aa (diagonal metric)
    std::array<std::array<double, 4>, 4> dg{};
    // dV[k][b][a] = ∂_b V^(k)_a
    std::array<std::array<Vec4, 4>, 4> dV{};
    for (int b = 0; b < 4; ++b) {
        const double hb = h[static_cast<size_t>(b)];
        const SlicePoint qm2 = point_shift(b, -2 * hb), qm1 = point_shift(b, -hb);
        const SlicePoint qp1 = point_shift(b, hb), qp2 = point_shift(b, 2 * hb);
        const auto gm2 = model.metric_diag(qm2.x, qm2.theta), gm1 = model.metric_diag(qm1.x, qm1.theta);
        const auto gp1 = model.metric_diag(qp1.x, qp1.theta), gp2 = model.metric_diag(qp2.x, qp2.theta);
        for (int a = 0; a < 4; ++a) {
            const auto ua = static_cast<size_t>(a);
            dg[static_cast<size_t>(b)][ua] = d4(gm2[ua], gm1[ua], gp1[ua], gp2[ua], hb);
        }
        const auto Vm2 = covectors(qm2), Vm1 = covectors(qm1), Vp1 = covectors(qp1),
                   Vp2 = covectors(qp2);
        for (int k = 0; k < 4; ++k)
            for (int a = 0; a < 4; ++a) {
                const auto uk = static_cast<size_t>(k), ua = static_cast<size_t>(a);
                dV[uk][static_cast<size_t>(b)][ua] =
                    d4(Vm2[uk][ua], Vm1[uk][ua], Vp1[uk][ua], Vp2[uk][ua], hb);
            }
    }
    const auto g = model.metric_diag(p.x, p.theta);
    // Γ^c_ab for a diagonal metric
    auto Gamma = [&](int c, int a, int b) {
        const auto uc = static_cast<size_t>(c);
        double v = 0.0;
        if (c == b) v += dg[static_cast<size_t>(a)][uc];
        if (c == a) v += dg[static_cast<size_t>(b)][uc];
        if (a == b) v -= dg[uc][static_cast<size_t>(a)];
        return 0.5 * v / g[uc];
    };
    const NullTetrad T = tetrad_unchecked(model, p, choice);
    const auto V = covectors(p);
    // nabla[k][b][a] = ∇_b V^(k)_a
    std::array<std::array<Vec4, 4>, 4> nabla{};
    for (int k = 0; k < 4; ++k)
        for (int b = 0; b < 4; ++b)
            for (int a = 0; a < 4; ++a) {
                cplx v = dV[static_cast<size_t>(k)][static_cast<size_t>(b)][static_cast<size_t>(a)];
                for (int c = 0; c < 4; ++c) v -= Gamma(c, a, b) * V[static_cast<size_t>(k)][static_cast<size_t>(c)];
                nabla[static_cast<size_t>(k)][static_cast<size_t>(b)][static_cast<size_t>(a)] = v;
            }
    enum { L = 0, Nn = 1, M = 2, MB = 3 };
    // C(X, Y, Z) = X^a Y^b ∇_b Z_a
    auto C = [&](int X, int Y, int Z) {
        cplx s = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                s += T.vec[static_cast<size_t>(X)][static_cast<size_t>(a)] *
                     T.vec[static_cast<size_t>(Y)][static_cast<size_t>(b)] *
                     nabla[static_cast<size_t>(Z)][static_cast<size_t>(b)][static_cast<size_t>(a)];
        return s;
    };
    SpinCoefficientSet s{};
    s.choice = choice;
    s.at = p;
    s.kappa = C(M, L, L);
    s.sigma = C(M, M, L);
    s.rho = C(M, MB, L);
    s.tau = C(M, Nn, L);
    s.nu = -C(MB, Nn, Nn);
    s.mu = -C(MB, M, Nn);
    s.lambda_c = -C(MB, MB, Nn);
    s.pi = -C(MB, L, Nn);
    s.epsilon = 0.5 * (C(Nn, L, L) + C(M, L, MB));
    s.beta = 0.5 * (C(Nn, M, L) + C(M, M, MB));
    s.alpha = 0.5 * (C(Nn, MB, L) + C(M, MB, MB));
    s.gamma = 0.5 * (C(Nn, Nn, L) + C(M, Nn, MB));
    return s;
}

}  // namespace

SpinCoefficientSet spin_coefficients(const MetricModel& model, const SlicePoint& p,
                                     TetradChoice choice, SpinMethod method) {
    check_domain(model, p);
    if (choice == TetradChoice::Hatted)
        throw std::invalid_argument("spin coefficients need a normalized tetrad");
    if (p.x < kRadiusFloor * model.T_max)
        throw std::domain_error("spin coefficients: radius below accuracy floor");
    if (method == SpinMethod::Auto)
        method = model.flat() ? SpinMethod::ClosedForm : SpinMethod::FiniteDifference;
    return method == SpinMethod::ClosedForm ? closed_form(model, p, choice)
                                            : finite_difference(model, p, choice);
}

double gauss_curvature_brioschi(const MetricModel& model, double x) {
    // Orthogonal 2-metric E dθ^2 + G dφ^2:
    //   k = -1/(2 sqrt(EG)) ∂θ( G_θ / sqrt(EG) ),  since E_φ = 0.
    const double th = 1.0, h = 1e-3;
    auto EG = [&](double t) {
        const auto g = model.metric_diag(x, t);
        return std::array<double, 2>{-g[2], -g[3]};
    };
    auto Gth_over = [&](double t) {
        auto d = [&](double s) { return EG(s)[1]; };
        const double Gt = (d(t - 2 * h) - 8 * d(t - h) + 8 * d(t + h) - d(t + 2 * h)) / (12 * h);
        const auto eg = EG(t);
        return Gt / std::sqrt(eg[0] * eg[1]);
    };
    const double dd = (Gth_over(th - 2 * h) - 8 * Gth_over(th - h) + 8 * Gth_over(th + h) -
                       Gth_over(th + 2 * h)) / (12 * h);
    const auto eg = EG(th);
    return -0.5 * dd / std::sqrt(eg[0] * eg[1]);
}

double gauss_curvature(const MetricModel& model, double x) {
    if (!(x > 0.0) || x > model.T_max * (1.0 + 1e-12))
        throw std::domain_error("gauss_curvature: radius outside (0, T]");
    if (model.flat()) return 1.0 / (x * x);
    return gauss_curvature_brioschi(model, x);
}

namespace {

std::array<double, 3> unit_r(double th, double ph) {
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}
std::array<double, 3> unit_th(double th, double ph) {
    return {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
}
std::array<double, 3> unit_ph(double, double ph) { return {-std::sin(ph), std::cos(ph), 0.0}; }

// Spatial part of a tetrad vector in Cartesian orthonormal components.
std::array<cplx, 3> spatial(const MetricModel& model, const SlicePoint& p, const Vec4& v) {
    const RadialProfile rp = model.profile(p.x);
    const auto er = unit_r(p.theta, p.phi), et = unit_th(p.theta, p.phi), ep = unit_ph(p.theta, p.phi);
    const cplx cr = v[1] * std::sqrt(rp.f), ct = v[2] * rp.r, cp = v[3] * rp.r * std::sin(p.theta);
    std::array<cplx, 3> out{};
    for (size_t i = 0; i < 3; ++i) out[i] = cr * er[i] + ct * et[i] + cp * ep[i];
    return out;
}

Direction direction_of(const std::array<cplx, 3>& s) {
    const double n = std::sqrt(std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]));
    const double z = std::clamp(s[2].real() / n, -1.0, 1.0);
    double ph = std::atan2(s[1].real(), s[0].real());
    if (ph < 0) ph += 2 * kPi;
    return {std::acos(z), ph};
}

}  // namespace

ConjugateStructure conjugate_structure(const MetricModel& model,
                                       const std::vector<Direction>& sample) {
    ConjugateStructure cs;
    const double x0 = 1e-6 * model.T_max;
    auto frame = [&](const Direction& w) {
        const SlicePoint p{x0, x0, w.theta, w.phi};
        return std::make_pair(p, tetrad_unchecked(model, p, TetradChoice::Adapted));
    };
    auto conj_dir = [&](const Direction& w) {
        auto [p, T] = frame(w);
        const auto nl = metric_product(model, p, T.n(), T.n());
        const auto ln = metric_product(model, p, T.l(), T.n());
        if (std::abs(nl) > 1e-10 || std::abs(ln - 1.0) > 1e-10)
            throw std::runtime_error("conjugate_structure: degenerate tetrad");
        return direction_of(spatial(model, p, T.n()));
    };
    auto phase = [&](const Direction& w, const Direction& wp) {
        auto [p, T] = frame(w);
        auto [pp, Tp] = frame(wp);
        const auto m = spatial(model, p, T.m());
        const auto mp = spatial(model, pp, Tp.m());
        cplx num = 0.0, den = 0.0;
        for (size_t i = 0; i < 3; ++i) {
            num += mp[i] * m[i];
            den += std::conj(m[i]) * m[i];
        }
        return std::arg(num / den);
    };
    for (const auto& w : sample) {
        const Direction wp = conj_dir(w);
        const Direction wpp = conj_dir(wp);
        const double th = phase(w, wp);
        const double thp = phase(wp, wpp);
        cs.omega.push_back(w);
        cs.omega_prime.push_back(wp);
        cs.phase.push_back(th);
        const auto a = unit_r(w.theta, w.phi), b = unit_r(wpp.theta, wpp.phi);
        double e = 0.0;
        for (size_t i = 0; i < 3; ++i) e = std::max(e, std::abs(a[i] - b[i]));
        cs.max_involution_error = std::max(cs.max_involution_error, e);
        double d = std::remainder(th - thp, 2 * kPi);
        cs.max_phase_asymmetry = std::max(cs.max_phase_asymmetry, std::abs(d));
    }
    return cs;
}

ConeCoefficients cone_coefficients(const MetricModel& model, double x) {
    ConeCoefficients c;
    const RadialProfile rp = model.profile(x);
    c.x = x;
    c.N = rp.N;
    c.R = rp.r;
    c.R_x = rp.R_x;
    c.nabla_L_r = 1.0 / rp.f;  // ℒ = (∂t + ∂x)/f
    if (x < kRadiusFloor * model.T_max) {
        c.rho = 0.0;  // only used through the regular bracket, whose limit is supplied separately
        return c;
    }
    const SpinCoefficientSet s = spin_coefficients(model, {x, x, kPi / 2, 0.0}, TetradChoice::GradientL);
    c.rho = s.rho.real();
    c.gamma_p = -s.epsilon;
    c.pi_hat = x * s.pi;
    return c;
}

double bracket_vertex_limit(const MetricModel& model) {
    const RadialProfile p0 = model.profile(0.0);
    // ∇_ℒ N = (1/f) ∂_x N on the static family
    return -kSqrt2 * p0.N_x / p0.f;
}

}  // namespace nc
