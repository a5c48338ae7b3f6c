#include "nullcone/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Cubic Lagrange interpolation of a row at v = (j + 1/2) h.
cplx midpoint(const cplx* row, int j, int n_nodes) {
    int s = std::clamp(j - 1, 0, n_nodes - 4);
    const double t = (j + 0.5) - s;  // position in units of h relative to node s
    cplx acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (t - b) / static_cast<double>(a - b);
        acc += w * row[s + a];
    }
    return acc;
}

struct CoefAt {
    double scale = 0.0;  // N^2 / 4
    double bracket = 0.0;
    cplx gamma_p = 0.0, pi_hat = 0.0;
    double x_over_R = 1.0;
    double x = 0.0;
    double LPhi = 0.0;  // ℒ^a Φ_a
};

CoefAt coef(const ConeProfile& profile, double x, double limit, const Potential& phi) {
    const ConeCoefficients c = profile(x);
    CoefAt k;
    k.x = x;
    k.scale = c.N * c.N / 4.0;
    k.gamma_p = c.gamma_p;
    k.pi_hat = c.pi_hat;
    if (x == 0.0) {
        k.bracket = limit;
        k.x_over_R = 1.0 / c.R_x;
    } else {
        k.bracket = c.nabla_L_r / x + c.rho;
        k.x_over_R = x / c.R;
    }
    k.LPhi = c.nabla_L_r * phi.at(x);  // ℒ^t = ∇_ℒ x on the static family
    return k;
}

void check_integrable(const ConeProfile& profile, double x0, double limit) {
    std::array<double, 4> e{};
    for (int k = 0; k < 4; ++k) {
        const double x = x0 * std::ldexp(1.0, -k);
        const ConeCoefficients c = profile(x);
        e[static_cast<size_t>(k)] = std::abs(c.nabla_L_r / x + c.rho - limit);
    }
    if (!std::isfinite(e[3]) || e[3] > 2.0 * e[0] + 1e-3 * (1.0 + std::abs(limit)))
        throw std::domain_error("constraints: bracket ∇_ℒr/r + ρ̂ has no finite vertex limit");
}

cplx one_sided_derivative(const cplx* f, double h, int stencil) {
    if (stencil == 3) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    if (stencil == 5)
        return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    throw std::invalid_argument("vertex stencil must be 3 or 5");
}

}  // namespace

std::vector<double> simpson_weights(int n, double h) {
    if (n < 2 || n % 2) throw std::invalid_argument("Simpson needs an even number of intervals");
    std::vector<double> w(static_cast<size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
        w[static_cast<size_t>(j)] = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    for (auto& v : w) v *= h / 3.0;
    return w;
}

ConeSolution solve_constraints(const NullDatum& d, const MetricModel& model,
                               const ConstraintOptions& opt) {
    return solve_constraints(
        d, [&model](double x) { return cone_coefficients(model, x); }, bracket_vertex_limit(model),
        opt);
}

ConeSolution solve_constraints(const NullDatum& d, const ConeProfile& profile,
                               double bracket_limit, const ConstraintOptions& opt) {
    if (d.n_v < 4) throw std::invalid_argument("constraints: need at least 4 v-intervals");
    if (d.psi1.n != d.nodes() || d.psi4.n != d.nodes() || d.psi1.two_lmax != d.psi4.two_lmax)
        throw std::invalid_argument("constraints: datum grid mismatch");
    const double h = d.dv();
    const int n = d.nodes();
    const int lmax2 = d.two_lmax();
    check_integrable(profile, 0.5 * h, bracket_limit);

    // Coefficients at nodes (even index 2j) and midpoints (odd index 2j+1), x = v/2.
    std::vector<CoefAt> k(static_cast<size_t>(2 * n - 1));
    for (int i = 0; i < 2 * n - 1; ++i)
        k[static_cast<size_t>(i)] = coef(profile, 0.25 * h * i, bracket_limit, d.phi);
    const double N0 = std::sqrt(4.0 * k[0].scale);

    ConeSolution sol;
    sol.v_max = d.v_max;
    sol.n_v = d.n_v;
    sol.N_vertex = N0;
    sol.psi[0] = d.psi1;
    sol.psi[3] = d.psi4;
    sol.psi[1] = SpectralSeries(-1, lmax2, n);
    sol.psi[2] = SpectralSeries(1, lmax2, n);
    sol.phi1_hat = SpectralSeries(-1, lmax2, n);
    sol.chi1_hat = SpectralSeries(1, lmax2, n);

    const cplx iq(0.0, d.charge);
    const double ms = d.mass / kSqrt2;
    const int modes = d.psi1.modes();
    std::vector<cplx> p0(static_cast<size_t>(2 * n - 1)), c0(static_cast<size_t>(2 * n - 1));
    for (int mi = 0; mi < modes; ++mi) {
        const int two_l = mode_lm(1, mi).first;
        const double ethbar = ethbar_factor(1, two_l);  // on Ψ1 (s = +1/2)
        const double eth = eth_factor(-1, two_l);       // on Ψ4 (s = -1/2)
        const cplx* r1 = d.psi1.row(mi);
        const cplx* r4 = d.psi4.row(mi);
        // φ̂0 and χ̂0' on nodes and midpoints
        for (int i = 0; i < 2 * n - 1; ++i) {
            const int j = i / 2;
            const cplx a1 = (i % 2) ? midpoint(r1, j, n) : r1[j];
            const cplx a4 = (i % 2) ? midpoint(r4, j, n) : r4[j];
            const double Nn = std::sqrt(4.0 * k[static_cast<size_t>(i)].scale);
            p0[static_cast<size_t>(i)] = std::sqrt(2.0 / Nn) * a1;
            c0[static_cast<size_t>(i)] = -std::sqrt(2.0 / Nn) * a4;
        }
        auto rhs = [&](int i, cplx ph, cplx ch) {
            const CoefAt& c = k[static_cast<size_t>(i)];
            const cplx dbar = -c.x_over_R / kSqrt2 * ethbar;  // ð̂' eigenvalue
            const cplx d_ = -c.x_over_R / kSqrt2 * eth;       // ð̂ eigenvalue
            const cplx fp = c.scale * ((c.gamma_p + c.bracket + iq * c.LPhi) * ph +
                                       (dbar + c.pi_hat) * p0[static_cast<size_t>(i)] -
                                       ms * c.x * c0[static_cast<size_t>(i)]);
            const cplx fc = c.scale * ((std::conj(c.gamma_p) + c.bracket + iq * c.LPhi) * ch +
                                       (d_ + std::conj(c.pi_hat)) * c0[static_cast<size_t>(i)] -
                                       ms * c.x * p0[static_cast<size_t>(i)]);
            return std::pair<cplx, cplx>{fp, fc};
        };
        cplx ph = 0.0, ch = 0.0;
        cplx* out_p = sol.phi1_hat.row(mi);
        cplx* out_c = sol.chi1_hat.row(mi);
        out_p[0] = 0.0;
        out_c[0] = 0.0;
        for (int j = 0; j + 1 < n; ++j) {
            const int i0 = 2 * j, im = 2 * j + 1, i1 = 2 * j + 2;
            const auto k1 = rhs(i0, ph, ch);
            const auto k2 = rhs(im, ph + 0.5 * h * k1.first, ch + 0.5 * h * k1.second);
            const auto k3 = rhs(im, ph + 0.5 * h * k2.first, ch + 0.5 * h * k2.second);
            const auto k4 = rhs(i1, ph + h * k3.first, ch + h * k3.second);
            ph += h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
            ch += h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
            out_p[j + 1] = ph;
            out_c[j + 1] = ch;
        }
        cplx* o2 = sol.psi[1].row(mi);
        cplx* o3 = sol.psi[2].row(mi);
        for (int j = 1; j < n; ++j) {
            const CoefAt& c = k[static_cast<size_t>(2 * j)];
            const double unhat = 1.0 / (c.x * std::sqrt(std::sqrt(4.0 * c.scale) / 2.0));
            o2[j] = out_p[j] * unhat;
            o3[j] = out_c[j] * unhat;
        }
    }
    auto [v2, v3] = vertex_limits(sol, opt.vertex_stencil);
    sol.psi2_vertex = v2;
    sol.psi3_vertex = v3;
    sol.psi[1].set_node(0, v2);
    sol.psi[2].set_node(0, v3);
    return sol;
}

std::pair<SpectralField, SpectralField> vertex_limits(const ConeSolution& sol, int stencil) {
    const int need = stencil == 3 ? 3 : 5;
    if (sol.n_v + 1 < need) throw std::invalid_argument("vertex_limits: grid too short");
    SpectralField a(-1, sol.phi1_hat.two_lmax), b(1, sol.chi1_hat.two_lmax);
    const double scale = 2.0 / std::sqrt(sol.N_vertex / 2.0);
    for (int mi = 0; mi < a.size(); ++mi) {
        a[mi] = scale * one_sided_derivative(sol.phi1_hat.row(mi), sol.dv(), stencil);
        b[mi] = scale * one_sided_derivative(sol.chi1_hat.row(mi), sol.dv(), stencil);
    }
    return {a, b};
}

namespace {

// Applies ð_unit (dir = +1) or ð'_unit (dir = -1) modewise to a series.
SpectralSeries ladder_series(const SpectralSeries& f, int dir) {
    SpectralSeries out(f.two_s + 2 * dir, f.two_lmax, f.n);
    for (int mi = 0; mi < f.modes(); ++mi) {
        auto [tl, tm] = mode_lm(f.two_s, mi);
        if (!valid_mode(out.two_s, tl, tm)) continue;
        const double fac = dir > 0 ? eth_factor(f.two_s, tl) : ethbar_factor(f.two_s, tl);
        const int oi = mode_index(out.two_s, tl, tm);
        for (int j = 0; j < f.n; ++j) out.at(oi, j) = fac * f.at(mi, j);
    }
    return out;
}

// ∂_v with fourth-order differences (one-sided near the ends).
SpectralSeries dv_series(const SpectralSeries& f, double h) {
    SpectralSeries out(f.two_s, f.two_lmax, f.n);
    const int n = f.n;
    for (int mi = 0; mi < f.modes(); ++mi) {
        const cplx* r = f.row(mi);
        cplx* o = out.row(mi);
        for (int j = 0; j < n; ++j) {
            if (j >= 2 && j + 2 < n) {
                o[j] = (r[j - 2] - 8.0 * r[j - 1] + 8.0 * r[j + 1] - r[j + 2]) / (12.0 * h);
            } else if (j < 2) {
                const cplx* p = r + j;  // forward-biased five-point stencils at j = 0, 1
                o[j] = j == 0 ? (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12.0 * h)
                              : (-3.0 * r[0] - 10.0 * r[1] + 18.0 * r[2] - 6.0 * r[3] + r[4]) / (12.0 * h);
            } else {
                const cplx* p = r + (n - 5);
                o[j] = j == n - 1 ? (25.0 * p[4] - 48.0 * p[3] + 36.0 * p[2] - 16.0 * p[1] + 3.0 * p[0]) / (12.0 * h)
                                  : (3.0 * p[4] + 10.0 * p[3] - 18.0 * p[2] + 6.0 * p[1] - p[0]) / (12.0 * h);
            }
        }
    }
    return out;
}

struct AdaptedAlong {
    std::vector<double> R, N, rho, mu, eps, phi_n;
};

AdaptedAlong adapted_along(const MetricModel& model, const NullDatum& d) {
    AdaptedAlong a;
    const int n = d.nodes();
    for (auto* v : {&a.R, &a.N, &a.rho, &a.mu, &a.eps, &a.phi_n}) v->assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const double x = 0.5 * d.v(j);
        const RadialProfile p = model.profile(x);
        const auto uj = static_cast<size_t>(j);
        a.R[uj] = p.r;
        a.N[uj] = p.N;
        a.phi_n[uj] = d.phi.at(x) / p.N;
        if (j == 0 || x < kRadiusFloor * model.T_max) continue;
        const SpinCoefficientSet s =
            spin_coefficients(model, {x, x, kPi / 2, 0.0}, TetradChoice::Adapted);
        a.rho[uj] = s.rho.real();
        a.mu[uj] = s.mu.real();
        a.eps[uj] = s.epsilon.real();
    }
    return a;
}

// Node 0 sits at R = 0; fill it by cubic extrapolation from nodes 1..4.
void extrapolate_vertex(SpectralSeries& f) {
    for (int mi = 0; mi < f.modes(); ++mi) {
        cplx* r = f.row(mi);
        r[0] = 4.0 * r[1] - 6.0 * r[2] + 4.0 * r[3] - r[4];
    }
}

}  // namespace

std::pair<SpectralSeries, SpectralSeries> apply_L(LTag tag, const NullDatum& d,
                                                  const ConeSolution& sol,
                                                  const MetricModel& model) {
    if (sol.n_v != d.n_v || sol.psi[0].two_lmax != d.two_lmax() || std::abs(sol.v_max - d.v_max) > 0)
        throw std::invalid_argument("apply_L: grid mismatch");
    const AdaptedAlong a = adapted_along(model, d);
    const int n = d.nodes();
    const SpectralSeries& P1 = sol.psi[0];
    const SpectralSeries& P2 = sol.psi[1];
    const SpectralSeries& P3 = sol.psi[2];
    const SpectralSeries& P4 = sol.psi[3];
    const cplx iq(0.0, d.charge);
    const double ms = d.mass / kSqrt2;
    auto per_node = [&](SpectralSeries& f, auto&& fn) {
        for (int mi = 0; mi < f.modes(); ++mi)
            for (int j = 0; j < n; ++j) f.at(mi, j) = fn(mi, j, static_cast<size_t>(j));
    };
    switch (tag) {
    case LTag::l: {
        SpectralSeries d1 = dv_series(P1, d.dv()), d4 = dv_series(P4, d.dv());
        per_node(d1, [&](int mi, int j, size_t u) { return 2.0 / a.N[u] * d1.at(mi, j) - a.eps[u] * P1.at(mi, j); });
        per_node(d4, [&](int mi, int j, size_t u) { return 2.0 / a.N[u] * d4.at(mi, j) - a.eps[u] * P4.at(mi, j); });
        return {d1, d4};
    }
    case LTag::m: {
        SpectralSeries e1 = ladder_series(P1, +1), e4 = ladder_series(P4, +1);
        per_node(e1, [&](int mi, int j, size_t u) { return j == 0 ? cplx(0.0) : -e1.at(mi, j) / (kSqrt2 * a.R[u]); });
        per_node(e4, [&](int mi, int j, size_t u) {
            return j == 0 ? cplx(0.0) : -e4.at(mi, j) / (kSqrt2 * a.R[u]) - a.rho[u] * P3.at(mi, j);
        });
        extrapolate_vertex(e1);
        extrapolate_vertex(e4);
        return {e1, e4};
    }
    case LTag::mbar: {
        SpectralSeries e1 = ladder_series(P1, -1), e4 = ladder_series(P4, -1);
        per_node(e1, [&](int mi, int j, size_t u) {
            return j == 0 ? cplx(0.0) : -e1.at(mi, j) / (kSqrt2 * a.R[u]) + a.rho[u] * P2.at(mi, j);
        });
        per_node(e4, [&](int mi, int j, size_t u) { return j == 0 ? cplx(0.0) : -e4.at(mi, j) / (kSqrt2 * a.R[u]); });
        extrapolate_vertex(e1);
        extrapolate_vertex(e4);
        return {e1, e4};
    }
    case LTag::n: {
        SpectralSeries e2 = ladder_series(P2, +1), e3 = ladder_series(P3, -1);
        SpectralSeries r1(1, P1.two_lmax, n), r4(-1, P4.two_lmax, n);
        per_node(r1, [&](int mi, int j, size_t u) {
            return j == 0 ? cplx(0.0)
                          : (iq * a.phi_n[u] - a.mu[u]) * P1.at(mi, j) - e2.at(mi, j) / (kSqrt2 * a.R[u]) +
                                ms * P3.at(mi, j);
        });
        per_node(r4, [&](int mi, int j, size_t u) {
            return j == 0 ? cplx(0.0)
                          : (iq * a.phi_n[u] - a.mu[u]) * P4.at(mi, j) - ms * P2.at(mi, j) +
                                e3.at(mi, j) / (kSqrt2 * a.R[u]);
        });
        extrapolate_vertex(r1);
        extrapolate_vertex(r4);
        return {r1, r4};
    }
    }
    throw std::logic_error("apply_L: unknown tag");
}

std::pair<double, double> matching_terms(const ConeSolution& sol, const ConjugateStructure& cs) {
    const SpectralField p1 = sol.psi[0].node(0), p4 = sol.psi[3].node(0);
    const cplx i(0.0, 1.0);
    std::array<std::pair<double, double>, 2> best{};
    for (size_t k = 0; k < 2; ++k) {
        const double sgn = k == 0 ? 1.0 : -1.0;
        for (size_t w = 0; w < cs.omega.size(); ++w) {
            const Direction o = cs.omega[w];
            Direction op = cs.omega_prime[w];
            // Fixed branch: lift the conjugate longitude into (φ, φ + 2π].
            while (op.phi <= o.phi) op.phi += 2.0 * kPi;
            while (op.phi > o.phi + 2.0 * kPi) op.phi -= 2.0 * kPi;
            const double th = cs.phase[w];
            const cplx a2 = evaluate_frame(sol.psi2_vertex, o.theta, o.phi);
            const cplx a3 = evaluate_frame(sol.psi3_vertex, o.theta, o.phi);
            const cplx b1 = evaluate_frame(p1, op.theta, op.phi);
            const cplx b4 = evaluate_frame(p4, op.theta, op.phi);
            const double t1 = std::abs(a2 + sgn * i * std::polar(1.0, -0.5 * th) * b1);
            const double t2 = std::abs(a3 + sgn * i * std::polar(1.0, 0.5 * th) * b4);
            best[k].first = std::max(best[k].first, t1);
            best[k].second = std::max(best[k].second, t2);
        }
    }
    const double s0 = best[0].first + best[0].second, s1 = best[1].first + best[1].second;
    return s0 <= s1 ? best[0] : best[1];
}

double matching_residual(const ConeSolution& sol, const ConjugateStructure& cs) {
    const auto t = matching_terms(sol, cs);
    return t.first + t.second;
}

double cone_integral(const std::vector<const SpectralSeries*>& fields, double v_max, int n_v,
                     const MetricModel& model) {
    const double h = v_max / n_v;
    const std::vector<double> w = simpson_weights(n_v, h);
    double acc = 0.0;
    for (int j = 0; j <= n_v; ++j) {
        const RadialProfile p = model.profile(0.5 * v_max * j / n_v);
        double s = 0.0;
        for (const SpectralSeries* f : fields)
            for (int mi = 0; mi < f->modes(); ++mi) s += std::norm(f->at(mi, j));
        acc += w[static_cast<size_t>(j)] * 0.5 * p.N * p.r * p.r * s;
    }
    return acc;
}

double cone_flux(const NullDatum& d, const MetricModel& model) {
    return cone_integral({&d.psi1, &d.psi4}, d.v_max, d.n_v, model);
}

double h_cone_norm(const NullDatum& d, const ConeSolution& sol, const MetricModel& model) {
    double acc = cone_flux(d, model);
    for (LTag t : {LTag::n, LTag::l, LTag::m, LTag::mbar}) {
        const auto [a, b] = apply_L(t, d, sol, model);
        acc += cone_integral({&a, &b}, d.v_max, d.n_v, model);
    }
    return std::sqrt(acc);
}

}  // namespace nc
