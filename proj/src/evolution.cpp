#include "nullcone/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nullcone/radial.hpp"

namespace nc {

namespace {

using radial::ModeCoefficients;
using radial::ModeOperator;
using radial::ModeState;

double mode_k(int mode) { return 0.5 * (mode_lm(1, mode).first + 1); }

int parity_of(double k) { return (static_cast<int>(std::lround(k)) % 2 == 0) ? 1 : -1; }

struct GridProfile {
    std::vector<double> x, scale, sqrt_f_over_R, sqrt_f, qphi;
};

GridProfile grid_profile(const MetricModel& model, const std::vector<double>& x, double charge,
                         const Potential& phi) {
    GridProfile g;
    g.x = x;
    const size_t n = x.size();
    g.scale.resize(n);
    g.sqrt_f_over_R.resize(n);
    g.sqrt_f.resize(n);
    g.qphi.assign(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        const RadialProfile p = model.profile(x[j]);
        if (!(p.f > 0.0)) throw std::domain_error("evolution: metric degenerate on the grid");
        g.sqrt_f[j] = std::sqrt(p.f);
        g.scale[j] = p.r * std::sqrt(g.sqrt_f[j]);
        g.sqrt_f_over_R[j] = x[j] > 0.0 ? g.sqrt_f[j] / p.r : 0.0;
        if (charge != 0.0) g.qphi[j] = charge * phi.at(x[j]);
    }
    return g;
}

// Ψ from u on nodes 0..n-1; the vertex value by cubic extrapolation.
void unscale_row(const std::vector<cplx>& u, const std::vector<double>& scale, cplx* psi) {
    const size_t n = u.size();
    for (size_t j = 1; j < n; ++j) psi[j] = u[j] / scale[j];
    if (n >= 5)
        psi[0] = 4.0 * psi[1] - 6.0 * psi[2] + 4.0 * psi[3] - psi[4];
    else if (n >= 2)
        psi[0] = psi[1];
}

std::vector<char> active_modes(const std::vector<const SpectralSeries*>& fields, double cutoff) {
    const int modes = fields.front()->modes();
    std::vector<double> mx(modes, 0.0);
    double global = 0.0;
    for (const SpectralSeries* f : fields)
        for (int m = 0; m < modes; ++m)
            for (int j = 0; j < f->n; ++j) mx[m] = std::max(mx[m], std::abs(f->at(m, j)));
    for (double v : mx) global = std::max(global, v);
    std::vector<char> on(modes, 0);
    for (int m = 0; m < modes; ++m) on[m] = global > 0.0 && mx[m] > cutoff * global;
    return on;
}

void check_uniform(const std::vector<double>& x) {
    if (x.size() < 9 || x[0] != 0.0)
        throw std::invalid_argument("evolution: grid must start at x = 0 with at least 9 nodes");
    const double dx = x[1] - x[0];
    for (size_t j = 1; j < x.size(); ++j)
        if (std::abs(x[j] - x[j - 1] - dx) > 1e-9 * dx)
            throw std::invalid_argument("evolution: grid must be uniform");
}

// One-sided fourth-order derivative rows for the last three nodes (offsets
// relative to the node).
double one_sided(const double* r, int j, int J, double dx) {
    if (j == J) return (25.0 / 12 * r[j] - 4.0 * r[j - 1] + 3.0 * r[j - 2] - 4.0 / 3 * r[j - 3] +
                        0.25 * r[j - 4]) / dx;
    if (j == J - 1)
        return (0.25 * r[j + 1] + 5.0 / 6 * r[j] - 1.5 * r[j - 1] + 0.5 * r[j - 2] -
                1.0 / 12 * r[j - 3]) / dx;
    return (-1.0 / 12 * r[j + 2] + 2.0 / 3 * r[j + 1] - 2.0 / 3 * r[j - 1] + 1.0 / 12 * r[j - 2]) /
           dx;
}

}  // namespace

std::vector<double> field_scale(const MetricModel& model, const std::vector<double>& x) {
    return grid_profile(model, x, 0.0, Potential{}).scale;
}

SliceState assemble_rhs(const SliceState& s, const EvolutionConfig& cfg, const MetricModel& model) {
    if (s.tilt != 0.0) throw std::invalid_argument("assemble_rhs: only t = const slices");
    check_uniform(s.x);
    const int n = s.nodes(), J = n - 1;
    const double dx = s.x[1];
    const GridProfile gp = grid_profile(model, s.x, cfg.charge, cfg.phi);
    SliceState out(s.t, s.x, s.two_lmax());
    ModeState u(J), f(J);
    std::vector<cplx> tmp(n);
    for (int m = 0; m < s.psi[0].modes(); ++m) {
        const double k = mode_k(m);
        const auto op = ModeOperator::cauchy(J, dx, parity_of(k));
        const auto c = radial::mode_coefficients(gp.sqrt_f_over_R, gp.sqrt_f, k, cfg.mass, gp.qphi);
        for (int comp = 0; comp < 4; ++comp)
            for (int j = 0; j < n; ++j) u.set(comp, j, gp.scale[j] * s.psi[comp].at(m, j));
        op.apply(u, c, f);
        // Outer closure instead of the frozen buffer.
        static constexpr int partner_wk[4] = {1, 0, 3, 2};
        static constexpr double sign_wk[4] = {-1, 1, 1, -1};
        static constexpr int partner_m[4] = {2, 3, 0, 1};
        static constexpr double sign_m[4] = {1, 1, -1, -1};
        for (int comp = 0; comp < 4; ++comp)
            for (int p = 0; p < 2; ++p)
                for (int j = J - 2; j <= J; ++j) {
                    double v = radial::kGamma[comp] * one_sided(u.row(2 * comp + p), j, J, dx);
                    v += sign_wk[comp] * c.wk[j] * u.row(2 * partner_wk[comp] + p)[j];
                    v += sign_m[comp] * c.mass[j] * u.row(2 * partner_m[comp] + p)[j];
                    if (!c.qphi.empty())
                        v += (p == 0 ? -1.0 : 1.0) * c.qphi[j] * u.row(2 * comp + 1 - p)[j];
                    f.row(2 * comp + p)[j] = v;
                }
        for (int comp = 0; comp < 4; ++comp) {
            for (int j = 0; j < n; ++j) tmp[j] = f.get(comp, j);
            unscale_row(tmp, gp.scale, out.psi[comp].row(m));
        }
    }
    return out;
}

CauchyResult cauchy_run(const SliceState& initial, double t_target, const EvolutionConfig& cfg,
                        const MetricModel& model, const CauchyOptions& opt) {
    if (initial.tilt != 0.0) throw std::invalid_argument("cauchy_evolve: initial slice must be t = const");
    check_uniform(initial.x);
    const double t0 = initial.t;
    if (t_target < t0) throw std::invalid_argument("cauchy_evolve: t_target before initial time");
    const int n = initial.nodes(), J = n - 1;
    const double dx = initial.x[1];
    const double X = initial.x.back();
    const double valid = X - cfg.buffer_speed * (t_target - t0) - 3 * dx;
    if (valid < 4 * dx)
        throw std::domain_error("cauchy_evolve: t_target beyond the excised domain of dependence");
    if (opt.record_cone && t0 != 0.0)
        throw std::invalid_argument("cauchy_evolve: cone recording needs t0 = 0");
    for (double ts : opt.snapshot_times)
        if (ts < t0 || ts > t_target) throw std::invalid_argument("cauchy_evolve: snapshot outside run");

    const GridProfile gp = grid_profile(model, initial.x, cfg.charge, cfg.phi);
    const int lmax2 = initial.two_lmax();
    CauchyResult res;
    res.snapshots.reserve(opt.snapshot_times.size());
    for (double ts : opt.snapshot_times) {
        res.snapshots.emplace_back(ts, initial.x, lmax2);
        res.valid_extent.push_back(X - cfg.buffer_speed * (ts - t0) - 3 * dx);
    }
    SliceState final_full(t_target, initial.x, lmax2);

    // Cone nodes reachable in this run.
    const int n_cone = static_cast<int>(std::floor(t_target / dx + 1e-9));
    if (opt.record_cone) {
        res.history.T = n_cone * dx;
        res.history.n = n_cone;
        res.history.lambdas = {0.0};
        res.history.cone.resize(1);
        for (int c = 0; c < 4; ++c)
            res.history.cone[0][c] = SpectralSeries(kComponentSpin[c], lmax2, n_cone + 1);
        res.history.mass = cfg.mass;
        res.history.charge = cfg.charge;
        res.history.phi = cfg.phi;
    }

    // Modes to evolve: data or source content.
    std::vector<const SpectralSeries*> fields;
    for (const auto& p : initial.psi) fields.push_back(&p);
    std::vector<std::array<SpectralSeries, 4>> probes;
    if (opt.source) {
        for (int i = 0; i <= 4; ++i) {
            std::array<SpectralSeries, 4> xi;
            for (int c = 0; c < 4; ++c) xi[c] = SpectralSeries(kComponentSpin[c], lmax2, n);
            opt.source(t0 + (t_target - t0) * i / 4.0, initial.x, xi);
            probes.push_back(std::move(xi));
        }
        for (const auto& pr : probes)
            for (const auto& p : pr) fields.push_back(&p);
    }
    const std::vector<char> on = active_modes(fields, opt.source ? 0.0 : cfg.mode_cutoff);

    // Source in u units is sqrt(2) R f^(3/4) Ξ; cache per stage time.
    std::vector<double> src_scale(n);
    for (int j = 0; j < n; ++j) src_scale[j] = std::sqrt(2.0) * gp.scale[j] * gp.sqrt_f[j];
    double cached_t = std::numeric_limits<double>::quiet_NaN();
    std::array<SpectralSeries, 4> xi;
    for (int c = 0; c < 4; ++c) xi[c] = SpectralSeries(kComponentSpin[c], lmax2, n);

    ModeState u(J);
    std::vector<cplx> tmp(n);
    for (int m = 0; m < initial.psi[0].modes(); ++m) {
        if (!on[m]) continue;
        const double k = mode_k(m);
        const auto op = ModeOperator::cauchy(J, dx, parity_of(k));
        const auto c = radial::mode_coefficients(gp.sqrt_f_over_R, gp.sqrt_f, k, cfg.mass, gp.qphi);
        u.zero();
        for (int comp = 0; comp < 4; ++comp)
            for (int j = 0; j < n; ++j) u.set(comp, j, gp.scale[j] * initial.psi[comp].at(m, j));

        radial::IntegrationPlan plan;
        plan.tau0 = t0;
        plan.tau_end = t_target;
        const double dt = radial::stable_step(cfg.cfl, 0.0, dx, k);
        plan.steps = std::max(1, static_cast<int>(std::ceil((t_target - t0) / dt - 1e-9)));
        if (t_target == t0) plan.steps = 1;
        res.steps += plan.steps;
        std::vector<double> cone_t(opt.record_cone ? n_cone + 1 : 0);
        for (size_t j = 0; j < cone_t.size(); ++j) cone_t[j] = j * dx;
        radial::NodeSampler cone(cone_t);
        if (opt.record_cone) plan.samplers.push_back(&cone);
        plan.snapshot_times = opt.snapshot_times;
        size_t snap_index = 0;
        plan.on_snapshot = [&](double, const ModeState& st) {
            SliceState& out = res.snapshots[snap_index++];
            for (int comp = 0; comp < 4; ++comp) {
                for (int j = 0; j < n; ++j) tmp[j] = st.get(comp, j);
                unscale_row(tmp, gp.scale, out.psi[comp].row(m));
            }
        };
        if (opt.source)
            plan.source = [&, m](double t, ModeState& src) {
                if (t != cached_t) {
                    opt.source(t, initial.x, xi);
                    cached_t = t;
                }
                for (int comp = 0; comp < 4; ++comp)
                    for (int j = 0; j < n; ++j) src.set(comp, j, src_scale[j] * xi[comp].at(m, j));
            };
        if (t_target > t0) {
            radial::integrate(op, c, u, plan);
        } else {
            for (size_t i = 0; i < plan.snapshot_times.size(); ++i) plan.on_snapshot(t0, u);
        }
        cached_t = std::numeric_limits<double>::quiet_NaN();
        for (int comp = 0; comp < 4; ++comp) {
            for (int j = 0; j < n; ++j) tmp[j] = u.get(comp, j);
            unscale_row(tmp, gp.scale, final_full.psi[comp].row(m));
        }
        if (opt.record_cone) {
            std::vector<cplx> cu(n_cone + 1);
            std::vector<double> sc(gp.scale.begin(), gp.scale.begin() + n_cone + 1);
            for (int comp = 0; comp < 4; ++comp) {
                for (int j = 0; j <= n_cone; ++j) cu[j] = cone.at(comp, j);
                unscale_row(cu, sc, res.history.cone[0][comp].row(m));
            }
        }
    }

    const int keep = static_cast<int>(std::floor(valid / dx + 1e-9)) + 1;
    std::vector<double> xv(initial.x.begin(), initial.x.begin() + std::min(keep, n));
    res.state = SliceState(t_target, xv, lmax2);
    for (int comp = 0; comp < 4; ++comp)
        for (int m = 0; m < res.state.psi[comp].modes(); ++m)
            for (int j = 0; j < res.state.nodes(); ++j)
                res.state.psi[comp].at(m, j) = final_full.psi[comp].at(m, j);
    return res;
}

SliceState cauchy_evolve(const SliceState& initial, double t_target, const EvolutionConfig& cfg,
                         const MetricModel& model) {
    return cauchy_run(initial, t_target, cfg, model).state;
}

SliceState source_evolve(const SliceState& initial, const SourceField& xi, double t_target,
                         const EvolutionConfig& cfg, const MetricModel& model) {
    CauchyOptions opt;
    opt.source = xi;
    return cauchy_run(initial, t_target, cfg, model, opt).state;
}

namespace {

// Finite-difference weights for the d-th derivative on the given offsets.
std::vector<double> fd_weights(const std::vector<int>& offs, int d) {
    const int n = static_cast<int>(offs.size());
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    double fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    for (int p = 0; p < n; ++p) {
        for (int i = 0; i < n; ++i) A[p][i] = std::pow(static_cast<double>(offs[i]), p);
        A[p][n] = p == d ? fact : 0.0;
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (int c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = A[i][n] / A[i][i];
    return w;
}

}  // namespace

NullDatum extend_datum(const NullDatum& d, double T, int n_v_new, const ExtensionRule& rule) {
    const double dv = d.dv();
    const int N = static_cast<int>(std::lround(2.0 * T / dv));
    if (std::abs(N * dv - 2.0 * T) > 1e-9 * T || N > d.n_v)
        throw std::invalid_argument("extension: v = 2T must be a grid node of the datum");
    if (n_v_new < N) throw std::invalid_argument("extension: target shorter than the datum");
    if (rule.order < 0 || rule.order > 4) throw std::invalid_argument("extension: order must be 0..4");
    if (!(rule.blend_fraction > 0.0 && rule.blend_fraction <= 1.0))
        throw std::invalid_argument("extension: blend fraction must lie in (0, 1]");
    if (N < rule.order + 5) throw std::invalid_argument("extension: datum too short for the rule");
    NullDatum out(n_v_new * dv, n_v_new, d.two_lmax());
    out.mass = d.mass;
    out.charge = d.charge;
    out.phi = d.phi;
    std::vector<std::vector<double>> w(rule.order + 1);
    for (int p = 1; p <= rule.order; ++p) {
        std::vector<int> offs;
        for (int i = 0; i < p + 5; ++i) offs.push_back(-i);
        w[p] = fd_weights(offs, p);
    }
    const double L = (n_v_new - N) * dv;
    for (int which = 0; which < 2; ++which) {
        const SpectralSeries& src = which == 0 ? d.psi1 : d.psi4;
        SpectralSeries& dst = which == 0 ? out.psi1 : out.psi4;
        for (int m = 0; m < src.modes(); ++m) {
            for (int j = 0; j <= N; ++j) dst.at(m, j) = src.at(m, j);
            std::vector<cplx> der(rule.order + 1, 0.0);
            for (int p = 1; p <= rule.order; ++p) {
                cplx acc = 0.0;
                for (size_t i = 0; i < w[p].size(); ++i) acc += w[p][i] * src.at(m, N - static_cast<int>(i));
                der[p] = acc / std::pow(dv, p);
            }
            for (int j = N + 1; j <= n_v_new; ++j) {
                const double h = (j - N) * dv;
                double s = (h - (1.0 - rule.blend_fraction) * L) / (rule.blend_fraction * L);
                s = std::clamp(s, 0.0, 1.0);
                const double b = 1.0 - (10 * s * s * s - 15 * s * s * s * s + 6 * s * s * s * s * s);
                cplx taylor = 0.0;
                double hp = 1.0, fact = 1.0;
                for (int p = 1; p <= rule.order; ++p) {
                    hp *= h;
                    fact *= p;
                    taylor += der[p] * (hp / fact);
                }
                dst.at(m, j) = src.at(m, N) + taylor * b;
            }
        }
    }
    return out;
}

namespace {

int lambda_grid_nodes(double T, double dx, double lambda, int margin) {
    return static_cast<int>(std::ceil(T / (lambda * dx) - 1e-9)) + margin;
}

// v-grid subsampling factor between the datum and the radial grid (v = 2x).
int subsample(const NullDatum& d, const EvolutionConfig& cfg) {
    const double dx = cfg.T / cfg.n_r;
    const double ratio = 2.0 * dx / d.dv();
    const int m = static_cast<int>(std::lround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-9)
        throw std::invalid_argument("goursat: datum spacing must divide twice the radial spacing");
    if (std::abs(d.v_max - 2.0 * cfg.T) > 1e-9 * cfg.T)
        throw std::invalid_argument("goursat: datum must cover v in [0, 2T]");
    return m;
}

MetricModel enlarged(const MetricModel& model, double x_max) {
    if (x_max <= model.T_max) return model;
    MetricSpec spec;
    spec.kind = model.kind;
    spec.A = model.A;
    spec.B = model.B;
    spec.T_max = x_max;
    return build_metric(spec);
}

// Sixth-order derivative of a complex nodal row (one-sided near the ends).
std::vector<cplx> derivative6(const std::vector<cplx>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> d(n);
    for (int j = 0; j < n; ++j) {
        int lo = std::clamp(j - 3, 0, n - 7);
        std::vector<int> offs;
        for (int i = 0; i < 7; ++i) offs.push_back(lo + i - j);
        const auto w = fd_weights(offs, 1);
        cplx acc = 0.0;
        for (int i = 0; i < 7; ++i) acc += w[i] * f[lo + i];
        d[j] = acc / h;
    }
    return d;
}

}  // namespace

InducedData induced_cone_data(const NullDatum& d, double lambda, const EvolutionConfig& cfg,
                              const MetricModel& model) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("induced data: λ must lie in (0, 1)");
    const int sub = subsample(d, cfg);
    const double dx = cfg.T / cfg.n_r;
    const int J = lambda_grid_nodes(cfg.T, dx, lambda, cfg.margin);
    const MetricModel big = enlarged(model, J * dx);
    InducedData out;
    out.lambda = lambda;
    // Modes below the cutoff are zeroed so that they stay exactly zero.
    NullDatum clean = d;
    const std::vector<char> on = active_modes({&d.psi1, &d.psi4}, cfg.mode_cutoff);
    for (int m = 0; m < clean.psi1.modes(); ++m)
        if (!on[m])
            for (int j = 0; j < clean.nodes(); ++j) clean.psi1.at(m, j) = clean.psi4.at(m, j) = 0.0;
    out.extended = extend_datum(clean, cfg.T, J * sub, cfg.extension);
    out.cone = solve_constraints(out.extended, big);
    std::vector<double> x(J + 1);
    for (int j = 0; j <= J; ++j) x[j] = j * dx;
    out.g = SliceState(0.0, x, d.two_lmax(), lambda);
    for (int comp = 0; comp < 4; ++comp)
        for (int m = 0; m < out.g.psi[comp].modes(); ++m)
            for (int j = 0; j <= J; ++j) out.g.psi[comp].at(m, j) = out.cone.psi[comp].at(m, j * sub);

    // (g^λ_H)_{2,3} = (-∂x U + B U)_{2,3} / (1 - λ) in u units.
    const GridProfile gp = grid_profile(big, x, d.charge, d.phi);
    double res = 0.0, core = 0.0, norm = 0.0;
    const int j_core = std::min(J, static_cast<int>(std::floor(cfg.T / (lambda * dx) + 1e-9)));
    std::array<std::vector<cplx>, 4> U;
    for (int m = 0; m < out.g.psi[0].modes(); ++m) {
        const double k = mode_k(m);
        for (int comp = 0; comp < 4; ++comp) {
            U[comp].resize(J + 1);
            for (int j = 0; j <= J; ++j) {
                U[comp][j] = gp.scale[j] * out.g.psi[comp].at(m, j);
                norm = std::max(norm, std::abs(U[comp][j]));
            }
        }
        const auto d1 = derivative6(U[1], dx);
        const auto d2 = derivative6(U[2], dx);
        if (!on[m]) continue;
        for (int j = 1; j <= j_core; ++j) {
            const double wk = k * gp.sqrt_f_over_R[j], M = d.mass * gp.sqrt_f[j];
            const cplx iq(0.0, gp.qphi[j]);
            const cplx r1 = -d1[j] + wk * U[0][j] + M * U[3][j] + iq * U[1][j];
            const cplx r2 = -d2[j] + wk * U[3][j] - M * U[0][j] + iq * U[2][j];
            const double r = std::max(std::abs(r1), std::abs(r2)) / (1.0 - lambda);
            res = std::max(res, r);
            if (j <= cfg.n_r) core = std::max(core, r);
        }
    }
    out.gH23 = res;
    out.gH23_core = core;
    out.g_norm = norm;
    return out;
}

void validate_lambdas(const EvolutionConfig& cfg) {
    const auto& l = cfg.lambdas;
    if (l.empty()) throw std::invalid_argument("goursat: empty λ list");
    for (double v : l)
        if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("goursat: λ values must lie in (0, 1)");
    if (l.size() == 1) {
        if (1.0 - l[0] > cfg.single_lambda_gap)
            throw std::invalid_argument(
                "goursat: extrapolation refused, a single λ must satisfy 1 - λ <= " +
                std::to_string(cfg.single_lambda_gap));
        return;
    }
    const bool up = l[1] > l[0];
    for (size_t i = 1; i < l.size(); ++i)
        if ((up && !(l[i] > l[i - 1])) || (!up && !(l[i] < l[i - 1])))
            throw std::invalid_argument("goursat: λ list must be strictly monotone");
}

std::vector<double> richardson_weights(const std::vector<double>& lambdas) {
    const size_t n = lambdas.size();
    std::vector<double> w(n, 1.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (j != i) {
                const double si = 1.0 - lambdas[i], sj = 1.0 - lambdas[j];
                w[i] *= (0.0 - sj) / (si - sj);
            }
    return w;
}

GoursatResult goursat_solve(const NullDatum& d, const EvolutionConfig& cfg_in,
                            const MetricModel& model) {
    EvolutionConfig cfg = cfg_in;
    cfg.mass = d.mass;
    cfg.charge = d.charge;
    cfg.phi = d.phi;
    validate_lambdas(cfg);
    if (cfg.n_r < 16) throw std::invalid_argument("goursat: N_r must be at least 16");
    const double dx = cfg.T / cfg.n_r;
    const int N = cfg.n_r;
    const int lmax2 = d.two_lmax();
    std::vector<double> xs(N + 1);
    for (int j = 0; j <= N; ++j) xs[j] = j * dx;

    GoursatResult res;
    res.history.T = cfg.T;
    res.history.n = N;
    res.history.lambdas = cfg.lambdas;
    res.history.mass = cfg.mass;
    res.history.charge = cfg.charge;
    res.history.phi = cfg.phi;

    std::vector<char> union_on;
    for (double lambda : cfg.lambdas) {
        InducedData ind = induced_cone_data(d, lambda, cfg, model);
        res.gH23.push_back(ind.gH23);
        res.gH23_core.push_back(ind.gH23_core);
        res.g_norm.push_back(ind.g_norm);
        const int J = ind.g.nodes() - 1;
        const MetricModel big = enlarged(model, J * dx);
        const GridProfile gp = grid_profile(big, ind.g.x, cfg.charge, cfg.phi);
        std::vector<const SpectralSeries*> fields;
        for (const auto& p : ind.g.psi) fields.push_back(&p);
        const std::vector<char> on = active_modes(fields, 0.0);
        if (union_on.empty()) union_on.assign(on.size(), 0);

        const auto op = ModeOperator::tilted(J, dx, lambda, cfg.dissipation);
        SliceState sigma(cfg.T, xs, lmax2);
        std::array<SpectralSeries, 4> cone;
        for (int c = 0; c < 4; ++c) cone[c] = SpectralSeries(kComponentSpin[c], lmax2, N + 1);
        std::vector<double> tS(N + 1), tC(N + 1);
        for (int j = 0; j <= N; ++j) {
            tS[j] = cfg.T - lambda * xs[j];
            tC[j] = (1.0 - lambda) * xs[j];
        }
        const std::vector<double> sc(gp.scale.begin(), gp.scale.begin() + N + 1);
        ModeState u(J);
        std::vector<cplx> tmp(N + 1);
        for (int m = 0; m < ind.g.psi[0].modes(); ++m) {
            if (!on[m]) continue;
            union_on[m] = 1;
            const double k = mode_k(m);
            const auto c =
                radial::mode_coefficients(gp.sqrt_f_over_R, gp.sqrt_f, k, cfg.mass, gp.qphi);
            u.zero();
            for (int comp = 0; comp < 4; ++comp)
                for (int j = 0; j <= J; ++j) u.set(comp, j, gp.scale[j] * ind.g.psi[comp].at(m, j));
            radial::NodeSampler S(tS), C(tC);
            radial::IntegrationPlan plan;
            plan.tau0 = 0.0;
            plan.tau_end = cfg.T;
            plan.steps = static_cast<int>(
                std::ceil(cfg.T / radial::stable_step(cfg.cfl, lambda, dx, k) - 1e-9));
            plan.samplers = {&S, &C};
            res.steps += plan.steps;
            radial::integrate(op, c, u, plan);
            for (int comp = 0; comp < 4; ++comp) {
                for (int j = 0; j <= N; ++j) tmp[j] = S.at(comp, j);
                unscale_row(tmp, sc, sigma.psi[comp].row(m));
                for (int j = 0; j <= N; ++j) tmp[j] = C.at(comp, j);
                unscale_row(tmp, sc, cone[comp].row(m));
            }
        }
        res.per_lambda.push_back(std::move(sigma));
        res.history.cone.push_back(std::move(cone));
    }
    for (char v : union_on) res.active_modes += v;

    const auto w = richardson_weights(cfg.lambdas);
    res.sigma = SliceState(cfg.T, xs, lmax2);
    for (int comp = 0; comp < 4; ++comp)
        for (size_t i = 0; i < w.size(); ++i)
            for (size_t e = 0; e < res.sigma.psi[comp].c.size(); ++e)
                res.sigma.psi[comp].c[e] += w[i] * res.per_lambda[i].psi[comp].c[e];

    res.observed_order = std::numeric_limits<double>::quiet_NaN();
    if (cfg.lambdas.size() >= 3) {
        auto diff = [&](size_t a, size_t b) {
            double mx = 0.0, scale = 0.0;
            for (int comp = 0; comp < 4; ++comp)
                for (size_t e = 0; e < res.sigma.psi[comp].c.size(); ++e) {
                    mx = std::max(mx, std::abs(res.per_lambda[a].psi[comp].c[e] -
                                               res.per_lambda[b].psi[comp].c[e]));
                    scale = std::max(scale, std::abs(res.per_lambda[b].psi[comp].c[e]));
                }
            return std::pair{mx, scale};
        };
        const size_t n = cfg.lambdas.size();
        const auto [d1, s1] = diff(n - 3, n - 2);
        const auto [d2, s2] = diff(n - 2, n - 1);
        const double r = (cfg.lambdas[n - 2] - cfg.lambdas[n - 3]) /
                         (cfg.lambdas[n - 1] - cfg.lambdas[n - 2]);
        if (d2 > 1e-13 * std::max(s2, 1e-300) && d1 > 0.0 && r > 0.0 && r != 1.0)
            res.observed_order = std::log(d1 / d2) / std::log(r);
        (void)s1;
    }
    return res;
}

NullDatum trace_on_cone(const EvolutionHistory& h, const MetricModel& model) {
    if (h.cone.empty() || h.cone.size() != h.lambdas.size())
        throw std::invalid_argument("trace: empty or inconsistent history");
    if (h.T > model.T_max * (1.0 + 1e-12) + 1e-12)
        throw std::domain_error("trace: cone exits the model domain");
    const int lmax2 = h.cone[0][0].two_lmax;
    NullDatum out(2.0 * h.T, h.n, lmax2);
    out.mass = h.mass;
    out.charge = h.charge;
    out.phi = h.phi;
    std::vector<double> w{1.0};
    if (h.lambdas.size() > 1) w = richardson_weights(h.lambdas);
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t e = 0; e < out.psi1.c.size(); ++e) {
            out.psi1.c[e] += w[i] * h.cone[i][0].c[e];
            out.psi4.c[e] += w[i] * h.cone[i][3].c[e];
        }
    return out;
}

}  // namespace nc
