#include "nullcone/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double uniform_spacing(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double h = x[1] - x[0];
    for (size_t j = 1; j < x.size(); ++j)
        if (std::abs(x[j] - x[j - 1] - h) > 1e-9 * h)
            throw std::invalid_argument("diagnostics: slice grid must be uniform");
    return h;
}

// Slice measure factor (1/√2) R² sqrt(f) per node.
std::vector<double> slice_measure(const MetricModel& model, const std::vector<double>& x, int n) {
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) {
        const RadialProfile p = model.profile(x[j]);
        w[j] = kInvSqrt2 * p.r * p.r * std::sqrt(p.f);
    }
    return w;
}

cplx d4(const cplx* f, int j, int n, double h) {
    // n + 1 nodes; fourth order, one-sided near the ends.
    if (j >= 2 && j <= n - 2)
        return (f[j - 2] / 12.0 - 2.0 / 3 * f[j - 1] + 2.0 / 3 * f[j + 1] - f[j + 2] / 12.0) / h;
    if (j == 0)
        return (-25.0 / 12 * f[0] + 4.0 * f[1] - 3.0 * f[2] + 4.0 / 3 * f[3] - 0.25 * f[4]) / h;
    if (j == 1)
        return (-0.25 * f[0] - 5.0 / 6 * f[1] + 1.5 * f[2] - 0.5 * f[3] + f[4] / 12.0) / h;
    if (j == n - 1)
        return (-f[n - 4] / 12.0 + 0.5 * f[n - 3] - 1.5 * f[n - 2] + 5.0 / 6 * f[n - 1] +
                0.25 * f[n]) / h;
    return (0.25 * f[n - 4] - 4.0 / 3 * f[n - 3] + 3.0 * f[n - 2] - 4.0 * f[n - 1] +
            25.0 / 12 * f[n]) / h;
}

// Least squares fit y = c0 + c1 z + c2 z².
std::array<double, 3> quadratic_fit(const std::vector<double>& z, const std::vector<double>& y) {
    double A[3][4] = {};
    for (size_t i = 0; i < z.size(); ++i) {
        const double b[3] = {1.0, z[i], z[i] * z[i]};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) A[r][c] += b[r] * b[c];
            A[r][3] += b[r] * y[i];
        }
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        for (int c = 0; c < 4; ++c) std::swap(A[col][c], A[piv][c]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
        }
    }
    return {A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
}

}  // namespace

std::vector<double> quadrature_weights(int n, double h) {
    if (n < 0) throw std::invalid_argument("quadrature: negative interval count");
    std::vector<double> w(n + 1, 0.0);
    if (n == 0) return w;
    if (n == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    const int simpson = n % 2 == 0 ? n : n - 3;
    for (int i = 0; i < simpson; i += 2) {
        w[i] += h / 3;
        w[i + 1] += 4 * h / 3;
        w[i + 2] += h / 3;
    }
    if (simpson != n) {
        const int i = simpson;
        w[i] += 3 * h / 8;
        w[i + 1] += 9 * h / 8;
        w[i + 2] += 9 * h / 8;
        w[i + 3] += 3 * h / 8;
    }
    return w;
}

double slice_energy(const SliceState& s, const MetricModel& model, int upto) {
    if (s.tilt != 0.0) throw std::invalid_argument("slice_energy: only t = const slices");
    const int n = upto < 0 ? s.nodes() - 1 : upto;
    if (n >= s.nodes()) throw std::invalid_argument("slice_energy: range beyond the grid");
    if (n == 0) return 0.0;
    const double h = uniform_spacing(s.x);
    const auto q = quadrature_weights(n, h);
    const auto mu = slice_measure(model, s.x, n);
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
        double a = 0.0;
        for (const auto& f : s.psi)
            for (int m = 0; m < f.modes(); ++m) a += std::norm(f.at(m, j));
        acc += q[j] * mu[j] * a;
    }
    return acc;
}

EnergyReport isometry_report(const NullDatum& d, const SliceState& s, const MetricModel& model) {
    EnergyReport r;
    r.slice = slice_energy(s, model);
    r.cone = cone_flux(d, model);
    r.n_r = s.nodes() - 1;
    r.n_v = d.n_v;
    r.two_lmax = d.two_lmax();
    if (r.slice == 0.0 && r.cone == 0.0)
        r.gap = 0.0;
    else if (r.slice == 0.0)
        r.gap = std::numeric_limits<double>::infinity();
    else
        r.gap = std::abs(r.slice - r.cone) / r.slice;
    return r;
}

double h1_slice_norm(const SliceState& s, const MetricModel& model, const EvolutionConfig& cfg) {
    const int n = s.nodes() - 1;
    if (n < 4) throw std::invalid_argument("h1_slice_norm: need at least 5 nodes");
    const double h = uniform_spacing(s.x);
    const SliceState dt = assemble_rhs(s, cfg, model);
    const auto q = quadrature_weights(n, h);
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
        const RadialProfile p = model.profile(s.x[j]);
        const double sf = std::sqrt(p.f);
        const double base = kInvSqrt2 * sf;  // measure without R²
        double radial = 0.0, angular = 0.0;
        for (int c = 0; c < 4; ++c) {
            const SpectralSeries& f = s.psi[c];
            for (int m = 0; m < f.modes(); ++m) {
                const cplx a = f.at(m, j);
                const cplx dx = d4(f.row(m), j, n, h);
                const cplx tt = dt.psi[c].at(m, j);
                radial += std::norm(a) + (std::norm(dx) + std::norm(tt)) / p.f;
                const int tl = mode_lm(f.two_s, m).first;
                const double e1 = eth_factor(f.two_s, tl), e2 = ethbar_factor(f.two_s, tl);
                angular += 0.5 * (e1 * e1 + e2 * e2) * std::norm(a);
            }
        }
        acc += q[j] * base * (p.r * p.r * radial + angular);
    }
    return std::sqrt(acc);
}

double equivalence_ratio(const NullDatum& d, const SliceState& s, const MetricModel& model,
                         const EvolutionConfig& cfg) {
    const ConeSolution sol = solve_constraints(d, model);
    const double num = h_cone_norm(d, sol, model);
    const double den = h1_slice_norm(s, model, cfg);
    if (!(den > 0.0) || !(num > 0.0)) throw std::domain_error("equivalence: zero norm");
    return num / den;
}

EquivalenceBand equivalence_band(const std::vector<double>& ratios) {
    if (ratios.empty()) throw std::invalid_argument("equivalence: empty family");
    EquivalenceBand b;
    b.ratios = ratios;
    b.lo = *std::min_element(ratios.begin(), ratios.end());
    b.hi = *std::max_element(ratios.begin(), ratios.end());
    return b;
}

SourceEnergyReport source_energy_report(const CauchyResult& run, const SourceField& xi, const MetricModel& model) {
    const auto& snaps = run.snapshots;
    if (snaps.size() < 3) throw std::invalid_argument("source_energy_report: need at least three snapshots");
    if (run.history.cone.empty()) throw std::invalid_argument("source_energy_report: run must record the cone");
    const std::vector<double>& x = snaps[0].x;
    const double h = uniform_spacing(x);
    const int M = static_cast<int>(snaps.size()) - 1;
    const double T = snaps.back().t;
    const double dt = T / M;
    SourceEnergyReport r;
    std::vector<double> psi_e(M + 1), xi_e(M + 1);
    for (int i = 0; i <= M; ++i) {
        const double t = snaps[i].t;
        if (std::abs(t - i * dt) > 1e-9 * T) throw std::invalid_argument("source_energy_report: snapshots not uniform");
        const int n = static_cast<int>(std::lround(t / h));
        if (std::abs(n * h - t) > 1e-9 * h) throw std::invalid_argument("source_energy_report: snapshot time off the grid");
        SliceState xs(t, x, snaps[i].two_lmax());
        xi(t, x, xs.psi);
        psi_e[i] = slice_energy(snaps[i], model, n);
        xi_e[i] = slice_energy(xs, model, n);
    }
    const auto wt = quadrature_weights(M, dt);
    double rhs = 0.0;
    for (int i = 0; i <= M; ++i) rhs += wt[i] * (psi_e[i] + xi_e[i]);
    r.e_sigma_T = psi_e[M];
    r.e_cone = cone_flux(trace_on_cone(run.history, model), model);
    r.lhs1 = std::abs(r.e_sigma_T - r.e_cone);
    r.rhs1 = rhs;
    r.c1 = rhs > 0.0 ? r.lhs1 / rhs : 0.0;
    r.c2 = 0.0;
    for (int i = 0; i <= M; ++i) {
        const auto w = quadrature_weights(M - i, dt);
        double tail = 0.0;
        for (int k = 0; k <= M - i; ++k) tail += w[k] * xi_e[i + k];
        r.t.push_back(i * dt);
        r.e_sigma_t.push_back(psi_e[i]);
        r.xi_tail.push_back(tail);
        if (i > 0 && i < M) {
            const double den = r.e_sigma_T + tail;
            if (den > 0.0) r.c2 = std::max(r.c2, psi_e[i] / den);
        }
    }
    return r;
}

AsymptoticsFit asymptotics_fit(const MetricModel& model, double lo, double hi, int samples,
                               double residual_threshold) {
    if (!(lo > 0.0 && hi > lo) || samples < 4) throw std::invalid_argument("asymptotics: bad range");
    AsymptoticsFit fit;
    fit.samples = samples;
    std::vector<double> z, yr, yk;
    for (int i = 0; i < samples; ++i) {
        const double x = model.T_max * lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
        const ConeCoefficients c = cone_coefficients(model, x);
        const double k = gauss_curvature(model, x);
        z.push_back(c.R * c.R);
        yr.push_back(c.R * c.rho);
        yk.push_back(c.R * c.R * k);
        if (i == 0) fit.r2k_smallest = yk.back();
    }
    const auto a = quadratic_fit(z, yr);
    const auto b = quadratic_fit(z, yk);
    fit.rrho_limit = a[0];
    fit.K = -a[1];
    fit.r2k_limit = b[0];
    double ss = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const double e = yr[i] - (a[0] + a[1] * z[i] + a[2] * z[i] * z[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / z.size());
    fit.flagged = !(fit.residual <= residual_threshold);
    return fit;
}

ConvergenceTable convergence_table(const std::string& tag, const std::vector<double>& resolution,
                                   const std::vector<double>& error) {
    if (resolution.size() != error.size()) throw std::invalid_argument("convergence: size mismatch");
    ConvergenceTable t;
    t.tag = tag;
    for (size_t i = 0; i < resolution.size(); ++i) {
        ConvergenceRow r;
        r.resolution = resolution[i];
        r.error = error[i];
        r.order = std::numeric_limits<double>::quiet_NaN();
        if (i > 0 && error[i] > 0.0 && error[i - 1] > 0.0)
            r.order = std::log(error[i - 1] / error[i]) / std::log(resolution[i] / resolution[i - 1]);
        t.rows.push_back(r);
    }
    return t;
}

OrderVerdict assess_order(const ConvergenceTable& t, double min_order, double noise_floor) {
    OrderVerdict v;
    if (t.rows.empty()) return v;
    v.order = t.rows.back().order;
    v.noise_floor = t.rows.back().error <= noise_floor;
    v.pass = v.noise_floor || (std::isfinite(v.order) && v.order >= min_order);
    return v;
}

}  // namespace nc
