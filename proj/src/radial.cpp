#include "nullcone/radial.hpp"

#include <cmath>
#include <stdexcept>

#include "nullcone/kernels.hpp"

namespace nc::radial {

namespace {

constexpr double kHb[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
constexpr double kRows[4][6] = {{-24.0 / 17, 59.0 / 34, -4.0 / 17, -3.0 / 34, 0, 0},
                                {-0.5, 0, 0.5, 0, 0, 0},
                                {4.0 / 43, -59.0 / 86, 0, 59.0 / 86, -4.0 / 43, 0},
                                {3.0 / 98, 0, -59.0 / 98, 0, 32.0 / 49, -4.0 / 49}};

// Upwind-biased third order stencils, offsets -1..3 and -3..1.
constexpr double kDown[5] = {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12};
constexpr double kUp[5] = {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4};

}  // namespace

std::array<double, 4> sbp_norm_boundary() { return {kHb[0], kHb[1], kHb[2], kHb[3]}; }

std::vector<std::vector<double>> sbp_derivative_dense(int J) {
    if (J < 8) throw std::invalid_argument("SBP operator needs at least 9 nodes");
    std::vector<std::vector<double>> D(J + 1, std::vector<double>(J + 1, 0.0));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j) {
            D[i][j] = kRows[i][j];
            D[J - i][J - j] = -kRows[i][j];
        }
    for (int i = 4; i <= J - 4; ++i) {
        D[i][i - 2] = 1.0 / 12;
        D[i][i - 1] = -2.0 / 3;
        D[i][i + 1] = 2.0 / 3;
        D[i][i + 2] = -1.0 / 12;
    }
    return D;
}

ModeCoefficients mode_coefficients(const std::vector<double>& sqrt_f_over_R,
                                   const std::vector<double>& sqrt_f, double k, double mass,
                                   const std::vector<double>& qphi) {
    ModeCoefficients c;
    c.k = k;
    const size_t n = sqrt_f.size();
    c.wk.resize(n);
    c.mass.resize(n);
    for (size_t j = 0; j < n; ++j) {
        c.wk[j] = k * sqrt_f_over_R[j];
        c.mass[j] = mass * sqrt_f[j];
    }
    bool any = false;
    for (double q : qphi) any = any || q != 0.0;
    if (any) c.qphi = qphi;
    return c;
}

ModeOperator ModeOperator::tilted(int J, double dx, double lambda, double dissipation) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("tilt must lie in [0, 1)");
    if (J < 12) throw std::invalid_argument("radial grid too small");
    ModeOperator op;
    op.scheme_ = Scheme::Tilted;
    op.J_ = J;
    op.dx_ = dx;
    op.lambda_ = lambda;
    for (int c = 0; c < 4; ++c) op.scale_[c] = 1.0 / (1.0 + lambda * kGamma[c]);

    const int n = J + 1;
    std::vector<double> dband(7 * n, 0.0), aband(7 * n, 0.0);
    auto put = [&](std::vector<double>& b, int row, int col, double v) {
        b[7 * row + (col - row + 3)] += v;
    };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j)
            if (kRows[i][j] != 0.0) {
                put(dband, i, j, kRows[i][j]);
                put(dband, J - i, J - j, -kRows[i][j]);
            }
    for (int i = 4; i <= J - 4; ++i) {
        put(dband, i, i - 2, 1.0 / 12);
        put(dband, i, i - 1, -2.0 / 3);
        put(dband, i, i + 1, 2.0 / 3);
        put(dband, i, i + 2, -1.0 / 12);
    }
    // D3ᵀ D3 with D3 rows (-1, 3, -3, 1)
    const double d3[4] = {-1.0, 3.0, -3.0, 1.0};
    for (int r = 0; r <= J - 3; ++r)
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) put(aband, r + p, r + q, d3[p] * d3[q]);
    for (int i = 0; i < n; ++i) {
        double h = 1.0;
        if (i < 4) h = kHb[i];
        if (J - i < 4) h = kHb[J - i];
        for (int o = 0; o < 7; ++o) aband[7 * i + o] *= -dissipation / (dx * h);
    }
    for (int g = 0; g < 2; ++g) {
        const double gamma = g == 0 ? 1.0 : -1.0;
        const double s = 1.0 / (1.0 + lambda * gamma);
        auto& b = op.band_[g];
        b.resize(7 * n);
        for (int i = 0; i < 7 * n; ++i) b[i] = (gamma * dband[i] / dx + aband[i]) * s;
    }
    op.j_lo_ = 4;
    op.j_hi_ = J - 3;
    for (int i = 0; i < 4; ++i) op.explicit_rows_.push_back(i);
    for (int i = J - 3; i <= J; ++i) op.explicit_rows_.push_back(i);
    return op;
}

ModeOperator ModeOperator::cauchy(int J, double dx, int parity) {
    if (J < 8) throw std::invalid_argument("radial grid too small");
    ModeOperator op;
    op.scheme_ = Scheme::Cauchy;
    op.J_ = J;
    op.dx_ = dx;
    op.lambda_ = 0.0;
    op.parity_ = parity >= 0 ? 1 : -1;
    op.scale_ = {1.0, 1.0, 1.0, 1.0};
    const int n = J + 1;
    for (int g = 0; g < 2; ++g) {
        auto& b = op.band_[g];
        b.assign(7 * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int o = 0; o < 5; ++o) {
                if (g == 0)
                    b[7 * i + 2 + o] = kDown[o] / dx;
                else
                    b[7 * i + o] = -kUp[o] / dx;
            }
    }
    op.j_lo_ = 1;
    op.j_hi_ = J - 2;
    return op;
}

const double* ModeOperator::band(int gamma_index, int j) const {
    return band_[gamma_index].data() + 7 * j;
}

void ModeOperator::apply(ModeState& u, const ModeCoefficients& c, ModeState& out,
                         const ModeState* source) const {
    const int n = J_ + 1;
    if (scheme_ == Scheme::Cauchy) {
        static constexpr int partner[4] = {1, 0, 3, 2};
        for (int comp = 0; comp < 4; ++comp)
            for (int p = 0; p < 2; ++p) {
                double* dst = u.row(2 * comp + p);
                const double* src = u.row(2 * partner[comp] + p);
                for (int g = 1; g <= kGhost; ++g) dst[-g] = parity_ * src[g];
            }
    }
    for (int comp = 0; comp < 4; ++comp) {
        const int g = kGamma[comp] > 0 ? 0 : 1;
        for (int p = 0; p < 2; ++p) {
            const double* x = u.row(2 * comp + p);
            double* y = out.row(2 * comp + p);
            kernels::stencil7(band(g, j_lo_), x, y, j_lo_, j_hi_);
            for (int j : explicit_rows_) kernels::stencil7(band(g, j), x, y, j, j + 1);
        }
    }
    auto row = [&](int comp, int p) { return u.row(2 * comp + p); };
    for (int p = 0; p < 2; ++p) {
        const double s0 = scale_[0], s1 = scale_[1], s2 = scale_[2], s3 = scale_[3];
        kernels::scaled_mul_add(-s0, c.wk.data(), row(1, p), out.row(0 + p), n);
        kernels::scaled_mul_add(s0, c.mass.data(), row(2, p), out.row(0 + p), n);
        kernels::scaled_mul_add(s1, c.wk.data(), row(0, p), out.row(2 + p), n);
        kernels::scaled_mul_add(s1, c.mass.data(), row(3, p), out.row(2 + p), n);
        kernels::scaled_mul_add(s2, c.wk.data(), row(3, p), out.row(4 + p), n);
        kernels::scaled_mul_add(-s2, c.mass.data(), row(0, p), out.row(4 + p), n);
        kernels::scaled_mul_add(-s3, c.wk.data(), row(2, p), out.row(6 + p), n);
        kernels::scaled_mul_add(-s3, c.mass.data(), row(1, p), out.row(6 + p), n);
    }
    if (!c.qphi.empty())
        for (int comp = 0; comp < 4; ++comp) {
            kernels::scaled_mul_add(-scale_[comp], c.qphi.data(), row(comp, 1),
                                    out.row(2 * comp), n);
            kernels::scaled_mul_add(scale_[comp], c.qphi.data(), row(comp, 0),
                                    out.row(2 * comp + 1), n);
        }
    if (source)
        for (int r = 0; r < 8; ++r) kernels::axpy(scale_[r / 2], source->row(r), out.row(r), n);

    for (int r = 0; r < 8; ++r) out.row(r)[0] = 0.0;
    if (scheme_ == Scheme::Tilted) {
        for (int p = 0; p < 2; ++p) {
            out.row(0 + p)[J_] = 0.0;
            out.row(6 + p)[J_] = 0.0;
        }
    } else {
        for (int r = 0; r < 8; ++r)
            for (int j = J_ - 2; j <= J_; ++j) out.row(r)[j] = 0.0;
    }
}

double stable_step(double cfl, double lambda, double dx, double k) {
    if (!(cfl > 0.0) || cfl > 1.0) throw std::invalid_argument("cfl must lie in (0, 1]");
    return cfl * (1.0 - lambda) * dx * std::min(1.0, 2.7 / (k + 0.3));
}

namespace {

void hermite_into(double s, double dt, const double* u0, const double* f0, const double* u1,
                  const double* f1, double* out, int n) {
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = (s3 - 2 * s2 + s) * dt;
    const double h01 = -2 * s3 + 3 * s2, h11 = (s3 - s2) * dt;
    for (int j = 0; j < n; ++j) out[j] = h00 * u0[j] + h10 * f0[j] + h01 * u1[j] + h11 * f1[j];
}

cplx hermite_node(double s, double dt, const ModeState& u0, const ModeState& f0,
                  const ModeState& u1, const ModeState& f1, int comp, int j) {
    double v[2];
    for (int p = 0; p < 2; ++p) {
        const int r = 2 * comp + p;
        hermite_into(s, dt, u0.row(r) + j, f0.row(r) + j, u1.row(r) + j, f1.row(r) + j, v + p, 1);
    }
    return {v[0], v[1]};
}

}  // namespace

void integrate(const ModeOperator& op, const ModeCoefficients& c, ModeState& u,
               const IntegrationPlan& plan) {
    if (plan.steps < 1) throw std::invalid_argument("step count must be positive");
    const int J = op.J();
    const double dt = (plan.tau_end - plan.tau0) / plan.steps;
    ModeState k1(J), k2(J), k3(J), k4(J), stage(J), next(J), src(J), snap(J);
    const int total = static_cast<int>(u.raw().size());
    const bool has_src = static_cast<bool>(plan.source);

    auto eval = [&](double tau, ModeState& state, ModeState& out) {
        if (has_src) {
            src.zero();
            plan.source(tau, src);
        }
        op.apply(state, c, out, has_src ? &src : nullptr);
    };

    // Per sampler: node order sorted by target time.
    std::vector<std::vector<int>> order(plan.samplers.size());
    std::vector<size_t> cursor(plan.samplers.size(), 0);
    for (size_t i = 0; i < plan.samplers.size(); ++i) {
        auto& o = order[i];
        const auto& tg = plan.samplers[i]->target;
        for (int j = 0; j < static_cast<int>(tg.size()); ++j)
            if (!std::isnan(tg[j])) o.push_back(j);
        std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return tg[a] < tg[b]; });
    }
    size_t snap_cursor = 0;

    eval(plan.tau0, u, k1);
    for (int step = 0; step < plan.steps; ++step) {
        const double tau = plan.tau0 + step * dt;
        const double tau1 = step + 1 == plan.steps ? plan.tau_end : plan.tau0 + (step + 1) * dt;
        const bool last = step + 1 == plan.steps;
        double* uu = u.raw().data();
        kernels::axpy_to(uu, 0.5 * dt, k1.raw().data(), stage.raw().data(), total);
        eval(tau + 0.5 * dt, stage, k2);
        kernels::axpy_to(uu, 0.5 * dt, k2.raw().data(), stage.raw().data(), total);
        eval(tau + 0.5 * dt, stage, k3);
        kernels::axpy_to(uu, dt, k3.raw().data(), stage.raw().data(), total);
        eval(tau1, stage, k4);
        double* nn = next.raw().data();
        kernels::axpy_to(uu, dt / 6, k1.raw().data(), nn, total);
        kernels::axpy(dt / 3, k2.raw().data(), nn, total);
        kernels::axpy(dt / 3, k3.raw().data(), nn, total);
        kernels::axpy(dt / 6, k4.raw().data(), nn, total);
        // k4 is free now; reuse it for f(next).
        eval(tau1, next, k4);

        auto inside = [&](double t) { return t >= tau && (t < tau1 || last); };
        for (size_t i = 0; i < plan.samplers.size(); ++i) {
            NodeSampler& smp = *plan.samplers[i];
            const size_t n = smp.target.size();
            while (cursor[i] < order[i].size() && inside(smp.target[order[i][cursor[i]]])) {
                const int j = order[i][cursor[i]++];
                const double s = (smp.target[j] - tau) / dt;
                for (int comp = 0; comp < 4; ++comp)
                    smp.value[comp * n + j] = hermite_node(s, dt, u, k1, next, k4, comp, j);
            }
        }
        while (snap_cursor < plan.snapshot_times.size() &&
               inside(plan.snapshot_times[snap_cursor])) {
            const double ts = plan.snapshot_times[snap_cursor++];
            hermite_into((ts - tau) / dt, dt, uu, k1.raw().data(), nn, k4.raw().data(),
                         snap.raw().data(), total);
            if (plan.on_snapshot) plan.on_snapshot(ts, snap);
        }
        std::swap(u.raw(), next.raw());
        std::swap(k1.raw(), k4.raw());
    }
}

}  // namespace nc::radial
