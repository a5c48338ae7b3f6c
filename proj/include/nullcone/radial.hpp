#pragma once
// Per-mode radial evolution in rescaled variables u = R f^(1/4) Ψ.
//
// For the mode (l, m), k = l + 1/2, w = sqrt(f)/R and M = m_e sqrt(f):
//   ∂t u1 =  ∂x u1 - wk u2 + M u3
//   ∂t u2 = -∂x u2 + wk u1 + M u4
//   ∂t u3 = -∂x u3 + wk u4 - M u1
//   ∂t u4 =  ∂x u4 - wk u3 - M u2
// plus i q Φ_t u. Smooth solutions obey the parity relation
//   (u1, u2, u3, u4)(-x) = (-1)^k (u2, u1, u4, u3)(x).
//
// Tilted scheme: τ = t - λ x, (1 + λγ) ∂τ u = γ ∂x u + B u, with the 2-4
// summation-by-parts first derivative, Kreiss–Oliger type dissipation built
// from the same norm, injection u = 0 at x = 0 and frozen incoming values at
// the outer node. Cauchy scheme (λ = 0): upwind-biased stencils with parity
// ghosts at the origin and a frozen three-node outer buffer.

#include <algorithm>
#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace nc::radial {

using cplx = std::complex<double>;

inline constexpr int kGhost = 3;
inline constexpr std::array<int, 4> kGamma{1, -1, -1, 1};

// Eight rows (component-major, real part then imaginary part) over nodes
// 0..J, each padded with kGhost cells on both sides.
class ModeState {
public:
    ModeState() = default;
    explicit ModeState(int J) : J_(J), stride_(J + 1 + 2 * kGhost), data_(8 * stride_, 0.0) {}

    int J() const { return J_; }
    int nodes() const { return J_ + 1; }
    double* row(int r) { return data_.data() + r * stride_ + kGhost; }
    const double* row(int r) const { return data_.data() + r * stride_ + kGhost; }
    cplx get(int comp, int j) const { return {row(2 * comp)[j], row(2 * comp + 1)[j]}; }
    void set(int comp, int j, cplx v) {
        row(2 * comp)[j] = v.real();
        row(2 * comp + 1)[j] = v.imag();
    }
    void zero() { std::fill(data_.begin(), data_.end(), 0.0); }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

private:
    int J_ = 0, stride_ = 0;
    std::vector<double> data_;
};

// Node-wise coefficients of B for one mode.
struct ModeCoefficients {
    double k = 1.0;
    std::vector<double> wk;    // k sqrt(f)/R, zero at x = 0
    std::vector<double> mass;  // m_e sqrt(f)
    std::vector<double> qphi;  // q Φ_t; empty when uncharged
};

ModeCoefficients mode_coefficients(const std::vector<double>& sqrt_f_over_R,
                                   const std::vector<double>& sqrt_f, double k, double mass,
                                   const std::vector<double>& qphi);

enum class Scheme { Tilted, Cauchy };

class ModeOperator {
public:
    static ModeOperator tilted(int J, double dx, double lambda, double dissipation);
    // parity = (-1)^k for the ghost reflection at the origin.
    static ModeOperator cauchy(int J, double dx, int parity);

    Scheme scheme() const { return scheme_; }
    int J() const { return J_; }
    double dx() const { return dx_; }
    double lambda() const { return lambda_; }
    // 1 / (1 + λ γ_c)
    double scale(int comp) const { return scale_[comp]; }

    // out = ∂τ u. Fills the ghost cells of u (Cauchy). The source, if given,
    // is added before the boundary treatment with the same 1/(1 + λγ) factor.
    void apply(ModeState& u, const ModeCoefficients& c, ModeState& out,
               const ModeState* source = nullptr) const;

    // Band coefficients of row j for the derivative part (7 entries, offsets -3..3).
    const double* band(int gamma_index, int j) const;

private:
    Scheme scheme_ = Scheme::Tilted;
    int J_ = 0;
    double dx_ = 0.0, lambda_ = 0.0;
    int parity_ = 1;
    int j_lo_ = 1, j_hi_ = 0;        // interior rows [j_lo_, j_hi_) share band row j_lo_
    std::array<double, 4> scale_{};
    std::array<std::vector<double>, 2> band_;  // index 0: γ = +1, 1: γ = -1
    std::vector<int> explicit_rows_;
};

// Dense output target for one component set: node j is sampled at τ = target[j]
// (NaN skips the node). Values are stored comp-major, value[c * n + j].
struct NodeSampler {
    std::vector<double> target;
    std::vector<cplx> value;
    explicit NodeSampler(std::vector<double> t = {})
        : target(std::move(t)), value(4 * target.size(), cplx(0.0, 0.0)) {}
    int nodes() const { return static_cast<int>(target.size()); }
    cplx at(int comp, int j) const { return value[comp * target.size() + j]; }
};

using SourceFn = std::function<void(double tau, ModeState& src)>;
using SnapshotFn = std::function<void(double tau, const ModeState& u)>;

struct IntegrationPlan {
    double tau0 = 0.0;
    double tau_end = 1.0;
    int steps = 1;
    std::vector<NodeSampler*> samplers;
    std::vector<double> snapshot_times;  // ascending, within [tau0, tau_end]
    SnapshotFn on_snapshot;
    SourceFn source;
};

// Classical RK4 with cubic Hermite dense output. On return u holds the state
// at tau_end.
void integrate(const ModeOperator& op, const ModeCoefficients& c, ModeState& u,
               const IntegrationPlan& plan);

// Step size rule: cfl (1 - λ) dx min(1, 2.7 / (k + 0.3)).
double stable_step(double cfl, double lambda, double dx, double k);

// Collocated SBP 2-4 first derivative: norm diagonal and boundary closure.
std::array<double, 4> sbp_norm_boundary();
std::vector<std::vector<double>> sbp_derivative_dense(int J);

}  // namespace nc::radial
