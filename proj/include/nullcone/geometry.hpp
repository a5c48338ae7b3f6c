#pragma once
// Static spherically symmetric backgrounds A(r) dt^2 - B(r) dr^2 - r^2 dΩ^2.
//
// Solver coordinates: t_s = k t and x = k ∫0^r sqrt(B/A) dr with k = sqrt(A(0)),
// so that g = f (dt_s^2 - dx^2) - R^2 dΩ^2 with f = A/k^2, R = r (areal) and
// lapse N = sqrt(2 f), N(vertex) = sqrt(2). The cone through the vertex is
// {t_s = x}; v = t_s + x, u = t_s - x. Everything below the model interface
// works in (t_s, x, θ, φ); "radius" means x unless stated otherwise.

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace nc {

using cplx = std::complex<double>;

struct MetricSpec {
    enum class Kind { Minkowski, StaticSpherical };
    Kind kind = Kind::Minkowski;
    // Coefficients of polynomials in r^2: A(r) = Σ A[i] r^(2i).
    std::vector<double> A{1.0};
    std::vector<double> B{1.0};
    double T_max = 1.0;
};

// Radial profile along x; all derivatives with respect to x.
struct RadialProfile {
    double x = 0.0;
    double r = 0.0;  // areal radius R(x)
    double f = 1.0, f_x = 0.0;
    double R_x = 1.0;
    double N = 1.4142135623730951, N_x = 0.0;
};

class MetricModel {
public:
    MetricSpec::Kind kind = MetricSpec::Kind::Minkowski;
    std::vector<double> A{1.0}, B{1.0};
    double T_max = 1.0;
    double scale_k = 1.0;

    bool flat() const { return kind == MetricSpec::Kind::Minkowski; }
    double A_of_r(double r) const;
    double dA_dr(double r) const;
    double B_of_r(double r) const;
    double dB_dr(double r) const;

    // x(r) by composite Gauss–Legendre; r(x) by Newton on it.
    double x_of_r(double r) const;
    double r_of_x(double x) const;
    RadialProfile profile(double x) const;

    // Metric components g_ab in (t, x, θ, φ) at areal-radius-independent input x.
    std::array<double, 4> metric_diag(double x, double theta) const;
};

MetricModel build_metric(const MetricSpec& spec);

struct SlicePoint {
    double t = 0.0;
    double x = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

enum class TetradChoice { Adapted, GradientL, Hatted };

struct NullTetrad {
    TetradChoice choice = TetradChoice::Adapted;
    // Contravariant components in (t, x, θ, φ): l, n, m, m̄.
    std::array<std::array<cplx, 4>, 4> vec{};
    double N = 0.0;
    std::array<double, 4> shift{};  // angular shift; identically zero here

    const std::array<cplx, 4>& l() const { return vec[0]; }
    const std::array<cplx, 4>& n() const { return vec[1]; }
    const std::array<cplx, 4>& m() const { return vec[2]; }
    const std::array<cplx, 4>& mbar() const { return vec[3]; }
};

// Throws std::domain_error outside D_T (0 <= x <= t <= T, with a one
// stencil-width enlargement tolerance).
NullTetrad tetrad_at(const MetricModel& model, const SlicePoint& p, TetradChoice choice);
cplx metric_product(const MetricModel& model, const SlicePoint& p, const std::array<cplx, 4>& a,
                    const std::array<cplx, 4>& b);

struct SpinCoefficientSet {
    cplx kappa, sigma, rho, tau, epsilon, beta, alpha, gamma, pi, mu, lambda_c, nu;
    TetradChoice choice = TetradChoice::Adapted;
    SlicePoint at;
};

enum class SpinMethod { Auto, ClosedForm, FiniteDifference };

// Auto: closed forms for Minkowski, finite differences otherwise. Hatted
// tetrads are not normalized and are rejected.
SpinCoefficientSet spin_coefficients(const MetricModel& model, const SlicePoint& p,
                                     TetradChoice choice, SpinMethod method = SpinMethod::Auto);

// Default floor below which pointwise spin coefficients refuse to evaluate.
inline constexpr double kRadiusFloor = 1e-6;

double fd_step(double x);

// Gauss curvature of the section {t, x fixed}; Brioschi from the induced
// 2-metric for the curved family, 1/R^2 closed form for Minkowski.
double gauss_curvature(const MetricModel& model, double x);
double gauss_curvature_brioschi(const MetricModel& model, double x);

struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

struct ConjugateStructure {
    std::vector<Direction> omega, omega_prime;
    std::vector<double> phase;  // θ(ω) principal value in (-π, π]
    double max_involution_error = 0.0;
    double max_phase_asymmetry = 0.0;
};

ConjugateStructure conjugate_structure(const MetricModel& model,
                                       const std::vector<Direction>& sample);

struct GhpWeight {
    int r_prime = 0, r = 0, t_prime = 0, t = 0;
    int p() const { return r_prime - r; }
    int q() const { return t_prime - t; }
    // Doubled so that half-integers stay exact.
    int two_spin() const { return p() - q(); }
    int two_boost() const { return p() + q(); }
    GhpWeight operator+(const GhpWeight& o) const {
        return {r_prime + o.r_prime, r + o.r, t_prime + o.t_prime, t + o.t};
    }
};

// Cone profile needed by the constraint transport, in the GradientL frame.
struct ConeCoefficients {
    double x = 0.0;
    double N = 0.0;
    double nabla_L_r = 0.0;  // ∇_ℒ x
    double rho = 0.0;        // ρ̂ = ρ for ℒ
    cplx gamma_p = 0.0;      // γ' = -ε of the GradientL dyad
    cplx pi_hat = 0.0;       // x · π
    double R = 0.0, R_x = 1.0;
};

ConeCoefficients cone_coefficients(const MetricModel& model, double x);
// lim_{x→0} (∇_ℒ r / r + ρ̂), analytic: -sqrt(2) ∇_ℒ N at the vertex.
double bracket_vertex_limit(const MetricModel& model);

}  // namespace nc
