#pragma once
// The constraint operator K on the cone {t_s = x}, v = t_s + x = 2x.
//
// Hatted unknowns in the GradientL dyad (N = lapse, x = v/2):
//   φ̂1 = x sqrt(N/2) Ψ2,  χ̂1' = x sqrt(N/2) Ψ3,
//   φ̂0 = sqrt(2/N) Ψ1,    χ̂0' = -sqrt(2/N) Ψ4.
// Transport along the generator, ∂_v = (N^2/4) ℒ:
//   ∂_v φ̂1  = (N²/4)[(γ' + b + iqℒΦ) φ̂1  + (ð̂' + π̂) φ̂0  - (m/√2) x χ̂0']
//   ∂_v χ̂1' = (N²/4)[(γ̄' + b + iqℒΦ) χ̂1' + (ð̂ + π̄̂) χ̂0' - (m/√2) x φ̂0]
// with b = ∇_ℒx / x + ρ̂ the regularized bracket and ð̂ = -x ð_unit / (√2 R).
// Both start from zero at the vertex; the other solutions blow up like 1/x.

#include <functional>
#include <utility>

#include "nullcone/fields.hpp"
#include "nullcone/geometry.hpp"

namespace nc {

struct ConeSolution {
    double v_max = 0.0;
    int n_v = 0;
    std::array<SpectralSeries, 4> psi;
    SpectralSeries phi1_hat, chi1_hat;  // spins -1/2, +1/2
    SpectralField psi2_vertex, psi3_vertex;
    double N_vertex = 1.4142135623730951;

    double v(int j) const { return v_max * j / n_v; }
    double dv() const { return v_max / n_v; }
};

struct ConstraintOptions {
    int vertex_stencil = 5;  // one-sided derivative width for the vertex limits: 3 or 5
};

// Cone coefficient provider; defaults to geometry's cone_coefficients.
using ConeProfile = std::function<ConeCoefficients(double x)>;

ConeSolution solve_constraints(const NullDatum& d, const MetricModel& model,
                               const ConstraintOptions& opt = {});
// Same solve with an explicit coefficient profile and bracket limit; throws
// std::domain_error when the bracket has no finite limit at the vertex.
ConeSolution solve_constraints(const NullDatum& d, const ConeProfile& profile,
                               double bracket_limit, const ConstraintOptions& opt = {});

std::pair<SpectralField, SpectralField> vertex_limits(const ConeSolution& sol, int stencil = 5);

enum class LTag { n, l, m, mbar };
// Output spins (doubled): n, l -> (+1, -1); m -> (+3, +1); m̄ -> (-1, -3).
std::pair<SpectralSeries, SpectralSeries> apply_L(LTag tag, const NullDatum& d,
                                                  const ConeSolution& sol,
                                                  const MetricModel& model);

// Max over the sampled directions of the matching defect, minimized over the
// global dyad sign.
double matching_residual(const ConeSolution& sol, const ConjugateStructure& cs);
// Same with both terms reported separately, for the sign that attains the min.
std::pair<double, double> matching_terms(const ConeSolution& sol, const ConjugateStructure& cs);

// ∫ w(v) Σ_modes |a(v)|^2 dv with dσ = (N/2) R^2 dΩ dv (composite Simpson).
double cone_integral(const std::vector<const SpectralSeries*>& fields, double v_max, int n_v,
                     const MetricModel& model);
double cone_flux(const NullDatum& d, const MetricModel& model);
double h_cone_norm(const NullDatum& d, const ConeSolution& sol, const MetricModel& model);

// Composite Simpson weights on n + 1 uniform nodes (n even).
std::vector<double> simpson_weights(int n, double h);

}  // namespace nc
