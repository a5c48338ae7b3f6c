#pragma once
// Energies, H¹ norms, sides of the sourced energy inequalities, near-vertex
// asymptotics fits and convergence tables.
//
// Slice measure: dσ_Σ = (1/√2) R² sqrt(f) dΩ dx; cone measure (N/2) R² dΩ dv.
// Angular integrals are exact through Parseval on the spectral coefficients.

#include <string>
#include <vector>

#include "nullcone/evolution.hpp"

namespace nc {

// Composite weights on n + 1 uniform nodes: Simpson, with a 3/8 panel at the
// end when n is odd (n = 1 falls back to the trapezoid).
std::vector<double> quadrature_weights(int n, double h);

// ∫|Ψ|² dσ over the nodes 0..upto (all nodes when upto < 0).
double slice_energy(const SliceState& s, const MetricModel& model, int upto = -1);

struct EnergyReport {
    double slice = 0.0;
    double cone = 0.0;
    double gap = 0.0;  // |E_Σ - E_cone| / E_Σ, 0 when both vanish
    int n_r = 0, n_v = 0, two_lmax = 0;
};
EnergyReport isometry_report(const NullDatum& d, const SliceState& s, const MetricModel& model);

// (‖Ψ‖² + Σ_α ‖∇_{e_α} Ψ‖²)^(1/2) with e0 = f^(-1/2) ∂t, e1 = f^(-1/2) ∂x and
// the unit angular pair acting through ð, ð'. ∂t comes from assemble_rhs.
double h1_slice_norm(const SliceState& s, const MetricModel& model, const EvolutionConfig& cfg);

struct EquivalenceBand {
    std::vector<double> ratios;
    double lo = 0.0, hi = 0.0;
};
double equivalence_ratio(const NullDatum& d, const SliceState& s, const MetricModel& model,
                         const EvolutionConfig& cfg);
EquivalenceBand equivalence_band(const std::vector<double>& ratios);

struct SourceEnergyReport {
    double e_sigma_T = 0.0, e_cone = 0.0;
    double lhs1 = 0.0, rhs1 = 0.0, c1 = 0.0;  // |E_ΣT - E_cone| <= c1 ∫∫(|Ψ|² + |Ξ|²)
    double c2 = 0.0;                          // E_Σt <= c2 (E_ΣT + ∫_t^T |Ξ|²)
    std::vector<double> t, e_sigma_t, xi_tail;
};
// run must come from cauchy_run with record_cone and uniformly spaced
// snapshots at multiples of the grid spacing, the first at t = 0 and the
// last at the final time.
SourceEnergyReport source_energy_report(const CauchyResult& run, const SourceField& xi, const MetricModel& model);

struct AsymptoticsFit {
    double K = 0.0;           // R ρ = -(1 + K R²) + O(R⁴)
    double rrho_limit = 0.0;  // extrapolated R ρ at R = 0
    double r2k_limit = 0.0;   // extrapolated R² k at R = 0
    double r2k_smallest = 0.0;
    double residual = 0.0;    // rms of the R ρ fit
    bool flagged = false;
    int samples = 0;
};
// Samples x log-spaced in [lo, hi] T_max.
AsymptoticsFit asymptotics_fit(const MetricModel& model, double lo = 1e-3, double hi = 0.1,
                               int samples = 24, double residual_threshold = 1e-7);

struct ConvergenceRow {
    double resolution = 0.0;
    double error = 0.0;
    double order = 0.0;  // NaN on the first row
};
struct ConvergenceTable {
    std::string tag;
    std::vector<ConvergenceRow> rows;
};
ConvergenceTable convergence_table(const std::string& tag, const std::vector<double>& resolution,
                                   const std::vector<double>& error);

struct OrderVerdict {
    double order = 0.0;
    bool noise_floor = false;  // finest error already at round-off level
    bool pass = false;
};
// Pass when the last observed order reaches min_order, or when the finest
// error is below noise_floor (no order is measurable there).
OrderVerdict assess_order(const ConvergenceTable& t, double min_order, double noise_floor);

}  // namespace nc
