#pragma once
// Evolution off the cone: Cauchy problems on t = const and on the opened
// cones {t = λx}, the Goursat solve by λ -> 1 extrapolation, and the trace
// of an evolved field on the cone {t = x}.
//
// Internally every angular mode evolves independently in u = R f^(1/4) Ψ
// (see radial.hpp). Modes whose data vanish (below mode_cutoff relative to
// the largest mode) are skipped; by linearity they stay zero.

#include <functional>
#include <vector>

#include "nullcone/constraints.hpp"
#include "nullcone/fields.hpp"
#include "nullcone/geometry.hpp"

namespace nc {

struct ExtensionRule {
    // Taylor continuation of Ψ1, Ψ4 from v = 2T (order 0 is the constant
    // continuation), blended back to the constant over the last blend_fraction
    // of the extended range with the C² smoothstep.
    int order = 3;
    double blend_fraction = 0.1;
};

struct EvolutionConfig {
    double mass = 0.0;
    double charge = 0.0;
    Potential phi;
    double T = 1.0;
    int n_r = 64;
    int two_lmax = 9;
    double cfl = 0.5;
    std::vector<double> lambdas{0.9, 0.95, 0.975};
    // A single λ is accepted (without extrapolation) only when 1 - λ is below this.
    double single_lambda_gap = 0.01;
    double dissipation = 1.0 / 24.0;
    int margin = 16;            // enlargement of the λ-cone grid past T/λ, in nodes
    double buffer_speed = 1.5;  // bound on numerical signal speed in the Cauchy buffer
    double mode_cutoff = 1e-13;
    ExtensionRule extension;
};

// Rescaling between Ψ and u on a grid: u = scale · Ψ.
std::vector<double> field_scale(const MetricModel& model, const std::vector<double>& x);

// ∂t Ψ on a t = const slice (uniform grid from x = 0): parity ghosts at the
// origin, upwind-biased stencils inside, one-sided fourth-order closure at
// the outer end.
SliceState assemble_rhs(const SliceState& s, const EvolutionConfig& cfg, const MetricModel& model);

// Ψ on {t = x} per λ, on the nodes x_j = j T / n (all four components).
struct EvolutionHistory {
    double T = 1.0;
    int n = 0;
    std::vector<double> lambdas;  // {0} for a plain Cauchy run
    std::vector<std::array<SpectralSeries, 4>> cone;
    double mass = 0.0, charge = 0.0;
    Potential phi;
};

// Ξ on the slice at time t, per component, as spectral series on the nodes x.
using SourceField =
    std::function<void(double t, const std::vector<double>& x, std::array<SpectralSeries, 4>& xi)>;

struct CauchyOptions {
    std::vector<double> snapshot_times;  // ascending, in [t0, t_target]
    bool record_cone = false;            // needs t0 = 0
    SourceField source;
};

struct CauchyResult {
    SliceState state;                  // on the valid wedge at t_target
    std::vector<SliceState> snapshots;  // full grid, validity is the caller's concern
    std::vector<double> valid_extent;   // per snapshot, outer edge of the valid wedge
    EvolutionHistory history;
    int steps = 0;
};

CauchyResult cauchy_run(const SliceState& initial, double t_target, const EvolutionConfig& cfg,
                        const MetricModel& model, const CauchyOptions& opt = {});
SliceState cauchy_evolve(const SliceState& initial, double t_target, const EvolutionConfig& cfg,
                         const MetricModel& model);
SliceState source_evolve(const SliceState& initial, const SourceField& xi, double t_target,
                         const EvolutionConfig& cfg, const MetricModel& model);

// Datum continued past v = 2T to v_max_new (same spacing).
NullDatum extend_datum(const NullDatum& d, double T, int n_v_new, const ExtensionRule& rule);

struct InducedData {
    double lambda = 0.0;
    SliceState g;             // on {t = λx}, x_j = j dx, j = 0..J
    NullDatum extended;
    ConeSolution cone;        // constraint solution on the extended range
    double gH23 = 0.0;        // max |(g^λ_H)_{2,3}| in u units over x ≤ T/λ
    double g_norm = 0.0;      // max |u| over the λ-cone data
    double gH23_core = 0.0;   // same, restricted to x ≤ T
};

InducedData induced_cone_data(const NullDatum& d, double lambda, const EvolutionConfig& cfg,
                              const MetricModel& model);

struct GoursatResult {
    SliceState sigma;                  // extrapolated Σ_T state, x_j = j T / n_r
    std::vector<SliceState> per_lambda;
    EvolutionHistory history;
    std::vector<double> gH23, g_norm, gH23_core;
    double observed_order = 0.0;       // of the λ sequence, NaN when undetermined
    int active_modes = 0;
    long long steps = 0;
};

// Lagrange weights at s = 0 for nodes s_i = 1 - λ_i.
std::vector<double> richardson_weights(const std::vector<double>& lambdas);
void validate_lambdas(const EvolutionConfig& cfg);

GoursatResult goursat_solve(const NullDatum& d, const EvolutionConfig& cfg,
                            const MetricModel& model);

// (Ψ1, Ψ4) on the cone, extrapolated over the history's λ list.
NullDatum trace_on_cone(const EvolutionHistory& h, const MetricModel& model);

}  // namespace nc
