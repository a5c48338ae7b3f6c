#pragma once
// Exact Minkowski solutions of the Dirac system and their restrictions.
//
// Two-spinors are handled in Cartesian components with ε_01 = 1 and the
// soldering x^{AA'} = (1/√2)[[t+z, x-iy], [x+iy, t-z]], chosen so that the
// spherical dyad reproduces m = (∂θ + i cscθ ∂φ)/(√2 r):
//   o(θ,φ) = (cos(θ/2) e^{-iφ/2}, sin(θ/2) e^{iφ/2})
//   ι(θ,φ) = (-sin(θ/2) e^{-iφ/2}, cos(θ/2) e^{iφ/2})
// with o_A ι^A = 1. φ is never wrapped, which fixes the half-angle branch.

#include <array>
#include <string>

#include "nullcone/fields.hpp"
#include "nullcone/geometry.hpp"

namespace nc {

using Spinor2 = std::array<cplx, 2>;

struct ExactSolution {
    enum class Kind { ConstantSpinor, PlaneWave };
    Kind kind = Kind::ConstantSpinor;
    Spinor2 a{};  // φ^A  (upper Cartesian components)
    Spinor2 b{};  // χ^{A'}
    std::array<double, 4> p{};  // p^μ = (E, px, py, pz)
    double mass = 0.0;
};

ExactSolution constant_spinor(cplx a0, cplx a1, cplx b0, cplx b1);
// Massive plane wave with spatial momentum k; χ fixed by the momentum-space
// relation χ^{A'} = -i (√2/m) p^{AA'} φ_A.
ExactSolution plane_wave(const std::array<double, 3>& k, double mass, const Spinor2& a);
// Residual of both momentum-space Dirac relations (0 for a valid solution).
double on_shell_residual(const ExactSolution& s);

struct SpinDyad {
    Spinor2 o, iota;
};
SpinDyad spherical_dyad(double theta, double phi);
// [x, y] = x_A y^A = x^0 y^1 - x^1 y^0
cplx spinor_bracket(const Spinor2& x, const Spinor2& y);

// Cartesian (φ^A, χ^{A'}) at the event (t, X, Y, Z).
std::pair<Spinor2, Spinor2> cartesian_at(const ExactSolution& s, double t, double X, double Y,
                                         double Z);
// (Ψ1..Ψ4) frame values in the spherical NP dyad; Minkowski only.
std::array<cplx, 4> evaluate_np(const ExactSolution& s, const SlicePoint& p,
                                const MetricModel& model);

struct OracleQuadrature {
    int n_theta = 32;
    int n_phi = 64;
};

struct SurfaceRestriction {
    std::array<SpectralSeries, 4> psi;
    // Max over nodes of (∫|f|^2 - Σ|a|^2) / ∫|f|^2; content beyond l_max.
    double aliasing = 0.0;
    bool aliased() const { return aliasing > 1e-10; }
};

// Projects Ψ1..Ψ4 at the events (t[j], x[j]) onto spin-weighted harmonics.
SurfaceRestriction restrict_surface(const ExactSolution& s, const MetricModel& model,
                                    const std::vector<double>& t, const std::vector<double>& x,
                                    int two_lmax, const OracleQuadrature& q = {});

struct OracleCone {
    NullDatum datum;
    SpectralSeries psi2, psi3;
    double aliasing = 0.0;
};

// λ = 1 is the null cone {t = r}, v = 2r ∈ [0, v_max]; λ < 1 samples the
// tilted surface {t = λ r} at r = v/2.
OracleCone restrict_to_cone(const ExactSolution& s, const MetricModel& model, double lambda,
                            double v_max, int n_v, int two_lmax, const OracleQuadrature& q = {});

SliceState slice_state(const ExactSolution& s, const MetricModel& model, double t,
                       const std::vector<double>& x, int two_lmax, const OracleQuadrature& q = {});

}  // namespace nc
