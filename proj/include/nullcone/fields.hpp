#pragma once
// Field containers shared by the constraint, evolution and oracle modules.
//
// Component spins (doubled): Ψ1 = φ0 (+1), Ψ2 = φ1 (-1), Ψ3 = χ1' (+1),
// Ψ4 = -χ0' (-1).

#include <array>
#include <vector>

#include "nullcone/angular.hpp"

namespace nc {

inline constexpr std::array<int, 4> kComponentSpin{1, -1, 1, -1};

// Electric potential Φ = Φ_t(x) dt_s with Φ_t = Σ c[i] x^(2i); static and
// spherically symmetric, so m^a Φ_a = 0.
struct Potential {
    std::vector<double> c;
    double at(double x) const {
        double acc = 0.0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * x * x + c[i];
        return acc;
    }
    bool zero() const {
        for (double v : c)
            if (v != 0.0) return false;
        return true;
    }
};

// (Ψ1, Ψ4) on a uniform v-grid over [0, v_max], n_v + 1 nodes.
struct NullDatum {
    double v_max = 2.0;
    int n_v = 0;
    SpectralSeries psi1, psi4;
    double mass = 0.0, charge = 0.0;
    Potential phi;

    NullDatum() = default;
    NullDatum(double v_max_, int n_v_, int two_lmax)
        : v_max(v_max_), n_v(n_v_), psi1(1, two_lmax, n_v_ + 1), psi4(-1, two_lmax, n_v_ + 1) {}

    int two_lmax() const { return psi1.two_lmax; }
    int nodes() const { return n_v + 1; }
    double dv() const { return v_max / n_v; }
    double v(int j) const { return v_max * j / n_v; }
};

// All four components on the surface {t_s = t + tilt · x}, x on a radial grid.
struct SliceState {
    double t = 0.0;
    double tilt = 0.0;
    std::vector<double> x;
    std::array<SpectralSeries, 4> psi;

    SliceState() = default;
    SliceState(double t_, std::vector<double> x_, int two_lmax, double tilt_ = 0.0)
        : t(t_), tilt(tilt_), x(std::move(x_)) {
        for (size_t c = 0; c < 4; ++c)
            psi[c] = SpectralSeries(kComponentSpin[c], two_lmax, static_cast<int>(x.size()));
    }
    int two_lmax() const { return psi[0].two_lmax; }
    int nodes() const { return static_cast<int>(x.size()); }
};

std::vector<double> uniform_grid(double a, double b, int intervals);

}  // namespace nc
