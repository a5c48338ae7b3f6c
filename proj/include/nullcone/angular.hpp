#pragma once
// Half-integer spin-weighted spherical calculus.
//
// Every half-integer quantity (l, m, s) is carried doubled so that it stays an
// exact int: two_l = 2l, two_m = 2m, two_s = 2s.
//
// Conventions (checked numerically in tests/test_angular.cpp):
//   sY_lm(θ,φ) = (-1)^(s+1/2) sqrt((2l+1)/4π) d^l_{m,-s}(θ) e^{imφ}
//   ð  = -(∂θ + i cscθ ∂φ - s cotθ),   ð sY_lm  = +sqrt((l-s)(l+s+1)) (s+1)Y_lm
//   ð' = -(∂θ - i cscθ ∂φ + s cotθ),   ð' sY_lm = -sqrt((l+s)(l-s+1)) (s-1)Y_lm
// Values are "frame values" relative to m ∝ ∂θ + i cscθ ∂φ. The north chart
// multiplies by e^{isφ} (regular at θ = 0), the south chart by e^{-isφ}.

#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nc {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

struct Mode {
    int two_l;
    int two_m;
    cplx a;
};

int mode_count(int two_s, int two_lmax);
// Packed index of (l, m) for spin s; throws std::invalid_argument if invalid.
int mode_index(int two_s, int two_l, int two_m);
std::pair<int, int> mode_lm(int two_s, int index);
bool valid_mode(int two_s, int two_l, int two_m);

double wigner_d(int two_j, int two_m1, int two_m2, double beta);
// Frame value of sY_lm.
cplx swsh(int two_s, int two_l, int two_m, double theta, double phi);

// ð / ð' ladder factors for a single (s, l).
double eth_factor(int two_s, int two_l);     // +sqrt((l-s)(l+s+1))
double ethbar_factor(int two_s, int two_l);  // -sqrt((l+s)(l-s+1))

class SpectralField {
public:
    SpectralField() = default;
    SpectralField(int two_s, int two_lmax);

    int two_s() const { return two_s_; }
    int two_lmax() const { return two_lmax_; }
    int size() const { return static_cast<int>(a_.size()); }

    cplx& operator[](int i) { return a_[i]; }
    cplx operator[](int i) const { return a_[i]; }
    cplx coeff(int two_l, int two_m) const;
    void set(int two_l, int two_m, cplx v);

    std::vector<cplx>& data() { return a_; }
    const std::vector<cplx>& data() const { return a_; }

    double norm() const;
    bool is_zero() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(cplx c);

private:
    int two_s_ = 1;
    int two_lmax_ = 1;
    std::vector<cplx> a_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx c, SpectralField a);

SpectralField make_field(int two_s, int two_lmax, const std::vector<Mode>& modes);
// The output keeps the input l_max; modes with l < |s±1| drop out.
SpectralField eth_raise(const SpectralField& f);
SpectralField eth_lower(const SpectralField& f);

enum class Chart { North, South };
// Value in the chart convention; rejects the pole the chart does not cover.
cplx evaluate_at(const SpectralField& f, double theta, double phi, Chart chart);
cplx evaluate_frame(const SpectralField& f, double theta, double phi);
// Multiplier turning a frame value into a chart value.
cplx chart_phase(int two_s, double phi, Chart chart);

cplx inner_product(const SpectralField& f, const SpectralField& g);

// Gauss–Legendre in cosθ times uniform φ. Exact for band limits below
// min(2 n_theta - 1, n_phi - 1) in the product degree.
struct SphereQuadrature {
    std::vector<double> theta, w_theta, phi;
    double w_phi = 0.0;
    SphereQuadrature(int n_theta, int n_phi);
};

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Precomputed quadrature weights times conj(sY_lm) for repeated projections.
class Projector {
public:
    Projector(int two_s, int two_lmax, const SphereQuadrature& q);
    int points() const { return n_points_; }
    // samples[i * n_phi + k] holds the frame value at (theta[i], phi[k]).
    SpectralField apply(const std::vector<cplx>& samples) const;

private:
    int two_s_, two_lmax_, n_points_;
    std::vector<cplx> table_;  // mode-major
};

// Projects a frame-valued function onto spin-s harmonics up to l_max.
SpectralField project(const std::function<cplx(double, double)>& frame_value, int two_s,
                      int two_lmax, const SphereQuadrature& q);

// Coefficient series on a radial or null grid: c[mode * n + j].
struct SpectralSeries {
    int two_s = 1;
    int two_lmax = 1;
    int n = 0;
    std::vector<cplx> c;

    SpectralSeries() = default;
    SpectralSeries(int two_s_, int two_lmax_, int n_)
        : two_s(two_s_), two_lmax(two_lmax_), n(n_),
          c(static_cast<size_t>(mode_count(two_s_, two_lmax_)) * n_) {}

    int modes() const { return mode_count(two_s, two_lmax); }
    cplx& at(int mode, int j) { return c[static_cast<size_t>(mode) * n + j]; }
    cplx at(int mode, int j) const { return c[static_cast<size_t>(mode) * n + j]; }
    cplx* row(int mode) { return c.data() + static_cast<size_t>(mode) * n; }
    const cplx* row(int mode) const { return c.data() + static_cast<size_t>(mode) * n; }
    SpectralField node(int j) const;
    void set_node(int j, const SpectralField& f);
    double max_abs() const;
};

}  // namespace nc
