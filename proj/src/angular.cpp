#include "nullcone/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace nc {

namespace {

const std::array<double, 64>& factorials() {
    static const std::array<double, 64> f = [] {
        std::array<double, 64> t{};
        t[0] = 1.0;
        for (size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return f;
}

double fact(int n) {
    if (n < 0 || n >= 64) throw std::out_of_range("factorial argument");
    return factorials()[static_cast<size_t>(n)];
}

}  // namespace

bool valid_mode(int two_s, int two_l, int two_m) {
    if (two_s % 2 == 0) return false;  // half-integer spins only
    if (two_l < 0 || std::abs(two_s) > two_l || std::abs(two_m) > two_l) return false;
    // l - s and l - m must be integers
    return ((two_l - two_s) % 2 == 0) && ((two_l - two_m) % 2 == 0);
}

int mode_count(int two_s, int two_lmax) {
    int n = 0;
    for (int tl = std::abs(two_s); tl <= two_lmax; tl += 2) n += tl + 1;
    return n;
}

int mode_index(int two_s, int two_l, int two_m) {
    if (!valid_mode(two_s, two_l, two_m))
        throw std::invalid_argument("invalid (l, m) for spin weight");
    int idx = 0;
    for (int tl = std::abs(two_s); tl < two_l; tl += 2) idx += tl + 1;
    return idx + (two_m + two_l) / 2;
}

std::pair<int, int> mode_lm(int two_s, int index) {
    int tl = std::abs(two_s);
    while (index >= tl + 1) {
        index -= tl + 1;
        tl += 2;
    }
    return {tl, 2 * index - tl};
}

// Factorial sum; fine for the small j used here.
double wigner_d(int two_j, int two_m1, int two_m2, double beta) {
    if (std::abs(two_m1) > two_j || std::abs(two_m2) > two_j) return 0.0;
    const int jpm1 = (two_j + two_m1) / 2, jmm1 = (two_j - two_m1) / 2;
    const int jpm2 = (two_j + two_m2) / 2, jmm2 = (two_j - two_m2) / 2;
    const double pref = std::sqrt(fact(jpm1) * fact(jmm1) * fact(jpm2) * fact(jmm2));
    const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
    const int dm = (two_m1 - two_m2) / 2;  // m1 - m2
    double sum = 0.0;
    const int kmin = std::max(0, -dm), kmax = std::min(jpm2, jmm1);
    for (int k = kmin; k <= kmax; ++k) {
        const double sign = ((k + dm) % 2 == 0) ? 1.0 : -1.0;
        const double den = fact(jpm2 - k) * fact(k) * fact(jmm1 - k) * fact(k + dm);
        const int pc = two_j - dm - 2 * k;  // exponent of cos(β/2)
        const int ps = dm + 2 * k;
        sum += sign / den * std::pow(c, pc) * std::pow(s, ps);
    }
    return pref * sum;
}

namespace {
// (-1)^(s+1/2) sqrt((2l+1)/4π)
double swsh_prefactor(int two_s, int two_l) {
    const int e = (two_s + 1) / 2;
    const double cs = (std::abs(e) % 2 == 0) ? 1.0 : -1.0;
    return cs * std::sqrt((two_l + 1) / (4.0 * kPi));
}
}  // namespace

cplx swsh(int two_s, int two_l, int two_m, double theta, double phi) {
    if (!valid_mode(two_s, two_l, two_m)) return 0.0;
    const double d = wigner_d(two_l, two_m, -two_s, theta);
    return swsh_prefactor(two_s, two_l) * d * std::polar(1.0, 0.5 * two_m * phi);
}

double eth_factor(int two_s, int two_l) {
    const double v = 0.25 * (two_l - two_s) * (two_l + two_s + 2);
    return v > 0 ? std::sqrt(v) : 0.0;
}

double ethbar_factor(int two_s, int two_l) {
    const double v = 0.25 * (two_l + two_s) * (two_l - two_s + 2);
    return v > 0 ? -std::sqrt(v) : 0.0;
}

SpectralField::SpectralField(int two_s, int two_lmax) : two_s_(two_s), two_lmax_(two_lmax) {
    if (two_lmax < std::abs(two_s) || (two_lmax - two_s) % 2 != 0)
        throw std::invalid_argument("l_max incompatible with spin weight");
    a_.assign(static_cast<size_t>(mode_count(two_s, two_lmax)), cplx(0.0));
}

cplx SpectralField::coeff(int two_l, int two_m) const {
    if (!valid_mode(two_s_, two_l, two_m) || two_l > two_lmax_) return 0.0;
    return a_[static_cast<size_t>(mode_index(two_s_, two_l, two_m))];
}

void SpectralField::set(int two_l, int two_m, cplx v) {
    if (two_l > two_lmax_) throw std::invalid_argument("mode above l_max");
    a_[static_cast<size_t>(mode_index(two_s_, two_l, two_m))] = v;
}

double SpectralField::norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

bool SpectralField::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](cplx v) { return v == cplx(0.0); });
}

static void check_same(const SpectralField& a, const SpectralField& b) {
    if (a.two_s() != b.two_s() || a.two_lmax() != b.two_lmax())
        throw std::invalid_argument("spectral field shape mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    check_same(*this, o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    check_same(*this, o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(cplx c) {
    for (auto& v : a_) v *= c;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx c, SpectralField a) { return a *= c; }

SpectralField make_field(int two_s, int two_lmax, const std::vector<Mode>& modes) {
    SpectralField f(two_s, two_lmax);
    for (const auto& m : modes) {
        if (!valid_mode(two_s, m.two_l, m.two_m) || m.two_l > two_lmax)
            throw std::invalid_argument("make_field: invalid mode");
        f.set(m.two_l, m.two_m, f.coeff(m.two_l, m.two_m) + m.a);
    }
    return f;
}

static SpectralField ladder(const SpectralField& f, int dir) {
    const int ts = f.two_s(), out_s = ts + 2 * dir;
    int lmax = f.two_lmax();
    if (lmax < std::abs(out_s)) return SpectralField(out_s, std::abs(out_s));
    SpectralField g(out_s, lmax);
    for (int i = 0; i < g.size(); ++i) {
        auto [tl, tm] = mode_lm(out_s, i);
        if (tl < std::abs(ts)) continue;
        const double k = dir > 0 ? eth_factor(ts, tl) : ethbar_factor(ts, tl);
        g[i] = k * f.coeff(tl, tm);
    }
    return g;
}

SpectralField eth_raise(const SpectralField& f) { return ladder(f, +1); }
SpectralField eth_lower(const SpectralField& f) { return ladder(f, -1); }

cplx chart_phase(int two_s, double phi, Chart chart) {
    const double sgn = chart == Chart::North ? 1.0 : -1.0;
    return std::polar(1.0, sgn * 0.5 * two_s * phi);
}

cplx evaluate_frame(const SpectralField& f, double theta, double phi) {
    cplx v = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        if (f[i] == cplx(0.0)) continue;
        auto [tl, tm] = mode_lm(f.two_s(), i);
        v += f[i] * swsh(f.two_s(), tl, tm, theta, phi);
    }
    return v;
}

cplx evaluate_at(const SpectralField& f, double theta, double phi, Chart chart) {
    if (chart == Chart::North && theta >= kPi)
        throw std::domain_error("south pole is outside the north chart");
    if (chart == Chart::South && theta <= 0.0)
        throw std::domain_error("north pole is outside the south chart");
    // At the chart's own pole only m = -s (north) or m = s (south) survives
    // and the chart phase cancels e^{imφ}.
    if (chart == Chart::North && theta == 0.0) {
        cplx v = 0.0;
        for (int i = 0; i < f.size(); ++i) {
            auto [tl, tm] = mode_lm(f.two_s(), i);
            if (tm != -f.two_s()) continue;
            v += f[i] * swsh(f.two_s(), tl, tm, 0.0, 0.0);
        }
        return v;
    }
    if (chart == Chart::South && theta == kPi) {
        cplx v = 0.0;
        for (int i = 0; i < f.size(); ++i) {
            auto [tl, tm] = mode_lm(f.two_s(), i);
            if (tm != f.two_s()) continue;
            v += f[i] * swsh(f.two_s(), tl, tm, kPi, 0.0);
        }
        return v;
    }
    return chart_phase(f.two_s(), phi, chart) * evaluate_frame(f, theta, phi);
}

cplx inner_product(const SpectralField& f, const SpectralField& g) {
    if (f.two_s() != g.two_s()) throw std::invalid_argument("inner_product: spin mismatch");
    const int n = std::min(f.size(), g.size());
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) s += f[i] * std::conj(g[i]);
    return s;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<size_t>(i)] = z;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

SphereQuadrature::SphereQuadrature(int n_theta, int n_phi) {
    std::vector<double> x;
    gauss_legendre(n_theta, x, w_theta);
    theta.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) theta[i] = std::acos(x[i]);
    phi.resize(static_cast<size_t>(n_phi));
    for (int k = 0; k < n_phi; ++k) phi[static_cast<size_t>(k)] = 2.0 * kPi * k / n_phi;
    w_phi = 2.0 * kPi / n_phi;
}

Projector::Projector(int two_s, int two_lmax, const SphereQuadrature& q)
    : two_s_(two_s), two_lmax_(two_lmax),
      n_points_(static_cast<int>(q.theta.size() * q.phi.size())) {
    const int modes = mode_count(two_s, two_lmax);
    table_.resize(static_cast<size_t>(modes) * static_cast<size_t>(n_points_));
    const size_t np = q.phi.size();
    for (int idx = 0; idx < modes; ++idx) {
        auto [tl, tm] = mode_lm(two_s, idx);
        const double pre = swsh_prefactor(two_s, tl) * q.w_phi;
        for (size_t i = 0; i < q.theta.size(); ++i) {
            const double d = pre * q.w_theta[i] * wigner_d(tl, tm, -two_s, q.theta[i]);
            for (size_t k = 0; k < np; ++k)
                table_[static_cast<size_t>(idx) * static_cast<size_t>(n_points_) + i * np + k] =
                    d * std::polar(1.0, -0.5 * tm * q.phi[k]);
        }
    }
}

SpectralField Projector::apply(const std::vector<cplx>& samples) const {
    if (static_cast<int>(samples.size()) != n_points_)
        throw std::invalid_argument("Projector: sample count mismatch");
    SpectralField f(two_s_, two_lmax_);
    for (int idx = 0; idx < f.size(); ++idx) {
        const cplx* row = table_.data() + static_cast<size_t>(idx) * static_cast<size_t>(n_points_);
        cplx acc = 0.0;
        for (int p = 0; p < n_points_; ++p) acc += row[p] * samples[static_cast<size_t>(p)];
        f[idx] = acc;
    }
    return f;
}

SpectralField project(const std::function<cplx(double, double)>& frame_value, int two_s,
                      int two_lmax, const SphereQuadrature& q) {
    const size_t nt = q.theta.size(), np = q.phi.size();
    std::vector<cplx> samples(nt * np);
    for (size_t i = 0; i < nt; ++i)
        for (size_t k = 0; k < np; ++k) samples[i * np + k] = frame_value(q.theta[i], q.phi[k]);
    return Projector(two_s, two_lmax, q).apply(samples);
}

SpectralField SpectralSeries::node(int j) const {
    SpectralField f(two_s, two_lmax);
    for (int m = 0; m < f.size(); ++m) f[m] = at(m, j);
    return f;
}

void SpectralSeries::set_node(int j, const SpectralField& f) {
    if (f.two_s() != two_s || f.two_lmax() != two_lmax)
        throw std::invalid_argument("SpectralSeries::set_node shape mismatch");
    for (int m = 0; m < f.size(); ++m) at(m, j) = f[m];
}

double SpectralSeries::max_abs() const {
    double m = 0.0;
    for (const auto& v : c) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace nc
