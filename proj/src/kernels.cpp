#include "nullcone/kernels.hpp"

#include <atomic>

namespace nc::kernels {

namespace scalar {

void stencil7(const double* c, const double* x, double* y, int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
        const double* p = x + j - 3;
        double acc = c[0] * p[0];
        acc = acc + c[1] * p[1];
        acc = acc + c[2] * p[2];
        acc = acc + c[3] * p[3];
        acc = acc + c[4] * p[4];
        acc = acc + c[5] * p[5];
        acc = acc + c[6] * p[6];
        y[j] = acc;
    }
}

void mul_add(const double* a, const double* x, double* y, int n) {
    for (int j = 0; j < n; ++j) y[j] = y[j] + a[j] * x[j];
}

void scaled_mul_add(double s, const double* a, const double* x, double* y, int n) {
    for (int j = 0; j < n; ++j) y[j] = y[j] + (s * a[j]) * x[j];
}

void axpy_to(const double* x, double s, const double* z, double* y, int n) {
    for (int j = 0; j < n; ++j) y[j] = x[j] + s * z[j];
}

void axpy(double s, const double* x, double* y, int n) {
    for (int j = 0; j < n; ++j) y[j] = y[j] + s * x[j];
}

}  // namespace scalar

namespace {

std::atomic<int> g_isa{-1};

Isa detect() { return avx2_available() ? Isa::Avx2 : Isa::Scalar; }

Isa current() {
    int v = g_isa.load(std::memory_order_relaxed);
    if (v < 0) {
        v = static_cast<int>(detect());
        g_isa.store(v, std::memory_order_relaxed);
    }
    return static_cast<Isa>(v);
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return current(); }

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
    g_isa.store(static_cast<int>(isa), std::memory_order_relaxed);
}

std::string isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void stencil7(const double* c, const double* x, double* y, int j0, int j1) {
    if (current() == Isa::Avx2) return avx2::stencil7(c, x, y, j0, j1);
    scalar::stencil7(c, x, y, j0, j1);
}

void mul_add(const double* a, const double* x, double* y, int n) {
    if (current() == Isa::Avx2) return avx2::mul_add(a, x, y, n);
    scalar::mul_add(a, x, y, n);
}

void scaled_mul_add(double s, const double* a, const double* x, double* y, int n) {
    if (current() == Isa::Avx2) return avx2::scaled_mul_add(s, a, x, y, n);
    scalar::scaled_mul_add(s, a, x, y, n);
}

void axpy_to(const double* x, double s, const double* z, double* y, int n) {
    if (current() == Isa::Avx2) return avx2::axpy_to(x, s, z, y, n);
    scalar::axpy_to(x, s, z, y, n);
}

void axpy(double s, const double* x, double* y, int n) {
    if (current() == Isa::Avx2) return avx2::axpy(s, x, y, n);
    scalar::axpy(s, x, y, n);
}

}  // namespace nc::kernels
