#pragma once
// Inner loops of the radial evolution: scalar reference versions and AVX2
// variants picked at runtime. Both evaluate every output element with the
// same operation order and no fused multiply-add, so they agree bitwise.

#include <string>

namespace nc::kernels {

enum class Isa { Scalar, Avx2 };

bool avx2_available();
Isa active_isa();
// Overrides dispatch (tests and --repro pinning). Requesting Avx2 on a CPU
// without it falls back to Scalar.
void force_isa(Isa isa);
std::string isa_name(Isa isa);

// y[j] = Σ_{o=0..6} c[o] x[j + o - 3] for j in [j0, j1)
void stencil7(const double* c, const double* x, double* y, int j0, int j1);
// y[j] += a[j] * x[j]
void mul_add(const double* a, const double* x, double* y, int n);
// y[j] += s * a[j] * x[j]
void scaled_mul_add(double s, const double* a, const double* x, double* y, int n);
// y[j] = x[j] + s * z[j]
void axpy_to(const double* x, double s, const double* z, double* y, int n);
// y[j] += s * x[j]
void axpy(double s, const double* x, double* y, int n);

namespace scalar {
void stencil7(const double* c, const double* x, double* y, int j0, int j1);
void mul_add(const double* a, const double* x, double* y, int n);
void scaled_mul_add(double s, const double* a, const double* x, double* y, int n);
void axpy_to(const double* x, double s, const double* z, double* y, int n);
void axpy(double s, const double* x, double* y, int n);
}  // namespace scalar

namespace avx2 {
void stencil7(const double* c, const double* x, double* y, int j0, int j1);
void mul_add(const double* a, const double* x, double* y, int n);
void scaled_mul_add(double s, const double* a, const double* x, double* y, int n);
void axpy_to(const double* x, double s, const double* z, double* y, int n);
void axpy(double s, const double* x, double* y, int n);
}  // namespace avx2

}  // namespace nc::kernels
