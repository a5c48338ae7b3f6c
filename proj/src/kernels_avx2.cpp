// Built with -mavx2 only for this translation unit; callers go through the
// runtime dispatch in kernels.cpp.
#include <immintrin.h>

#include "nullcone/kernels.hpp"

namespace nc::kernels::avx2 {

void stencil7(const double* c, const double* x, double* y, int j0, int j1) {
    const __m256d c0 = _mm256_set1_pd(c[0]), c1 = _mm256_set1_pd(c[1]), c2 = _mm256_set1_pd(c[2]),
                  c3 = _mm256_set1_pd(c[3]), c4 = _mm256_set1_pd(c[4]), c5 = _mm256_set1_pd(c[5]),
                  c6 = _mm256_set1_pd(c[6]);
    int j = j0;
    for (; j + 4 <= j1; j += 4) {
        const double* p = x + j - 3;
        __m256d acc = _mm256_mul_pd(c0, _mm256_loadu_pd(p));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c1, _mm256_loadu_pd(p + 1)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c2, _mm256_loadu_pd(p + 2)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c3, _mm256_loadu_pd(p + 3)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c4, _mm256_loadu_pd(p + 4)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c5, _mm256_loadu_pd(p + 5)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(c6, _mm256_loadu_pd(p + 6)));
        _mm256_storeu_pd(y + j, acc);
    }
    scalar::stencil7(c, x, y, j, j1);
}

void mul_add(const double* a, const double* x, double* y, int n) {
    int j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(x + j));
        _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j), prod));
    }
    scalar::mul_add(a + j, x + j, y + j, n - j);
}

void scaled_mul_add(double s, const double* a, const double* x, double* y, int n) {
    const __m256d sv = _mm256_set1_pd(s);
    int j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d sa = _mm256_mul_pd(sv, _mm256_loadu_pd(a + j));
        const __m256d prod = _mm256_mul_pd(sa, _mm256_loadu_pd(x + j));
        _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j), prod));
    }
    scalar::scaled_mul_add(s, a + j, x + j, y + j, n - j);
}

void axpy_to(const double* x, double s, const double* z, double* y, int n) {
    const __m256d sv = _mm256_set1_pd(s);
    int j = 0;
    for (; j + 4 <= n; j += 4)
        _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(x + j),
                                              _mm256_mul_pd(sv, _mm256_loadu_pd(z + j))));
    scalar::axpy_to(x + j, s, z + j, y + j, n - j);
}

void axpy(double s, const double* x, double* y, int n) {
    const __m256d sv = _mm256_set1_pd(s);
    int j = 0;
    for (; j + 4 <= n; j += 4)
        _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j),
                                              _mm256_mul_pd(sv, _mm256_loadu_pd(x + j))));
    scalar::axpy(s, x + j, y + j, n - j);
}

}  // namespace nc::kernels::avx2
