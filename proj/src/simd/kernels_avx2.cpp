// Compiled with -mavx2 (no FMA: keeps per-lane arithmetic identical to the
// scalar kernels, so elementwise variants are bit-exact across tables).
#include "traj/simd/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace traj::simd {

namespace {

void add_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_v(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_v(double s, const double* a, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) out[i] = s * a[i];
}

void axpy_v(double s, const double* x, double* y, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += s * x[i];
}

double dot_v(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                               _mm256_loadu_pd(b + i)));
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double sum = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void gate_blend_v(const double* z, const double* h, const double* c,
                  double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vz = _mm256_loadu_pd(z + i);
        __m256d keep = _mm256_mul_pd(_mm256_sub_pd(one, vz), _mm256_loadu_pd(h + i));
        __m256d upd = _mm256_mul_pd(vz, _mm256_loadu_pd(c + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(keep, upd));
    }
    for (; i < n; ++i) out[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k = {"avx2", add_v, sub_v,        mul_v,  scale_v,
                              axpy_v, dot_v, gate_blend_v};
    return k;
}

}  // namespace traj::simd

#else

namespace traj::simd {
const Kernels& avx2_kernels() { return scalar_kernels(); }
}  // namespace traj::simd

#endif
