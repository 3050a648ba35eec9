#pragma once

#include <cstddef>
#include <string>

namespace traj::simd {

// Vectorizable double-precision primitives used by the training and feature
// inner loops. Every entry has a scalar reference version and (on x86) an
// AVX2 variant; the active table is chosen once at startup.
//
// Elementwise kernels are bit-exact across variants. `dot` may reassociate
// the summation, so cross-variant agreement is tolerance-based.
struct Kernels {
    const char* name;
    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*scale)(double s, const double* a, double* out, std::size_t n);
    // y += s * x
    void (*axpy)(double s, const double* x, double* y, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // out = (1 - z) * h + z * c   (the gated-cell state blend)
    void (*gate_blend)(const double* z, const double* h, const double* c,
                       double* out, std::size_t n);
};

const Kernels& scalar_kernels();
bool avx2_available();
// Valid only when avx2_available().
const Kernels& avx2_kernels();

// AVX2 when the CPU supports it, unless TRAJ_SIMD=scalar is set in the
// environment; otherwise scalar.
const Kernels& active_kernels();

// out[r] = dot(m[r*cols .. r*cols+cols], v) for r in [0, rows)
void matvec(const double* m, const double* v, double* out,
            std::size_t rows, std::size_t cols);

// out += m^T * v  (accumulating; m is rows x cols, v has rows entries)
void matvec_t_acc(const double* m, const double* v, double* out,
                  std::size_t rows, std::size_t cols);

// m += u * v^T  (rank-one accumulate; m is rows x cols)
void outer_acc(const double* u, const double* v, double* m,
               std::size_t rows, std::size_t cols);

}  // namespace traj::simd
