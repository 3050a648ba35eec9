#include "traj/simd/kernels.hpp"

namespace traj::simd {

namespace {

void add_s(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_s(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_s(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_s(double s, const double* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s * a[i];
}

void axpy_s(double s, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

double dot_s(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void gate_blend_s(const double* z, const double* h, const double* c,
                  double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {"scalar", add_s, sub_s,     mul_s,       scale_s,
                              axpy_s,   dot_s, gate_blend_s};
    return k;
}

void matvec(const double* m, const double* v, double* out,
            std::size_t rows, std::size_t cols) {
    const Kernels& k = active_kernels();
    for (std::size_t r = 0; r < rows; ++r) out[r] = k.dot(m + r * cols, v, cols);
}

void matvec_t_acc(const double* m, const double* v, double* out,
                  std::size_t rows, std::size_t cols) {
    const Kernels& k = active_kernels();
    for (std::size_t r = 0; r < rows; ++r) k.axpy(v[r], m + r * cols, out, cols);
}

void outer_acc(const double* u, const double* v, double* m,
               std::size_t rows, std::size_t cols) {
    const Kernels& k = active_kernels();
    for (std::size_t r = 0; r < rows; ++r) k.axpy(u[r], v, m + r * cols, cols);
}

}  // namespace traj::simd
