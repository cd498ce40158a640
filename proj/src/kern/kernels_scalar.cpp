// Scalar reference kernels. These define the semantics the AVX2 variants
// are tested against.

#include "gpad/kern/kernels.hpp"

#include <cmath>

namespace gpad::kern {

namespace {

void s_add(double* d, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] + b[i];
}

void s_sub(double* d, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
}

void s_mul(double* d, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] * b[i];
}

void s_div(double* d, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] / b[i];
}

void s_scale(double* d, const double* a, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] * s;
}

void s_axpy(double* y, double s, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + s * x[i];
}

double s_dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double s_sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void s_relu(double* d, const double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void s_relu_grad_acc(double* d, const double* g, const double* pre, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (pre[i] > 0.0) d[i] += g[i];
    }
}

bool s_all_finite(const double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(a[i])) return false;
    }
    return true;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {
        s_add, s_sub, s_mul, s_div, s_scale, s_axpy,
        s_dot, s_sum, s_relu, s_relu_grad_acc, s_all_finite,
    };
    return t;
}

}  // namespace gpad::kern
