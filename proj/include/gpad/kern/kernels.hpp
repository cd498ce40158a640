#pragma once

// Dense f64 inner-loop kernels with runtime backend selection.
//
// Two implementations of the same table: a portable scalar reference and an
// AVX2 variant. The scalar path is the semantic definition; the AVX2 path is
// equivalence-tested against it. Elementwise kernels and axpy avoid FMA so
// both backends produce bit-identical results; reductions (dot, sum) change
// accumulation order under AVX2 and agree only to rounding.

#include <cstddef>
#include <string>

namespace gpad::kern {

enum class Backend { scalar, avx2 };

struct KernelTable {
    void (*add)(double*, const double*, const double*, std::size_t);
    void (*sub)(double*, const double*, const double*, std::size_t);
    void (*mul)(double*, const double*, const double*, std::size_t);
    void (*div)(double*, const double*, const double*, std::size_t);
    void (*scale)(double*, const double*, double, std::size_t);
    void (*axpy)(double*, double, const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*relu)(double*, const double*, std::size_t);
    // dst[i] += g[i] where pre[i] > 0 (ReLU backward accumulate)
    void (*relu_grad_acc)(double*, const double*, const double*, std::size_t);
    bool (*all_finite)(const double*, std::size_t);
};

bool cpu_has_avx2();

// Active backend. Resolved once at first use: AVX2 when the CPU supports it,
// unless overridden by set_backend() or the GPAD_KERNEL_BACKEND environment
// variable ("scalar" | "avx2" | "auto").
Backend active_backend();
void set_backend(Backend b);
std::string backend_name(Backend b);

const KernelTable& table();                 // active backend's table
const KernelTable& table_for(Backend b);    // explicit backend (tests)

// Convenience forwarders through the active table.
inline void add(double* d, const double* a, const double* b, std::size_t n) { table().add(d, a, b, n); }
inline void sub(double* d, const double* a, const double* b, std::size_t n) { table().sub(d, a, b, n); }
inline void mul(double* d, const double* a, const double* b, std::size_t n) { table().mul(d, a, b, n); }
inline void div(double* d, const double* a, const double* b, std::size_t n) { table().div(d, a, b, n); }
inline void scale(double* d, const double* a, double s, std::size_t n) { table().scale(d, a, s, n); }
inline void axpy(double* y, double s, const double* x, std::size_t n) { table().axpy(y, s, x, n); }
inline double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return table().sum(a, n); }
inline void relu(double* d, const double* a, std::size_t n) { table().relu(d, a, n); }
inline void relu_grad_acc(double* d, const double* g, const double* p, std::size_t n) { table().relu_grad_acc(d, g, p, n); }
inline bool all_finite(const double* a, std::size_t n) { return table().all_finite(a, n); }

}  // namespace gpad::kern
