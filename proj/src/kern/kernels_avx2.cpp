// AVX2 kernel variants. This translation unit is compiled with -mavx2; it is
// only entered when the runtime CPU check passes.
//
// Elementwise kernels and axpy use mul+add (no FMA) so each lane performs the
// same two roundings as the scalar reference and results are bit-identical.
// dot/sum accumulate in four lanes and therefore differ from the scalar
// reference by normal summation-order rounding.

#include "gpad/kern/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define GPAD_X86 1
#else
#define GPAD_X86 0
#endif

#if GPAD_X86
#include <immintrin.h>
#endif

namespace gpad::kern {

const KernelTable& scalar_table();

#if GPAD_X86

namespace {

void v_add(double* d, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(d + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) d[i] = a[i] + b[i];
}

void v_sub(double* d, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(d + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) d[i] = a[i] - b[i];
}

void v_mul(double* d, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(d + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) d[i] = a[i] * b[i];
}

void v_div(double* d, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(d + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) d[i] = a[i] / b[i];
}

void v_scale(double* d, const double* a, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(d + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
    for (; i < n; ++i) d[i] = a[i] * s;
}

void v_axpy(double* y, double s, const double* x, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] = y[i] + s * x[i];
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

double v_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double v_sum(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i];
    return acc;
}

void v_relu(double* d, const double* a, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(d + i, _mm256_max_pd(_mm256_loadu_pd(a + i), zero));
    for (; i < n; ++i) d[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void v_relu_grad_acc(double* d, const double* g, const double* pre, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vd = _mm256_loadu_pd(d + i);
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
        const __m256d acc = _mm256_add_pd(vd, _mm256_loadu_pd(g + i));
        _mm256_storeu_pd(d + i, _mm256_blendv_pd(vd, acc, mask));
    }
    for (; i < n; ++i) {
        if (pre[i] > 0.0) d[i] += g[i];
    }
}

bool v_all_finite(const double* a, std::size_t n) {
    // x - x == 0 exactly when x is finite (NaN and +-Inf give NaN).
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(a + i);
        const __m256d diff = _mm256_sub_pd(v, v);
        const __m256d ok = _mm256_cmp_pd(diff, zero, _CMP_EQ_OQ);
        if (_mm256_movemask_pd(ok) != 0xF) return false;
    }
    for (; i < n; ++i) {
        const double x = a[i];
        if (x - x != 0.0) return false;
    }
    return true;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t = {
        v_add, v_sub, v_mul, v_div, v_scale, v_axpy,
        v_dot, v_sum, v_relu, v_relu_grad_acc, v_all_finite,
    };
    return t;
}

#else

const KernelTable& avx2_table() { return scalar_table(); }

#endif  // GPAD_X86

}  // namespace gpad::kern
