// Scalar vs AVX2 kernel equivalence. Elementwise kernels, axpy and relu must
// be bit-identical across backends; dot/sum reorder their accumulation and
// are held to a tight relative tolerance instead.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "gpad/core/rng.hpp"
#include "gpad/kern/kernels.hpp"

using namespace gpad;

namespace {

std::vector<double> random_vec(RngStream& rng, std::size_t n, double scale = 3.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (rng.uniform() - 0.5);
    return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("elementwise kernels bit-identical across backends") {
    if (!kern::cpu_has_avx2()) return;  // nothing to compare on this host
    const auto& sc = kern::table_for(kern::Backend::scalar);
    const auto& vx = kern::table_for(kern::Backend::avx2);
    RngStream rng(42);
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 33u, 100u, 1025u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        std::vector<double> r1(n), r2(n);

        sc.add(r1.data(), a.data(), b.data(), n);
        vx.add(r2.data(), a.data(), b.data(), n);
        CHECK(bits_equal(r1, r2));

        sc.sub(r1.data(), a.data(), b.data(), n);
        vx.sub(r2.data(), a.data(), b.data(), n);
        CHECK(bits_equal(r1, r2));

        sc.mul(r1.data(), a.data(), b.data(), n);
        vx.mul(r2.data(), a.data(), b.data(), n);
        CHECK(bits_equal(r1, r2));

        sc.div(r1.data(), a.data(), b.data(), n);
        vx.div(r2.data(), a.data(), b.data(), n);
        CHECK(bits_equal(r1, r2));

        sc.scale(r1.data(), a.data(), 1.7, n);
        vx.scale(r2.data(), a.data(), 1.7, n);
        CHECK(bits_equal(r1, r2));

        sc.relu(r1.data(), a.data(), n);
        vx.relu(r2.data(), a.data(), n);
        CHECK(bits_equal(r1, r2));

        r1 = b;
        r2 = b;
        sc.axpy(r1.data(), -0.37, a.data(), n);
        vx.axpy(r2.data(), -0.37, a.data(), n);
        CHECK(bits_equal(r1, r2));

        // relu backward accumulate
        auto g = random_vec(rng, n);
        r1 = b;
        r2 = b;
        sc.relu_grad_acc(r1.data(), g.data(), a.data(), n);
        vx.relu_grad_acc(r2.data(), g.data(), a.data(), n);
        CHECK(bits_equal(r1, r2));
    }
}

TEST_CASE("reduction kernels agree to rounding across backends") {
    if (!kern::cpu_has_avx2()) return;
    const auto& sc = kern::table_for(kern::Backend::scalar);
    const auto& vx = kern::table_for(kern::Backend::avx2);
    RngStream rng(7);
    for (std::size_t n : {1u, 5u, 8u, 9u, 64u, 1000u, 4097u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);

        const double d1 = sc.dot(a.data(), b.data(), n);
        const double d2 = vx.dot(a.data(), b.data(), n);
        CHECK(std::abs(d1 - d2) <= 1e-13 * (mag + 1.0));

        double smag = 0.0;
        for (std::size_t i = 0; i < n; ++i) smag += std::abs(a[i]);
        const double s1 = sc.sum(a.data(), n);
        const double s2 = vx.sum(a.data(), n);
        CHECK(std::abs(s1 - s2) <= 1e-13 * (smag + 1.0));
    }
}

TEST_CASE("all_finite flags NaN and infinities in any lane") {
    for (auto backend : {kern::Backend::scalar, kern::Backend::avx2}) {
        if (backend == kern::Backend::avx2 && !kern::cpu_has_avx2()) continue;
        const auto& t = kern::table_for(backend);
        std::vector<double> v(37, 1.0);
        CHECK(t.all_finite(v.data(), v.size()));
        for (std::size_t pos : {0u, 3u, 4u, 35u, 36u}) {
            for (double bad : {std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity()}) {
                auto w = v;
                w[pos] = bad;
                CHECK_FALSE(t.all_finite(w.data(), w.size()));
            }
        }
    }
}

TEST_CASE("dot matches a long-double reference") {
    const auto& t = kern::table();
    RngStream rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(500));
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(a[i]) * b[i];
        CHECK(std::abs(t.dot(a.data(), b.data(), n) - static_cast<double>(ref)) <= 1e-12 * (1.0 + std::abs(static_cast<double>(ref))));
    }
}
