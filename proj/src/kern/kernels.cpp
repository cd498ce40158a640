#include "gpad/kern/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace gpad::kern {

const KernelTable& scalar_table();
const KernelTable& avx2_table();

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

Backend resolve_initial() {
    if (const char* env = std::getenv("GPAD_KERNEL_BACKEND")) {
        const std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2") {
            if (!cpu_has_avx2()) throw std::runtime_error("GPAD_KERNEL_BACKEND=avx2 but CPU lacks AVX2");
            return Backend::avx2;
        }
        if (v != "auto" && !v.empty())
            throw std::runtime_error("unknown GPAD_KERNEL_BACKEND value: " + v);
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend& current() {
    static Backend b = resolve_initial();
    return b;
}

}  // namespace

Backend active_backend() { return current(); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !cpu_has_avx2())
        throw std::runtime_error("cannot select AVX2 backend: CPU lacks AVX2");
    current() = b;
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const KernelTable& table_for(Backend b) {
    return b == Backend::avx2 ? avx2_table() : scalar_table();
}

const KernelTable& table() { return table_for(current()); }

}  // namespace gpad::kern
