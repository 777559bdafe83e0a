#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "transobs/simd.hpp"

namespace transobs::simd {

namespace {

Backend detect_initial() {
#if defined(TRANSOBS_HAVE_AVX2)
    if (const char* env = std::getenv("TRANSOBS_SIMD")) {
        std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && avx2_supported()) return Backend::avx2;
        return Backend::scalar;
    }
    if (avx2_supported()) return Backend::avx2;
#else
    if (const char* env = std::getenv("TRANSOBS_SIMD")) (void)env;
#endif
    return Backend::scalar;
}

std::atomic<Backend>& active_slot() {
    static std::atomic<Backend> slot{detect_initial()};
    return slot;
}

}  // namespace

bool avx2_supported() {
#if defined(TRANSOBS_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active() { return active_slot().load(std::memory_order_relaxed); }

void force(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw std::runtime_error("simd: avx2 backend requested but not supported on this CPU/build");
    active_slot().store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const Kernels& kernels_for(Backend b) {
#if defined(TRANSOBS_HAVE_AVX2)
    if (b == Backend::avx2) return avx2_kernels;
#endif
    (void)b;
    return scalar_kernels;
}

const Kernels& kernels() { return kernels_for(active()); }

}  // namespace transobs::simd
