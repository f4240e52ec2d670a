#include "chipgate/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace chipgate::kernels {

namespace {

const KernelTable* detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_table();
#endif
#if defined(__aarch64__)
    return &neon_table();
#endif
    return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* table() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = detect();
        g_active.store(t, std::memory_order_release);
    }
    return t;
}

}  // namespace

const KernelTable& active() { return *table(); }

void force_backend(const std::string& name) {
    if (name == "scalar") {
        g_active.store(&scalar_table(), std::memory_order_release);
        return;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")))
            throw std::runtime_error("kernels: avx2 not supported on this CPU");
        g_active.store(&avx2_table(), std::memory_order_release);
        return;
    }
#endif
#if defined(__aarch64__)
    if (name == "neon") {
        g_active.store(&neon_table(), std::memory_order_release);
        return;
    }
#endif
    if (name == "auto") {
        g_active.store(detect(), std::memory_order_release);
        return;
    }
    throw std::runtime_error("kernels: unknown backend '" + name + "'");
}

std::string backend_name() { return active().name; }

}  // namespace chipgate::kernels
