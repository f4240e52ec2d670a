#ifndef CHIPGATE_KERNELS_HPP
#define CHIPGATE_KERNELS_HPP

#include <complex>
#include <cstddef>
#include <string>

namespace chipgate::kernels {

using cplx = std::complex<double>;

/// Inner loops of the wavefunction propagation, hot on n x n complex arrays.
/// Scalar reference implementations define the semantics; SIMD variants are
/// selected at runtime and must agree with the reference to rounding noise.
struct KernelTable {
    // a[i] *= b[i]
    void (*pointwise_multiply)(cplx* a, const cplx* b, std::size_t n);
    // a[r*n + c] *= row[r] * col[c]
    void (*outer_multiply)(cplx* a, const cplx* row, const cplx* col, std::size_t n);
    // sum_i |a[i]|^2
    double (*squared_norm)(const cplx* a, std::size_t n);
    // sum_i w[i] * |a[i]|^2
    double (*weighted_squared_norm)(const cplx* a, const double* w, std::size_t n);
    // sum_i conj(a[i]) * b[i]
    cplx (*dot)(const cplx* a, const cplx* b, std::size_t n);
    const char* name;
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

/// Table picked at startup from CPU features; force_backend overrides (tests).
const KernelTable& active();
void force_backend(const std::string& name);
std::string backend_name();

// Convenience forwarders through the active table.
inline void pointwise_multiply(cplx* a, const cplx* b, std::size_t n) {
    active().pointwise_multiply(a, b, n);
}
inline void outer_multiply(cplx* a, const cplx* row, const cplx* col, std::size_t n) {
    active().outer_multiply(a, row, col, n);
}
inline double squared_norm(const cplx* a, std::size_t n) { return active().squared_norm(a, n); }
inline double weighted_squared_norm(const cplx* a, const double* w, std::size_t n) {
    return active().weighted_squared_norm(a, w, n);
}
inline cplx dot(const cplx* a, const cplx* b, std::size_t n) { return active().dot(a, b, n); }

}  // namespace chipgate::kernels

#endif
