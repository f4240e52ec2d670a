#include "chipgate/kernels.hpp"

namespace chipgate::kernels {

namespace {

void pointwise_multiply_scalar(cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void outer_multiply_scalar(cplx* a, const cplx* row, const cplx* col, std::size_t n) {
    for (std::size_t r = 0; r < n; ++r) {
        const cplx w = row[r];
        cplx* line = a + r * n;
        for (std::size_t c = 0; c < n; ++c) line[c] *= w * col[c];
    }
}

double squared_norm_scalar(const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return acc;
}

double weighted_squared_norm_scalar(const cplx* a, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return acc;
}

cplx dot_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{pointwise_multiply_scalar, outer_multiply_scalar,
                               squared_norm_scalar, weighted_squared_norm_scalar,
                               dot_scalar, "scalar"};
    return t;
}

}  // namespace chipgate::kernels
