#if defined(__aarch64__)

#include <arm_neon.h>

#include "chipgate/kernels.hpp"

namespace chipgate::kernels {

namespace {

// One complex double per float64x2_t, [re, im].
inline float64x2_t cmul(float64x2_t a, float64x2_t b) {
    const float64x2_t b_re = vdupq_laneq_f64(b, 0);
    const float64x2_t b_im = vdupq_laneq_f64(b, 1);
    const float64x2_t a_sw = vextq_f64(a, a, 1);  // [im, re]
    // [ar*br - ai*bi, ai*br + ar*bi]
    const float64x2_t t = vmulq_f64(a_sw, b_im);
    const float64x2_t neg = {-1.0, 1.0};
    return vfmaq_f64(vmulq_f64(t, neg), a, b_re);
}

void pointwise_multiply_neon(cplx* a, const cplx* b, std::size_t n) {
    double* ap = reinterpret_cast<double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    for (std::size_t i = 0; i < n; ++i)
        vst1q_f64(ap + 2 * i, cmul(vld1q_f64(ap + 2 * i), vld1q_f64(bp + 2 * i)));
}

void outer_multiply_neon(cplx* a, const cplx* row, const cplx* col, std::size_t n) {
    const double* cp = reinterpret_cast<const double*>(col);
    for (std::size_t r = 0; r < n; ++r) {
        const double wbuf[2] = {row[r].real(), row[r].imag()};
        const float64x2_t vw = vld1q_f64(wbuf);
        double* line = reinterpret_cast<double*>(a + r * n);
        for (std::size_t c = 0; c < n; ++c) {
            const float64x2_t vc = vld1q_f64(cp + 2 * c);
            vst1q_f64(line + 2 * c, cmul(vld1q_f64(line + 2 * c), cmul(vw, vc)));
        }
    }
}

double squared_norm_neon(const cplx* a, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t v = vld1q_f64(ap + 2 * i);
        acc = vfmaq_f64(acc, v, v);
    }
    return vaddvq_f64(acc);
}

double weighted_squared_norm_neon(const cplx* a, const double* w, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t v = vld1q_f64(ap + 2 * i);
        acc = vfmaq_f64(acc, vmulq_f64(v, v), vdupq_n_f64(w[i]));
    }
    return vaddvq_f64(acc);
}

cplx dot_neon(const cplx* a, const cplx* b, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    float64x2_t acc_re = vdupq_n_f64(0.0);
    float64x2_t acc_im = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t va = vld1q_f64(ap + 2 * i);
        const float64x2_t vb = vld1q_f64(bp + 2 * i);
        acc_re = vfmaq_f64(acc_re, va, vb);
        acc_im = vfmaq_f64(acc_im, vextq_f64(va, va, 1), vb);
    }
    const double re = vaddvq_f64(acc_re);
    const double im = vgetq_lane_f64(acc_im, 1) - vgetq_lane_f64(acc_im, 0);
    return {re, im};
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable t{pointwise_multiply_neon, outer_multiply_neon,
                               squared_norm_neon, weighted_squared_norm_neon,
                               dot_neon, "neon"};
    return t;
}

}  // namespace chipgate::kernels

#endif  // __aarch64__
