#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "chipgate/kernels.hpp"

namespace chipgate::kernels {

namespace {

// Two complex doubles per __m256d, interleaved [re0, im0, re1, im1].
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);         // [br0 br0 br1 br1]
    const __m256d b_im = _mm256_permute_pd(b, 0xF);    // [bi0 bi0 bi1 bi1]
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);    // [ai0 ar0 ai1 ar1]
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void pointwise_multiply_avx2(cplx* a, const cplx* b, std::size_t n) {
    double* ap = reinterpret_cast<double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(ap + 2 * i);
        const __m256d vb = _mm256_loadu_pd(bp + 2 * i);
        _mm256_storeu_pd(ap + 2 * i, cmul(va, vb));
    }
    for (; i < n; ++i) a[i] *= b[i];
}

void outer_multiply_avx2(cplx* a, const cplx* row, const cplx* col, std::size_t n) {
    const double* cp = reinterpret_cast<const double*>(col);
    for (std::size_t r = 0; r < n; ++r) {
        const cplx w = row[r];
        const __m256d vw = _mm256_setr_pd(w.real(), w.imag(), w.real(), w.imag());
        double* line = reinterpret_cast<double*>(a + r * n);
        std::size_t c = 0;
        for (; c + 2 <= n; c += 2) {
            const __m256d vc = _mm256_loadu_pd(cp + 2 * c);
            const __m256d va = _mm256_loadu_pd(line + 2 * c);
            _mm256_storeu_pd(line + 2 * c, cmul(va, cmul(vw, vc)));
        }
        for (; c < n; ++c) a[r * n + c] *= w * col[c];
    }
}

double squared_norm_avx2(const cplx* a, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(ap + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

double weighted_squared_norm_avx2(const cplx* a, const double* w, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(ap + 2 * i);
        // duplicate each weight across its re/im lanes
        const __m128d wlo = _mm_loadu_pd(w + i);
        const __m256d vw = _mm256_setr_pd(_mm_cvtsd_f64(wlo), _mm_cvtsd_f64(wlo),
                                          _mm_cvtsd_f64(_mm_unpackhi_pd(wlo, wlo)),
                                          _mm_cvtsd_f64(_mm_unpackhi_pd(wlo, wlo)));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), vw, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return s;
}

cplx dot_avx2(const cplx* a, const cplx* b, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(ap + 2 * i);
        const __m256d vb = _mm256_loadu_pd(bp + 2 * i);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);  // ar*br + ai*bi per lane pair
        const __m256d va_sw = _mm256_permute_pd(va, 0x5);  // [ai ar ...]
        acc_im = _mm256_fmadd_pd(va_sw, vb, acc_im);       // [ai*br, ar*bi, ...]
    }
    double re = hsum(acc_re);
    // imaginary part: odd lanes minus even lanes of acc_im
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, acc_im);
    double im = (tmp[1] - tmp[0]) + (tmp[3] - tmp[2]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{pointwise_multiply_avx2, outer_multiply_avx2,
                               squared_norm_avx2, weighted_squared_norm_avx2,
                               dot_avx2, "avx2"};
    return t;
}

}  // namespace chipgate::kernels

#endif  // x86_64
