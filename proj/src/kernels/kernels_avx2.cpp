// AVX2 variants. This translation unit is compiled with -mavx2; nothing here may
// run unless isa_available(Isa::avx2) is true.
#include "scfconv/kernels.hpp"

#include <cstddef>

#include <immintrin.h>

namespace scfconv::kernels::avx2 {

namespace {
inline double* dp(cxd* p) { return reinterpret_cast<double*>(p); }
inline const double* dp(const cxd* p) { return reinterpret_cast<const double*>(p); }
}  // namespace

void scale_real(std::span<cxd> z, std::span<const double> w) {
    const std::size_t n = z.size();
    double* zd = dp(z.data());
    std::size_t i = 0;
    // two complex values (four doubles) per step
    for (; i + 2 <= n; i += 2) {
        const __m128d w2 = _mm_loadu_pd(w.data() + i);
        // [w0 w0 w1 w1]
        const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
        const __m256d v = _mm256_loadu_pd(zd + 2 * i);
        _mm256_storeu_pd(zd + 2 * i, _mm256_mul_pd(v, ww));
    }
    for (; i < n; ++i) z[i] = cxd(z[i].real() * w[i], z[i].imag() * w[i]);
}

void hadamard(std::span<const cxd> a, std::span<const cxd> b, std::span<cxd> out) {
    const std::size_t n = out.size();
    const double* ad = dp(a.data());
    const double* bd = dp(b.data());
    double* od = dp(out.data());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(ad + 2 * i);
        const __m256d vb = _mm256_loadu_pd(bd + 2 * i);
        const __m256d b_re = _mm256_movedup_pd(vb);         // [br0 br0 br1 br1]
        const __m256d b_im = _mm256_permute_pd(vb, 0xF);    // [bi0 bi0 bi1 bi1]
        const __m256d a_sw = _mm256_permute_pd(va, 0x5);    // [ai0 ar0 ai1 ar1]
        const __m256d re_part = _mm256_mul_pd(va, b_re);
        const __m256d im_part = _mm256_mul_pd(a_sw, b_im);
        _mm256_storeu_pd(od + 2 * i, _mm256_addsub_pd(re_part, im_part));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cxd(ar * br - ai * bi, ai * br + ar * bi);
    }
}

double norm2_sq(std::span<const cxd> z) {
    const std::size_t n = z.size();
    const double* zd = dp(z.data());
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(zd + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(zd + 2 * i + 4);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(v0, v0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(v1, v1));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
    return s;
}

}  // namespace scfconv::kernels::avx2
