// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "gridcomm/error.hpp"
#include "gridcomm/kernels.hpp"

namespace gridcomm::kernels::avx2 {

void scale_clamp(std::span<double> data, double factor) {
    const __m256d f = _mm256_set1_pd(factor);
    const __m256d lo = _mm256_setzero_pd();
    const __m256d hi = _mm256_set1_pd(1.0);
    double* p = data.data();
    const std::size_t n = data.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_mul_pd(_mm256_loadu_pd(p + i), f);
        // maxpd/minpd return the second operand on NaN, as std::max/std::min do
        // with the value as first argument.
        v = _mm256_max_pd(lo, v);
        v = _mm256_min_pd(hi, v);
        _mm256_storeu_pd(p + i, v);
    }
    scalar::scale_clamp(data.subspan(i), factor);
}

void quantize_u8(std::span<const double> in, std::span<std::uint8_t> out) {
    if (out.size() < in.size()) throw ContractError("quantize_u8: output too small");
    const __m256d lo = _mm256_setzero_pd();
    const __m256d hi = _mm256_set1_pd(1.0);
    const __m256d scale = _mm256_set1_pd(255.0);
    const double* src = in.data();
    std::uint8_t* dst = out.data();
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(src + i);
        v = _mm256_min_pd(_mm256_max_pd(v, lo), hi);
        v = _mm256_round_pd(_mm256_mul_pd(v, scale), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        const __m128i ints = _mm256_cvtpd_epi32(v);
        alignas(16) std::int32_t lanes[4];
        _mm_store_si128(reinterpret_cast<__m128i*>(lanes), ints);
        for (int k = 0; k < 4; ++k) dst[i + static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(lanes[k]);
    }
    scalar::quantize_u8(in.subspan(i), out.subspan(i));
}

}  // namespace gridcomm::kernels::avx2
