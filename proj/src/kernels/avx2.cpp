#include "ivis/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define IVIS_HAVE_X86 1
#else
#define IVIS_HAVE_X86 0
#endif

#include <cmath>

namespace ivis::kernels::avx2 {

#if IVIS_HAVE_X86

#define IVIS_AVX2 __attribute__((target("avx2")))

IVIS_AVX2 void points_in_polygon(std::span<const double> px, std::span<const double> py,
                                 PolygonView poly, double eps, std::span<std::uint8_t> out) {
    const std::size_t n = poly.x.size();
    const std::size_t count = px.size();
    if (n < 3) {
        for (std::size_t k = 0; k < count; ++k) out[k] = 0;
        return;
    }
    const __m256d vzero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        const __m256d x = _mm256_loadu_pd(px.data() + k);
        const __m256d y = _mm256_loadu_pd(py.data() + k);
        __m256d inside = vzero;
        __m256d on_edge = vzero;
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const double dxs = poly.x[j] - poly.x[i];
            const double dys = poly.y[j] - poly.y[i];
            const double len2s = dxs * dxs + dys * dys;
            const double lens = std::sqrt(len2s);
            const double tols = eps * lens;

            const __m256d xi = _mm256_set1_pd(poly.x[i]);
            const __m256d yi = _mm256_set1_pd(poly.y[i]);
            const __m256d yj = _mm256_set1_pd(poly.y[j]);
            const __m256d dx = _mm256_set1_pd(dxs);
            const __m256d dy = _mm256_set1_pd(dys);
            const __m256d len2 = _mm256_set1_pd(len2s);
            const __m256d tol = _mm256_set1_pd(tols);
            const __m256d neg_tol = _mm256_set1_pd(-tols);

            const __m256d rx = _mm256_sub_pd(x, xi);
            const __m256d ry = _mm256_sub_pd(y, yi);
            const __m256d cr = _mm256_sub_pd(_mm256_mul_pd(dx, ry), _mm256_mul_pd(dy, rx));
            const __m256d along = _mm256_add_pd(_mm256_mul_pd(dx, rx), _mm256_mul_pd(dy, ry));
            const __m256d near_line =
                _mm256_cmp_pd(_mm256_mul_pd(cr, cr), _mm256_mul_pd(tol, tol), _CMP_LE_OQ);
            const __m256d after_start = _mm256_cmp_pd(along, neg_tol, _CMP_GE_OQ);
            const __m256d before_end =
                _mm256_cmp_pd(along, _mm256_add_pd(len2, tol), _CMP_LE_OQ);
            on_edge = _mm256_or_pd(on_edge,
                                   _mm256_and_pd(near_line, _mm256_and_pd(after_start, before_end)));

            const __m256d above_i = _mm256_cmp_pd(yi, y, _CMP_GT_OQ);
            const __m256d above_j = _mm256_cmp_pd(yj, y, _CMP_GT_OQ);
            const __m256d straddles = _mm256_xor_pd(above_i, above_j);
            const __m256d xcross = _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(dx, ry), dy), xi);
            const __m256d left = _mm256_cmp_pd(x, xcross, _CMP_LT_OQ);
            inside = _mm256_xor_pd(inside, _mm256_and_pd(straddles, left));
        }
        const int bits = _mm256_movemask_pd(_mm256_or_pd(inside, on_edge));
        for (int lane = 0; lane < 4; ++lane) out[k + lane] = (bits >> lane) & 1;
    }
    if (k < count) {
        scalar::points_in_polygon(px.subspan(k), py.subspan(k), poly, eps, out.subspan(k));
    }
}

IVIS_AVX2 void apply_mask_gray(std::span<const std::uint8_t> src,
                               std::span<const std::uint8_t> mask,
                               std::span<std::uint8_t> dst) {
    const std::size_t n = src.size();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src.data() + i));
        const __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask.data() + i));
        const __m256i drop = _mm256_cmpeq_epi8(m, zero);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst.data() + i), _mm256_andnot_si256(drop, s));
    }
    if (i < n) scalar::apply_mask_gray(src.subspan(i), mask.subspan(i), dst.subspan(i));
}

IVIS_AVX2 void apply_mask_rgb(std::span<const std::uint8_t> src,
                              std::span<const std::uint8_t> mask,
                              std::span<std::uint8_t> dst) {
    const std::size_t pixels = mask.size();
    // Byte k of each 16-byte output block takes mask byte (block * 16 + k) / 3.
    const __m128i spread0 = _mm_setr_epi8(0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5);
    const __m128i spread1 = _mm_setr_epi8(5, 5, 6, 6, 6, 7, 7, 7, 8, 8, 8, 9, 9, 9, 10, 10);
    const __m128i spread2 = _mm_setr_epi8(10, 11, 11, 11, 12, 12, 12, 13, 13, 13, 14, 14, 14, 15,
                                          15, 15);
    const __m128i zero = _mm_setzero_si128();
    std::size_t i = 0;
    for (; i + 16 <= pixels; i += 16) {
        const __m128i m = _mm_loadu_si128(reinterpret_cast<const __m128i*>(mask.data() + i));
        const __m128i drop = _mm_cmpeq_epi8(m, zero);
        const std::uint8_t* s = src.data() + 3 * i;
        std::uint8_t* d = dst.data() + 3 * i;
        const __m128i d0 = _mm_shuffle_epi8(drop, spread0);
        const __m128i d1 = _mm_shuffle_epi8(drop, spread1);
        const __m128i d2 = _mm_shuffle_epi8(drop, spread2);
        const __m128i s0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s));
        const __m128i s1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s + 16));
        const __m128i s2 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s + 32));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(d), _mm_andnot_si128(d0, s0));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(d + 16), _mm_andnot_si128(d1, s1));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(d + 32), _mm_andnot_si128(d2, s2));
    }
    if (i < pixels) {
        scalar::apply_mask_rgb(src.subspan(3 * i), mask.subspan(i), dst.subspan(3 * i));
    }
}

IVIS_AVX2 std::size_t count_nonzero(std::span<const std::uint8_t> bytes) {
    const std::size_t n = bytes.size();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t total = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bytes.data() + i));
        const auto zeros = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
        total += 32 - static_cast<std::size_t>(__builtin_popcount(zeros));
    }
    if (i < n) total += scalar::count_nonzero(bytes.subspan(i));
    return total;
}

#else  // no x86: the dispatcher never selects these

void points_in_polygon(std::span<const double> px, std::span<const double> py,
                       PolygonView poly, double eps, std::span<std::uint8_t> out) {
    scalar::points_in_polygon(px, py, poly, eps, out);
}
void apply_mask_gray(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                     std::span<std::uint8_t> dst) {
    scalar::apply_mask_gray(src, mask, dst);
}
void apply_mask_rgb(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                    std::span<std::uint8_t> dst) {
    scalar::apply_mask_rgb(src, mask, dst);
}
std::size_t count_nonzero(std::span<const std::uint8_t> bytes) {
    return scalar::count_nonzero(bytes);
}

#endif

}  // namespace ivis::kernels::avx2
