#include <immintrin.h>

#include <cstdint>

#include "dynens/kernels.hpp"

namespace dynens::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

// Lane i reads m[(r + i) * cols + c]; rows are processed in blocks of four so
// each lane walks one row in column order, exactly like the scalar loop.
inline __m256i row_offsets(std::size_t cols) {
    const auto stride = static_cast<long long>(cols);
    return _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
}

}  // namespace

void accumulate_scaled(double* acc, const double* x, std::size_t n, double weight) {
    const __m256d w = _mm256_set1_pd(weight);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d product = _mm256_mul_pd(w, _mm256_loadu_pd(x + j));
        _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), product));
    }
    scalar::accumulate_scaled(acc + j, x + j, n - j, weight);
}

void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
    const __m256i offsets = row_offsets(cols);
    std::size_t r = 0;
    for (; r + kLanes <= rows; r += kLanes) {
        const double* base = m + r * cols;
        __m256d sum = _mm256_setzero_pd();
        for (std::size_t c = 0; c < cols; ++c) {
            sum = _mm256_add_pd(sum, _mm256_i64gather_pd(base + c, offsets, 8));
        }
        _mm256_storeu_pd(out + r, sum);
    }
    scalar::row_sums(m + r * cols, rows - r, cols, out + r);
}

void row_argmax(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out) {
    const __m256i offsets = row_offsets(cols);
    std::size_t r = 0;
    for (; r + kLanes <= rows; r += kLanes) {
        const double* base = m + r * cols;
        __m256d best = _mm256_i64gather_pd(base, offsets, 8);
        __m256d best_index = _mm256_setzero_pd();
        for (std::size_t c = 1; c < cols; ++c) {
            const __m256d v = _mm256_i64gather_pd(base + c, offsets, 8);
            const __m256d greater = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
            best = _mm256_blendv_pd(best, v, greater);
            best_index = _mm256_blendv_pd(best_index, _mm256_set1_pd(static_cast<double>(c)), greater);
        }
        alignas(32) double idx[kLanes];
        _mm256_store_pd(idx, best_index);
        for (std::size_t i = 0; i < kLanes; ++i) out[r + i] = static_cast<ClassIndex>(idx[i]);
    }
    scalar::row_argmax(m + r * cols, rows - r, cols, out + r);
}

}  // namespace dynens::kernels::avx2
