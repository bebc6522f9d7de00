#include <arm_neon.h>

#include "dynens/kernels.hpp"

namespace dynens::kernels::neon {

namespace {
constexpr std::size_t kLanes = 2;

inline float64x2_t load_column(const double* base, std::size_t cols, std::size_t c) {
    float64x2_t v = vdupq_n_f64(base[c]);
    return vsetq_lane_f64(base[cols + c], v, 1);
}
}  // namespace

void accumulate_scaled(double* acc, const double* x, std::size_t n, double weight) {
    const float64x2_t w = vdupq_n_f64(weight);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const float64x2_t product = vmulq_f64(w, vld1q_f64(x + j));
        vst1q_f64(acc + j, vaddq_f64(vld1q_f64(acc + j), product));
    }
    scalar::accumulate_scaled(acc + j, x + j, n - j, weight);
}

void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
    std::size_t r = 0;
    for (; r + kLanes <= rows; r += kLanes) {
        const double* base = m + r * cols;
        float64x2_t sum = vdupq_n_f64(0.0);
        for (std::size_t c = 0; c < cols; ++c) sum = vaddq_f64(sum, load_column(base, cols, c));
        vst1q_f64(out + r, sum);
    }
    scalar::row_sums(m + r * cols, rows - r, cols, out + r);
}

void row_argmax(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out) {
    std::size_t r = 0;
    for (; r + kLanes <= rows; r += kLanes) {
        const double* base = m + r * cols;
        float64x2_t best = load_column(base, cols, 0);
        uint64x2_t best_index = vdupq_n_u64(0);
        for (std::size_t c = 1; c < cols; ++c) {
            const float64x2_t v = load_column(base, cols, c);
            const uint64x2_t greater = vcgtq_f64(v, best);
            best = vbslq_f64(greater, v, best);
            best_index = vbslq_u64(greater, vdupq_n_u64(c), best_index);
        }
        out[r] = static_cast<ClassIndex>(vgetq_lane_u64(best_index, 0));
        out[r + 1] = static_cast<ClassIndex>(vgetq_lane_u64(best_index, 1));
    }
    scalar::row_argmax(m + r * cols, rows - r, cols, out + r);
}

}  // namespace dynens::kernels::neon
