#include "dynens/kernels.hpp"

namespace dynens::kernels::scalar {

void accumulate_scaled(double* acc, const double* x, std::size_t n, double weight) {
    for (std::size_t j = 0; j < n; ++j) {
        const double product = weight * x[j];
        acc[j] = acc[j] + product;
    }
}

void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) sum = sum + row[c];
        out[r] = sum;
    }
}

void row_argmax(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        ClassIndex best_index = 0;
        double best = row[0];
        for (std::size_t c = 1; c < cols; ++c) {
            // strict > keeps the smallest index among ties
            if (row[c] > best) {
                best = row[c];
                best_index = static_cast<ClassIndex>(c);
            }
        }
        out[r] = best_index;
    }
}

}  // namespace dynens::kernels::scalar
