#pragma once

// Hand-rolled random generators for property tests.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dynens/core.hpp"
#include "dynens/weighting.hpp"

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
    }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

    /// Accuracy series in (0, 1]: a noisy random walk, sometimes flat.
    std::vector<double> accuracy_series(std::size_t epochs) {
        std::vector<double> out(epochs);
        double a = uniform(0.05, 0.95);
        const bool flat = coin(0.1);
        for (auto& v : out) {
            if (!flat) a = std::clamp(a + uniform(-0.05, 0.08), 0.01, 1.0);
            v = a;
        }
        return out;
    }

    std::vector<dynens::AccuracyTrace> traces(std::size_t models, std::size_t epochs) {
        std::vector<dynens::AccuracyTrace> out(models);
        for (auto& t : out) {
            t.epochs = epochs;
            t.train_acc = accuracy_series(epochs);
            t.val_acc = accuracy_series(epochs);
        }
        return out;
    }

    std::vector<dynens::ModelProfile> profiles(std::size_t models) {
        std::vector<dynens::ModelProfile> out(models);
        for (std::size_t i = 0; i < models; ++i) {
            out[i].name = "m" + std::to_string(i);
            out[i].param_count = static_cast<std::int64_t>(index(1000, 5'000'000));
        }
        return out;
    }

    /// Rows of strictly positive entries normalized to sum to one.
    std::vector<double> softmax_rows(std::size_t rows, std::size_t cols) {
        std::vector<double> out(rows * cols);
        for (std::size_t r = 0; r < rows; ++r) {
            double total = 0.0;
            for (std::size_t c = 0; c < cols; ++c) total += out[r * cols + c] = uniform(1e-3, 1.0);
            for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] /= total;
        }
        return out;
    }

    dynens::PredictionMatrix prediction_matrix(std::size_t rows, std::size_t cols) {
        return {rows, cols, softmax_rows(rows, cols)};
    }

    dynens::LabelVector labels(std::size_t n, std::size_t num_classes) {
        dynens::LabelVector out(n);
        for (auto& y : out) y = static_cast<dynens::ClassIndex>(index(0, num_classes - 1));
        return out;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace gen
