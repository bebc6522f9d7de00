#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dynens/core.hpp"

namespace dynens {

/// K x K counts; rows are the true class, columns the predicted class.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t num_classes)
        : num_classes_(num_classes), counts_(num_classes * num_classes, 0) {}
    ConfusionMatrix(std::size_t num_classes, std::vector<std::int64_t> counts);

    std::size_t num_classes() const noexcept { return num_classes_; }
    std::int64_t at(std::size_t truth, std::size_t predicted) const noexcept {
        return counts_[truth * num_classes_ + predicted];
    }
    std::int64_t& at(std::size_t truth, std::size_t predicted) noexcept {
        return counts_[truth * num_classes_ + predicted];
    }
    std::int64_t total() const noexcept;
    std::int64_t row_sum(std::size_t truth) const noexcept;
    std::int64_t col_sum(std::size_t predicted) const noexcept;
    std::span<const std::int64_t> counts() const noexcept { return counts_; }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t num_classes_ = 0;
    std::vector<std::int64_t> counts_;
};

/// Throws LengthMismatch, LabelOutOfRange.
ConfusionMatrix confusion(std::span<const ClassIndex> y_true, std::span<const ClassIndex> y_pred,
                          std::size_t num_classes);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

struct AveragedMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    std::int64_t total = 0;
    AveragedMetrics macro_avg;
    AveragedMetrics weighted_avg;
};

/// Zero denominators yield 0, never NaN. Throws EmptyMatrix when total is 0.
ClassificationReport report(const ConfusionMatrix& cm);

/// Fraction of equal entries. Throws LengthMismatch.
double label_accuracy(std::span<const ClassIndex> y_true, std::span<const ClassIndex> y_pred);

struct WilcoxonResult {
    double statistic = 0.0;  // min(W+, W-)
    double p_value = 1.0;    // two-sided
    std::size_t n_effective = 0;
    bool exact = false;
};

/// Largest n_effective for which the exact null distribution is used.
inline constexpr std::size_t kWilcoxonExactMaxN = 20;

/// Paired signed-rank test. Zero differences are dropped and tied magnitudes
/// share their average rank. Exact two-sided p counts the sign assignments
/// whose min(W+, W-) is no larger than observed; above the cutoff a normal
/// approximation with tie and continuity correction is used.
/// Throws LengthMismatch, AllPairsEqual.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

/// Forces the normal approximation regardless of n (used to cross-check).
WilcoxonResult wilcoxon_signed_rank_normal(std::span<const double> x, std::span<const double> y);

}  // namespace dynens
