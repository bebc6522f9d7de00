#pragma once

// Shared domain types. Everything here is immutable once constructed and
// validation is pure, so values can be handed across threads freely.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynens/error.hpp"

namespace dynens {

using ClassIndex = std::uint32_t;
using LayerShape = std::vector<std::int64_t>;

/// Row-sum tolerance for probability rows unless a bundle declares otherwise.
inline constexpr double kDefaultProbTolerance = 1e-6;
/// Loosest tolerance a bundle manifest may request (float32 softmax output).
inline constexpr double kMaxProbTolerance = 1e-4;

struct ModelProfile {
    std::string name;
    std::int64_t param_count = 0;
    std::optional<std::vector<LayerShape>> layer_shapes;
    std::optional<double> latency_ms;

    bool operator==(const ModelProfile&) const = default;
};

/// Sum over layers of the product of that layer's dimensions.
std::int64_t count_parameters(std::span<const LayerShape> layers);

/// Throws NonPositiveCount or MismatchedParamCount.
void validate_profile(const ModelProfile& profile);

/// Validates each profile and rejects duplicate names.
void validate_profiles(std::span<const ModelProfile> profiles);

/// Dense row-major N x K matrix of per-class probabilities.
class PredictionMatrix {
public:
    PredictionMatrix() = default;

    /// Validates shape, entry range and row sums; throws InvalidProbabilityRow
    /// naming the first offending row. Rows are never renormalized.
    PredictionMatrix(std::size_t num_samples, std::size_t num_classes,
                     std::vector<double> probs,
                     double tolerance = kDefaultProbTolerance);

    std::size_t num_samples() const noexcept { return num_samples_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::span<const double> data() const noexcept { return probs_; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {probs_.data() + i * num_classes_, num_classes_};
    }
    double at(std::size_t i, std::size_t c) const noexcept {
        return probs_[i * num_classes_ + c];
    }

    bool operator==(const PredictionMatrix&) const = default;

private:
    std::size_t num_samples_ = 0;
    std::size_t num_classes_ = 0;
    std::vector<double> probs_;
};

/// Index of the first row that violates the probability invariants, if any.
std::optional<std::size_t> find_bad_probability_row(std::span<const double> probs,
                                                    std::size_t num_classes,
                                                    double tolerance);

enum class AccSource { Train, Validation };

struct AccuracyTrace {
    std::size_t epochs = 0;
    std::optional<std::vector<double>> train_acc;
    std::optional<std::vector<double>> val_acc;

    /// The requested series; throws MissingAccuracySource when absent.
    const std::vector<double>& series(AccSource source) const;

    bool operator==(const AccuracyTrace&) const = default;
};

void validate_trace(const AccuracyTrace& trace);

using LabelVector = std::vector<ClassIndex>;

/// Throws LabelOutOfRange naming the first label >= num_classes.
void validate_labels(std::span<const ClassIndex> labels, std::size_t num_classes);

enum class SizeMode { Proportional, Inverse };

struct WeightingConfig {
    double lambda_init = 0.5;
    double delta = 0.1;
    double lambda_min = 0.3;
    double lambda_max = 0.9;
    AccSource acc_source = AccSource::Validation;
    SizeMode size_mode = SizeMode::Proportional;
    bool normalize_weights = false;

    /// Requires 0 <= lambda_min <= lambda_init <= lambda_max <= 1 and delta > 0.
    void validate() const;

    bool operator==(const WeightingConfig&) const = default;
};

std::string_view to_string(AccSource source) noexcept;
std::string_view to_string(SizeMode mode) noexcept;
AccSource parse_acc_source(std::string_view text);
SizeMode parse_size_mode(std::string_view text);

}  // namespace dynens
