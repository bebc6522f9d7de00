#include "dynens/core.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "dynens/kernels.hpp"

namespace dynens {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonPositiveCount: return "NonPositiveCount";
        case ErrorKind::MismatchedParamCount: return "MismatchedParamCount";
        case ErrorKind::DuplicateModelName: return "DuplicateModelName";
        case ErrorKind::InvalidProbabilityRow: return "InvalidProbabilityRow";
        case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::AllZeroAccuracies: return "AllZeroAccuracies";
        case ErrorKind::UnequalEpochCounts: return "UnequalEpochCounts";
        case ErrorKind::MissingAccuracySource: return "MissingAccuracySource";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::AllZeroWeights: return "AllZeroWeights";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::EmptyMatrix: return "EmptyMatrix";
        case ErrorKind::AllPairsEqual: return "AllPairsEqual";
        case ErrorKind::SmallClass: return "SmallClass";
        case ErrorKind::BadFractions: return "BadFractions";
        case ErrorKind::InvalidSynthSpec: return "InvalidSynthSpec";
        case ErrorKind::MissingManifest: return "MissingManifest";
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::SchemaVersionUnsupported: return "SchemaVersionUnsupported";
        case ErrorKind::RowCountMismatch: return "RowCountMismatch";
        case ErrorKind::BadProbabilityRow: return "BadProbabilityRow";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::TooFewModels: return "TooFewModels";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::int64_t count_parameters(std::span<const LayerShape> layers) {
    std::int64_t total = 0;
    for (const auto& shape : layers) {
        std::int64_t product = 1;
        for (const auto dim : shape) {
            if (dim < 1) fail(ErrorKind::NonPositiveCount, "layer dimension must be >= 1");
            if (product > std::numeric_limits<std::int64_t>::max() / dim) {
                fail(ErrorKind::InvalidArgument, "layer parameter count overflows int64");
            }
            product *= dim;
        }
        total += product;
    }
    return total;
}

void validate_profile(const ModelProfile& profile) {
    if (profile.param_count < 1) {
        fail(ErrorKind::NonPositiveCount,
             "model '" + profile.name + "' has param_count " + std::to_string(profile.param_count));
    }
    if (profile.layer_shapes) {
        const auto summed = count_parameters(*profile.layer_shapes);
        if (summed != profile.param_count) {
            fail(ErrorKind::MismatchedParamCount,
                 "model '" + profile.name + "': layer shapes sum to " + std::to_string(summed) +
                     " but param_count is " + std::to_string(profile.param_count));
        }
    }
    if (profile.latency_ms && !(*profile.latency_ms > 0.0 && std::isfinite(*profile.latency_ms))) {
        fail(ErrorKind::InvalidArgument, "model '" + profile.name + "': latency_ms must be positive");
    }
}

void validate_profiles(std::span<const ModelProfile> profiles) {
    std::set<std::string> seen;
    for (const auto& p : profiles) {
        validate_profile(p);
        if (!seen.insert(p.name).second) {
            fail(ErrorKind::DuplicateModelName, "model name '" + p.name + "' appears twice");
        }
    }
}

std::optional<std::size_t> find_bad_probability_row(std::span<const double> probs,
                                                    std::size_t num_classes,
                                                    double tolerance) {
    if (num_classes == 0) return std::nullopt;
    const std::size_t rows = probs.size() / num_classes;
    std::vector<double> sums(rows);
    kernels::active().row_sums(probs.data(), rows, num_classes, sums.data());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            const double p = probs[r * num_classes + c];
            if (!(p >= 0.0 && p <= 1.0)) return r;
        }
        if (!(std::abs(sums[r] - 1.0) <= tolerance)) return r;
    }
    return std::nullopt;
}

PredictionMatrix::PredictionMatrix(std::size_t num_samples, std::size_t num_classes,
                                   std::vector<double> probs, double tolerance)
    : num_samples_(num_samples), num_classes_(num_classes), probs_(std::move(probs)) {
    if (num_samples_ == 0) fail(ErrorKind::ShapeMismatch, "prediction matrix needs at least one row");
    if (num_classes_ < 2) fail(ErrorKind::ShapeMismatch, "prediction matrix needs at least two classes");
    if (probs_.size() != num_samples_ * num_classes_) {
        fail(ErrorKind::ShapeMismatch, "prediction matrix has " + std::to_string(probs_.size()) +
                                           " entries, expected " +
                                           std::to_string(num_samples_ * num_classes_));
    }
    if (const auto bad = find_bad_probability_row(probs_, num_classes_, tolerance)) {
        fail(ErrorKind::InvalidProbabilityRow,
             "row " + std::to_string(*bad) + " is not a probability distribution");
    }
}

const std::vector<double>& AccuracyTrace::series(AccSource source) const {
    const auto& s = source == AccSource::Train ? train_acc : val_acc;
    if (!s) {
        fail(ErrorKind::MissingAccuracySource,
             "accuracy trace has no " + std::string(to_string(source)) + " series");
    }
    return *s;
}

void validate_trace(const AccuracyTrace& trace) {
    if (trace.epochs < 1) fail(ErrorKind::NonPositiveCount, "accuracy trace needs at least one epoch");
    if (!trace.train_acc && !trace.val_acc) {
        fail(ErrorKind::MissingAccuracySource, "accuracy trace has neither train nor val series");
    }
    for (const auto* s : {&trace.train_acc, &trace.val_acc}) {
        if (!*s) continue;
        if ((*s)->size() != trace.epochs) {
            fail(ErrorKind::LengthMismatch, "accuracy series length differs from epoch count");
        }
        for (const double a : **s) {
            if (!(a >= 0.0 && a <= 1.0)) fail(ErrorKind::InvalidArgument, "accuracy outside [0,1]");
        }
    }
}

void validate_labels(std::span<const ClassIndex> labels, std::size_t num_classes) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= num_classes) {
            fail(ErrorKind::LabelOutOfRange, "label " + std::to_string(labels[i]) + " at row " +
                                                 std::to_string(i) + " is >= " +
                                                 std::to_string(num_classes));
        }
    }
}

void WeightingConfig::validate() const {
    const bool ordered = 0.0 <= lambda_min && lambda_min <= lambda_init &&
                         lambda_init <= lambda_max && lambda_max <= 1.0;
    if (!ordered) {
        fail(ErrorKind::InvalidConfig, "need 0 <= lambda_min <= lambda_init <= lambda_max <= 1");
    }
    if (!(delta > 0.0 && std::isfinite(delta))) fail(ErrorKind::InvalidConfig, "delta must be > 0");
}

std::string_view to_string(AccSource source) noexcept {
    return source == AccSource::Train ? "train" : "validation";
}

std::string_view to_string(SizeMode mode) noexcept {
    return mode == SizeMode::Proportional ? "proportional" : "inverse";
}

AccSource parse_acc_source(std::string_view text) {
    if (text == "train") return AccSource::Train;
    if (text == "validation" || text == "val") return AccSource::Validation;
    fail(ErrorKind::InvalidConfig, "unknown accuracy source '" + std::string(text) + "'");
}

SizeMode parse_size_mode(std::string_view text) {
    if (text == "proportional") return SizeMode::Proportional;
    if (text == "inverse") return SizeMode::Inverse;
    fail(ErrorKind::InvalidConfig, "unknown size mode '" + std::string(text) + "'");
}

}  // namespace dynens
