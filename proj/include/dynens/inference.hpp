#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynens/core.hpp"
#include "dynens/kernels.hpp"

namespace dynens {

/// Fused per-class scores, row-major N x K. Not renormalized: only the argmax
/// is meaningful.
struct FusedScores {
    std::size_t num_samples = 0;
    std::size_t num_classes = 0;
    std::vector<double> scores;

    std::span<const double> row(std::size_t i) const {
        return {scores.data() + i * num_classes, num_classes};
    }
};

struct EnsemblePrediction {
    LabelVector labels;
    FusedScores fused;
};

/// fused[x,c] = sum_i w_i * P_i[x,c], accumulated in model order; labels are
/// the row argmax with ties going to the smallest class index.
/// Throws ShapeMismatch, AllZeroWeights, InvalidArgument (negative weight).
EnsemblePrediction ensemble_predict(std::span<const PredictionMatrix> preds,
                                    std::span<const double> weights);
EnsemblePrediction ensemble_predict(std::span<const PredictionMatrix> preds,
                                    std::span<const double> weights,
                                    const kernels::KernelTable& kernels);

/// Static uniform baseline: the arithmetic mean of the softmax rows,
/// (sum_i P_i[x,c]) / n, then argmax.
EnsemblePrediction mean_softmax_predict(std::span<const PredictionMatrix> preds);
EnsemblePrediction mean_softmax_predict(std::span<const PredictionMatrix> preds,
                                        const kernels::KernelTable& kernels);

/// Row argmax with smallest-index tie-break.
LabelVector argmax_labels(const PredictionMatrix& preds);

}  // namespace dynens
