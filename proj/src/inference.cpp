#include "dynens/inference.hpp"

#include <cmath>
#include <string>

namespace dynens {

namespace {

void check_stack(std::span<const PredictionMatrix> preds) {
    if (preds.empty()) fail(ErrorKind::ShapeMismatch, "no prediction matrices to fuse");
    const auto n = preds.front().num_samples();
    const auto k = preds.front().num_classes();
    for (std::size_t i = 1; i < preds.size(); ++i) {
        if (preds[i].num_samples() != n || preds[i].num_classes() != k) {
            fail(ErrorKind::ShapeMismatch,
                 "prediction matrix " + std::to_string(i) + " is " +
                     std::to_string(preds[i].num_samples()) + "x" +
                     std::to_string(preds[i].num_classes()) + ", expected " + std::to_string(n) +
                     "x" + std::to_string(k));
        }
    }
}

EnsemblePrediction finish(FusedScores fused, const kernels::KernelTable& kernels) {
    EnsemblePrediction out;
    out.labels.resize(fused.num_samples);
    kernels.row_argmax(fused.scores.data(), fused.num_samples, fused.num_classes,
                       out.labels.data());
    out.fused = std::move(fused);
    return out;
}

FusedScores accumulate(std::span<const PredictionMatrix> preds, std::span<const double> weights,
                       const kernels::KernelTable& kernels) {
    FusedScores fused{preds.front().num_samples(), preds.front().num_classes(), {}};
    fused.scores.assign(fused.num_samples * fused.num_classes, 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        kernels.accumulate_scaled(fused.scores.data(), preds[i].data().data(),
                                  fused.scores.size(), weights[i]);
    }
    return fused;
}

}  // namespace

EnsemblePrediction ensemble_predict(std::span<const PredictionMatrix> preds,
                                    std::span<const double> weights) {
    return ensemble_predict(preds, weights, kernels::active());
}

EnsemblePrediction ensemble_predict(std::span<const PredictionMatrix> preds,
                                    std::span<const double> weights,
                                    const kernels::KernelTable& kernels) {
    check_stack(preds);
    if (weights.size() != preds.size()) {
        fail(ErrorKind::ShapeMismatch, std::to_string(weights.size()) + " weights for " +
                                           std::to_string(preds.size()) + " models");
    }
    bool any_positive = false;
    for (const double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            fail(ErrorKind::InvalidArgument, "ensemble weights must be finite and non-negative");
        }
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) fail(ErrorKind::AllZeroWeights, "every ensemble weight is zero");
    return finish(accumulate(preds, weights, kernels), kernels);
}

EnsemblePrediction mean_softmax_predict(std::span<const PredictionMatrix> preds) {
    return mean_softmax_predict(preds, kernels::active());
}

EnsemblePrediction mean_softmax_predict(std::span<const PredictionMatrix> preds,
                                        const kernels::KernelTable& kernels) {
    check_stack(preds);
    // Unit weights make each accumulation step an exact copy of P_i, so the
    // accumulator holds the plain running sum before the division.
    const std::vector<double> ones(preds.size(), 1.0);
    auto fused = accumulate(preds, ones, kernels);
    const auto n = static_cast<double>(preds.size());
    for (auto& s : fused.scores) s = s / n;
    return finish(std::move(fused), kernels);
}

LabelVector argmax_labels(const PredictionMatrix& preds) {
    LabelVector labels(preds.num_samples());
    kernels::active().row_argmax(preds.data().data(), preds.num_samples(), preds.num_classes(),
                                 labels.data());
    return labels;
}

}  // namespace dynens
