#pragma once

// Epoch-wise adaptive ensemble weighting.
//
// Each model i carries a balancing parameter lambda_i that mixes its share of
// the ensemble's accuracy (alpha_i) with its share of the ensemble's
// parameter budget (beta_i):
//
//     w_i = lambda_i * alpha_i + (1 - lambda_i) * beta_i
//
// lambda_i starts at lambda_init and, from the second epoch on, moves towards
// accuracy in proportion to the model's share of the positive accuracy gains:
//
//     lambda_i <- clip(lambda_i + delta * max(dA_i, 0) / sum_j max(dA_j, 0),
//                      lambda_min, lambda_max)
//
// Epochs where no model improved leave every lambda untouched.

#include <cstddef>
#include <span>
#include <vector>

#include "dynens/core.hpp"

namespace dynens {

/// Gains at or below this total are treated as "no model improved".
inline constexpr double kMinTotalGain = 1e-12;

/// alpha_i = acc_i / sum_j acc_j. Throws AllZeroAccuracies, InvalidArgument (n < 2).
std::vector<double> accuracy_proportion(std::span<const double> acc);

/// beta_i = S_i / sum_j S_j (proportional) or (1/S_i) / sum_j (1/S_j) (inverse).
std::vector<double> size_proportion(std::span<const ModelProfile> profiles, SizeMode mode);

struct LambdaUpdate {
    std::vector<double> lambda;
    bool applied = false;
};

LambdaUpdate update_lambdas(std::span<const double> lambda, std::span<const double> delta_acc,
                            const WeightingConfig& cfg);

/// Optionally rescaled to sum to one when `normalize` is set.
std::vector<double> final_weights(std::span<const double> lambda, std::span<const double> alpha,
                                  std::span<const double> beta, bool normalize);

struct EpochSnapshot {
    std::size_t epoch = 0;  // 1-based
    std::vector<double> acc;
    std::vector<double> delta_acc;  // empty at epoch 1
    bool applied = false;
    std::vector<double> lambda;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> weights;

    bool operator==(const EpochSnapshot&) const = default;
};

struct EnsembleState {
    std::size_t n_models = 0;
    std::vector<double> lambda;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> weights;
    std::vector<EpochSnapshot> history;

    bool operator==(const EnsembleState&) const = default;
};

/// Runs the epoch loop over recorded accuracy traces. Throws UnequalEpochCounts,
/// MissingAccuracySource, LengthMismatch (traces vs profiles), InvalidConfig.
EnsembleState run_training(std::span<const AccuracyTrace> traces,
                           std::span<const ModelProfile> profiles, const WeightingConfig& cfg);

}  // namespace dynens
