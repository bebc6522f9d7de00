#pragma once

// Seeded stand-ins for trained base classifiers.
//
// A synthetic model follows a saturating learning curve
//     a(t) = a_inf - (a_inf - a0) * exp(-(t - 1) / tau)
// and emits one softmax row per sample whose peak sits on the true label with
// probability a(t). Correctness is drawn from a stream shared by all models
// with probability rho, otherwise from the model's own stream, which gives
// the ensemble a tunable amount of error correlation.
//
// Every draw for (model, epoch, split, sample) comes from its own keyed
// SplitMix64 stream, so any subset can be regenerated on its own and
// editing one model never perturbs another.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "dynens/core.hpp"
#include "dynens/dataio.hpp"

namespace dynens {

struct SynthModelSpec {
    ModelProfile profile;
    double a0 = 0.5;
    double a_inf = 0.9;
    double tau = 4.0;
    double gamma = 0.7;
    /// Off-peak jitter amplitude; 0 disables jitter.
    double kappa = 0.0;
    /// true class -> preferred wrong class
    std::map<ClassIndex, ClassIndex> confusion_bias;

    double accuracy_at(std::size_t epoch) const;
};

struct SynthWorldSpec {
    std::size_t num_classes = 4;
    std::vector<std::string> class_names;  // optional; defaults to class_<k>
    std::size_t n_train = 1000;
    std::size_t n_val = 500;
    std::size_t n_test = 500;
    std::vector<double> class_priors;  // empty means uniform
    double rho = 0.0;
    std::uint64_t seed = 0;

    std::size_t samples(Split split) const;
    std::vector<double> priors() const;
};

struct SynthExperiment {
    SynthWorldSpec world;
    std::vector<SynthModelSpec> models;
    std::size_t epochs = 20;
};

/// Throws InvalidSynthSpec. The jitter bound keeps the peak class strictly
/// the largest entry: (1-gamma)(1+kappa) / ((1+kappa) + (K-2)(1-kappa)) < gamma.
void validate(const SynthWorldSpec& world);
void validate(const SynthModelSpec& model, std::size_t num_classes);
void validate(const SynthExperiment& experiment);

LabelVector generate_labels(const SynthWorldSpec& world, Split split);

struct EpochPredictions {
    std::vector<PredictionMatrix> preds;  // one per model
    std::vector<double> accuracy;         // realized top-1 accuracy per model
};

/// One prediction matrix per model for `split` at `epoch` (1-based).
/// `threads` > 1 generates models concurrently; output is identical.
EpochPredictions generate_epoch_predictions(const SynthWorldSpec& world,
                                            std::span<const SynthModelSpec> models,
                                            std::size_t epoch, Split split,
                                            std::span<const ClassIndex> labels,
                                            std::size_t threads = 1);

/// Per-sample correctness indicators, exposed for correlation tests.
std::vector<std::uint8_t> correctness_draws(const SynthWorldSpec& world, std::size_t model_index,
                                            double accuracy, std::size_t epoch, Split split,
                                            std::size_t num_samples);

struct SimulateOptions {
    bool keep_epoch_preds = false;
    std::size_t threads = 1;
};

/// Builds a complete bundle: labels for every split, per-epoch train/val
/// accuracy traces from realized predictions, final-epoch test predictions.
/// The experiment is recorded in the manifest as its generator.
TraceBundle simulate(const SynthExperiment& experiment, const SimulateOptions& options = {});

nlohmann::json to_json(const SynthExperiment& experiment);
SynthExperiment experiment_from_json(const nlohmann::json& j);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Per-class largest-remainder allocation after a seeded shuffle: every class
/// lands within one sample of its exact share in each split. Index lists are
/// ascending. Throws BadFractions, SmallClass (< 3 samples in a class).
SplitIndices stratified_split(std::span<const ClassIndex> labels, double train_fraction,
                              double val_fraction, double test_fraction, std::uint64_t seed);

}  // namespace dynens
