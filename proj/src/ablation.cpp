#include <numeric>
#include <sstream>

#include "dynens/bench.hpp"
#include "dynens/inference.hpp"
#include "dynens/metrics.hpp"
#include "dynens/rng.hpp"
#include "dynens/synth.hpp"
#include "dynens/weighting.hpp"

namespace dynens {

namespace {

constexpr std::uint64_t kBootstrapStream = 5;
constexpr const char* kFullDynamic = "full-dynamic";
constexpr const char* kStaticUniform = "static-uniform";

std::string join(std::span<const std::string> parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? std::string(1, sep) : "") + parts[i];
    return out;
}

std::vector<std::size_t> bootstrap_indices(std::uint64_t seed, std::size_t n) {
    auto rng = keyed_stream(seed, {kBootstrapStream});
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    return idx;
}

double resampled_accuracy(const LabelVector& truth, const LabelVector& predicted,
                          std::span<const std::size_t> indices) {
    std::size_t hits = 0;
    for (const auto i : indices) hits += truth[i] == predicted[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(indices.size());
}

}  // namespace

std::string_view to_string(SeedMode mode) noexcept {
    return mode == SeedMode::Regenerate ? "regenerate" : "bootstrap";
}

std::vector<AblationVariant> ablation_variants(std::span<const std::string> names) {
    std::vector<AblationVariant> out;
    out.push_back({kFullDynamic, {names.begin(), names.end()}, true});
    if (names.size() >= 3) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                out.push_back({names[i] + "+" + names[j], {names[i], names[j]}, true});
            }
        }
    }
    out.push_back({kStaticUniform, {names.begin(), names.end()}, false});
    return out;
}

LabelVector predict_variant(const TraceBundle& bundle, const AblationVariant& variant,
                            const WeightingConfig& cfg) {
    const auto sub = bundle.subset(variant.models);
    const auto preds = sub.test_preds();
    if (!variant.dynamic) return mean_softmax_predict(preds).labels;
    const auto state = run_training(sub.traces(), sub.profiles(), cfg);
    return ensemble_predict(preds, state.weights).labels;
}

AblationOutcome run_ablation(const TraceBundle& bundle, const WeightingConfig& cfg,
                             std::span<const std::uint64_t> seeds) {
    if (bundle.models.size() < 2) fail(ErrorKind::TooFewModels, "ablation needs at least two models");
    if (seeds.empty()) fail(ErrorKind::InvalidArgument, "ablation needs at least one seed");
    cfg.validate();

    AblationOutcome outcome;
    outcome.seeds.assign(seeds.begin(), seeds.end());
    outcome.seed_mode = bundle.manifest.generator ? SeedMode::Regenerate : SeedMode::Bootstrap;

    const auto variants = ablation_variants(bundle.model_names());
    outcome.rows.resize(variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        auto& row = outcome.rows[v];
        row.name = variants[v].name;
        row.models = variants[v].models;
        row.dynamic = variants[v].dynamic;
        row.reference = v == 0;
    }

    if (outcome.seed_mode == SeedMode::Regenerate) {
        auto experiment = experiment_from_json(*bundle.manifest.generator);
        for (const auto seed : seeds) {
            experiment.world.seed = seed;
            const auto regenerated = simulate(experiment);
            const auto& truth = regenerated.test_labels();
            for (std::size_t v = 0; v < variants.size(); ++v) {
                const auto predicted = predict_variant(regenerated, variants[v], cfg);
                outcome.rows[v].per_seed_accuracy.push_back(label_accuracy(truth, predicted));
            }
        }
    } else {
        const auto& truth = bundle.test_labels();
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto predicted = predict_variant(bundle, variants[v], cfg);
            for (const auto seed : seeds) {
                const auto idx = bootstrap_indices(seed, truth.size());
                outcome.rows[v].per_seed_accuracy.push_back(resampled_accuracy(truth, predicted, idx));
            }
        }
    }

    const auto& reference = outcome.rows.front().per_seed_accuracy;
    for (auto& row : outcome.rows) {
        const auto& acc = row.per_seed_accuracy;
        row.mean_accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
        if (row.reference) continue;
        try {
            const auto w = wilcoxon_signed_rank(acc, reference);
            row.p_value = w.p_value;
            row.n_effective = w.n_effective;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AllPairsEqual) throw;
            row.p_value = 1.0;
            row.n_effective = 0;
        }
    }
    return outcome;
}

std::string ablation_csv(const AblationOutcome& outcome) {
    std::ostringstream out;
    out << "name,models,dynamic,mean_accuracy,p_value,n_effective,reference,per_seed_accuracy\n";
    for (const auto& row : outcome.rows) {
        std::vector<std::string> accs;
        for (const double a : row.per_seed_accuracy) accs.push_back(format_double(a));
        out << row.name << ',' << join(row.models, '+') << ',' << (row.dynamic ? 1 : 0) << ','
            << format_double(row.mean_accuracy) << ',' << format_double(row.p_value) << ','
            << row.n_effective << ',' << (row.reference ? 1 : 0) << ',' << join(accs, ';') << '\n';
    }
    return out.str();
}

}  // namespace dynens
