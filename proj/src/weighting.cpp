#include "dynens/weighting.hpp"

#include <algorithm>
#include <string>

namespace dynens {

namespace {

std::vector<double> normalized(std::span<const double> values) {
    double total = 0.0;
    for (const double v : values) total += v;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / total;
    return out;
}

}  // namespace

std::vector<double> accuracy_proportion(std::span<const double> acc) {
    if (acc.size() < 2) fail(ErrorKind::InvalidArgument, "need at least two models");
    double total = 0.0;
    for (const double a : acc) {
        if (!(a >= 0.0)) fail(ErrorKind::InvalidArgument, "accuracies must be non-negative");
        total += a;
    }
    if (total <= 0.0) fail(ErrorKind::AllZeroAccuracies, "every model has zero accuracy");
    return normalized(acc);
}

std::vector<double> size_proportion(std::span<const ModelProfile> profiles, SizeMode mode) {
    if (profiles.size() < 2) fail(ErrorKind::InvalidArgument, "need at least two models");
    std::vector<double> sizes;
    sizes.reserve(profiles.size());
    for (const auto& p : profiles) {
        validate_profile(p);
        const auto s = static_cast<double>(p.param_count);
        sizes.push_back(mode == SizeMode::Proportional ? s : 1.0 / s);
    }
    return normalized(sizes);
}

LambdaUpdate update_lambdas(std::span<const double> lambda, std::span<const double> delta_acc,
                            const WeightingConfig& cfg) {
    if (lambda.size() != delta_acc.size()) {
        fail(ErrorKind::LengthMismatch, "lambda and accuracy-gain vectors differ in length");
    }
    LambdaUpdate out{std::vector<double>(lambda.begin(), lambda.end()), false};

    double total_gain = 0.0;
    for (const double d : delta_acc) total_gain += std::max(d, 0.0);
    if (total_gain <= kMinTotalGain) return out;

    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (delta_acc[i] <= 0.0) continue;
        const double raw = lambda[i] + cfg.delta * (delta_acc[i] / total_gain);
        out.lambda[i] = std::clamp(raw, cfg.lambda_min, cfg.lambda_max);
    }
    out.applied = true;
    return out;
}

std::vector<double> final_weights(std::span<const double> lambda, std::span<const double> alpha,
                                  std::span<const double> beta, bool normalize) {
    if (lambda.size() != alpha.size() || lambda.size() != beta.size()) {
        fail(ErrorKind::LengthMismatch, "lambda, alpha and beta differ in length");
    }
    std::vector<double> w(lambda.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = lambda[i] * alpha[i] + (1.0 - lambda[i]) * beta[i];
    }
    if (normalize) w = normalized(w);
    return w;
}

EnsembleState run_training(std::span<const AccuracyTrace> traces,
                           std::span<const ModelProfile> profiles, const WeightingConfig& cfg) {
    cfg.validate();
    if (traces.size() != profiles.size()) {
        fail(ErrorKind::LengthMismatch, std::to_string(traces.size()) + " traces for " +
                                            std::to_string(profiles.size()) + " profiles");
    }
    if (traces.size() < 2) fail(ErrorKind::TooFewModels, "weighting needs at least two models");

    const std::size_t n = traces.size();
    const std::size_t epochs = traces.front().epochs;
    std::vector<const std::vector<double>*> series;
    for (const auto& t : traces) {
        validate_trace(t);
        if (t.epochs != epochs) {
            fail(ErrorKind::UnequalEpochCounts, "traces disagree on the number of epochs");
        }
        series.push_back(&t.series(cfg.acc_source));
    }

    EnsembleState state;
    state.n_models = n;
    state.lambda.assign(n, cfg.lambda_init);
    state.beta = size_proportion(profiles, cfg.size_mode);

    std::vector<double> acc(n);
    std::vector<double> previous(n);
    for (std::size_t t = 0; t < epochs; ++t) {
        for (std::size_t i = 0; i < n; ++i) acc[i] = (*series[i])[t];

        EpochSnapshot snap;
        snap.epoch = t + 1;
        snap.acc = acc;
        if (t > 0) {
            snap.delta_acc.resize(n);
            for (std::size_t i = 0; i < n; ++i) snap.delta_acc[i] = acc[i] - previous[i];
            auto update = update_lambdas(state.lambda, snap.delta_acc, cfg);
            state.lambda = std::move(update.lambda);
            snap.applied = update.applied;
        }
        state.alpha = accuracy_proportion(acc);
        state.weights = final_weights(state.lambda, state.alpha, state.beta, cfg.normalize_weights);

        snap.lambda = state.lambda;
        snap.alpha = state.alpha;
        snap.beta = state.beta;
        snap.weights = state.weights;
        state.history.push_back(std::move(snap));
        previous = acc;
    }
    return state;
}

}  // namespace dynens
