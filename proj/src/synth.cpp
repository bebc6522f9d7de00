#include "dynens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "dynens/rng.hpp"

namespace dynens {

namespace {

// Stream identifiers; part of the bundle reproducibility contract.
constexpr std::uint64_t kLabelStream = 1;
constexpr std::uint64_t kSharedStream = 2;
constexpr std::uint64_t kModelStream = 3;

std::uint64_t split_code(Split s) { return static_cast<std::uint64_t>(s); }

void require(bool ok, const std::string& message) {
    if (!ok) fail(ErrorKind::InvalidSynthSpec, message);
}

SplitMix64 model_stream(const SynthWorldSpec& world, std::size_t model, std::size_t epoch,
                        Split split, std::size_t sample) {
    return keyed_stream(world.seed, {kModelStream, model, epoch, split_code(split), sample});
}

double shared_draw(const SynthWorldSpec& world, std::size_t epoch, Split split,
                   std::size_t sample) {
    return keyed_stream(world.seed, {kSharedStream, epoch, split_code(split), sample}).uniform();
}

// Consumes exactly two draws from `rng`.
bool draw_correct(const SynthWorldSpec& world, double accuracy, std::size_t epoch, Split split,
                  std::size_t sample, SplitMix64& rng) {
    const bool use_shared = rng.uniform() < world.rho;
    const double own = rng.uniform();
    const double u = use_shared ? shared_draw(world, epoch, split, sample) : own;
    return u < accuracy;
}

PredictionMatrix model_predictions(const SynthWorldSpec& world, const SynthModelSpec& model,
                                   std::size_t model_index, std::size_t epoch, Split split,
                                   std::span<const ClassIndex> labels) {
    const std::size_t k = world.num_classes;
    const double accuracy = model.accuracy_at(epoch);
    const double off_peak = (1.0 - model.gamma) / static_cast<double>(k - 1);

    std::vector<double> probs(labels.size() * k);
    std::vector<double> jitter(k);
    for (std::size_t x = 0; x < labels.size(); ++x) {
        auto rng = model_stream(world, model_index, epoch, split, x);
        const ClassIndex truth = labels[x];
        ClassIndex peak = truth;
        if (!draw_correct(world, accuracy, epoch, split, x, rng)) {
            if (const auto it = model.confusion_bias.find(truth); it != model.confusion_bias.end()) {
                peak = it->second;
            } else {
                auto wrong = static_cast<ClassIndex>(rng.below(k - 1));
                peak = wrong >= truth ? wrong + 1 : wrong;
            }
        }

        double* row = probs.data() + x * k;
        if (model.kappa == 0.0) {
            for (std::size_t c = 0; c < k; ++c) row[c] = off_peak;
        } else {
            double mass = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                if (c == peak) continue;
                jitter[c] = 1.0 + model.kappa * rng.symmetric();
                mass += jitter[c];
            }
            for (std::size_t c = 0; c < k; ++c) {
                if (c != peak) row[c] = (1.0 - model.gamma) * (jitter[c] / mass);
            }
        }
        row[peak] = model.gamma;
    }
    return PredictionMatrix(labels.size(), k, std::move(probs), 1e-9);
}

}  // namespace

double SynthModelSpec::accuracy_at(std::size_t epoch) const {
    const double t = static_cast<double>(epoch) - 1.0;
    return a_inf - (a_inf - a0) * std::exp(-t / tau);
}

std::size_t SynthWorldSpec::samples(Split split) const {
    switch (split) {
        case Split::Train: return n_train;
        case Split::Val: return n_val;
        case Split::Test: return n_test;
    }
    return 0;
}

std::vector<double> SynthWorldSpec::priors() const {
    if (!class_priors.empty()) return class_priors;
    return std::vector<double>(num_classes, 1.0 / static_cast<double>(num_classes));
}

void validate(const SynthWorldSpec& world) {
    require(world.num_classes >= 2, "world needs at least two classes");
    require(world.class_names.empty() || world.class_names.size() == world.num_classes,
            "class_names length must equal num_classes");
    require(world.n_train >= 1 && world.n_val >= 1 && world.n_test >= 1,
            "every split needs at least one sample");
    require(world.rho >= 0.0 && world.rho <= 1.0, "rho must lie in [0,1]");
    if (!world.class_priors.empty()) {
        require(world.class_priors.size() == world.num_classes, "class_priors length != num_classes");
        double total = 0.0;
        for (const double p : world.class_priors) {
            require(p >= 0.0, "class priors must be non-negative");
            total += p;
        }
        require(std::abs(total - 1.0) <= 1e-9, "class priors must sum to 1");
    }
}

void validate(const SynthModelSpec& model, std::size_t num_classes) {
    validate_profile(model.profile);
    const auto& name = model.profile.name;
    const auto k = static_cast<double>(num_classes);
    require(model.a0 > 0.0 && model.a0 <= 1.0, name + ": a0 must lie in (0,1]");
    require(model.a_inf >= model.a0 && model.a_inf <= 1.0, name + ": a_inf must lie in [a0,1]");
    require(model.tau > 0.0, name + ": tau must be positive");
    require(model.gamma > 1.0 / k && model.gamma <= 1.0, name + ": gamma must lie in (1/K,1]");
    require(model.kappa >= 0.0 && model.kappa < 1.0, name + ": kappa must lie in [0,1)");
    const double kp = model.kappa;
    const double worst_off_peak = (1.0 - model.gamma) * (1.0 + kp) / ((1.0 + kp) + (k - 2.0) * (1.0 - kp));
    require(kp == 0.0 || worst_off_peak < model.gamma,
            name + ": kappa too large, jitter could overtake the peak class");
    for (const auto& [from, to] : model.confusion_bias) {
        require(from < num_classes && to < num_classes && from != to,
                name + ": confusion_bias entries must map a class to a different valid class");
    }
}

void validate(const SynthExperiment& experiment) {
    validate(experiment.world);
    require(experiment.epochs >= 1, "need at least one epoch");
    require(!experiment.models.empty(), "need at least one model");
    std::vector<ModelProfile> profiles;
    for (const auto& m : experiment.models) {
        validate(m, experiment.world.num_classes);
        profiles.push_back(m.profile);
    }
    validate_profiles(profiles);
}

LabelVector generate_labels(const SynthWorldSpec& world, Split split) {
    const auto priors = world.priors();
    LabelVector labels(world.samples(split));
    for (std::size_t x = 0; x < labels.size(); ++x) {
        const double u = keyed_stream(world.seed, {kLabelStream, split_code(split), x}).uniform();
        double cumulative = 0.0;
        ClassIndex chosen = static_cast<ClassIndex>(world.num_classes - 1);
        for (std::size_t c = 0; c < world.num_classes; ++c) {
            cumulative += priors[c];
            if (u < cumulative) {
                chosen = static_cast<ClassIndex>(c);
                break;
            }
        }
        labels[x] = chosen;
    }
    return labels;
}

std::vector<std::uint8_t> correctness_draws(const SynthWorldSpec& world, std::size_t model_index,
                                            double accuracy, std::size_t epoch, Split split,
                                            std::size_t num_samples) {
    std::vector<std::uint8_t> out(num_samples);
    for (std::size_t x = 0; x < num_samples; ++x) {
        auto rng = model_stream(world, model_index, epoch, split, x);
        out[x] = draw_correct(world, accuracy, epoch, split, x, rng) ? 1 : 0;
    }
    return out;
}

EpochPredictions generate_epoch_predictions(const SynthWorldSpec& world,
                                            std::span<const SynthModelSpec> models,
                                            std::size_t epoch, Split split,
                                            std::span<const ClassIndex> labels,
                                            std::size_t threads) {
    validate_labels(labels, world.num_classes);
    EpochPredictions out;
    out.preds.resize(models.size());
    out.accuracy.resize(models.size());

    auto work = [&](std::size_t i) {
        out.preds[i] = model_predictions(world, models[i], i, epoch, split, labels);
        out.accuracy[i] = derive_accuracy(out.preds[i], labels);
    };

    if (threads <= 1 || models.size() <= 1) {
        for (std::size_t i = 0; i < models.size(); ++i) work(i);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t workers = std::min(threads, models.size());
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < models.size(); i += workers) work(i);
            });
        }
    }
    return out;
}

TraceBundle simulate(const SynthExperiment& experiment, const SimulateOptions& options) {
    validate(experiment);
    const auto& world = experiment.world;
    const std::size_t n = experiment.models.size();

    TraceBundle bundle;
    auto& m = bundle.manifest;
    m.num_classes = world.num_classes;
    for (std::size_t c = 0; c < world.num_classes; ++c) {
        m.class_names.push_back(world.class_names.empty() ? "class_" + std::to_string(c)
                                                          : world.class_names[c]);
    }
    m.epochs = experiment.epochs;
    m.seed = world.seed;
    m.splits = {Split::Train, Split::Val, Split::Test};
    m.generator = to_json(experiment);

    for (const auto split : m.splits) bundle.labels[split] = generate_labels(world, split);

    bundle.models.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& rec = bundle.models[i];
        rec.profile = experiment.models[i].profile;
        m.models.push_back(rec.profile);
        rec.trace.epochs = experiment.epochs;
        rec.trace.train_acc.emplace();
        rec.trace.val_acc.emplace();
    }

    for (std::size_t t = 1; t <= experiment.epochs; ++t) {
        for (const auto split : {Split::Train, Split::Val}) {
            auto epoch = generate_epoch_predictions(world, experiment.models, t, split,
                                                    bundle.labels.at(split), options.threads);
            for (std::size_t i = 0; i < n; ++i) {
                auto& rec = bundle.models[i];
                auto& series = split == Split::Train ? *rec.trace.train_acc : *rec.trace.val_acc;
                series.push_back(epoch.accuracy[i]);
                if (options.keep_epoch_preds) rec.epoch_preds[t][split] = std::move(epoch.preds[i]);
            }
        }
    }
    auto test = generate_epoch_predictions(world, experiment.models, experiment.epochs, Split::Test,
                                           bundle.labels.at(Split::Test), options.threads);
    for (std::size_t i = 0; i < n; ++i) bundle.models[i].preds_test = std::move(test.preds[i]);
    return bundle;
}

nlohmann::json to_json(const SynthExperiment& experiment) {
    const auto& w = experiment.world;
    nlohmann::json world = {{"num_classes", w.num_classes}, {"n_train", w.n_train},
                            {"n_val", w.n_val},             {"n_test", w.n_test},
                            {"rho", w.rho},                 {"seed", w.seed},
                            {"class_priors", w.priors()}};
    if (!w.class_names.empty()) world["class_names"] = w.class_names;

    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : experiment.models) {
        auto j = to_json(m.profile);
        j["a0"] = m.a0;
        j["a_inf"] = m.a_inf;
        j["tau"] = m.tau;
        j["gamma"] = m.gamma;
        j["kappa"] = m.kappa;
        if (!m.confusion_bias.empty()) {
            nlohmann::json bias = nlohmann::json::object();
            for (const auto& [from, to] : m.confusion_bias) bias[std::to_string(from)] = to;
            j["confusion_bias"] = bias;
        }
        models.push_back(std::move(j));
    }
    return {{"epochs", experiment.epochs}, {"world", world}, {"models", models}};
}

SynthExperiment experiment_from_json(const nlohmann::json& j) {
    try {
        SynthExperiment e;
        e.epochs = j.value("epochs", e.epochs);
        const auto& w = j.at("world");
        e.world.num_classes = w.value("num_classes", e.world.num_classes);
        e.world.n_train = w.value("n_train", e.world.n_train);
        e.world.n_val = w.value("n_val", e.world.n_val);
        e.world.n_test = w.value("n_test", e.world.n_test);
        e.world.rho = w.value("rho", e.world.rho);
        e.world.seed = w.value("seed", e.world.seed);
        if (w.contains("class_priors")) e.world.class_priors = w.at("class_priors").get<std::vector<double>>();
        if (w.contains("class_names")) e.world.class_names = w.at("class_names").get<std::vector<std::string>>();

        for (const auto& mj : j.at("models")) {
            SynthModelSpec m;
            m.profile = profile_from_json(mj);
            m.a0 = mj.value("a0", m.a0);
            m.a_inf = mj.value("a_inf", m.a_inf);
            m.tau = mj.value("tau", m.tau);
            m.gamma = mj.value("gamma", m.gamma);
            m.kappa = mj.value("kappa", m.kappa);
            if (mj.contains("confusion_bias")) {
                for (const auto& [from, to] : mj.at("confusion_bias").items()) {
                    m.confusion_bias[static_cast<ClassIndex>(std::stoul(from))] = to.get<ClassIndex>();
                }
            }
            e.models.push_back(std::move(m));
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorKind::ParseError, std::string("synthetic experiment: ") + ex.what());
    } catch (const std::logic_error& ex) {
        fail(ErrorKind::ParseError, std::string("synthetic experiment: ") + ex.what());
    }
}

}  // namespace dynens
