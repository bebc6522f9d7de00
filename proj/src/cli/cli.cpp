#include "dynens/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynens/bench.hpp"
#include "dynens/dataio.hpp"
#include "dynens/inference.hpp"
#include "dynens/metrics.hpp"
#include "dynens/report.hpp"
#include "dynens/synth.hpp"
#include "dynens/weighting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dynens::cli {

namespace {

// Raw flag values; an option only takes effect when it was given on the
// command line (checked through its CLI::Option count).
struct CommonFlags {
    std::string bundle;
    std::string out;
    std::string config;
    std::uint64_t seed = 0;
    std::string mode = "dynamic";
    std::string size_mode;
    std::string acc_source;
    double delta = 0.0;
    double lambda_init = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool normalize = false;
    std::string models;
    std::string weights;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* size_mode_opt = nullptr;
    CLI::Option* acc_source_opt = nullptr;
    CLI::Option* delta_opt = nullptr;
    CLI::Option* lambda_init_opt = nullptr;
    CLI::Option* lambda_min_opt = nullptr;
    CLI::Option* lambda_max_opt = nullptr;
    CLI::Option* normalize_opt = nullptr;
    CLI::Option* models_opt = nullptr;
};

void add_weighting_flags(CLI::App* app, CommonFlags& f) {
    app->add_option("--bundle", f.bundle, "Trace bundle directory")->required();
    app->add_option("--config", f.config, "JSON run config; flags override its values");
    f.seed_opt = app->add_option("--seed", f.seed, "Seed for every random choice (default 0)");
    f.size_mode_opt = app->add_option("--size-mode", f.size_mode, "Size share: proportional or inverse")
                          ->check(CLI::IsMember({"proportional", "inverse"}));
    f.acc_source_opt = app->add_option("--acc-source", f.acc_source, "Accuracy series: train or validation")
                           ->check(CLI::IsMember({"train", "validation"}));
    f.delta_opt = app->add_option("--delta", f.delta, "Lambda update step (default 0.1)");
    f.lambda_init_opt = app->add_option("--lambda-init", f.lambda_init, "Initial lambda (default 0.5)");
    f.lambda_min_opt = app->add_option("--lambda-min", f.lambda_min, "Lower lambda clip (default 0.3)");
    f.lambda_max_opt = app->add_option("--lambda-max", f.lambda_max, "Upper lambda clip (default 0.9)");
    f.normalize_opt = app->add_flag("--normalize-weights", f.normalize, "Rescale final weights to sum to 1");
    f.models_opt = app->add_option("--models", f.models, "Comma-separated subset of models to use");
}

void add_mode_flags(CLI::App* app, CommonFlags& f) {
    f.mode_opt = app->add_option("--mode", f.mode, "Ensemble weighting: dynamic or static")
                     ->check(CLI::IsMember({"dynamic", "static"}));
    app->add_option("--weights", f.weights, "Weights JSON from `train` (dynamic mode; trained on the fly if omitted)");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Resolved {
    WeightingConfig cfg;
    std::string mode = "dynamic";
    std::vector<std::string> models;
    std::uint64_t seed = 0;
    json file = json::object();
};

Resolved resolve(const CommonFlags& f) {
    Resolved r;
    if (!f.config.empty()) r.file = read_json_file(f.config);
    r.cfg = weighting_config_from_json(r.file.value("weighting", r.file));
    if (r.file.contains("mode")) r.mode = r.file.at("mode").get<std::string>();
    if (r.file.contains("seed")) r.seed = r.file.at("seed").get<std::uint64_t>();
    if (r.file.contains("models")) {
        const auto& m = r.file.at("models");
        r.models = m.is_string() ? split_list(m.get<std::string>()) : m.get<std::vector<std::string>>();
    }

    if (f.seed_opt && f.seed_opt->count()) r.seed = f.seed;
    if (f.mode_opt && f.mode_opt->count()) r.mode = f.mode;
    if (f.size_mode_opt && f.size_mode_opt->count()) r.cfg.size_mode = parse_size_mode(f.size_mode);
    if (f.acc_source_opt && f.acc_source_opt->count()) r.cfg.acc_source = parse_acc_source(f.acc_source);
    if (f.delta_opt && f.delta_opt->count()) r.cfg.delta = f.delta;
    if (f.lambda_init_opt && f.lambda_init_opt->count()) r.cfg.lambda_init = f.lambda_init;
    if (f.lambda_min_opt && f.lambda_min_opt->count()) r.cfg.lambda_min = f.lambda_min;
    if (f.lambda_max_opt && f.lambda_max_opt->count()) r.cfg.lambda_max = f.lambda_max;
    if (f.normalize_opt && f.normalize_opt->count()) r.cfg.normalize_weights = f.normalize;
    if (f.models_opt && f.models_opt->count()) r.models = split_list(f.models);

    if (r.mode != "dynamic" && r.mode != "static") {
        fail(ErrorKind::InvalidConfig, "mode must be dynamic or static, got '" + r.mode + "'");
    }
    r.cfg.validate();
    return r;
}

json config_echo(const std::string& command, const CommonFlags& f, const Resolved& r) {
    return {{"command", command},      {"bundle", f.bundle},  {"mode", r.mode},
            {"models", r.models},      {"seed", r.seed},      {"weighting", to_json(r.cfg)},
            {"weights_file", f.weights}};
}

TraceBundle load_selected(const CommonFlags& f, const Resolved& r) {
    auto bundle = load_bundle(f.bundle);
    if (r.models.empty()) return bundle;
    return bundle.subset(r.models);
}

struct FrozenWeights {
    std::vector<double> weights;
    json trajectory = json::array();
};

FrozenWeights resolve_weights(const TraceBundle& bundle, const CommonFlags& f, const Resolved& r) {
    const auto n = bundle.models.size();
    if (r.mode == "static") return {std::vector<double>(n, 1.0 / static_cast<double>(n)), json::array()};
    if (f.weights.empty()) {
        const auto state = run_training(bundle.traces(), bundle.profiles(), r.cfg);
        return {state.weights, trajectory_json(state.history)};
    }
    const auto file = read_weights_file(f.weights);
    FrozenWeights out{std::vector<double>(n), file.trajectory};
    const auto names = bundle.model_names();
    if (file.models.size() != n) {
        fail(ErrorKind::ShapeMismatch, "weights file covers " + std::to_string(file.models.size()) +
                                           " models, selection has " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = std::find(file.models.begin(), file.models.end(), names[i]);
        if (it == file.models.end()) {
            fail(ErrorKind::ShapeMismatch, "weights file has no entry for model '" + names[i] + "'");
        }
        out.weights[i] = file.weights[static_cast<std::size_t>(it - file.models.begin())];
    }
    return out;
}

LabelVector predict(const TraceBundle& bundle, const std::string& mode,
                    std::span<const double> weights) {
    const auto preds = bundle.test_preds();
    if (mode == "static") return mean_softmax_predict(preds).labels;
    return ensemble_predict(preds, weights).labels;
}

void require_out(const std::string& out) {
    if (out.empty()) fail(ErrorKind::InvalidArgument, "--out is required");
}

// ----------------------------------------------------------------- commands

int cmd_simulate(const std::string& config, const std::string& out, CLI::Option* seed_opt,
                 std::uint64_t seed, bool epoch_preds, std::size_t threads, std::ostream& os) {
    auto experiment = experiment_from_json(read_json_file(config));
    if (seed_opt->count()) experiment.world.seed = seed;
    const auto bundle = simulate(experiment, {epoch_preds, threads});
    write_bundle(bundle, out);
    os << "wrote bundle " << out << " (" << bundle.models.size() << " models, "
       << bundle.manifest.epochs << " epochs, " << bundle.test_labels().size() << " test samples)\n";
    return 0;
}

int cmd_split(const std::string& labels_file, const std::string& out, const std::string& fractions,
              std::uint64_t seed, std::ostream& os) {
    const auto labels = read_labels_csv(labels_file);
    const auto parts = split_list(fractions);
    if (parts.size() != 3) fail(ErrorKind::BadFractions, "--fractions needs three comma-separated values");
    double f[3];
    for (int i = 0; i < 3; ++i) {
        try {
            f[i] = std::stod(parts[static_cast<std::size_t>(i)]);
        } catch (const std::exception&) {
            fail(ErrorKind::BadFractions, "'" + parts[static_cast<std::size_t>(i)] + "' is not a number");
        }
    }
    const auto split = stratified_split(labels, f[0], f[1], f[2], seed);
    const fs::path dir(out);
    write_index_csv(dir / "train_indices.csv", split.train);
    write_index_csv(dir / "val_indices.csv", split.val);
    write_index_csv(dir / "test_indices.csv", split.test);
    os << "split " << labels.size() << " samples into " << split.train.size() << "/" << split.val.size()
       << "/" << split.test.size() << "\n";
    return 0;
}

int cmd_train(const CommonFlags& f, std::ostream& os) {
    require_out(f.out);
    const auto r = resolve(f);
    const auto bundle = load_selected(f, r);
    const auto state = run_training(bundle.traces(), bundle.profiles(), r.cfg);
    WeightsFile w;
    w.mode = "dynamic";
    w.models = bundle.model_names();
    w.weights = state.weights;
    w.config = config_echo("train", f, r);
    w.trajectory = trajectory_json(state.history);
    write_text_file(f.out, canonical_dump(to_json(w)));
    os << "wrote " << state.history.size() << " epoch snapshots to " << f.out << "\n";
    return 0;
}

int cmd_infer(const CommonFlags& f, std::ostream& os) {
    require_out(f.out);
    const auto r = resolve(f);
    const auto bundle = load_selected(f, r);
    const auto frozen = resolve_weights(bundle, f, r);
    const auto labels = predict(bundle, r.mode, frozen.weights);
    write_labels_csv(f.out, labels);
    os << "wrote " << labels.size() << " predicted labels to " << f.out << "\n";
    return 0;
}

int cmd_eval(const CommonFlags& f, std::ostream& os) {
    require_out(f.out);
    const auto r = resolve(f);
    const auto bundle = load_selected(f, r);
    const auto frozen = resolve_weights(bundle, f, r);
    const auto& truth = bundle.test_labels();
    const auto predicted = predict(bundle, r.mode, frozen.weights);

    EvalReport rep;
    rep.config = config_echo("eval", f, r);
    rep.mode = r.mode;
    rep.models = bundle.model_names();
    rep.class_names = bundle.manifest.class_names;
    rep.final_weights = frozen.weights;
    rep.trajectory = frozen.trajectory;
    for (const auto& m : bundle.models) rep.standalone_accuracy.push_back(derive_accuracy(m.preds_test, truth));
    rep.confusion = confusion(truth, predicted, bundle.manifest.num_classes);
    rep.classification = report(rep.confusion);
    write_text_file(f.out, canonical_dump(to_json(rep)));
    os << r.mode << " ensemble accuracy " << format_double(rep.classification.accuracy) << " on "
       << truth.size() << " test samples; report written to " << f.out << "\n";
    return 0;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = base + i;
    return seeds;
}

int cmd_ablate(const CommonFlags& f, std::size_t num_seeds, const std::string& report_path,
               std::ostream& os) {
    require_out(f.out);
    const auto r = resolve(f);
    const auto bundle = load_selected(f, r);
    if (bundle.models.size() < 2) fail(ErrorKind::TooFewModels, "ablation needs at least two models");
    const auto outcome = run_ablation(bundle, r.cfg, seed_list(r.seed, num_seeds));
    write_text_file(f.out, ablation_csv(outcome));
    if (!report_path.empty()) {
        json j = {{"config", config_echo("ablate", f, r)}, {"ablation", to_json(outcome)}};
        write_text_file(report_path, canonical_dump(j));
    }
    for (const auto& row : outcome.rows) {
        os << row.name << " mean_accuracy=" << format_double(row.mean_accuracy)
           << " p=" << format_double(row.p_value) << "\n";
    }
    return 0;
}

int cmd_bench(const CommonFlags& f, std::size_t warmup, std::size_t reps, const std::string& timing,
              const std::string& report_path, std::ostream& os) {
    require_out(f.out);
    const auto r = resolve(f);
    const auto bundle = load_selected(f, r);
    const bool measured = timing == "measured";
    const auto& truth = bundle.test_labels();
    const auto per_sample = 1.0 / static_cast<double>(truth.size());

    // Standalone members: recorded latency when the profile has one,
    // otherwise the measured cost of reading off the recorded softmax.
    std::vector<double> member_ms;
    std::vector<ParetoPoint> points;
    for (const auto& m : bundle.models) {
        double latency = 0.0;
        if (m.profile.latency_ms) {
            latency = *m.profile.latency_ms;
        } else if (measured) {
            const auto& preds = m.preds_test;
            latency = measure_latency([&] { (void)argmax_labels(preds); }, warmup, reps).p50_ms * per_sample;
        } else {
            fail(ErrorKind::InvalidArgument,
                 "--timing profile needs latency_ms for every model; '" + m.profile.name + "' has none");
        }
        member_ms.push_back(latency);
        points.push_back({m.profile.name, derive_accuracy(m.preds_test, truth), latency});
    }

    const auto names = bundle.model_names();
    std::optional<LatencyStats> headline;
    if (bundle.models.size() >= 2) {
        for (const auto& variant : ablation_variants(names)) {
            const auto sub = bundle.subset(variant.models);
            const auto preds = sub.test_preds();
            std::vector<double> weights(preds.size(), 1.0 / static_cast<double>(preds.size()));
            if (variant.dynamic) weights = run_training(sub.traces(), sub.profiles(), r.cfg).weights;
            const auto predicted = variant.dynamic ? ensemble_predict(preds, weights).labels
                                                   : mean_softmax_predict(preds).labels;

            double members = 0.0;
            for (const auto& name : variant.models) {
                const auto idx = static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
                members += member_ms[idx];
            }
            double fusion = 0.0;
            if (measured) {
                auto stats = measure_latency(
                    [&] {
                        if (variant.dynamic) (void)ensemble_predict(preds, weights);
                        else (void)mean_softmax_predict(preds);
                    },
                    warmup, reps);
                fusion = stats.p50_ms * per_sample;
                if (variant.name == "full-dynamic") {
                    LatencyStats total;
                    total.reps = stats.reps;
                    total.p50_ms = members + fusion;
                    total.mean_ms = members + stats.mean_ms * per_sample;
                    total.std_ms = stats.std_ms * per_sample;
                    total.overhead_fraction = overhead_fraction(fusion, members);
                    headline = total;
                }
            }
            points.push_back({variant.name, label_accuracy(truth, predicted), members + fusion});
        }
    }

    write_text_file(f.out, pareto_csv(points));
    if (!report_path.empty()) {
        json j = {{"config", config_echo("bench", f, r)},
                  {"timing", timing},
                  {"warmup", warmup},
                  {"reps", reps},
                  {"pareto", pareto_json(points)}};
        if (headline) j["latency"] = to_json(*headline);
        write_text_file(report_path, canonical_dump(j));
    }
    for (const auto& p : pareto_points(points)) {
        os << "frontier: " << p.name << " accuracy=" << format_double(p.accuracy)
           << " latency_ms=" << format_double(p.latency_ms) << "\n";
    }
    if (headline) {
        os << "full-dynamic per-sample p50_ms=" << format_double(headline->p50_ms)
           << " overhead_fraction=" << format_double(headline->overhead_fraction) << "\n";
    }
    return 0;
}

std::string one_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive accuracy/size weighted ensembles over recorded prediction traces", "dynens"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    bool sim_epoch_preds = false;
    std::size_t sim_threads = 1;
    auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic trace bundle");
    simulate_cmd->add_option("--config", sim_config, "Experiment JSON (world + models + epochs)")->required();
    simulate_cmd->add_option("--out", sim_out, "Output bundle directory")->required();
    auto* sim_seed_opt = simulate_cmd->add_option("--seed", sim_seed, "Override the world seed");
    simulate_cmd->add_flag("--epoch-preds", sim_epoch_preds, "Also write per-epoch train/val prediction files");
    simulate_cmd->add_option("--threads", sim_threads, "Worker threads for generation (output is identical)")
        ->check(CLI::PositiveNumber);

    // split
    std::string split_labels, split_out, split_fractions = "0.8,0.1,0.1";
    std::uint64_t split_seed = 0;
    auto* split_cmd = app.add_subcommand("split", "Stratified train/val/test split of a labels file");
    split_cmd->add_option("--labels", split_labels, "Labels CSV (header 'label')")->required();
    split_cmd->add_option("--out", split_out, "Directory for {train,val,test}_indices.csv")->required();
    split_cmd->add_option("--fractions", split_fractions, "Train,val,test fractions (default 0.8,0.1,0.1)");
    split_cmd->add_option("--seed", split_seed, "Shuffle seed (default 0)");

    CommonFlags train_f, infer_f, eval_f, ablate_f, bench_f;

    auto* train_cmd = app.add_subcommand("train", "Run the weighting loop and write the weight trajectory");
    add_weighting_flags(train_cmd, train_f);
    train_cmd->add_option("--out", train_f.out, "Weights JSON output")->required();

    auto* infer_cmd = app.add_subcommand("infer", "Predict test labels with frozen weights");
    add_weighting_flags(infer_cmd, infer_f);
    add_mode_flags(infer_cmd, infer_f);
    infer_cmd->add_option("--out", infer_f.out, "Predicted labels CSV output")->required();

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate the ensemble and write an EvalReport JSON");
    add_weighting_flags(eval_cmd, eval_f);
    add_mode_flags(eval_cmd, eval_f);
    eval_cmd->add_option("--out", eval_f.out, "EvalReport JSON output")->required();

    std::size_t ablate_seeds = 10;
    std::string ablate_report;
    auto* ablate_cmd = app.add_subcommand("ablate", "Full/pairwise/static ablation with Wilcoxon tests");
    add_weighting_flags(ablate_cmd, ablate_f);
    ablate_cmd->add_option("--out", ablate_f.out, "Ablation CSV output")->required();
    ablate_cmd->add_option("--seeds", ablate_seeds, "Number of seeds, starting at --seed (default 10)")
        ->check(CLI::PositiveNumber);
    ablate_cmd->add_option("--report", ablate_report, "Optional JSON report with the ablation table");

    std::size_t bench_warmup = 3, bench_reps = 20;
    std::string bench_timing = "measured", bench_report;
    auto* bench_cmd = app.add_subcommand("bench", "Latency, fusion overhead and accuracy/latency Pareto points");
    add_weighting_flags(bench_cmd, bench_f);
    bench_cmd->add_option("--out", bench_f.out, "Pareto CSV output")->required();
    bench_cmd->add_option("--warmup", bench_warmup, "Discarded warm-up runs (default 3)");
    bench_cmd->add_option("--reps", bench_reps, "Timed runs, at least 5 (default 20)");
    bench_cmd->add_option("--timing", bench_timing,
                          "measured: time fusion on this machine; profile: manifest latencies only")
        ->check(CLI::IsMember({"measured", "profile"}));
    bench_cmd->add_option("--report", bench_report, "Optional JSON report with latency stats");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*simulate_cmd) {
            return cmd_simulate(sim_config, sim_out, sim_seed_opt, sim_seed, sim_epoch_preds, sim_threads, out);
        }
        if (*split_cmd) return cmd_split(split_labels, split_out, split_fractions, split_seed, out);
        if (*train_cmd) return cmd_train(train_f, out);
        if (*infer_cmd) return cmd_infer(infer_f, out);
        if (*eval_cmd) return cmd_eval(eval_f, out);
        if (*ablate_cmd) return cmd_ablate(ablate_f, ablate_seeds, ablate_report, out);
        if (*bench_cmd) return cmd_bench(bench_f, bench_warmup, bench_reps, bench_timing, bench_report, out);
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << one_line(e.what()) << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: IoError: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const json::exception& e) {
        err << "error: ParseError: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 2;
}

}  // namespace dynens::cli
