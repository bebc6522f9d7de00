#include "dynens/report.hpp"

#include <algorithm>

#include "dynens/dataio.hpp"

using nlohmann::json;

namespace dynens {

json to_json(const WeightingConfig& cfg) {
    return {{"lambda_init", cfg.lambda_init},
            {"delta", cfg.delta},
            {"lambda_min", cfg.lambda_min},
            {"lambda_max", cfg.lambda_max},
            {"acc_source", std::string(to_string(cfg.acc_source))},
            {"size_mode", std::string(to_string(cfg.size_mode))},
            {"normalize_weights", cfg.normalize_weights}};
}

WeightingConfig weighting_config_from_json(const json& j, WeightingConfig base) {
    try {
        base.lambda_init = j.value("lambda_init", base.lambda_init);
        base.delta = j.value("delta", base.delta);
        base.lambda_min = j.value("lambda_min", base.lambda_min);
        base.lambda_max = j.value("lambda_max", base.lambda_max);
        if (j.contains("acc_source")) base.acc_source = parse_acc_source(j.at("acc_source").get<std::string>());
        if (j.contains("size_mode")) base.size_mode = parse_size_mode(j.at("size_mode").get<std::string>());
        base.normalize_weights = j.value("normalize_weights", base.normalize_weights);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("weighting config: ") + e.what());
    }
    return base;
}

json trajectory_json(std::span<const EpochSnapshot> history) {
    json out = json::array();
    for (const auto& s : history) {
        out.push_back({{"epoch", s.epoch},
                       {"applied", s.applied},
                       {"acc", s.acc},
                       {"delta_acc", s.delta_acc},
                       {"lambda", s.lambda},
                       {"alpha", s.alpha},
                       {"beta", s.beta},
                       {"weights", s.weights}});
    }
    return out;
}

namespace {
json triple(double p, double r, double f) { return {{"precision", p}, {"recall", r}, {"f1", f}}; }
}  // namespace

json to_json(const ClassificationReport& report, std::span<const std::string> class_names) {
    json classes = json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        auto j = triple(m.precision, m.recall, m.f1);
        j["class"] = c;
        j["name"] = c < class_names.size() ? class_names[c] : "class_" + std::to_string(c);
        j["support"] = m.support;
        classes.push_back(std::move(j));
    }
    return {{"classes", classes},
            {"accuracy", report.accuracy},
            {"total", report.total},
            {"macro_avg", triple(report.macro_avg.precision, report.macro_avg.recall, report.macro_avg.f1)},
            {"weighted_avg",
             triple(report.weighted_avg.precision, report.weighted_avg.recall, report.weighted_avg.f1)}};
}

json to_json(const ConfusionMatrix& cm) {
    json rows = json::array();
    for (std::size_t t = 0; t < cm.num_classes(); ++t) {
        json row = json::array();
        for (std::size_t p = 0; p < cm.num_classes(); ++p) row.push_back(cm.at(t, p));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const LatencyStats& s) {
    return {{"p50_ms", s.p50_ms},
            {"mean_ms", s.mean_ms},
            {"std_ms", s.std_ms},
            {"overhead_fraction", s.overhead_fraction},
            {"reps", s.reps}};
}

json to_json(const AblationOutcome& outcome) {
    json rows = json::array();
    for (const auto& r : outcome.rows) {
        rows.push_back({{"name", r.name},
                        {"models", r.models},
                        {"dynamic", r.dynamic},
                        {"per_seed_accuracy", r.per_seed_accuracy},
                        {"mean_accuracy", r.mean_accuracy},
                        {"p_value", r.p_value},
                        {"n_effective", r.n_effective},
                        {"reference", r.reference}});
    }
    return {{"seed_mode", std::string(to_string(outcome.seed_mode))},
            {"seeds", outcome.seeds},
            {"rows", rows}};
}

json pareto_json(std::span<const ParetoPoint> points) {
    const auto frontier = pareto_points(points);
    json out = json::array();
    for (const auto& p : points) {
        const bool on = std::find(frontier.begin(), frontier.end(), p) != frontier.end();
        out.push_back({{"name", p.name}, {"accuracy", p.accuracy}, {"latency_ms", p.latency_ms}, {"on_frontier", on}});
    }
    return out;
}

json to_json(const WeightsFile& w) {
    return {{"mode", w.mode},
            {"models", w.models},
            {"final_weights", w.weights},
            {"config", w.config},
            {"trajectory", w.trajectory}};
}

WeightsFile weights_from_json(const json& j) {
    try {
        WeightsFile w;
        w.mode = j.value("mode", w.mode);
        w.models = j.at("models").get<std::vector<std::string>>();
        w.weights = j.at("final_weights").get<std::vector<double>>();
        w.config = j.value("config", json::object());
        w.trajectory = j.value("trajectory", json::array());
        if (w.models.size() != w.weights.size()) {
            fail(ErrorKind::ShapeMismatch, "weights file lists a different number of models and weights");
        }
        return w;
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, std::string("weights file: ") + e.what());
    }
}

WeightsFile read_weights_file(const std::filesystem::path& file) {
    return weights_from_json(read_json_file(file));
}

json to_json(const EvalReport& r) {
    json j = {{"config", r.config},
              {"mode", r.mode},
              {"models", r.models},
              {"final_weights", r.final_weights},
              {"trajectory", r.trajectory},
              {"standalone_accuracy", r.standalone_accuracy},
              {"classification_report", to_json(r.classification, r.class_names)},
              {"confusion_matrix", to_json(r.confusion)}};
    if (r.latency) j["latency"] = to_json(*r.latency);
    if (r.ablation) j["ablation"] = to_json(*r.ablation);
    if (r.pareto) j["pareto"] = pareto_json(*r.pareto);
    return j;
}

}  // namespace dynens
