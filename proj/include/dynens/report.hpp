#pragma once

// EvalReport and weight-trajectory JSON. Output goes through canonical_dump
// (sorted keys, shortest round-trip floats), so parsing a report and dumping
// it again reproduces the original bytes.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynens/bench.hpp"
#include "dynens/core.hpp"
#include "dynens/metrics.hpp"
#include "dynens/weighting.hpp"

namespace dynens {

nlohmann::json to_json(const WeightingConfig& cfg);
WeightingConfig weighting_config_from_json(const nlohmann::json& j, WeightingConfig base = {});

/// [{epoch, applied, acc, delta_acc, lambda, alpha, beta, weights}, ...]
nlohmann::json trajectory_json(std::span<const EpochSnapshot> history);

nlohmann::json to_json(const ClassificationReport& report,
                       std::span<const std::string> class_names);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const LatencyStats& stats);
nlohmann::json to_json(const AblationOutcome& outcome);
nlohmann::json pareto_json(std::span<const ParetoPoint> points);

/// What `train` writes and `infer`/`eval` read back.
struct WeightsFile {
    std::string mode = "dynamic";
    std::vector<std::string> models;
    std::vector<double> weights;
    nlohmann::json config;
    nlohmann::json trajectory = nlohmann::json::array();
};

nlohmann::json to_json(const WeightsFile& w);
WeightsFile weights_from_json(const nlohmann::json& j);
WeightsFile read_weights_file(const std::filesystem::path& file);

struct EvalReport {
    nlohmann::json config;
    std::string mode;
    std::vector<std::string> models;
    std::vector<std::string> class_names;
    std::vector<double> final_weights;
    nlohmann::json trajectory = nlohmann::json::array();
    std::vector<double> standalone_accuracy;
    ClassificationReport classification;
    ConfusionMatrix confusion;
    std::optional<LatencyStats> latency;
    std::optional<AblationOutcome> ablation;
    std::optional<std::vector<ParetoPoint>> pareto;
};

nlohmann::json to_json(const EvalReport& report);

}  // namespace dynens
