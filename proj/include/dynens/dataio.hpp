#pragma once

// TraceBundle: the on-disk contract between whatever trained the base models
// and this engine.
//
//   manifest.json
//   labels_{train,val,test}.csv              header "label"
//   models/{name}/accuracy_trace.csv         header "epoch,train_acc,val_acc"
//   models/{name}/preds_test.csv             header "c0,...,c{K-1}"
//   models/{name}/epoch_{t}/preds_{split}.csv   optional, per-epoch matrices
//
// Row order of every prediction file matches the labels file of its split.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dynens/core.hpp"

namespace dynens {

inline constexpr int kSchemaVersion = 1;

enum class Split { Train, Val, Test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view text);

struct Manifest {
    int schema_version = kSchemaVersion;
    std::size_t num_classes = 0;
    std::vector<std::string> class_names;
    std::size_t epochs = 0;
    std::uint64_t seed = 0;
    std::vector<ModelProfile> models;
    std::vector<Split> splits;
    /// Row-sum tolerance for this bundle's prediction files, at most 1e-4.
    double prob_tolerance = kDefaultProbTolerance;
    /// Recipe that produced a synthetic bundle; lets ablations regenerate it
    /// under other seeds.
    std::optional<nlohmann::json> generator;
};

struct ModelRecord {
    ModelProfile profile;
    AccuracyTrace trace;
    PredictionMatrix preds_test;
    std::map<std::size_t, std::map<Split, PredictionMatrix>> epoch_preds;
};

struct TraceBundle {
    Manifest manifest;
    std::map<Split, LabelVector> labels;
    std::vector<ModelRecord> models;

    std::vector<ModelProfile> profiles() const;
    std::vector<AccuracyTrace> traces() const;
    std::vector<PredictionMatrix> test_preds() const;
    const LabelVector& test_labels() const;
    std::vector<std::string> model_names() const;

    /// Restriction to the named models, in the given order. Throws InvalidArgument.
    TraceBundle subset(std::span<const std::string> names) const;

    /// Full fail-fast validation of every cross-file invariant.
    void validate() const;
};

/// Throws MissingManifest, SchemaVersionUnsupported, MissingFile,
/// RowCountMismatch, BadProbabilityRow, ParseError.
TraceBundle load_bundle(const std::filesystem::path& dir);

/// Writes every file of the layout; per-epoch matrices only when present.
void write_bundle(const TraceBundle& bundle, const std::filesystem::path& dir);

/// Fraction of rows whose argmax (smallest index on ties) equals the label.
/// Throws ShapeMismatch.
double derive_accuracy(const PredictionMatrix& preds, std::span<const ClassIndex> labels);

// CSV building blocks, shared with the CLI.
LabelVector read_labels_csv(const std::filesystem::path& file);
void write_labels_csv(const std::filesystem::path& file, std::span<const ClassIndex> labels);
void write_index_csv(const std::filesystem::path& file, std::span<const std::size_t> indices);
PredictionMatrix read_preds_csv(const std::filesystem::path& file, std::size_t num_classes,
                                double tolerance);
void write_preds_csv(const std::filesystem::path& file, const PredictionMatrix& preds);
AccuracyTrace read_trace_csv(const std::filesystem::path& file);
void write_trace_csv(const std::filesystem::path& file, const AccuracyTrace& trace);

/// Round-trip decimal form (%.17g) used for every float written to CSV.
std::string format_double(double value);

nlohmann::json to_json(const ModelProfile& profile);
ModelProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& j);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);
void write_text_file(const std::filesystem::path& file, std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path& file);

}  // namespace dynens
