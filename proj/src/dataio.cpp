#include "dynens/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dynens/inference.hpp"
#include "dynens/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dynens {

namespace {

std::string where(const fs::path& file, std::size_t line) {
    return file.string() + ":" + std::to_string(line);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Model names double as directory names inside a bundle.
void check_manifest_header(const Manifest& m) {
    if (!(m.prob_tolerance >= kDefaultProbTolerance && m.prob_tolerance <= kMaxProbTolerance)) {
        fail(ErrorKind::InvalidConfig, "prob_tolerance must lie in [1e-6, 1e-4]");
    }
    for (const auto& p : m.models) {
        if (p.name.empty() || p.name == "." || p.name == ".." ||
            p.name.find_first_of("/\\") != std::string::npos) {
            fail(ErrorKind::InvalidArgument, "model name '" + p.name + "' is not usable as a directory name");
        }
    }
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // row i sits on line i + 2
};

CsvTable read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::MissingFile, "cannot open " + file.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            table.header = split_fields(line);
            continue;
        }
        if (line.empty()) continue;
        table.rows.push_back(split_fields(line));
    }
    if (line_no == 0) fail(ErrorKind::ParseError, where(file, 1) + ": empty file, header missing");
    return table;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& expected, const fs::path& file) {
    if (t.header != expected) fail(ErrorKind::ParseError, where(file, 1) + ": unexpected header");
}

double parse_double(const std::string& text, const fs::path& file, std::size_t line) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        fail(ErrorKind::ParseError, where(file, line) + ": '" + text + "' is not a number");
    }
    return value;
}

template <class Int>
Int parse_int(const std::string& text, const fs::path& file, std::size_t line) {
    Int value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        fail(ErrorKind::ParseError, where(file, line) + ": '" + text + "' is not an integer");
    }
    return value;
}

std::ofstream open_out(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + file.string());
    return out;
}

fs::path model_dir(const fs::path& dir, const std::string& name) { return dir / "models" / name; }

fs::path labels_path(const fs::path& dir, Split split) {
    return dir / ("labels_" + std::string(to_string(split)) + ".csv");
}

fs::path epoch_preds_path(const fs::path& mdir, std::size_t epoch, Split split) {
    return mdir / ("epoch_" + std::to_string(epoch)) /
           ("preds_" + std::string(to_string(split)) + ".csv");
}

}  // namespace

std::string_view to_string(Split split) noexcept {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "unknown";
}

Split parse_split(std::string_view text) {
    if (text == "train") return Split::Train;
    if (text == "val") return Split::Val;
    if (text == "test") return Split::Test;
    fail(ErrorKind::ParseError, "unknown split '" + std::string(text) + "'");
}

std::string format_double(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------- CSV files

LabelVector read_labels_csv(const fs::path& file) {
    const auto t = read_csv(file);
    expect_header(t, {"label"}, file);
    LabelVector labels;
    labels.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].size() != 1) fail(ErrorKind::ParseError, where(file, i + 2) + ": expected one field");
        labels.push_back(parse_int<ClassIndex>(t.rows[i][0], file, i + 2));
    }
    return labels;
}

void write_labels_csv(const fs::path& file, std::span<const ClassIndex> labels) {
    auto out = open_out(file);
    out << "label\n";
    for (const auto y : labels) out << y << '\n';
}

void write_index_csv(const fs::path& file, std::span<const std::size_t> indices) {
    auto out = open_out(file);
    out << "index\n";
    for (const auto i : indices) out << i << '\n';
}

PredictionMatrix read_preds_csv(const fs::path& file, std::size_t num_classes, double tolerance) {
    const auto t = read_csv(file);
    std::vector<std::string> header;
    for (std::size_t c = 0; c < num_classes; ++c) header.push_back("c" + std::to_string(c));
    expect_header(t, header, file);
    if (t.rows.empty()) fail(ErrorKind::ParseError, where(file, 2) + ": no prediction rows");

    std::vector<double> probs;
    probs.reserve(t.rows.size() * num_classes);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].size() != num_classes) {
            fail(ErrorKind::ParseError, where(file, i + 2) + ": expected " +
                                            std::to_string(num_classes) + " fields");
        }
        for (const auto& f : t.rows[i]) probs.push_back(parse_double(f, file, i + 2));
    }
    if (const auto bad = find_bad_probability_row(probs, num_classes, tolerance)) {
        fail(ErrorKind::BadProbabilityRow,
             where(file, *bad + 2) + ": row " + std::to_string(*bad) +
                 " is not a probability distribution (entries in [0,1], sum within " +
                 format_double(tolerance) + " of 1)");
    }
    return PredictionMatrix(t.rows.size(), num_classes, std::move(probs), tolerance);
}

void write_preds_csv(const fs::path& file, const PredictionMatrix& preds) {
    auto out = open_out(file);
    for (std::size_t c = 0; c < preds.num_classes(); ++c) {
        out << (c ? "," : "") << 'c' << c;
    }
    out << '\n';
    for (std::size_t i = 0; i < preds.num_samples(); ++i) {
        const auto row = preds.row(i);
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

AccuracyTrace read_trace_csv(const fs::path& file) {
    const auto t = read_csv(file);
    expect_header(t, {"epoch", "train_acc", "val_acc"}, file);
    AccuracyTrace trace;
    trace.epochs = t.rows.size();
    std::vector<double> train, val;
    std::size_t train_present = 0, val_present = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (r.size() != 3) fail(ErrorKind::ParseError, where(file, i + 2) + ": expected three fields");
        if (parse_int<std::size_t>(r[0], file, i + 2) != i + 1) {
            fail(ErrorKind::ParseError, where(file, i + 2) + ": epochs must run 1, 2, ... in order");
        }
        if (!r[1].empty()) {
            train.push_back(parse_double(r[1], file, i + 2));
            ++train_present;
        }
        if (!r[2].empty()) {
            val.push_back(parse_double(r[2], file, i + 2));
            ++val_present;
        }
    }
    for (const auto count : {train_present, val_present}) {
        if (count != 0 && count != trace.epochs) {
            fail(ErrorKind::ParseError, file.string() + ": a column is only partially filled");
        }
    }
    if (train_present) trace.train_acc = std::move(train);
    if (val_present) trace.val_acc = std::move(val);
    validate_trace(trace);
    return trace;
}

void write_trace_csv(const fs::path& file, const AccuracyTrace& trace) {
    auto out = open_out(file);
    out << "epoch,train_acc,val_acc\n";
    for (std::size_t t = 0; t < trace.epochs; ++t) {
        out << (t + 1) << ',';
        if (trace.train_acc) out << format_double((*trace.train_acc)[t]);
        out << ',';
        if (trace.val_acc) out << format_double((*trace.val_acc)[t]);
        out << '\n';
    }
}

double derive_accuracy(const PredictionMatrix& preds, std::span<const ClassIndex> labels) {
    if (preds.num_samples() != labels.size()) {
        fail(ErrorKind::ShapeMismatch, std::to_string(preds.num_samples()) + " prediction rows vs " +
                                           std::to_string(labels.size()) + " labels");
    }
    return label_accuracy(labels, argmax_labels(preds));
}

// --------------------------------------------------------------------- JSON

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const fs::path& file, std::string_view text) {
    auto out = open_out(file);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

json read_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::MissingFile, "cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, file.string() + ": " + e.what());
    }
}

json to_json(const ModelProfile& p) {
    json j = {{"name", p.name}, {"param_count", p.param_count}};
    if (p.layer_shapes) j["layer_shapes"] = *p.layer_shapes;
    if (p.latency_ms) j["latency_ms"] = *p.latency_ms;
    return j;
}

ModelProfile profile_from_json(const json& j) {
    try {
        ModelProfile p;
        p.name = j.at("name").get<std::string>();
        p.param_count = j.at("param_count").get<std::int64_t>();
        if (j.contains("layer_shapes")) p.layer_shapes = j.at("layer_shapes").get<std::vector<LayerShape>>();
        if (j.contains("latency_ms")) p.latency_ms = j.at("latency_ms").get<double>();
        return p;
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, std::string("model profile: ") + e.what());
    }
}

json to_json(const Manifest& m) {
    json models = json::array();
    for (const auto& p : m.models) models.push_back(to_json(p));
    json splits = json::array();
    for (const auto s : m.splits) splits.push_back(std::string(to_string(s)));
    json j = {{"schema_version", m.schema_version},
              {"num_classes", m.num_classes},
              {"class_names", m.class_names},
              {"epochs", m.epochs},
              {"seed", m.seed},
              {"models", models},
              {"splits", splits}};
    if (m.prob_tolerance != kDefaultProbTolerance) j["prob_tolerance"] = m.prob_tolerance;
    if (m.generator) j["generator"] = *m.generator;
    return j;
}

Manifest manifest_from_json(const json& j) {
    Manifest m;
    try {
        m.schema_version = j.at("schema_version").get<int>();
        if (m.schema_version != kSchemaVersion) {
            fail(ErrorKind::SchemaVersionUnsupported,
                 "schema_version " + std::to_string(m.schema_version) + " is not supported");
        }
        m.num_classes = j.at("num_classes").get<std::size_t>();
        m.class_names = j.value("class_names", std::vector<std::string>{});
        m.epochs = j.at("epochs").get<std::size_t>();
        m.seed = j.value("seed", std::uint64_t{0});
        for (const auto& mj : j.at("models")) m.models.push_back(profile_from_json(mj));
        for (const auto& s : j.at("splits")) m.splits.push_back(parse_split(s.get<std::string>()));
        m.prob_tolerance = j.value("prob_tolerance", kDefaultProbTolerance);
        if (j.contains("generator")) m.generator = j.at("generator");
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, std::string("manifest: ") + e.what());
    }
    return m;
}

// ------------------------------------------------------------------- bundle

std::vector<ModelProfile> TraceBundle::profiles() const {
    std::vector<ModelProfile> out;
    for (const auto& m : models) out.push_back(m.profile);
    return out;
}

std::vector<AccuracyTrace> TraceBundle::traces() const {
    std::vector<AccuracyTrace> out;
    for (const auto& m : models) out.push_back(m.trace);
    return out;
}

std::vector<PredictionMatrix> TraceBundle::test_preds() const {
    std::vector<PredictionMatrix> out;
    for (const auto& m : models) out.push_back(m.preds_test);
    return out;
}

const LabelVector& TraceBundle::test_labels() const {
    const auto it = labels.find(Split::Test);
    if (it == labels.end()) fail(ErrorKind::MissingFile, "bundle has no test labels");
    return it->second;
}

std::vector<std::string> TraceBundle::model_names() const {
    std::vector<std::string> out;
    for (const auto& m : models) out.push_back(m.profile.name);
    return out;
}

TraceBundle TraceBundle::subset(std::span<const std::string> names) const {
    TraceBundle out;
    out.manifest = manifest;
    out.manifest.models.clear();
    out.manifest.generator.reset();
    out.labels = labels;
    std::set<std::string> seen;
    for (const auto& name : names) {
        const auto it = std::find_if(models.begin(), models.end(),
                                     [&](const ModelRecord& r) { return r.profile.name == name; });
        if (it == models.end()) fail(ErrorKind::InvalidArgument, "bundle has no model named '" + name + "'");
        if (!seen.insert(name).second) fail(ErrorKind::DuplicateModelName, "model '" + name + "' listed twice");
        out.models.push_back(*it);
        out.manifest.models.push_back(it->profile);
    }
    return out;
}

void TraceBundle::validate() const {
    const auto& m = manifest;
    if (m.schema_version != kSchemaVersion) {
        fail(ErrorKind::SchemaVersionUnsupported, "unsupported schema_version");
    }
    if (m.num_classes < 2) fail(ErrorKind::ShapeMismatch, "num_classes must be at least 2");
    if (!m.class_names.empty() && m.class_names.size() != m.num_classes) {
        fail(ErrorKind::ShapeMismatch, "class_names length differs from num_classes");
    }
    check_manifest_header(m);
    if (std::find(m.splits.begin(), m.splits.end(), Split::Test) == m.splits.end()) {
        fail(ErrorKind::MissingFile, "manifest must declare the test split");
    }
    validate_profiles(m.models);
    if (m.models.size() != models.size()) fail(ErrorKind::ShapeMismatch, "manifest/model count mismatch");

    for (const auto s : m.splits) {
        const auto it = labels.find(s);
        if (it == labels.end()) fail(ErrorKind::MissingFile, "labels for split " + std::string(to_string(s)));
        validate_labels(it->second, m.num_classes);
    }
    const auto n_test = test_labels().size();
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& rec = models[i];
        if (!(rec.profile == m.models[i])) fail(ErrorKind::ShapeMismatch, "model record out of manifest order");
        validate_trace(rec.trace);
        if (rec.trace.epochs != m.epochs) {
            fail(ErrorKind::UnequalEpochCounts, rec.profile.name + ": trace has " +
                                                    std::to_string(rec.trace.epochs) + " epochs, manifest says " +
                                                    std::to_string(m.epochs));
        }
        if (rec.preds_test.num_classes() != m.num_classes) {
            fail(ErrorKind::ShapeMismatch, rec.profile.name + ": wrong class count in test predictions");
        }
        if (rec.preds_test.num_samples() != n_test) {
            fail(ErrorKind::RowCountMismatch, rec.profile.name + ": " +
                                                  std::to_string(rec.preds_test.num_samples()) +
                                                  " test rows vs " + std::to_string(n_test) + " labels");
        }
        for (const auto& [epoch, by_split] : rec.epoch_preds) {
            for (const auto& [split, preds] : by_split) {
                const auto it = labels.find(split);
                if (it == labels.end() || preds.num_samples() != it->second.size()) {
                    fail(ErrorKind::RowCountMismatch, rec.profile.name + ": epoch " + std::to_string(epoch) +
                                                          " " + std::string(to_string(split)) +
                                                          " rows do not match labels");
                }
            }
        }
    }
}

TraceBundle load_bundle(const fs::path& dir) {
    const auto manifest_file = dir / "manifest.json";
    if (!fs::is_regular_file(manifest_file)) {
        fail(ErrorKind::MissingManifest, "no manifest.json in " + dir.string());
    }
    TraceBundle bundle;
    bundle.manifest = manifest_from_json(read_json_file(manifest_file));
    const auto& m = bundle.manifest;
    check_manifest_header(m);

    for (const auto split : m.splits) {
        const auto file = labels_path(dir, split);
        if (!fs::is_regular_file(file)) fail(ErrorKind::MissingFile, "missing " + file.string());
        bundle.labels[split] = read_labels_csv(file);
    }

    for (const auto& profile : m.models) {
        ModelRecord rec;
        rec.profile = profile;
        const auto mdir = model_dir(dir, profile.name);

        const auto preds_file = mdir / "preds_test.csv";
        if (!fs::is_regular_file(preds_file)) fail(ErrorKind::MissingFile, "missing " + preds_file.string());
        rec.preds_test = read_preds_csv(preds_file, m.num_classes, m.prob_tolerance);
        if (const auto it = bundle.labels.find(Split::Test);
            it != bundle.labels.end() && rec.preds_test.num_samples() != it->second.size()) {
            fail(ErrorKind::RowCountMismatch, preds_file.string() + ": " +
                                                  std::to_string(rec.preds_test.num_samples()) +
                                                  " rows but labels_test.csv has " +
                                                  std::to_string(it->second.size()));
        }

        for (std::size_t t = 1; t <= m.epochs; ++t) {
            for (const auto split : {Split::Train, Split::Val, Split::Test}) {
                const auto file = epoch_preds_path(mdir, t, split);
                if (!fs::is_regular_file(file)) continue;
                const auto it = bundle.labels.find(split);
                if (it == bundle.labels.end()) {
                    fail(ErrorKind::MissingFile, file.string() + " has no labels for its split");
                }
                auto preds = read_preds_csv(file, m.num_classes, m.prob_tolerance);
                if (preds.num_samples() != it->second.size()) {
                    fail(ErrorKind::RowCountMismatch, file.string() + ": row count differs from labels");
                }
                rec.epoch_preds[t][split] = std::move(preds);
            }
        }

        const auto trace_file = mdir / "accuracy_trace.csv";
        if (fs::is_regular_file(trace_file)) {
            rec.trace = read_trace_csv(trace_file);
        } else {
            // Derive from per-epoch matrices; each series must cover every epoch.
            rec.trace.epochs = m.epochs;
            for (const auto split : {Split::Train, Split::Val}) {
                std::vector<double> series;
                for (std::size_t t = 1; t <= m.epochs; ++t) {
                    const auto e = rec.epoch_preds.find(t);
                    if (e == rec.epoch_preds.end() || !e->second.contains(split)) break;
                    series.push_back(derive_accuracy(e->second.at(split), bundle.labels.at(split)));
                }
                if (series.size() != m.epochs) continue;
                (split == Split::Train ? rec.trace.train_acc : rec.trace.val_acc) = std::move(series);
            }
            if (!rec.trace.train_acc && !rec.trace.val_acc) {
                fail(ErrorKind::MissingFile, "missing " + trace_file.string() +
                                                 " and no complete per-epoch predictions to derive it");
            }
        }
        bundle.models.push_back(std::move(rec));
    }
    bundle.validate();
    return bundle;
}

void write_bundle(const TraceBundle& bundle, const fs::path& dir) {
    bundle.validate();
    fs::create_directories(dir);
    write_text_file(dir / "manifest.json", canonical_dump(to_json(bundle.manifest)));
    for (const auto& [split, labels] : bundle.labels) write_labels_csv(labels_path(dir, split), labels);
    for (const auto& rec : bundle.models) {
        const auto mdir = model_dir(dir, rec.profile.name);
        write_trace_csv(mdir / "accuracy_trace.csv", rec.trace);
        write_preds_csv(mdir / "preds_test.csv", rec.preds_test);
        for (const auto& [epoch, by_split] : rec.epoch_preds) {
            for (const auto& [split, preds] : by_split) {
                write_preds_csv(epoch_preds_path(mdir, epoch, split), preds);
            }
        }
    }
}

}  // namespace dynens
