#include "dynens/metrics.hpp"

#include <numeric>
#include <string>

namespace dynens {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes, std::vector<std::int64_t> counts)
    : num_classes_(num_classes), counts_(std::move(counts)) {
    if (counts_.size() != num_classes_ * num_classes_) {
        fail(ErrorKind::ShapeMismatch, "confusion matrix counts do not form a square K x K grid");
    }
    for (const auto c : counts_) {
        if (c < 0) fail(ErrorKind::InvalidArgument, "confusion matrix counts must be non-negative");
    }
}

std::int64_t ConfusionMatrix::total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::row_sum(std::size_t truth) const noexcept {
    std::int64_t s = 0;
    for (std::size_t p = 0; p < num_classes_; ++p) s += at(truth, p);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t predicted) const noexcept {
    std::int64_t s = 0;
    for (std::size_t t = 0; t < num_classes_; ++t) s += at(t, predicted);
    return s;
}

ConfusionMatrix confusion(std::span<const ClassIndex> y_true, std::span<const ClassIndex> y_pred,
                          std::size_t num_classes) {
    if (y_true.size() != y_pred.size()) {
        fail(ErrorKind::LengthMismatch, std::to_string(y_true.size()) + " true labels vs " +
                                            std::to_string(y_pred.size()) + " predictions");
    }
    validate_labels(y_true, num_classes);
    validate_labels(y_pred, num_classes);
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.at(y_true[i], y_pred[i]);
    return cm;
}

namespace {
double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }
}  // namespace

ClassificationReport report(const ConfusionMatrix& cm) {
    ClassificationReport rep;
    rep.total = cm.total();
    if (rep.total == 0) fail(ErrorKind::EmptyMatrix, "confusion matrix has no samples");

    const std::size_t k = cm.num_classes();
    std::int64_t correct = 0;
    rep.per_class.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        auto& m = rep.per_class[c];
        const auto tp = cm.at(c, c);
        correct += tp;
        m.support = cm.row_sum(c);
        m.precision = ratio(tp, cm.col_sum(c));
        m.recall = ratio(tp, m.support);
        m.f1 = harmonic(m.precision, m.recall);
    }
    rep.accuracy = ratio(correct, rep.total);

    const auto kd = static_cast<double>(k);
    const auto total = static_cast<double>(rep.total);
    for (const auto& m : rep.per_class) {
        rep.macro_avg.precision += m.precision / kd;
        rep.macro_avg.recall += m.recall / kd;
        rep.macro_avg.f1 += m.f1 / kd;
        const double share = static_cast<double>(m.support) / total;
        rep.weighted_avg.precision += share * m.precision;
        rep.weighted_avg.recall += share * m.recall;
        rep.weighted_avg.f1 += share * m.f1;
    }
    return rep;
}

double label_accuracy(std::span<const ClassIndex> y_true, std::span<const ClassIndex> y_pred) {
    if (y_true.size() != y_pred.size()) fail(ErrorKind::LengthMismatch, "label vectors differ in length");
    if (y_true.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

}  // namespace dynens
