#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dynens/core.hpp"
#include "dynens/dataio.hpp"

namespace dynens {

// ------------------------------------------------------------------ latency

struct LatencyStats {
    double p50_ms = 0.0;
    double mean_ms = 0.0;
    double std_ms = 0.0;  // sample standard deviation
    /// Share of the ensemble's time spent fusing member outputs; only set
    /// when member and fusion timings come from the same session.
    double overhead_fraction = 0.0;
    std::size_t reps = 0;
};

/// Median, mean and sample standard deviation of per-rep timings.
LatencyStats summarize_latency(std::span<const double> samples_ms);

/// Times `work` on the steady clock: `warmup` runs discarded, then `reps`
/// timed runs, strictly sequential. Throws InvalidArgument when reps < 5.
LatencyStats measure_latency(const std::function<void()>& work, std::size_t warmup,
                             std::size_t reps);

/// Times each member and the fusion step separately within every rep; the
/// returned stats describe the per-rep total and overhead_fraction is
/// p50(fusion) / p50(total).
LatencyStats measure_ensemble_latency(std::span<const std::function<void()>> members,
                                      const std::function<void()>& fusion, std::size_t warmup,
                                      std::size_t reps);

/// fusion / (fusion + members), clamped into [0, 1); 0 when both are 0.
double overhead_fraction(double fusion_ms, double members_ms);

// ------------------------------------------------------------------- pareto

struct ParetoPoint {
    std::string name;
    double accuracy = 0.0;
    double latency_ms = 0.0;

    bool operator==(const ParetoPoint&) const = default;
};

/// a has >= accuracy and <= latency than b, strictly better in one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept;

/// Non-dominated points, sorted by (latency, -accuracy, name) so the result
/// does not depend on input order. Identical points are all kept.
std::vector<ParetoPoint> pareto_points(std::span<const ParetoPoint> points);

/// "name,accuracy,latency_ms,on_frontier" rows in input order.
std::string pareto_csv(std::span<const ParetoPoint> points);

// ----------------------------------------------------------------- ablation

struct AblationVariant {
    std::string name;
    std::vector<std::string> models;
    bool dynamic = true;  // false: fixed uniform weights, no lambda updates
};

/// full-dynamic over every model, each pair (when there are at least three
/// models), and static-uniform over every model.
std::vector<AblationVariant> ablation_variants(std::span<const std::string> names);

/// Test-set labels predicted by one variant.
LabelVector predict_variant(const TraceBundle& bundle, const AblationVariant& variant,
                            const WeightingConfig& cfg);

enum class SeedMode { Regenerate, Bootstrap };

std::string_view to_string(SeedMode mode) noexcept;

struct AblationResult {
    std::string name;
    std::vector<std::string> models;
    bool dynamic = true;
    std::vector<double> per_seed_accuracy;
    double mean_accuracy = 0.0;
    /// Wilcoxon two-sided p vs full-dynamic over per-seed accuracies; 1 for
    /// the reference row and when every pair is equal.
    double p_value = 1.0;
    std::size_t n_effective = 0;
    bool reference = false;
};

struct AblationOutcome {
    SeedMode seed_mode = SeedMode::Bootstrap;
    std::vector<std::uint64_t> seeds;
    std::vector<AblationResult> rows;
};

/// Synthetic bundles (manifest carries a generator) are regenerated under
/// each seed; recorded bundles are bootstrap-resampled over the test set.
/// Throws TooFewModels when the bundle has fewer than two models.
AblationOutcome run_ablation(const TraceBundle& bundle, const WeightingConfig& cfg,
                             std::span<const std::uint64_t> seeds);

std::string ablation_csv(const AblationOutcome& outcome);

}  // namespace dynens
