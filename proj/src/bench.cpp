#include "dynens/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace dynens {

namespace {

using Clock = std::chrono::steady_clock;
static_assert(Clock::is_steady);

double time_ms(const std::function<void()>& work) {
    const auto start = Clock::now();
    work();
    const auto stop = Clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void require_reps(std::size_t reps) {
    if (reps < 5) fail(ErrorKind::InvalidArgument, "latency measurement needs at least 5 reps");
}

}  // namespace

LatencyStats summarize_latency(std::span<const double> samples_ms) {
    if (samples_ms.empty()) fail(ErrorKind::InvalidArgument, "no latency samples");
    LatencyStats s;
    s.reps = samples_ms.size();
    s.p50_ms = median({samples_ms.begin(), samples_ms.end()});
    double sum = 0.0;
    for (const double x : samples_ms) sum += x;
    s.mean_ms = sum / static_cast<double>(s.reps);
    if (s.reps > 1) {
        double sq = 0.0;
        for (const double x : samples_ms) sq += (x - s.mean_ms) * (x - s.mean_ms);
        s.std_ms = std::sqrt(sq / static_cast<double>(s.reps - 1));
    }
    return s;
}

LatencyStats measure_latency(const std::function<void()>& work, std::size_t warmup,
                             std::size_t reps) {
    require_reps(reps);
    for (std::size_t i = 0; i < warmup; ++i) work();
    std::vector<double> samples(reps);
    for (auto& s : samples) s = time_ms(work);
    return summarize_latency(samples);
}

LatencyStats measure_ensemble_latency(std::span<const std::function<void()>> members,
                                      const std::function<void()>& fusion, std::size_t warmup,
                                      std::size_t reps) {
    require_reps(reps);
    for (std::size_t i = 0; i < warmup; ++i) {
        for (const auto& m : members) m();
        fusion();
    }
    std::vector<double> totals(reps), fusions(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        double member_ms = 0.0;
        for (const auto& m : members) member_ms += time_ms(m);
        fusions[r] = time_ms(fusion);
        totals[r] = member_ms + fusions[r];
    }
    auto stats = summarize_latency(totals);
    const double fusion_p50 = median(fusions);
    stats.overhead_fraction = overhead_fraction(fusion_p50, std::max(0.0, stats.p50_ms - fusion_p50));
    return stats;
}

double overhead_fraction(double fusion_ms, double members_ms) {
    const double total = fusion_ms + members_ms;
    if (!(total > 0.0)) return 0.0;
    return std::clamp(fusion_ms / total, 0.0, std::nextafter(1.0, 0.0));
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept {
    return a.accuracy >= b.accuracy && a.latency_ms <= b.latency_ms &&
           (a.accuracy > b.accuracy || a.latency_ms < b.latency_ms);
}

std::vector<ParetoPoint> pareto_points(std::span<const ParetoPoint> points) {
    std::vector<ParetoPoint> frontier;
    for (const auto& p : points) {
        const bool dominated = std::any_of(points.begin(), points.end(),
                                           [&](const ParetoPoint& q) { return dominates(q, p); });
        if (!dominated) frontier.push_back(p);
    }
    std::sort(frontier.begin(), frontier.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
        if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
        return a.name < b.name;
    });
    return frontier;
}

std::string pareto_csv(std::span<const ParetoPoint> points) {
    const auto frontier = pareto_points(points);
    std::ostringstream out;
    out << "name,accuracy,latency_ms,on_frontier\n";
    for (const auto& p : points) {
        const bool on = std::find(frontier.begin(), frontier.end(), p) != frontier.end();
        out << p.name << ',' << format_double(p.accuracy) << ',' << format_double(p.latency_ms) << ','
            << (on ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace dynens
