#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "dynens/metrics.hpp"

namespace dynens {

namespace {

struct SignedRanks {
    // Ranks are stored doubled so tied (half-integer) ranks stay integral.
    std::vector<std::int64_t> doubled_rank;
    std::vector<bool> positive;
    double tie_correction = 0.0;  // sum over tie groups of t^3 - t
};

SignedRanks rank_differences(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::LengthMismatch, "paired samples differ in length");
    if (x.empty()) fail(ErrorKind::LengthMismatch, "paired samples are empty");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) fail(ErrorKind::AllPairsEqual, "every pair is equal; no test possible");

    const std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diffs[a]) < std::abs(diffs[b]);
    });

    SignedRanks out;
    out.doubled_rank.resize(n);
    out.positive.resize(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        // 1-based positions i+1 .. j+1 share rank ((i+1)+(j+1))/2
        const auto doubled = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) {
            out.doubled_rank[order[k]] = doubled;
            out.positive[order[k]] = diffs[order[k]] > 0.0;
        }
        const auto t = static_cast<double>(j - i + 1);
        out.tie_correction += t * t * t - t;
        i = j + 1;
    }
    return out;
}

struct Statistic {
    std::int64_t doubled_w_plus = 0;
    std::int64_t doubled_total = 0;
    std::int64_t doubled_min() const {
        return std::min(doubled_w_plus, doubled_total - doubled_w_plus);
    }
};

Statistic observed(const SignedRanks& r) {
    Statistic s;
    for (std::size_t i = 0; i < r.doubled_rank.size(); ++i) {
        s.doubled_total += r.doubled_rank[i];
        if (r.positive[i]) s.doubled_w_plus += r.doubled_rank[i];
    }
    return s;
}

// Counts, over all 2^n sign assignments, how many give each positive-rank
// sum; subset-sum dynamic programming over the (doubled) ranks.
double exact_p(const SignedRanks& r, const Statistic& s) {
    std::vector<double> ways(static_cast<std::size_t>(s.doubled_total) + 1, 0.0);
    ways[0] = 1.0;
    std::int64_t reach = 0;
    for (const auto rank : r.doubled_rank) {
        for (std::int64_t v = reach; v >= 0; --v) {
            if (ways[static_cast<std::size_t>(v)] != 0.0) {
                ways[static_cast<std::size_t>(v + rank)] += ways[static_cast<std::size_t>(v)];
            }
        }
        reach += rank;
    }
    const std::int64_t threshold = s.doubled_min();
    double hits = 0.0;
    for (std::int64_t v = 0; v <= s.doubled_total; ++v) {
        if (std::min(v, s.doubled_total - v) <= threshold) hits += ways[static_cast<std::size_t>(v)];
    }
    return std::ldexp(hits, -static_cast<int>(r.doubled_rank.size()));
}

double normal_p(const SignedRanks& r, const Statistic& s) {
    const auto n = static_cast<double>(r.doubled_rank.size());
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - r.tie_correction / 48.0;
    if (var <= 0.0) return 1.0;
    const double w = static_cast<double>(s.doubled_min()) / 2.0;
    const double z = std::max(0.0, mean - w - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

WilcoxonResult run(std::span<const double> x, std::span<const double> y, bool allow_exact) {
    const auto ranks = rank_differences(x, y);
    const auto stat = observed(ranks);
    WilcoxonResult out;
    out.n_effective = ranks.doubled_rank.size();
    out.statistic = static_cast<double>(stat.doubled_min()) / 2.0;
    out.exact = allow_exact && out.n_effective <= kWilcoxonExactMaxN;
    out.p_value = out.exact ? exact_p(ranks, stat) : normal_p(ranks, stat);
    return out;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    return run(x, y, true);
}

WilcoxonResult wilcoxon_signed_rank_normal(std::span<const double> x, std::span<const double> y) {
    return run(x, y, false);
}

}  // namespace dynens
