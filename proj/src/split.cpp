#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dynens/rng.hpp"
#include "dynens/synth.hpp"

namespace dynens {

namespace {
constexpr std::uint64_t kSplitStream = 4;
}

SplitIndices stratified_split(std::span<const ClassIndex> labels, double train_fraction,
                              double val_fraction, double test_fraction, std::uint64_t seed) {
    const std::array<double, 3> fractions{train_fraction, val_fraction, test_fraction};
    for (const double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) fail(ErrorKind::BadFractions, "split fractions must lie in [0,1]");
    }
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        fail(ErrorKind::BadFractions, "split fractions must sum to 1");
    }

    ClassIndex max_label = 0;
    for (const auto y : labels) max_label = std::max(max_label, y);
    std::vector<std::vector<std::size_t>> by_class(labels.empty() ? 0 : max_label + 1);
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    SplitIndices out;
    std::array<std::vector<std::size_t>*, 3> targets{&out.train, &out.val, &out.test};
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.empty()) continue;
        if (members.size() < 3) {
            fail(ErrorKind::SmallClass, "class " + std::to_string(c) + " has only " +
                                            std::to_string(members.size()) + " samples");
        }

        auto rng = keyed_stream(seed, {kSplitStream, c});
        for (std::size_t i = members.size() - 1; i > 0; --i) {
            std::swap(members[i], members[rng.below(i + 1)]);
        }

        // Largest remainder: floor each exact share, hand leftovers to the
        // biggest fractional parts (earlier split wins ties).
        const auto n = static_cast<double>(members.size());
        std::array<std::size_t, 3> counts{};
        std::array<double, 3> remainders{};
        std::size_t assigned = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            const double exact = n * fractions[s];
            counts[s] = static_cast<std::size_t>(std::floor(exact));
            remainders[s] = exact - static_cast<double>(counts[s]);
            assigned += counts[s];
        }
        std::array<std::size_t, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
        for (std::size_t k = 0; assigned < members.size(); ++k, ++assigned) ++counts[order[k % 3]];

        std::size_t offset = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            targets[s]->insert(targets[s]->end(), members.begin() + static_cast<std::ptrdiff_t>(offset),
                               members.begin() + static_cast<std::ptrdiff_t>(offset + counts[s]));
            offset += counts[s];
        }
    }
    for (auto* t : targets) std::sort(t->begin(), t->end());
    return out;
}

}  // namespace dynens
