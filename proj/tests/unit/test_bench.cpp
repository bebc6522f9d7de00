#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "dynens/bench.hpp"
#include "dynens/inference.hpp"
#include "dynens/metrics.hpp"
#include "dynens/synth.hpp"

using namespace dynens;

TEST(Latency, SleepStubLandsInWindow) {
    const auto s = measure_latency([] { std::this_thread::sleep_for(std::chrono::milliseconds(50)); }, 1, 10);
    EXPECT_GE(s.p50_ms, 50.0);
    EXPECT_LE(s.p50_ms, 60.0);
    EXPECT_EQ(s.reps, 10u);
}

TEST(Latency, NoOpStatsAreSane) {
    const auto s = measure_latency([] {}, 0, 5);
    EXPECT_GE(s.p50_ms, 0.0);
    EXPECT_GE(s.mean_ms, 0.0);
    EXPECT_GE(s.std_ms, 0.0);
    EXPECT_TRUE(std::isfinite(s.std_ms));
}

TEST(Latency, TooFewRepsRejected) {
    try {
        measure_latency([] {}, 0, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(Latency, IdenticalClosuresAgree) {
    auto work = [] { std::this_thread::sleep_for(std::chrono::milliseconds(5)); };
    const auto a = measure_latency(work, 1, 10);
    const auto b = measure_latency(work, 1, 10);
    const double sigma = std::max({a.std_ms, b.std_ms, 0.5});
    EXPECT_LE(std::abs(a.mean_ms - b.mean_ms), 3 * sigma);
}

TEST(Latency, SummaryOfKnownSamples) {
    const auto s = summarize_latency(std::vector<double>{4, 1, 3, 2, 5});
    EXPECT_EQ(s.p50_ms, 3.0);
    EXPECT_EQ(s.mean_ms, 3.0);
    EXPECT_NEAR(s.std_ms, std::sqrt(2.5), 1e-12);
    EXPECT_EQ(summarize_latency(std::vector<double>{1, 2, 3, 4}).p50_ms, 2.5);
}

TEST(Latency, EnsembleOverheadIsAFraction) {
    const std::vector<std::function<void()>> members{
        [] { std::this_thread::sleep_for(std::chrono::milliseconds(3)); },
        [] { std::this_thread::sleep_for(std::chrono::milliseconds(2)); }};
    const auto s = measure_ensemble_latency(members, [] { std::this_thread::sleep_for(std::chrono::milliseconds(1)); },
                                            1, 6);
    EXPECT_GE(s.p50_ms, 6.0);
    EXPECT_GT(s.overhead_fraction, 0.0);
    EXPECT_LT(s.overhead_fraction, 0.5);
    EXPECT_EQ(overhead_fraction(0.0, 0.0), 0.0);
    EXPECT_EQ(overhead_fraction(1.0, 3.0), 0.25);
    EXPECT_LT(overhead_fraction(1.0, 0.0), 1.0);
}

TEST(Pareto, HandDominance) {
    const std::vector<ParetoPoint> pts{{"A", 0.96, 70}, {"B", 0.95, 10}, {"C", 0.94, 50}};
    EXPECT_TRUE(dominates(pts[1], pts[2]));
    EXPECT_FALSE(dominates(pts[0], pts[1]));
    EXPECT_FALSE(dominates(pts[1], pts[0]));
    const auto front = pareto_points(pts);
    ASSERT_EQ(front.size(), 2u);
    EXPECT_EQ(front[0].name, "B");
    EXPECT_EQ(front[1].name, "A");
}

TEST(Pareto, SingleAndIdenticalPoints) {
    const std::vector<ParetoPoint> one{{"solo", 0.5, 1}};
    EXPECT_EQ(pareto_points(one), one);
    const std::vector<ParetoPoint> twins{{"x", 0.9, 5}, {"y", 0.9, 5}};
    EXPECT_EQ(pareto_points(twins).size(), 2u);
    EXPECT_FALSE(dominates(twins[0], twins[1]));
}

TEST(Pareto, FrontierMatchesPairwiseCheck) {
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ParetoPoint> pts(2 + eng() % 10);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            pts[i] = {"p" + std::to_string(i), std::round(u(eng) * 10) / 10, std::round(u(eng) * 10)};
        }
        const auto front = pareto_points(pts);
        for (const auto& p : pts) {
            bool dominated = false;
            for (const auto& q : pts) {
                dominated = dominated || ((q.accuracy >= p.accuracy && q.latency_ms <= p.latency_ms) &&
                                          (q.accuracy > p.accuracy || q.latency_ms < p.latency_ms));
            }
            const bool kept = std::find(front.begin(), front.end(), p) != front.end();
            EXPECT_EQ(kept, !dominated);
        }
    }
}

TEST(Pareto, CsvMarksFrontier) {
    const std::vector<ParetoPoint> pts{{"A", 0.96, 70}, {"B", 0.95, 10}, {"C", 0.94, 50}};
    EXPECT_EQ(pareto_csv(pts), "name,accuracy,latency_ms,on_frontier\nA,0.95999999999999996,70,1\n"
                               "B,0.94999999999999996,10,1\nC,0.93999999999999995,50,0\n");
}

namespace {

SynthExperiment three_model_world(std::size_t n_test) {
    SynthExperiment e;
    e.world.num_classes = 4;
    e.world.n_train = 200;
    e.world.n_val = 200;
    e.world.n_test = n_test;
    e.world.rho = 0.2;
    e.epochs = 10;
    const double a_inf[3] = {0.92, 0.90, 0.86};
    const std::int64_t sizes[3] = {417284, 174420, 402308};
    for (int i = 0; i < 3; ++i) {
        SynthModelSpec m;
        m.profile = {"m" + std::to_string(i + 1), sizes[i], {}, {}};
        m.a0 = 0.5;
        m.a_inf = a_inf[i];
        e.models.push_back(m);
    }
    return e;
}

}  // namespace

TEST(Ablation, VariantsCoverFullPairsAndStatic) {
    const std::vector<std::string> names{"a", "b", "c"};
    const auto v = ablation_variants(names);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v[0].name, "full-dynamic");
    EXPECT_EQ(v[1].name, "a+b");
    EXPECT_EQ(v[3].name, "b+c");
    EXPECT_EQ(v[4].name, "static-uniform");
    EXPECT_FALSE(v[4].dynamic);
    const std::vector<std::string> two{"a", "b"};
    EXPECT_EQ(ablation_variants(two).size(), 2u);
}

TEST(Ablation, StaticVariantIsMeanSoftmax) {
    const auto bundle = simulate(three_model_world(500));
    const auto variants = ablation_variants(bundle.model_names());
    const auto labels = predict_variant(bundle, variants.back(), WeightingConfig{});
    EXPECT_EQ(labels, mean_softmax_predict(bundle.test_preds()).labels);
}

TEST(Ablation, SingleModelRejected) {
    const auto bundle = simulate(three_model_world(100));
    const std::vector<std::string> one{"m1"};
    try {
        run_ablation(bundle.subset(one), WeightingConfig{}, std::vector<std::uint64_t>{1, 2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewModels);
    }
}

TEST(Ablation, FullEnsembleBeatsEveryPairOnAverage) {
    const auto bundle = simulate(three_model_world(2000));
    std::vector<std::uint64_t> seeds(10);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
    const auto outcome = run_ablation(bundle, WeightingConfig{}, seeds);
    EXPECT_EQ(outcome.seed_mode, SeedMode::Regenerate);
    const auto& full = outcome.rows.front();
    EXPECT_TRUE(full.reference);
    for (const auto& row : outcome.rows) {
        EXPECT_EQ(row.per_seed_accuracy.size(), 10u);
        if (row.models.size() == 2) {
            EXPECT_GE(full.mean_accuracy, row.mean_accuracy) << row.name;
        }
    }
}

TEST(Ablation, RecordedBundlesAreBootstrapped) {
    auto bundle = simulate(three_model_world(300));
    bundle.manifest.generator.reset();
    const auto outcome = run_ablation(bundle, WeightingConfig{}, std::vector<std::uint64_t>{4, 5, 6});
    EXPECT_EQ(outcome.seed_mode, SeedMode::Bootstrap);
    const auto again = run_ablation(bundle, WeightingConfig{}, std::vector<std::uint64_t>{4, 5, 6});
    EXPECT_EQ(ablation_csv(outcome), ablation_csv(again));
}
