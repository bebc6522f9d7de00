#include <gtest/gtest.h>

#include <cmath>

#include "../oracles/misc_oracle.hpp"
#include "../support/gen.hpp"
#include "dynens/inference.hpp"

using namespace dynens;

TEST(EnsemblePredict, SingleModelIsItsOwnArgmax) {
    gen::Gen g(1);
    const std::vector<PredictionMatrix> stack{g.prediction_matrix(50, 5)};
    EXPECT_EQ(ensemble_predict(stack, std::vector<double>{1.0}).labels, argmax_labels(stack[0]));
}

TEST(EnsemblePredict, HandArithmetic) {
    const std::vector<PredictionMatrix> stack{{1, 3, {0.6, 0.3, 0.1}}, {1, 3, {0.1, 0.8, 0.1}}};
    const auto out = ensemble_predict(stack, std::vector<double>{0.25, 0.75});
    EXPECT_NEAR(out.fused.scores[0], 0.225, 1e-15);
    EXPECT_NEAR(out.fused.scores[1], 0.675, 1e-15);
    EXPECT_NEAR(out.fused.scores[2], 0.1, 1e-15);
    EXPECT_EQ(out.labels, LabelVector{1});
}

TEST(EnsemblePredict, TiesGoToSmallestClass) {
    const std::vector<PredictionMatrix> stack{{2, 4, {0.25, 0.25, 0.25, 0.25, 0.1, 0.4, 0.1, 0.4}}};
    EXPECT_EQ(ensemble_predict(stack, std::vector<double>{2.0}).labels, (LabelVector{0, 1}));
}

TEST(EnsemblePredict, RejectsBadWeightsAndShapes) {
    const std::vector<PredictionMatrix> stack{{1, 2, {0.5, 0.5}}, {1, 2, {0.2, 0.8}}};
    auto kind = [&](std::vector<double> w) {
        try {
            ensemble_predict(stack, w);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::IoError;
    };
    EXPECT_EQ(kind({0.0, 0.0}), ErrorKind::AllZeroWeights);
    EXPECT_EQ(kind({1.0}), ErrorKind::ShapeMismatch);
    EXPECT_EQ(kind({-1.0, 2.0}), ErrorKind::InvalidArgument);

    const std::vector<PredictionMatrix> ragged{{1, 2, {0.5, 0.5}}, {1, 3, {0.2, 0.4, 0.4}}};
    try {
        ensemble_predict(ragged, std::vector<double>{1, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
    }
}

TEST(EnsemblePredict, FusedScoresAreLinearInWeights) {
    gen::Gen g(3);
    const std::vector<PredictionMatrix> stack{g.prediction_matrix(40, 6), g.prediction_matrix(40, 6),
                                              g.prediction_matrix(40, 6)};
    const std::vector<double> u{0.2, 0.5, 0.3}, v{0.7, 0.1, 0.4};
    std::vector<double> mix(3);
    for (std::size_t i = 0; i < 3; ++i) mix[i] = 2.0 * u[i] + 3.0 * v[i];
    const auto fu = ensemble_predict(stack, u).fused.scores;
    const auto fv = ensemble_predict(stack, v).fused.scores;
    const auto fm = ensemble_predict(stack, mix).fused.scores;
    for (std::size_t j = 0; j < fm.size(); ++j) EXPECT_NEAR(fm[j], 2.0 * fu[j] + 3.0 * fv[j], 1e-9);
}

TEST(EnsemblePredict, ScalingWeightsNeverChangesLabels) {
    gen::Gen g(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = g.index(1, 5);
        const auto rows = g.index(1, 30);
        const auto k = g.index(2, 10);
        std::vector<PredictionMatrix> stack;
        std::vector<double> w(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            stack.push_back(g.prediction_matrix(rows, k));
            total += w[i] = g.uniform(0.01, 1.0);
        }
        const auto base = ensemble_predict(stack, w).labels;
        std::vector<double> normalized(w), scaled(w);
        const double c = g.uniform(0.1, 100.0);
        for (std::size_t i = 0; i < n; ++i) {
            normalized[i] /= total;
            scaled[i] *= c;
        }
        ASSERT_EQ(ensemble_predict(stack, normalized).labels, base);
        ASSERT_EQ(ensemble_predict(stack, scaled).labels, base);
    }
}

TEST(MeanSoftmax, MatchesIndependentMeanAndUniformWeights) {
    gen::Gen g(8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = g.index(1, 5);
        const auto rows = g.index(1, 40);
        const auto k = g.index(2, 7);
        std::vector<PredictionMatrix> stack;
        std::vector<std::vector<double>> raw;
        for (std::size_t i = 0; i < n; ++i) {
            raw.push_back(g.softmax_rows(rows, k));
            // Coarse values make exact ties between classes common.
            for (auto& x : raw.back()) x = std::round(x * 8) / 8;
            for (std::size_t r = 0; r < rows; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c + 1 < k; ++c) s += raw.back()[r * k + c];
                if (s > 1.0) {
                    for (std::size_t c = 0; c < k; ++c) raw.back()[r * k + c] = c == 0 ? 1.0 : 0.0;
                } else {
                    raw.back()[r * k + k - 1] = 1.0 - s;
                }
            }
            stack.emplace_back(rows, k, raw.back());
        }
        const auto labels = mean_softmax_predict(stack).labels;
        const auto expected = oracle::mean_softmax_labels(raw, rows, k);
        ASSERT_EQ(labels, LabelVector(expected.begin(), expected.end()));
    }
}
