#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <string>

#include "../support/gen.hpp"
#include "dynens/inference.hpp"
#include "dynens/kernels.hpp"

using namespace dynens;
using kernels::Isa;

namespace {

std::vector<Isa> wide_isas() {
    std::vector<Isa> out;
    for (const auto isa : {Isa::Avx2, Isa::Neon}) {
        if (kernels::isa_available(isa)) out.push_back(isa);
    }
    return out;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
    EXPECT_TRUE(kernels::isa_available(Isa::Scalar));
    EXPECT_EQ(kernels::table(Isa::Scalar).isa, Isa::Scalar);
    EXPECT_TRUE(kernels::isa_available(kernels::active().isa));
}

TEST(Kernels, UnavailableIsaRejected) {
    for (const auto isa : {Isa::Avx2, Isa::Neon}) {
        if (kernels::isa_available(isa)) continue;
        try {
            kernels::table(isa);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
        }
    }
}

TEST(Kernels, WideVariantsAreBitIdenticalToScalar) {
    const auto isas = wide_isas();
    if (isas.empty()) GTEST_SKIP() << "no SIMD variant on this CPU";
    gen::Gen g(99);
    const auto& ref = kernels::table(Isa::Scalar);
    for (int trial = 0; trial < 300; ++trial) {
        // Odd sizes exercise the tails.
        const auto rows = g.index(1, 37);
        const auto cols = g.index(1, 19);
        std::vector<double> m(rows * cols);
        for (auto& x : m) x = g.uniform(-1.0, 1.0);
        if (g.coin(0.3)) {
            for (auto& x : m) x = std::round(x * 4) / 4;  // plenty of ties
        }
        const double w = g.uniform(0.0, 3.0);
        std::vector<double> acc0(m.size());
        for (auto& x : acc0) x = g.uniform(0.0, 1.0);

        std::vector<double> acc_ref = acc0, sums_ref(rows);
        std::vector<ClassIndex> arg_ref(rows);
        ref.accumulate_scaled(acc_ref.data(), m.data(), m.size(), w);
        ref.row_sums(m.data(), rows, cols, sums_ref.data());
        ref.row_argmax(m.data(), rows, cols, arg_ref.data());

        for (const auto isa : isas) {
            const auto& k = kernels::table(isa);
            std::vector<double> acc = acc0, sums(rows);
            std::vector<ClassIndex> arg(rows);
            k.accumulate_scaled(acc.data(), m.data(), m.size(), w);
            k.row_sums(m.data(), rows, cols, sums.data());
            k.row_argmax(m.data(), rows, cols, arg.data());
            ASSERT_TRUE(bit_equal(acc, acc_ref)) << kernels::to_string(isa);
            ASSERT_TRUE(bit_equal(sums, sums_ref)) << kernels::to_string(isa);
            ASSERT_EQ(arg, arg_ref) << kernels::to_string(isa);
        }
    }
}

TEST(Kernels, EnsemblePredictionIdenticalAcrossIsas) {
    const auto isas = wide_isas();
    if (isas.empty()) GTEST_SKIP() << "no SIMD variant on this CPU";
    gen::Gen g(5);
    std::vector<PredictionMatrix> stack;
    for (int i = 0; i < 3; ++i) stack.push_back(g.prediction_matrix(257, 7));
    const std::vector<double> w{0.37, 0.21, 0.42};
    const auto ref = ensemble_predict(stack, w, kernels::table(Isa::Scalar));
    const auto ref_mean = mean_softmax_predict(stack, kernels::table(Isa::Scalar));
    for (const auto isa : isas) {
        const auto out = ensemble_predict(stack, w, kernels::table(isa));
        EXPECT_EQ(out.labels, ref.labels);
        EXPECT_TRUE(bit_equal(out.fused.scores, ref.fused.scores));
        const auto mean = mean_softmax_predict(stack, kernels::table(isa));
        EXPECT_EQ(mean.labels, ref_mean.labels);
        EXPECT_TRUE(bit_equal(mean.fused.scores, ref_mean.fused.scores));
    }
}

TEST(Kernels, EnvironmentCanPinScalar) {
    const char* forced = std::getenv("DYNENS_FORCE_SCALAR");
    if (forced && std::string(forced) == "1") {
        EXPECT_EQ(kernels::active().isa, Isa::Scalar);
    } else {
        EXPECT_EQ(kernels::active().isa, kernels::best_isa());
    }
}
