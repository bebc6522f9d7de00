#include <gtest/gtest.h>

#include "../oracles/misc_oracle.hpp"
#include "../support/gen.hpp"
#include "dynens/core.hpp"

using namespace dynens;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ModelProfile, LayerShapesMatchingCountAreAccepted) {
    ModelProfile p{"conv", 896, std::vector<LayerShape>{{3, 3, 3, 32}, {32}}, {}};
    EXPECT_NO_THROW(validate_profile(p));
    EXPECT_EQ(count_parameters(*p.layer_shapes), 896);
}

TEST(ModelProfile, CountWithoutShapesIsAccepted) {
    EXPECT_NO_THROW(validate_profile({"mobilenet", 417284, {}, {}}));
}

TEST(ModelProfile, NonPositiveCountRejected) {
    EXPECT_EQ(kind_of([] { validate_profile({"zero", 0, {}, {}}); }), ErrorKind::NonPositiveCount);
    EXPECT_EQ(kind_of([] { validate_profile({"neg", -5, {}, {}}); }), ErrorKind::NonPositiveCount);
}

TEST(ModelProfile, ShapeSumMismatchRejected) {
    ModelProfile p{"conv", 897, std::vector<LayerShape>{{3, 3, 3, 32}, {32}}, {}};
    EXPECT_EQ(kind_of([&] { validate_profile(p); }), ErrorKind::MismatchedParamCount);
}

TEST(ModelProfile, DuplicateNamesRejected) {
    std::vector<ModelProfile> ps{{"a", 10, {}, {}}, {"a", 20, {}, {}}};
    EXPECT_EQ(kind_of([&] { validate_profiles(ps); }), ErrorKind::DuplicateModelName);
}

TEST(ModelProfile, CountMatchesIndependentSumOfProducts) {
    gen::Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LayerShape> layers(g.index(1, 8));
        for (auto& layer : layers) {
            layer.resize(g.index(1, 4));
            for (auto& d : layer) d = static_cast<std::int64_t>(g.index(1, 64));
        }
        EXPECT_EQ(count_parameters(layers), oracle::parameter_total(layers));
    }
}

TEST(PredictionMatrix, RejectsBadRowsAndShapes) {
    EXPECT_EQ(kind_of([] { PredictionMatrix(2, 2, {0.5, 0.5, 0.45, 0.45}); }), ErrorKind::InvalidProbabilityRow);
    EXPECT_EQ(kind_of([] { PredictionMatrix(1, 2, {1.5, -0.5}); }), ErrorKind::InvalidProbabilityRow);
    EXPECT_EQ(kind_of([] { PredictionMatrix(1, 2, {0.5}); }), ErrorKind::ShapeMismatch);
    EXPECT_NO_THROW(PredictionMatrix(1, 2, {0.5, 0.5 + 5e-7}));
    EXPECT_EQ(find_bad_probability_row(std::vector<double>{0.5, 0.5, 0.2, 0.2}, 2, 1e-6), std::optional<std::size_t>(1));
}

TEST(PredictionMatrix, NanRowIsRejected) {
    EXPECT_EQ(kind_of([] { PredictionMatrix(1, 2, {std::nan(""), 1.0}); }), ErrorKind::InvalidProbabilityRow);
}

TEST(AccuracyTrace, MissingSeriesNamesTheSource) {
    AccuracyTrace t{2, std::vector<double>{0.5, 0.6}, {}};
    EXPECT_EQ(t.series(AccSource::Train).size(), 2u);
    EXPECT_EQ(kind_of([&] { (void)t.series(AccSource::Validation); }), ErrorKind::MissingAccuracySource);
}

TEST(Labels, OutOfRangeRejected) {
    std::vector<ClassIndex> y{0, 1, 3};
    EXPECT_EQ(kind_of([&] { validate_labels(y, 3); }), ErrorKind::LabelOutOfRange);
    EXPECT_NO_THROW(validate_labels(y, 4));
}

TEST(WeightingConfig, DefaultsAreTheReferenceHyperparameters) {
    const WeightingConfig cfg;
    EXPECT_EQ(cfg.lambda_init, 0.5);
    EXPECT_EQ(cfg.delta, 0.1);
    EXPECT_EQ(cfg.lambda_min, 0.3);
    EXPECT_EQ(cfg.lambda_max, 0.9);
    EXPECT_EQ(cfg.acc_source, AccSource::Validation);
    EXPECT_EQ(cfg.size_mode, SizeMode::Proportional);
    EXPECT_FALSE(cfg.normalize_weights);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(WeightingConfig, InconsistentBoundsRejected) {
    WeightingConfig cfg;
    cfg.lambda_min = 0.95;
    EXPECT_EQ(kind_of([&] { cfg.validate(); }), ErrorKind::InvalidConfig);
    cfg = {};
    cfg.delta = 0.0;
    EXPECT_EQ(kind_of([&] { cfg.validate(); }), ErrorKind::InvalidConfig);
}

TEST(WeightingConfig, EnumNamesRoundTrip) {
    EXPECT_EQ(parse_acc_source(to_string(AccSource::Train)), AccSource::Train);
    EXPECT_EQ(parse_size_mode(to_string(SizeMode::Inverse)), SizeMode::Inverse);
    EXPECT_EQ(kind_of([] { (void)parse_size_mode("sideways"); }), ErrorKind::InvalidConfig);
}
