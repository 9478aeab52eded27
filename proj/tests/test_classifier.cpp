#include <gtest/gtest.h>

#include "support.hpp"

using namespace ohmnet;

namespace {

struct Data {
    std::vector<std::vector<double>> rows;
    std::vector<std::uint8_t> y;
    FeatureRows view() const { return FeatureRows(rows.begin(), rows.end()); }
};

Data separable(std::uint64_t seed, std::size_t n = 200) {
    auto rng = make_rng(seed, {});
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        const double x1 = pos ? 1.0 + 3.0 * uniform01(rng) : -1.0 - 3.0 * uniform01(rng);
        d.rows.push_back({x1, 10.0 * uniform01(rng) - 5.0});
        d.y.push_back(pos ? 1 : 0);
    }
    return d;
}

} // namespace

TEST(ModifiedHuber, PiecewiseValues) {
    EXPECT_DOUBLE_EQ(modified_huber(1.0), 0.0);
    EXPECT_DOUBLE_EQ(modified_huber(0.0), 1.0);
    EXPECT_DOUBLE_EQ(modified_huber(-2.0), 8.0);
    EXPECT_DOUBLE_EQ(modified_huber(3.0), 0.0);
    EXPECT_DOUBLE_EQ(modified_huber(-1.0), 4.0);
}

TEST(ModifiedHuber, DerivativeMatchesFiniteDifferences) {
    auto rng = make_rng(41, {});
    const double h = 1e-5;
    for (int i = 0; i < 1000; ++i) {
        const double z = 8.0 * uniform01(rng) - 4.0;
        if (std::abs(z - 1.0) < 1e-3 || std::abs(z + 1.0) < 1e-3) continue;
        const double numeric = (modified_huber(z + h) - modified_huber(z - h)) / (2.0 * h);
        const double analytic = modified_huber_derivative(z);
        EXPECT_LE(std::abs(numeric - analytic), 1e-4 * std::max(1.0, std::abs(analytic))) << "z=" << z;
    }
}

TEST(Classifier, SeparableToySetIsFit) {
    const auto d = separable(42);
    const auto clf = train_classifier(d.view(), d.y, ClassifierConfig{});
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.rows.size(); ++i) correct += (clf.decision(d.rows[i]) > 0.0) == (d.y[i] != 0);
    EXPECT_EQ(correct, d.rows.size());
}

TEST(Classifier, SingleClassRejected) {
    auto d = separable(43, 10);
    std::fill(d.y.begin(), d.y.end(), std::uint8_t{1});
    EXPECT_THROW(train_classifier(d.view(), d.y, ClassifierConfig{}), Error);
    ClassifierConfig bad;
    bad.strength = 0.0;
    EXPECT_THROW(train_classifier(separable(44, 10).view(), separable(44, 10).y, bad), Error);
}

TEST(Classifier, HugeStrengthCollapsesToBias) {
    const auto d = separable(45);
    ClassifierConfig cfg;
    cfg.strength = 1e4;
    const auto clf = train_classifier(d.view(), d.y, cfg);
    for (double w : clf.weights) EXPECT_LT(std::abs(w), 1e-6);
    for (const auto& r : d.rows) EXPECT_NEAR(clf.decision(r), clf.bias, 1e-5);
}

TEST(Classifier, DeterministicPerSeed) {
    const auto d = separable(46);
    ClassifierConfig cfg;
    cfg.seed = 9;
    const auto a = train_classifier(d.view(), d.y, cfg);
    const auto b = train_classifier(d.view(), d.y, cfg);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.bias, b.bias);
}

TEST(Classifier, TrainingLowersObjective) {
    auto rng = make_rng(47, {});
    Data d;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> x(5);
        for (auto& v : x) v = uniform01(rng) * 2.0 - 1.0;
        d.y.push_back(x[0] + 0.5 * x[1] + 0.3 * (uniform01(rng) - 0.5) > 0 ? 1 : 0);
        d.rows.push_back(std::move(x));
    }
    ClassifierConfig cfg;
    cfg.strength = 1e-3;
    LinearClassifier zero{std::vector<double>(5, 0.0), 0.0};
    const auto clf = train_classifier(d.view(), d.y, cfg);
    EXPECT_LT(classifier_objective(clf, d.view(), d.y, cfg), 0.5 * classifier_objective(zero, d.view(), d.y, cfg));
}

TEST(Classifier, StandardizationIsFoldedIntoRawWeights) {
    // Scaling a feature by 1000 should not change decisions on raw inputs.
    auto d = separable(48);
    auto scaled = d;
    for (auto& r : scaled.rows) r[1] *= 1000.0;
    const auto a = train_classifier(d.view(), d.y, ClassifierConfig{});
    const auto b = train_classifier(scaled.view(), scaled.y, ClassifierConfig{});
    for (std::size_t i = 0; i < d.rows.size(); ++i)
        EXPECT_NEAR(a.decision(d.rows[i]), b.decision(scaled.rows[i]), 1e-8 * std::max(1.0, std::abs(a.decision(d.rows[i]))));
}
