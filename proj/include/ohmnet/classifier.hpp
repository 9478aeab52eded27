#pragma once

// Binary linear classifier trained by SGD on the modified Huber loss with
// an elastic-net penalty.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ohmnet/error.hpp"
#include "ohmnet/rng.hpp"

namespace ohmnet {

/// Modified Huber loss of the margin z = y * f(x).
inline double modified_huber(double z) noexcept {
    if (z >= -1.0) {
        const double h = std::max(0.0, 1.0 - z);
        return h * h;
    }
    return -4.0 * z;
}

/// d/dz of modified_huber (a subgradient at z = 1).
inline double modified_huber_derivative(double z) noexcept {
    if (z >= 1.0) return 0.0;
    if (z >= -1.0) return -2.0 * (1.0 - z);
    return -4.0;
}

struct ClassifierConfig {
    double strength = 1e-4; // elastic-net alpha
    double l1_ratio = 0.15;
    std::size_t epochs = 30;
    bool standardize = true;
    std::uint64_t seed = 1;
};

struct LinearClassifier {
    std::vector<double> weights;
    double bias = 0.0;

    double decision(std::span<const double> x) const {
        double s = bias;
        for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * x[k];
        return s;
    }
};

using FeatureRows = std::vector<std::span<const double>>;

/// Mean modified-Huber loss plus
///   strength * (l1_ratio * |w|_1 + (1 - l1_ratio) / 2 * |w|^2).
inline double classifier_objective(const LinearClassifier& clf, const FeatureRows& x, std::span<const std::uint8_t> y,
                                   const ClassifierConfig& config) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) loss += modified_huber((y[i] ? 1.0 : -1.0) * clf.decision(x[i]));
    loss /= static_cast<double>(x.size());
    double l1 = 0.0, l2 = 0.0;
    for (double w : clf.weights) {
        l1 += std::abs(w);
        l2 += w * w;
    }
    return loss + config.strength * (config.l1_ratio * l1 + 0.5 * (1.0 - config.l1_ratio) * l2);
}

/// SGD with the "optimal" step schedule eta_t = 1 / (strength * (t0 + t)),
/// multiplicative L2 shrinkage and L1 truncation toward zero. Features are
/// standardized internally; the returned weights act on raw features.
inline LinearClassifier train_classifier(const FeatureRows& x, std::span<const std::uint8_t> y,
                                         const ClassifierConfig& config) {
    if (x.empty() || x.size() != y.size()) throw Error("classifier needs matching, nonempty features and labels");
    const auto pos = static_cast<std::size_t>(std::count_if(y.begin(), y.end(), [](std::uint8_t v) { return v != 0; }));
    if (pos == 0 || pos == y.size()) throw Error("classifier needs both positive and negative examples");
    if (!(config.strength > 0.0)) throw Error("regularization strength must be positive");
    const auto n = x.size();
    const auto d = x.front().size();

    std::vector<double> mean(d, 0.0), scale(d, 1.0);
    if (config.standardize) {
        for (const auto& row : x)
            for (std::size_t k = 0; k < d; ++k) mean[k] += row[k];
        for (auto& m : mean) m /= static_cast<double>(n);
        std::vector<double> var(d, 0.0);
        for (const auto& row : x)
            for (std::size_t k = 0; k < d; ++k) var[k] += (row[k] - mean[k]) * (row[k] - mean[k]);
        for (std::size_t k = 0; k < d; ++k) {
            const double sd = std::sqrt(var[k] / static_cast<double>(n));
            scale[k] = sd > 1e-12 ? sd : 1.0;
        }
    }

    const double alpha = config.strength;
    const double typw = std::sqrt(1.0 / std::sqrt(alpha));
    const double eta0 = typw / std::max(1.0, std::abs(modified_huber_derivative(-typw)));
    const double t0 = 1.0 / (eta0 * alpha);

    std::vector<double> w(d, 0.0), z(d);
    double b = 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_rng(config.seed, {stream::classifier});
    double t = 0.0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            const double eta = 1.0 / (alpha * (t0 + t));
            const double label = y[i] ? 1.0 : -1.0;
            double f = b;
            for (std::size_t k = 0; k < d; ++k) {
                z[k] = (x[i][k] - mean[k]) / scale[k];
                f += w[k] * z[k];
            }
            const double g = modified_huber_derivative(label * f) * label;
            const double shrink = std::max(0.0, 1.0 - eta * alpha * (1.0 - config.l1_ratio));
            const double cut = eta * alpha * config.l1_ratio;
            for (std::size_t k = 0; k < d; ++k) {
                double v = (w[k] - eta * g * z[k]) * shrink;
                v = v > cut ? v - cut : (v < -cut ? v + cut : 0.0);
                w[k] = v;
            }
            b -= eta * g;
            t += 1.0;
        }
    }

    LinearClassifier clf;
    clf.weights.resize(d);
    clf.bias = b;
    for (std::size_t k = 0; k < d; ++k) {
        clf.weights[k] = w[k] / scale[k];
        clf.bias -= clf.weights[k] * mean[k];
    }
    if (!std::isfinite(clf.bias) ||
        !std::all_of(clf.weights.begin(), clf.weights.end(), [](double v) { return std::isfinite(v); }))
        throw NumericError("classifier weights are not finite");
    return clf;
}

} // namespace ohmnet
