#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ohmnet/error.hpp"

namespace ohmnet {

namespace detail {
inline void check_binary(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t& pos,
                         std::size_t& neg) {
    if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
    pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](std::uint8_t v) { return v != 0; }));
    neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw Error("metric needs at least one positive and one negative");
}
} // namespace detail

/// Area under the ROC curve via the Mann-Whitney U statistic, midranks for ties.
inline double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    std::size_t pos = 0, neg = 0;
    detail::check_binary(scores, labels, pos, neg);
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum = 0.0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1..j
        for (auto k = i; k < j; ++k)
            if (labels[idx[k]]) rank_sum += midrank;
        i = j;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

/// Area under the precision-recall curve by step-wise interpolation
/// (average precision). Tied scores enter as one threshold.
inline double auprc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    std::size_t pos = 0, neg = 0;
    detail::check_binary(scores, labels, pos, neg);
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    std::size_t tp = 0, seen = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i, tp_group = 0;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) tp_group += labels[idx[j++]] ? 1 : 0;
        tp += tp_group;
        seen += j - i;
        if (tp_group)
            ap += (static_cast<double>(tp_group) / static_cast<double>(pos)) *
                  (static_cast<double>(tp) / static_cast<double>(seen));
        i = j;
    }
    return std::min(ap, 1.0); // the sum can round just above 1
}

/// Linear-interpolation quantile of unsorted values, q in [0, 1].
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Median and half the interquartile distance.
struct Summary {
    double median = 0.0;
    double half_iqr = 0.0;
    std::size_t count = 0;
};

inline Summary summarize(const std::vector<double>& values) {
    if (values.empty()) return {};
    return {quantile(values, 0.5), 0.5 * (quantile(values, 0.75) - quantile(values, 0.25)), values.size()};
}

} // namespace ohmnet
