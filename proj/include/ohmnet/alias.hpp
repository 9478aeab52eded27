#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ohmnet/error.hpp"
#include "ohmnet/rng.hpp"

namespace ohmnet {

/// Vose alias table: O(n) construction, O(1) draws from a categorical
/// distribution proportional to nonnegative weights.
class AliasTable {
public:
    AliasTable() = default;

    explicit AliasTable(std::span<const double> weights) {
        const auto n = weights.size();
        if (n == 0) throw Error("alias table over empty support");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw Error("alias table weight must be nonnegative");
            total += w;
        }
        if (!(total > 0.0)) throw Error("alias table weights sum to zero");

        prob_.resize(n);
        alias_.resize(n);
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const auto s = small.back();
            small.pop_back();
            const auto l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for (auto i : large) prob_[i] = 1.0, alias_[i] = i;
        for (auto i : small) prob_[i] = 1.0, alias_[i] = i;
    }

    std::size_t size() const noexcept { return prob_.size(); }

    std::uint32_t sample(Rng& rng) const {
        const auto i = static_cast<std::uint32_t>(uniform_below(rng, prob_.size()));
        return uniform01(rng) < prob_[i] ? i : alias_[i];
    }

    /// The distribution the table actually encodes (reconstructed from the
    /// prob/alias columns).
    std::vector<double> distribution() const {
        const auto n = prob_.size();
        std::vector<double> p(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] += prob_[i] / static_cast<double>(n);
            p[alias_[i]] += (1.0 - prob_[i]) / static_cast<double>(n);
        }
        return p;
    }

    std::size_t bytes() const noexcept {
        return prob_.capacity() * sizeof(double) + alias_.capacity() * sizeof(std::uint32_t);
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

} // namespace ohmnet
