#pragma once

// Second-order biased random walks (return parameter p, in-out parameter q)
// that define each node's network neighborhood in each layer.

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ohmnet/alias.hpp"
#include "ohmnet/error.hpp"
#include "ohmnet/graph.hpp"
#include "ohmnet/parallel.hpp"
#include "ohmnet/rng.hpp"

namespace ohmnet {

struct WalkConfig {
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 80; // steps; a walk holds up to walk_length + 1 nodes
    double p = 1.0;
    double q = 1.0;
    std::uint64_t seed = 1;
    ExecutionMode mode = ExecutionMode::sequential;
    std::size_t threads = 0;
    /// Upper bound on memory held by cached (prev, cur) alias tables, per worker.
    std::size_t cache_budget_bytes = std::size_t{64} << 20;

    void check() const {
        if (walks_per_node < 1) throw Error("walks per node must be >= 1");
        if (walk_length < 1) throw Error("walk length must be >= 1");
        if (!(p > 0.0) || !(q > 0.0)) throw Error("p and q must be positive");
    }
};

using Walk = std::vector<NodeId>;

struct WalkCorpus {
    std::vector<std::vector<Walk>> layers; // indexed by LayerId
};

/// Unnormalized next-step weights from `cur` (local index) given the
/// previous node: w(cur,x)/p if x == prev, w(cur,x) if x is adjacent to
/// prev, w(cur,x)/q otherwise. Order follows layer.adjacency[cur].
inline std::vector<double> transition_weights(const Layer& layer, std::uint32_t prev, std::uint32_t cur, double p,
                                              double q) {
    const auto& adj = layer.adjacency.at(cur);
    if (adj.empty()) throw Error("transition from isolated node");
    std::vector<double> w;
    w.reserve(adj.size());
    for (const auto& n : adj) {
        if (n.local == prev)
            w.push_back(n.weight / p);
        else if (layer.has_edge(n.local, prev))
            w.push_back(n.weight);
        else
            w.push_back(n.weight / q);
    }
    return w;
}

/// Alias table over cur's neighbors (in adjacency order) with the
/// second-order bias. Arguments are global node ids.
inline AliasTable build_transition(const Layer& layer, NodeId prev, NodeId cur, const WalkConfig& config) {
    const auto c = layer.local_index(cur);
    const auto pv = layer.local_index(prev);
    if (!c || !pv) throw Error("build_transition: node not in layer '" + layer.name + "'");
    return AliasTable(transition_weights(layer, *pv, *c, config.p, config.q));
}

namespace detail {

/// Lazily built (prev, cur) tables; stops caching once the budget is spent.
class TransitionCache {
public:
    TransitionCache(const Layer& layer, const WalkConfig& config) : layer_(layer), config_(config) {}

    std::uint32_t next(std::uint32_t prev, std::uint32_t cur, Rng& rng) {
        const auto key = (static_cast<std::uint64_t>(prev) << 32) | cur;
        if (auto it = cache_.find(key); it != cache_.end()) return layer_.adjacency[cur][it->second.sample(rng)].local;
        AliasTable table(transition_weights(layer_, prev, cur, config_.p, config_.q));
        const auto pick = layer_.adjacency[cur][table.sample(rng)].local;
        if (used_ + table.bytes() <= config_.cache_budget_bytes) {
            used_ += table.bytes();
            cache_.emplace(key, std::move(table));
        }
        return pick;
    }

private:
    const Layer& layer_;
    const WalkConfig& config_;
    std::unordered_map<std::uint64_t, AliasTable> cache_;
    std::size_t used_ = 0;
};

inline std::vector<AliasTable> first_order_tables(const Layer& layer) {
    std::vector<AliasTable> tables(layer.size());
    std::vector<double> w;
    for (std::size_t a = 0; a < layer.size(); ++a) {
        if (layer.adjacency[a].empty()) continue;
        w.clear();
        for (const auto& n : layer.adjacency[a]) w.push_back(n.weight);
        tables[a] = AliasTable(w);
    }
    return tables;
}

inline Walk walk_from(const Layer& layer, const std::vector<AliasTable>& first, TransitionCache& cache,
                      std::uint32_t start, std::size_t length, Rng& rng) {
    Walk walk{layer.nodes[start]};
    if (layer.adjacency[start].empty()) return walk;
    walk.reserve(length + 1);
    std::uint32_t prev = start;
    std::uint32_t cur = layer.adjacency[start][first[start].sample(rng)].local;
    walk.push_back(layer.nodes[cur]);
    for (std::size_t step = 1; step < length; ++step) {
        const auto nxt = cache.next(prev, cur, rng);
        prev = cur;
        cur = nxt;
        walk.push_back(layer.nodes[cur]);
    }
    return walk;
}

} // namespace detail

/// Walks for one layer. Every walk draws from its own stream derived from
/// (seed, layer, start node, round), so parallel and sequential output match.
inline std::vector<Walk> simulate_layer_walks(const Layer& layer, LayerId layer_id, const WalkConfig& config) {
    config.check();
    const auto n = layer.size();
    const auto first = detail::first_order_tables(layer);

    // Slot layout: round-major, start nodes in a per-round shuffled order.
    std::vector<std::uint32_t> starts(config.walks_per_node * n);
    for (std::size_t r = 0; r < config.walks_per_node; ++r) {
        auto order_rng = make_rng(config.seed, {stream::walk_order, layer_id, r});
        auto* row = starts.data() + r * n;
        for (std::uint32_t a = 0; a < n; ++a) row[a] = a;
        shuffle(row, row + n, order_rng);
    }

    std::vector<Walk> walks(starts.size());
    const auto threads = resolve_threads(config.mode, config.threads);
    parallel_for(starts.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        detail::TransitionCache cache(layer, config);
        for (auto s = begin; s < end; ++s) {
            const auto round = s / std::max<std::size_t>(n, 1);
            const auto start = starts[s];
            auto rng = make_rng(config.seed, {stream::walks, layer_id, layer.nodes[start], round});
            walks[s] = detail::walk_from(layer, first, cache, start, config.walk_length, rng);
        }
    });
    return walks;
}

inline WalkCorpus simulate_walks(const MultiLayerNetwork& net, const WalkConfig& config) {
    WalkCorpus corpus;
    corpus.layers.reserve(net.layers.size());
    for (LayerId l = 0; l < net.layers.size(); ++l) corpus.layers.push_back(simulate_layer_walks(net.layers[l], l, config));
    return corpus;
}

} // namespace ohmnet
