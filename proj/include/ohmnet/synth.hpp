#pragma once

// Planted-partition multi-layer benchmark with a balanced layer hierarchy.
// Community assignments are inherited down the tree: every element copies
// its parent's assignment and moves some nodes to a different community.
// A leaf moves half of a `divergence` fraction, and the fraction doubles at
// each level up, so sibling layers disagree on about a `divergence` fraction
// and layers in different subtrees disagree much more.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ohmnet/error.hpp"
#include "ohmnet/graph.hpp"
#include "ohmnet/io.hpp"
#include "ohmnet/rng.hpp"

namespace ohmnet {

struct SynthConfig {
    std::size_t nodes_per_layer = 200;
    std::size_t layers = 4;
    std::size_t hierarchy_depth = 2;
    std::size_t communities = 4;
    double p_in = 0.1;
    double p_out = 0.01;
    double divergence = 0.2;
    std::uint64_t seed = 1;

    void check() const {
        if (communities < 2) throw Error("need at least 2 communities");
        if (!(p_in > p_out)) throw Error("p_in must exceed p_out");
        if (p_in > 1.0 || p_out < 0.0) throw Error("edge probabilities must lie in [0, 1]");
        if (divergence < 0.0 || divergence > 1.0) throw Error("divergence must lie in [0, 1]");
        if (nodes_per_layer < communities) throw Error("fewer nodes than communities");
    }
};

struct SynthBenchmark {
    MultiLayerNetwork network;
    Hierarchy hierarchy;
    LabelSet labels;
    /// Community of every node, per hierarchy element.
    std::vector<std::vector<std::size_t>> assignment;
};

/// Branching factor b with b^depth == layers, or an error.
inline std::size_t balanced_branching(std::size_t layers, std::size_t depth) {
    if (depth == 0) throw Error("hierarchy depth must be >= 1");
    const auto b = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(layers), 1.0 / depth)));
    std::size_t p = 1;
    for (std::size_t i = 0; i < depth; ++i) p *= b;
    if (b < 2 || p != layers)
        throw Error("cannot place " + std::to_string(layers) + " layers at the leaves of a balanced tree of depth " +
                    std::to_string(depth));
    return b;
}

inline SynthBenchmark generate(const SynthConfig& config) {
    config.check();
    const auto branching = balanced_branching(config.layers, config.hierarchy_depth);
    const auto n = config.nodes_per_layer;
    const auto k = config.communities;

    SynthBenchmark out;
    auto& h = out.hierarchy;
    auto& net = out.network;
    for (std::size_t i = 0; i < n; ++i) net.universe.intern("n" + std::to_string(i));

    // Hierarchy, level by level.
    std::vector<ElementId> level{h.add("root")};
    for (std::size_t depth = 1; depth <= config.hierarchy_depth; ++depth) {
        std::vector<ElementId> next;
        for (auto parent : level)
            for (std::size_t c = 0; c < branching; ++c) {
                const auto idx = next.size();
                const auto name = depth == config.hierarchy_depth ? "layer" + std::to_string(idx)
                                                                 : "g" + std::to_string(depth) + "_" + std::to_string(idx);
                const auto e = h.add(name);
                h.set_parent(e, parent);
                next.push_back(e);
            }
        level = std::move(next);
    }

    // Community assignments, root first (elements were added parents-first).
    out.assignment.resize(h.size());
    {
        auto rng = make_rng(config.seed, {stream::synth, 0});
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        shuffle(perm.begin(), perm.end(), rng);
        auto& root = out.assignment[0];
        root.resize(n);
        for (std::size_t i = 0; i < n; ++i) root[perm[i]] = i % k;
    }
    for (ElementId e = 1; e < h.size(); ++e) {
        const auto height = config.hierarchy_depth - h.depth(e);
        const double frac = std::min(1.0, 0.5 * config.divergence * std::ldexp(1.0, static_cast<int>(height)));
        const auto moved = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
        auto rng = make_rng(config.seed, {stream::synth, 1, e});
        auto a = out.assignment[*h.elements[e].parent];
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < moved; ++i) {
            const auto u = perm[i];
            a[u] = (a[u] + 1 + uniform_below(rng, k - 1)) % k;
        }
        out.assignment[e] = std::move(a);
    }

    // Planted-partition layers at the leaves.
    for (std::size_t l = 0; l < level.size(); ++l) {
        const auto e = level[l];
        const auto& comm = out.assignment[e];
        auto rng = make_rng(config.seed, {stream::synth, 2, l});
        LayerBuilder b;
        for (NodeId u = 0; u < n; ++u) b.add_node(u);
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) {
                const double p = comm[u] == comm[v] ? config.p_in : config.p_out;
                if (uniform01(rng) < p) b.add_edge(u, v, 1.0);
            }
        net.layers.push_back(b.build(h.elements[e].name));
        h.bind(e, l);
        for (NodeId u = 0; u < n; ++u) out.labels.add(u, l, "c" + std::to_string(comm[u]));
    }
    return out;
}

/// Writes layers.txt + edge lists, hierarchy.txt and labels.txt into dir.
inline void write_benchmark(const SynthBenchmark& bench, const fs::path& dir) {
    write_network(bench.network, dir);
    {
        auto out = detail::open_out(dir / "hierarchy.txt");
        write_hierarchy(out, bench.hierarchy);
    }
    auto out = detail::open_out(dir / "labels.txt");
    write_labels(out, bench.labels, bench.network);
    if (!out) throw Error("failed writing benchmark files");
}

} // namespace ohmnet
