#include <gtest/gtest.h>

#include <map>

#include "support.hpp"

using namespace ohmnet;
using ohmnet::testing::chi_square;
using ohmnet::testing::make_layer;

namespace {

constexpr std::size_t kSamples = 100000;

std::vector<double> normalized(std::vector<double> w) {
    double s = 0.0;
    for (double x : w) s += x;
    for (double& x : w) x /= s;
    return w;
}

std::vector<std::size_t> draw(const AliasTable& t, std::uint64_t seed) {
    auto rng = make_rng(seed, {});
    std::vector<std::size_t> counts(t.size(), 0);
    for (std::size_t i = 0; i < kSamples; ++i) ++counts[t.sample(rng)];
    return counts;
}

// b sits between a (previous) and {c, d}; c is also adjacent to a.
Layer square(NodeUniverse& uni) {
    return make_layer(uni, "sq", {{"a", "b"}, {"b", "c", 2.0}, {"b", "d", 1.5}, {"a", "c"}, {"b", "e", 0.5}, {"e", "f"}});
}

} // namespace

TEST(AliasTable, ThreeOutcomeChiSquare) {
    const std::vector<double> w{0.2, 0.5, 0.3};
    AliasTable t(w);
    EXPECT_LT(chi_square(draw(t, 1), normalized(w)), ohmnet::testing::chi2_crit_001_df2);
}

TEST(AliasTable, FourOutcomeChiSquare) {
    const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
    AliasTable t(w);
    EXPECT_LT(chi_square(draw(t, 2), normalized(w)), ohmnet::testing::chi2_crit_001_df3);
}

TEST(AliasTable, EncodedDistributionIsExact) {
    auto rng = make_rng(3, {});
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> w(1 + uniform_below(rng, 30));
        for (auto& x : w) x = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng) * 10.0;
        w[0] += 0.1;
        const auto p = normalized(w);
        const auto got = AliasTable(w).distribution();
        ASSERT_EQ(got.size(), p.size());
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(got[i], p[i], 1e-12);
    }
}

TEST(AliasTable, ZeroWeightNeverDrawn) {
    AliasTable t(std::vector<double>{0.0, 1.0, 0.0, 3.0});
    const auto c = draw(t, 4);
    EXPECT_EQ(c[0], 0u);
    EXPECT_EQ(c[2], 0u);
}

TEST(AliasTable, RejectsBadWeights) {
    EXPECT_THROW(AliasTable(std::vector<double>{}), Error);
    EXPECT_THROW(AliasTable(std::vector<double>{0.0, 0.0}), Error);
    EXPECT_THROW(AliasTable(std::vector<double>{1.0, -1.0}), Error);
}

TEST(BiasedStep, WeightsFollowReturnAndInOutParameters) {
    NodeUniverse uni;
    const auto layer = square(uni);
    const auto loc = [&](const char* n) { return *layer.local_index(*uni.find(n)); };
    const auto w = transition_weights(layer, loc("a"), loc("b"), 2.0, 0.25);
    std::map<std::uint32_t, double> by_node;
    for (std::size_t k = 0; k < w.size(); ++k) by_node[layer.adjacency[loc("b")][k].local] = w[k];
    EXPECT_DOUBLE_EQ(by_node[loc("a")], 1.0 / 2.0);
    EXPECT_DOUBLE_EQ(by_node[loc("c")], 2.0);
    EXPECT_DOUBLE_EQ(by_node[loc("d")], 1.5 / 0.25);
    EXPECT_DOUBLE_EQ(by_node[loc("e")], 0.5 / 0.25);
}

TEST(BiasedStep, ThreeOutcomeChiSquare) {
    NodeUniverse uni;
    // Unit weights: return 1/p, common neighbor 1, outward 1/q.
    const auto layer = make_layer(uni, "tri", {{"a", "b"}, {"b", "c"}, {"a", "c"}, {"b", "d"}});
    const double p = 4.0, q = 0.5;
    WalkConfig cfg;
    cfg.p = p;
    cfg.q = q;
    const auto table = build_transition(layer, *uni.find("a"), *uni.find("b"), cfg);
    std::vector<double> expect;
    for (const auto& n : layer.adjacency[*layer.local_index(*uni.find("b"))]) {
        const auto name = uni.name(layer.nodes[n.local]);
        expect.push_back(name == "a" ? 1.0 / p : (name == "c" ? 1.0 : 1.0 / q));
    }
    ASSERT_EQ(expect.size(), 3u);
    EXPECT_LT(chi_square(draw(table, 5), normalized(expect)), ohmnet::testing::chi2_crit_001_df2);
}

TEST(BiasedStep, FourOutcomeChiSquareThroughWalker) {
    NodeUniverse uni;
    const auto layer = square(uni);
    WalkConfig cfg;
    cfg.p = 0.5;
    cfg.q = 3.0;
    const auto a = *layer.local_index(*uni.find("a"));
    const auto b = *layer.local_index(*uni.find("b"));
    const auto w = transition_weights(layer, a, b, cfg.p, cfg.q);
    ASSERT_EQ(w.size(), 4u);
    detail::TransitionCache cache(layer, cfg);
    std::map<std::uint32_t, std::size_t> pos;
    for (std::size_t k = 0; k < 4; ++k) pos[layer.adjacency[b][k].local] = k;
    std::vector<std::size_t> counts(4, 0);
    auto rng = make_rng(6, {});
    for (std::size_t i = 0; i < kSamples; ++i) ++counts[pos.at(cache.next(a, b, rng))];
    EXPECT_LT(chi_square(counts, normalized(w)), ohmnet::testing::chi2_crit_001_df3);
}

TEST(BiasedStep, UncachedDrawsMatchCachedDistribution) {
    NodeUniverse uni;
    const auto layer = square(uni);
    WalkConfig cfg;
    cfg.p = 0.5;
    cfg.q = 3.0;
    cfg.cache_budget_bytes = 0;
    const auto a = *layer.local_index(*uni.find("a"));
    const auto b = *layer.local_index(*uni.find("b"));
    const auto w = transition_weights(layer, a, b, cfg.p, cfg.q);
    detail::TransitionCache cache(layer, cfg);
    std::map<std::uint32_t, std::size_t> pos;
    for (std::size_t k = 0; k < 4; ++k) pos[layer.adjacency[b][k].local] = k;
    std::vector<std::size_t> counts(4, 0);
    auto rng = make_rng(7, {});
    for (std::size_t i = 0; i < kSamples; ++i) ++counts[pos.at(cache.next(a, b, rng))];
    EXPECT_LT(chi_square(counts, normalized(w)), ohmnet::testing::chi2_crit_001_df3);
}

TEST(Walks, ShapeAndEdgeFollowing) {
    auto rng = make_rng(8, {});
    for (int trial = 0; trial < 10; ++trial) {
        auto h = ohmnet::testing::random_tree(3 + uniform_below(rng, 4), rng);
        auto net = ohmnet::testing::random_network_for(h, 25, rng, 0.15);
        WalkConfig cfg;
        cfg.walks_per_node = 3;
        cfg.walk_length = 12;
        cfg.p = 0.5 + uniform01(rng) * 2.0;
        cfg.q = 0.5 + uniform01(rng) * 2.0;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto corpus = simulate_walks(net, cfg);
        ASSERT_EQ(corpus.layers.size(), net.layers.size());
        for (LayerId l = 0; l < net.layers.size(); ++l) {
            const auto& layer = net.layers[l];
            const auto& walks = corpus.layers[l];
            ASSERT_EQ(walks.size(), cfg.walks_per_node * layer.size());
            std::map<NodeId, std::size_t> starts;
            for (const auto& w : walks) {
                ++starts[w.front()];
                const auto first = *layer.local_index(w.front());
                if (layer.adjacency[first].empty()) {
                    EXPECT_EQ(w.size(), 1u);
                    continue;
                }
                ASSERT_EQ(w.size(), cfg.walk_length + 1);
                for (std::size_t s = 1; s < w.size(); ++s)
                    ASSERT_TRUE(layer.has_edge(*layer.local_index(w[s - 1]), *layer.local_index(w[s])));
            }
            for (auto u : layer.nodes) EXPECT_EQ(starts[u], cfg.walks_per_node);
        }
    }
}

TEST(Walks, IsolatedNodeYieldsSingleton) {
    NodeUniverse uni;
    const auto layer = make_layer(uni, "l", {{"a", "b"}}, {"lonely"});
    WalkConfig cfg;
    cfg.walks_per_node = 2;
    cfg.walk_length = 5;
    const auto walks = simulate_layer_walks(layer, 0, cfg);
    std::size_t singletons = 0;
    for (const auto& w : walks)
        if (w.front() == *uni.find("lonely")) {
            EXPECT_EQ(w, Walk{*uni.find("lonely")});
            ++singletons;
        }
    EXPECT_EQ(singletons, 2u);
}

TEST(Walks, DeterministicAndModeIndependent) {
    auto rng = make_rng(9, {});
    auto h = ohmnet::testing::random_tree(4, rng);
    auto net = ohmnet::testing::random_network_for(h, 40, rng, 0.2);
    WalkConfig cfg;
    cfg.walks_per_node = 4;
    cfg.walk_length = 20;
    cfg.p = 0.7;
    cfg.q = 1.8;
    cfg.seed = 99;
    const auto a = simulate_walks(net, cfg);
    const auto b = simulate_walks(net, cfg);
    EXPECT_EQ(a.layers, b.layers);
    cfg.mode = ExecutionMode::parallel;
    cfg.threads = 3;
    EXPECT_EQ(simulate_walks(net, cfg).layers, a.layers);
    cfg.mode = ExecutionMode::sequential;
    cfg.seed = 100;
    EXPECT_NE(simulate_walks(net, cfg).layers, a.layers);
}

TEST(WalkConfig, RejectsInvalid) {
    WalkConfig cfg;
    cfg.p = 0.0;
    EXPECT_THROW(cfg.check(), Error);
    cfg = {};
    cfg.walk_length = 0;
    EXPECT_THROW(cfg.check(), Error);
    cfg = {};
    cfg.walks_per_node = 0;
    EXPECT_THROW(cfg.check(), Error);
}

TEST(BiasedStep, TriangleAndPathHandCases) {
    NodeUniverse uni;
    const auto tri = make_layer(uni, "tri", {{"a", "b"}, {"b", "c"}, {"a", "c"}});
    WalkConfig cfg;
    cfg.p = 4.0;
    cfg.q = 0.25;
    const auto t = build_transition(tri, *uni.find("a"), *uni.find("b"), cfg).distribution();
    for (std::size_t k = 0; k < 2; ++k) {
        const auto name = uni.name(tri.nodes[tri.adjacency[*tri.local_index(*uni.find("b"))][k].local]);
        EXPECT_NEAR(t[k], name == "a" ? 0.2 : 0.8, 1e-12);
    }

    const auto path = make_layer(uni, "path", {{"a", "b"}, {"b", "c"}});
    const auto w = transition_weights(path, *path.local_index(*uni.find("a")), *path.local_index(*uni.find("b")), 4.0,
                                      0.25);
    EXPECT_EQ(w, (std::vector<double>{0.25, 4.0}));
    EXPECT_THROW(transition_weights(make_layer(uni, "iso", {}, {"z"}), 0, 0, 1.0, 1.0), Error);
}

TEST(BiasedStep, FirstOrderReductionChiSquare) {
    NodeUniverse uni;
    const auto layer = square(uni);
    WalkConfig cfg;
    const auto a = *layer.local_index(*uni.find("a"));
    const auto b = *layer.local_index(*uni.find("b"));
    std::vector<double> weights;
    for (const auto& n : layer.adjacency[b]) weights.push_back(n.weight);
    detail::TransitionCache cache(layer, cfg);
    std::map<std::uint32_t, std::size_t> pos;
    for (std::size_t k = 0; k < weights.size(); ++k) pos[layer.adjacency[b][k].local] = k;
    std::vector<std::size_t> counts(weights.size(), 0);
    auto rng = make_rng(10, {});
    for (std::size_t i = 0; i < kSamples; ++i) ++counts[pos.at(cache.next(a, b, rng))];
    EXPECT_LT(chi_square(counts, normalized(weights)), ohmnet::testing::chi2_crit_001_df3);
}

TEST(AliasTable, TwoOneOneChiSquare) {
    AliasTable t(std::vector<double>{2.0, 1.0, 1.0});
    EXPECT_LT(chi_square(draw(t, 11), {0.5, 0.25, 0.25}), ohmnet::testing::chi2_crit_001_df2);
}

TEST(Walks, StarAlternatesThroughCenter) {
    NodeUniverse uni;
    const auto star = make_layer(uni, "star", {{"c", "x"}, {"c", "y"}, {"c", "z"}});
    WalkConfig cfg;
    cfg.walk_length = 15;
    cfg.p = 0.3;
    cfg.q = 5.0;
    const auto c = *uni.find("c");
    for (const auto& w : simulate_layer_walks(star, 0, cfg)) {
        if (w.front() == c) continue;
        for (std::size_t s = 1; s < w.size(); s += 2) EXPECT_EQ(w[s], c);
    }
}

TEST(Walks, CountContract) {
    NodeUniverse uni;
    std::vector<ohmnet::testing::EdgeSpec> ring;
    for (int i = 0; i < 100; ++i) ring.push_back({"r" + std::to_string(i), "r" + std::to_string((i + 1) % 100)});
    const auto layer = make_layer(uni, "ring", ring);
    const auto walks = simulate_layer_walks(layer, 0, WalkConfig{});
    ASSERT_EQ(walks.size(), 1000u);
    for (const auto& w : walks) EXPECT_EQ(w.size(), 81u);
}
