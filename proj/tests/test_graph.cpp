#include <gtest/gtest.h>

#include <queue>

#include "support.hpp"

using namespace ohmnet;
using ohmnet::testing::make_layer;

namespace {

struct Fixture {
    MultiLayerNetwork net;
    Hierarchy h;
};

// root -> {A, B}, two small layers.
Fixture two_layer() {
    Fixture f;
    f.net.layers.push_back(make_layer(f.net.universe, "A", {{"x", "y"}, {"y", "z"}}));
    f.net.layers.push_back(make_layer(f.net.universe, "B", {{"x", "z", 2.0}}));
    const auto root = f.h.add("root");
    for (LayerId l = 0; l < 2; ++l) {
        const auto e = f.h.add(f.net.layers[l].name);
        f.h.set_parent(e, root);
        f.h.bind(e, l);
    }
    return f;
}

std::size_t components(const Layer& layer) {
    std::vector<bool> seen(layer.size(), false);
    std::size_t count = 0;
    for (std::size_t s = 0; s < layer.size(); ++s) {
        if (seen[s]) continue;
        ++count;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            const auto a = q.front();
            q.pop();
            for (const auto& n : layer.adjacency[a])
                if (!seen[n.local]) seen[n.local] = true, q.push(n.local);
        }
    }
    return count;
}

} // namespace

TEST(Validate, MinimalInstanceIsValid) {
    auto f = two_layer();
    const auto rep = validate(f.net, f.h);
    EXPECT_TRUE(rep.ok()) << (rep.ok() ? "" : rep.violations.front());
}

TEST(Validate, MultipleRoots) {
    auto f = two_layer();
    f.h.add("stray_root");
    f.h.elements.back().layer = std::nullopt;
    const auto rep = validate(f.net, f.h);
    EXPECT_TRUE(rep.contains("multiple roots"));
}

TEST(Validate, NonLeafBinding) {
    auto f = two_layer();
    f.h.elements[*f.h.find("A")].layer.reset();
    f.h.bind(f.h.root(), 0);
    const auto rep = validate(f.net, f.h);
    EXPECT_TRUE(rep.contains("non-leaf binding"));
}

TEST(Validate, CycleDanglingOrphanAsymmetric) {
    auto f = two_layer();
    f.h.elements[0].parent = 1; // root <-> A
    f.h.elements[1].children.push_back(0);
    f.net.universe.intern("orphan");
    f.net.layers[0].adjacency[0][0].weight = 7.0; // x->y no longer matches y->x
    f.h.elements[2].layer = 9;
    const auto rep = validate(f.net, f.h);
    EXPECT_TRUE(rep.contains("cycle"));
    EXPECT_TRUE(rep.contains("orphan node"));
    EXPECT_TRUE(rep.contains("asymmetric edge"));
    EXPECT_TRUE(rep.contains("dangling binding"));
}

TEST(TreeDistance, BasicCases) {
    Hierarchy h;
    const auto root = h.add("root");
    const auto a = h.add("a");
    const auto b = h.add("b");
    const auto c = h.add("c");
    const auto s1 = h.add("s1");
    const auto s2 = h.add("s2");
    h.set_parent(a, root);
    h.set_parent(b, a);
    h.set_parent(c, b);
    h.set_parent(s1, a);
    h.set_parent(s2, a);
    EXPECT_EQ(tree_distance(h, b, b), 0u);
    EXPECT_EQ(tree_distance(h, s1, s2), 2u);
    EXPECT_EQ(tree_distance(h, c, root), 3u);
    EXPECT_EQ(tree_distance(h, "c", "s2"), 3u);
    EXPECT_THROW(tree_distance(h, c, 42), Error);
    EXPECT_THROW(tree_distance(h, "c", "nope"), Error);
}

TEST(TreeDistance, IsAMetricOnRandomTrees) {
    auto rng = make_rng(11, {});
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = 2 + uniform_below(rng, 20);
        const auto h = ohmnet::testing::random_tree(m, rng);
        for (ElementId a = 0; a < m; ++a)
            for (ElementId b = 0; b < m; ++b) {
                const auto dab = tree_distance(h, a, b);
                ASSERT_EQ(dab, tree_distance(h, b, a));
                ASSERT_EQ(dab == 0, a == b);
                for (ElementId c = 0; c < m; ++c) ASSERT_LE(dab, tree_distance(h, a, c) + tree_distance(h, c, b));
            }
    }
}

TEST(Hierarchy, ElementCountBoundsOnRandomTrees) {
    auto rng = make_rng(12, {});
    for (int trial = 0; trial < 50; ++trial) {
        // Every internal element gets >= 2 children: grow by splitting a leaf.
        Hierarchy h;
        h.add("r");
        std::vector<ElementId> leaves{0};
        const auto k_target = 2 + uniform_below(rng, 15);
        while (leaves.size() < k_target) {
            const auto pick = uniform_below(rng, leaves.size());
            const auto parent = leaves[pick];
            leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
            const auto kids = 2 + uniform_below(rng, 2);
            for (std::size_t c = 0; c < kids; ++c) {
                const auto e = h.add("e" + std::to_string(h.size()));
                h.set_parent(e, parent);
                leaves.push_back(e);
            }
        }
        auto net = ohmnet::testing::random_network_for(h, 10, rng);
        ASSERT_TRUE(validate(net, h).ok());
        const auto k = net.layers.size();
        EXPECT_GE(h.size(), k);
        EXPECT_LE(h.size(), 2 * k - 1);
    }
}

TEST(SubtreeScope, LeafUnionAndRoot) {
    MultiLayerNetwork net;
    net.layers.push_back(make_layer(net.universe, "i", {{"0", "1"}}));
    net.layers.push_back(make_layer(net.universe, "j", {{"1", "2"}}));
    net.layers.push_back(make_layer(net.universe, "k", {{"3", "4"}}));
    net.layers.push_back(make_layer(net.universe, "l", {{"4", "5"}, {"5", "0"}}));
    // Two-level hierarchy: 1 -> {2, 3}, 2 -> {i, j}, 3 -> {k, l}.
    Hierarchy h;
    const auto e1 = h.add("1");
    const auto e2 = h.add("2");
    const auto e3 = h.add("3");
    h.set_parent(e2, e1);
    h.set_parent(e3, e1);
    for (LayerId l = 0; l < 4; ++l) {
        const auto e = h.add(net.layers[l].name);
        h.set_parent(e, l < 2 ? e2 : e3);
        h.bind(e, l);
    }
    ASSERT_TRUE(validate(net, h).ok());

    const auto ids = [&](std::initializer_list<const char*> names) {
        std::vector<NodeId> out;
        for (auto n : names) out.push_back(*net.universe.find(n));
        std::sort(out.begin(), out.end());
        return out;
    };
    EXPECT_EQ(subtree_scope(h, net, *h.find("i")), ids({"0", "1"}));
    EXPECT_EQ(subtree_scope(h, net, e2), ids({"0", "1", "2"}));
    EXPECT_EQ(subtree_scope(h, net, e3), ids({"3", "4", "5", "0"}));

    std::vector<NodeId> all(net.num_nodes());
    for (NodeId u = 0; u < all.size(); ++u) all[u] = u;
    EXPECT_EQ(subtree_scope(h, net, e1), all);

    const auto scopes = subtree_scopes(h, net);
    for (ElementId e = 0; e < h.size(); ++e) EXPECT_EQ(scopes[e], subtree_scope(h, net, e));
}

TEST(SubtreeScope, RootCoversUnionOnRandomInstances) {
    auto rng = make_rng(13, {});
    for (int trial = 0; trial < 30; ++trial) {
        auto h = ohmnet::testing::random_tree(2 + uniform_below(rng, 10), rng);
        auto net = ohmnet::testing::random_network_for(h, 15, rng);
        std::set<NodeId> uni;
        for (const auto& l : net.layers) uni.insert(l.nodes.begin(), l.nodes.end());
        const auto root = subtree_scope(h, net, h.root());
        EXPECT_EQ(root, std::vector<NodeId>(uni.begin(), uni.end()));
    }
}

TEST(Collapse, SumsSharedEdges) {
    MultiLayerNetwork net;
    net.layers.push_back(make_layer(net.universe, "a", {{"0", "1"}}));
    net.layers.push_back(make_layer(net.universe, "b", {{"0", "1"}, {"1", "2", 3.0}}));
    const auto c = collapse_layers(net);
    const auto l0 = *c.local_index(*net.universe.find("0"));
    const auto l1 = *c.local_index(*net.universe.find("1"));
    const auto l2 = *c.local_index(*net.universe.find("2"));
    EXPECT_DOUBLE_EQ(*c.edge_weight(l0, l1), 2.0);
    EXPECT_DOUBLE_EQ(*c.edge_weight(l1, l2), 3.0);
    EXPECT_FALSE(c.has_edge(l0, l2));
}

TEST(Collapse, DisjointLayersStayDisconnected) {
    MultiLayerNetwork net;
    net.layers.push_back(make_layer(net.universe, "a", {{"0", "1"}}));
    net.layers.push_back(make_layer(net.universe, "b", {{"2", "3"}}));
    const auto c = collapse_layers(net);
    EXPECT_EQ(c.size(), 4u);
    EXPECT_EQ(components(c), 2u);
}

TEST(Collapse, ConservesTotalWeight) {
    auto rng = make_rng(14, {});
    for (int trial = 0; trial < 30; ++trial) {
        auto h = ohmnet::testing::random_tree(2 + uniform_below(rng, 8), rng);
        auto net = ohmnet::testing::random_network_for(h, 12, rng);
        double total = 0.0;
        for (const auto& l : net.layers) total += l.total_weight();
        const auto c = collapse_layers(net);
        EXPECT_NEAR(c.total_weight(), total, 1e-9 * std::max(1.0, total));
        EXPECT_EQ(c.size(), net.num_nodes());
    }
}

TEST(LayerBuilder, RejectsSelfLoopsAndBadWeights) {
    LayerBuilder b;
    EXPECT_THROW(b.add_edge(1, 1, 1.0), Error);
    EXPECT_THROW(b.add_edge(1, 2, 0.0), Error);
    EXPECT_THROW(b.add_edge(1, 2, -1.0), Error);
}
