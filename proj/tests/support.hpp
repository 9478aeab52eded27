#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "ohmnet/ohmnet.hpp"

namespace ohmnet::testing {

struct EdgeSpec {
    std::string u, v;
    double w = 1.0;
};

inline Layer make_layer(NodeUniverse& universe, std::string name, const std::vector<EdgeSpec>& edges,
                        const std::vector<std::string>& isolated = {}) {
    LayerBuilder b;
    for (const auto& e : edges) b.add_edge(universe.intern(e.u), universe.intern(e.v), e.w);
    for (const auto& n : isolated) b.add_node(universe.intern(n));
    return b.build(std::move(name));
}

/// Random rooted tree on m elements; element 0 is the root and every other
/// element picks a parent among earlier ones.
inline Hierarchy random_tree(std::size_t m, Rng& rng) {
    Hierarchy h;
    h.add("e0");
    for (std::size_t i = 1; i < m; ++i) {
        const auto e = h.add("e" + std::to_string(i));
        h.set_parent(e, uniform_below(rng, i));
    }
    return h;
}

/// Random network on `nodes` nodes with one layer per leaf of `h`; leaves are
/// bound in element order. Every layer gets a random nonempty node subset and
/// random edges among it; nodes no layer picked join the first layer.
inline MultiLayerNetwork random_network_for(Hierarchy& h, std::size_t nodes, Rng& rng, double edge_p = 0.3) {
    MultiLayerNetwork net;
    for (std::size_t i = 0; i < nodes; ++i) net.universe.intern("v" + std::to_string(i));
    std::vector<ElementId> leaves;
    std::vector<std::vector<NodeId>> members;
    std::vector<bool> used(nodes, false);
    for (ElementId e = 0; e < h.size(); ++e) {
        if (!h.elements[e].is_leaf()) continue;
        leaves.push_back(e);
        auto& m = members.emplace_back();
        for (NodeId u = 0; u < nodes; ++u)
            if (uniform01(rng) < 0.6) m.push_back(u);
        if (m.empty()) m.push_back(static_cast<NodeId>(uniform_below(rng, nodes)));
        for (auto u : m) used[u] = true;
    }
    for (NodeId u = 0; u < nodes; ++u)
        if (!used[u]) members.front().push_back(u);
    for (std::size_t l = 0; l < leaves.size(); ++l) {
        LayerBuilder b;
        const auto& m = members[l];
        for (auto u : m) b.add_node(u);
        for (std::size_t a = 0; a < m.size(); ++a)
            for (std::size_t c = a + 1; c < m.size(); ++c)
                if (uniform01(rng) < edge_p) b.add_edge(m[a], m[c], 0.5 + uniform01(rng));
        h.bind(leaves[l], l);
        net.layers.push_back(b.build(h.elements[leaves[l]].name));
    }
    return net;
}

/// Pearson chi-square statistic of observed counts against probabilities.
inline double chi_square(const std::vector<std::size_t>& observed, const std::vector<double>& probs) {
    std::size_t n = 0;
    for (auto o : observed) n += o;
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = probs[i] * static_cast<double>(n);
        stat += (static_cast<double>(observed[i]) - e) * (static_cast<double>(observed[i]) - e) / e;
    }
    return stat;
}

// Upper 0.001 critical values of the chi-square distribution.
inline constexpr double chi2_crit_001_df2 = 13.815510557964274;
inline constexpr double chi2_crit_001_df3 = 16.266236196238129;

} // namespace ohmnet::testing
