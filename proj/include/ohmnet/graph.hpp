#pragma once

// Multi-layer network over a shared node universe, and the rooted tree
// hierarchy whose leaves are bound one-to-one to the layers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ohmnet/error.hpp"

namespace ohmnet {

using NodeId = std::uint32_t;
using LayerId = std::size_t;
using ElementId = std::size_t;

/// Bijection between external node names and dense ids 0..N-1.
class NodeUniverse {
public:
    NodeId intern(std::string_view name) {
        auto it = index_.find(std::string(name));
        if (it != index_.end()) return it->second;
        const auto id = static_cast<NodeId>(names_.size());
        names_.emplace_back(name);
        index_.emplace(names_.back(), id);
        return id;
    }

    std::optional<NodeId> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(NodeId id) const { return names_.at(id); }
    std::size_t size() const noexcept { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
};

struct Neighbor {
    std::uint32_t local; // index into Layer::nodes
    double weight;
};

/// One undirected weighted layer. `nodes` is sorted ascending; a node's
/// position in it is its local index, which also indexes `adjacency`.
/// Neighbor lists are sorted by local index.
struct Layer {
    std::string name;
    std::vector<NodeId> nodes;
    std::vector<std::vector<Neighbor>> adjacency;

    std::size_t size() const noexcept { return nodes.size(); }

    std::optional<std::uint32_t> local_index(NodeId id) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
        if (it == nodes.end() || *it != id) return std::nullopt;
        return static_cast<std::uint32_t>(it - nodes.begin());
    }

    bool contains(NodeId id) const { return local_index(id).has_value(); }

    /// Weight of the edge between two local indices, or nullopt.
    std::optional<double> edge_weight(std::uint32_t a, std::uint32_t b) const {
        const auto& adj = adjacency[a];
        auto it = std::lower_bound(adj.begin(), adj.end(), b,
                                   [](const Neighbor& n, std::uint32_t x) { return n.local < x; });
        if (it == adj.end() || it->local != b) return std::nullopt;
        return it->weight;
    }

    bool has_edge(std::uint32_t a, std::uint32_t b) const { return edge_weight(a, b).has_value(); }

    std::size_t edge_count() const {
        std::size_t twice = 0;
        for (const auto& adj : adjacency) twice += adj.size();
        return twice / 2;
    }

    /// Sum of weights over undirected edges (each counted once).
    double total_weight() const {
        double s = 0.0;
        for (std::size_t a = 0; a < adjacency.size(); ++a)
            for (const auto& n : adjacency[a])
                if (n.local > a) s += n.weight;
        return s;
    }

    /// Calls fn(u, v, w) once per undirected edge with global ids, u < v.
    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        for (std::size_t a = 0; a < adjacency.size(); ++a)
            for (const auto& n : adjacency[a])
                if (n.local > a) fn(nodes[a], nodes[n.local], n.weight);
    }
};

/// Accumulates edges and builds a symmetric Layer. Duplicate edges have
/// their weights summed.
class LayerBuilder {
public:
    void add_node(NodeId u) { nodes_.insert(u); }

    void add_edge(NodeId u, NodeId v, double w) {
        if (u == v) throw Error("self-loop on node " + std::to_string(u));
        if (!(w > 0.0) || !std::isfinite(w)) throw Error("edge weight must be positive and finite");
        nodes_.insert(u);
        nodes_.insert(v);
        edges_[std::minmax(u, v)] += w;
    }

    Layer build(std::string name) const {
        Layer layer;
        layer.name = std::move(name);
        layer.nodes.assign(nodes_.begin(), nodes_.end());
        layer.adjacency.resize(layer.nodes.size());
        for (const auto& [key, w] : edges_) {
            const auto a = *layer.local_index(key.first);
            const auto b = *layer.local_index(key.second);
            layer.adjacency[a].push_back({b, w});
            layer.adjacency[b].push_back({a, w});
        }
        for (auto& adj : layer.adjacency)
            std::sort(adj.begin(), adj.end(), [](const Neighbor& x, const Neighbor& y) { return x.local < y.local; });
        return layer;
    }

private:
    std::set<NodeId> nodes_;
    std::map<std::pair<NodeId, NodeId>, double> edges_;
};

struct MultiLayerNetwork {
    NodeUniverse universe;
    std::vector<Layer> layers;

    std::size_t num_nodes() const noexcept { return universe.size(); }

    std::optional<LayerId> find_layer(std::string_view name) const {
        for (LayerId i = 0; i < layers.size(); ++i)
            if (layers[i].name == name) return i;
        return std::nullopt;
    }
};

struct HierarchyElement {
    std::string name;
    std::optional<ElementId> parent;
    std::vector<ElementId> children; // ChildrenOf(i)
    std::optional<LayerId> layer;    // set exactly on leaves

    bool is_leaf() const noexcept { return children.empty(); }
};

/// Rooted tree over elements. Mutators keep `children` consistent with
/// parent pointers; `validate` checks the remaining tree invariants.
class Hierarchy {
public:
    std::vector<HierarchyElement> elements;

    std::size_t size() const noexcept { return elements.size(); }

    ElementId add(std::string name) {
        elements.push_back({std::move(name), std::nullopt, {}, std::nullopt});
        return elements.size() - 1;
    }

    ElementId find_or_add(std::string_view name) {
        if (auto e = find(name)) return *e;
        return add(std::string(name));
    }

    void set_parent(ElementId child, ElementId parent) {
        check(child);
        check(parent);
        auto& old = elements[child].parent;
        if (old) std::erase(elements[*old].children, child);
        old = parent;
        elements[parent].children.push_back(child);
    }

    void bind(ElementId element, LayerId layer) { elements.at(element).layer = layer; }

    std::optional<ElementId> find(std::string_view name) const {
        for (ElementId i = 0; i < elements.size(); ++i)
            if (elements[i].name == name) return i;
        return std::nullopt;
    }

    const HierarchyElement& operator[](ElementId i) const { return elements.at(i); }

    /// The unique parentless element. Throws unless there is exactly one.
    ElementId root() const {
        std::optional<ElementId> r;
        for (ElementId i = 0; i < elements.size(); ++i) {
            if (elements[i].parent) continue;
            if (r) throw Error("hierarchy has multiple roots");
            r = i;
        }
        if (!r) throw Error("hierarchy has no root");
        return *r;
    }

    std::optional<ElementId> element_of_layer(LayerId layer) const {
        for (ElementId i = 0; i < elements.size(); ++i)
            if (elements[i].layer == layer) return i;
        return std::nullopt;
    }

    /// Children before parents, starting from the root.
    std::vector<ElementId> post_order() const {
        std::vector<ElementId> order;
        order.reserve(elements.size());
        std::vector<std::pair<ElementId, std::size_t>> stack{{root(), 0}};
        while (!stack.empty()) {
            auto& [e, next] = stack.back();
            if (next < elements[e].children.size()) {
                const auto c = elements[e].children[next++];
                stack.emplace_back(c, 0);
            } else {
                order.push_back(e);
                stack.pop_back();
            }
        }
        return order;
    }

    std::size_t depth(ElementId e) const {
        check(e);
        std::size_t d = 0;
        while (elements[e].parent) {
            e = *elements[e].parent;
            if (++d > elements.size()) throw Error("hierarchy contains a cycle");
        }
        return d;
    }

    /// Every layer attached as a direct child of a single root.
    static Hierarchy star(const MultiLayerNetwork& net, std::string root_name = "root") {
        Hierarchy h;
        const auto root = h.add(std::move(root_name));
        for (LayerId l = 0; l < net.layers.size(); ++l) {
            const auto e = h.add(net.layers[l].name);
            h.set_parent(e, root);
            h.bind(e, l);
        }
        return h;
    }

private:
    void check(ElementId e) const {
        if (e >= elements.size()) throw Error("unknown hierarchy element " + std::to_string(e));
    }
};

// ---------------------------------------------------------------------------

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }

    bool contains(std::string_view needle) const {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const std::string& v) { return v.find(needle) != std::string::npos; });
    }
};

namespace detail {

inline void validate_layer(const Layer& layer, std::size_t universe, std::vector<std::string>& out) {
    const std::string tag = "layer '" + layer.name + "': ";
    if (!std::is_sorted(layer.nodes.begin(), layer.nodes.end()) ||
        std::adjacent_find(layer.nodes.begin(), layer.nodes.end()) != layer.nodes.end())
        out.push_back(tag + "node list not sorted/unique");
    if (!layer.nodes.empty() && layer.nodes.back() >= universe) out.push_back(tag + "node outside universe");
    if (layer.adjacency.size() != layer.nodes.size()) {
        out.push_back(tag + "adjacency size mismatch");
        return;
    }
    for (std::uint32_t a = 0; a < layer.adjacency.size(); ++a) {
        for (const auto& n : layer.adjacency[a]) {
            if (n.local >= layer.nodes.size()) {
                out.push_back(tag + "edge endpoint not in layer");
                continue;
            }
            if (n.local == a) out.push_back(tag + "self-loop");
            if (!(n.weight > 0.0) || !std::isfinite(n.weight)) out.push_back(tag + "non-positive weight");
            const auto back = layer.edge_weight(n.local, a);
            if (!back || *back != n.weight) out.push_back(tag + "asymmetric edge");
        }
    }
}

} // namespace detail

/// Collects every structural violation; an empty report means valid.
inline ValidationReport validate(const MultiLayerNetwork& net, const Hierarchy& h) {
    ValidationReport rep;
    auto& out = rep.violations;

    std::vector<bool> covered(net.num_nodes(), false);
    for (const auto& layer : net.layers) {
        detail::validate_layer(layer, net.num_nodes(), out);
        for (auto u : layer.nodes)
            if (u < covered.size()) covered[u] = true;
    }
    for (NodeId u = 0; u < covered.size(); ++u)
        if (!covered[u]) out.push_back("orphan node '" + net.universe.name(u) + "'");

    const auto m = h.size();
    if (m == 0) {
        out.push_back("empty hierarchy");
        return rep;
    }
    std::size_t roots = 0;
    for (ElementId i = 0; i < m; ++i) {
        const auto& e = h.elements[i];
        if (!e.parent) {
            ++roots;
        } else if (*e.parent >= m) {
            out.push_back("element '" + e.name + "' has dangling parent");
        } else {
            const auto& sib = h.elements[*e.parent].children;
            if (std::count(sib.begin(), sib.end(), i) != 1)
                out.push_back("children of '" + h.elements[*e.parent].name + "' inconsistent with parent pointers");
        }
        for (auto c : e.children)
            if (c >= m || h.elements[c].parent != i)
                out.push_back("children of '" + e.name + "' inconsistent with parent pointers");
    }
    if (roots == 0) out.push_back("no root");
    if (roots > 1) out.push_back("multiple roots");

    bool cyclic = false;
    for (ElementId i = 0; i < m && !cyclic; ++i) {
        auto e = i;
        std::size_t steps = 0;
        while (h.elements[e].parent && *h.elements[e].parent < m) {
            e = *h.elements[e].parent;
            if (++steps > m) {
                cyclic = true;
                break;
            }
        }
    }
    if (cyclic) out.push_back("cycle in hierarchy");
    if (!cyclic && roots > 1) out.push_back("disconnected hierarchy");

    std::vector<std::size_t> bound(net.layers.size(), 0);
    for (ElementId i = 0; i < m; ++i) {
        const auto& e = h.elements[i];
        if (e.layer) {
            if (*e.layer >= net.layers.size()) {
                out.push_back("dangling binding on '" + e.name + "'");
                continue;
            }
            ++bound[*e.layer];
            if (!e.is_leaf()) out.push_back("non-leaf binding on '" + e.name + "'");
        } else if (e.is_leaf()) {
            out.push_back("unbound leaf '" + e.name + "'");
        }
    }
    for (LayerId l = 0; l < bound.size(); ++l) {
        if (bound[l] == 0) out.push_back("layer '" + net.layers[l].name + "' not bound to the hierarchy");
        if (bound[l] > 1) out.push_back("layer '" + net.layers[l].name + "' bound more than once");
    }
    return rep;
}

/// Number of edges on the unique path between a and b.
inline std::size_t tree_distance(const Hierarchy& h, ElementId a, ElementId b) {
    if (a >= h.size() || b >= h.size()) throw Error("tree_distance: unknown element");
    std::unordered_map<ElementId, std::size_t> up; // ancestor of a -> distance from a
    std::size_t d = 0;
    for (auto e = a;; ++d) {
        up.emplace(e, d);
        if (!h.elements[e].parent) break;
        e = *h.elements[e].parent;
        if (d > h.size()) throw Error("tree_distance: hierarchy contains a cycle");
    }
    d = 0;
    for (auto e = b;; ++d) {
        if (auto it = up.find(e); it != up.end()) return d + it->second;
        if (!h.elements[e].parent) break;
        e = *h.elements[e].parent;
        if (d > h.size()) throw Error("tree_distance: hierarchy contains a cycle");
    }
    throw Error("tree_distance: elements are in different trees");
}

inline std::size_t tree_distance(const Hierarchy& h, std::string_view a, std::string_view b) {
    auto ea = h.find(a);
    auto eb = h.find(b);
    if (!ea || !eb) throw Error("tree_distance: unknown element");
    return tree_distance(h, *ea, *eb);
}

/// L_i for every element: union of the node sets of the layers bound to
/// leaves in the subtree rooted at i. Each set is sorted ascending.
inline std::vector<std::vector<NodeId>> subtree_scopes(const Hierarchy& h, const MultiLayerNetwork& net) {
    std::vector<std::vector<NodeId>> scope(h.size());
    for (auto e : h.post_order()) {
        const auto& el = h.elements[e];
        if (el.is_leaf()) {
            if (el.layer) scope[e] = net.layers.at(*el.layer).nodes;
            continue;
        }
        std::vector<NodeId> acc;
        for (auto c : el.children) {
            std::vector<NodeId> merged;
            merged.reserve(acc.size() + scope[c].size());
            std::set_union(acc.begin(), acc.end(), scope[c].begin(), scope[c].end(), std::back_inserter(merged));
            acc = std::move(merged);
        }
        scope[e] = std::move(acc);
    }
    return scope;
}

inline std::vector<NodeId> subtree_scope(const Hierarchy& h, const MultiLayerNetwork& net, ElementId i) {
    if (i >= h.size()) throw Error("subtree_scope: unknown element");
    std::vector<NodeId> acc;
    std::vector<ElementId> stack{i};
    while (!stack.empty()) {
        const auto e = stack.back();
        stack.pop_back();
        const auto& el = h.elements[e];
        if (el.layer) {
            const auto& nodes = net.layers.at(*el.layer).nodes;
            acc.insert(acc.end(), nodes.begin(), nodes.end());
        }
        stack.insert(stack.end(), el.children.begin(), el.children.end());
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    return acc;
}

/// Merge all layers into one graph on V; an edge's weight is the sum of
/// its weights across the layers that contain it.
inline Layer collapse_layers(const MultiLayerNetwork& net, std::string name = "collapsed") {
    LayerBuilder b;
    for (const auto& layer : net.layers) {
        for (auto u : layer.nodes) b.add_node(u);
        layer.for_each_edge([&](NodeId u, NodeId v, double w) { b.add_edge(u, v, w); });
    }
    return b.build(std::move(name));
}

} // namespace ohmnet
