#pragma once

// Text formats:
//   edge list    `u v [w]` per line, `#` comments; a lone `u` declares an
//                isolated node
//   manifest     `layer_name edgelist_path` per line (paths relative to the
//                manifest's directory)
//   hierarchy    `child parent` per line
//   labels       `node layer function_id` per line
//   embeddings   header `N d`, then `name v1 .. vd` rows; one file per
//                hierarchy element plus an `elements.txt` index
//   walks        one walk per line, space-separated node names; one
//                `<layer>.walks` file per layer

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ohmnet/embedding.hpp"
#include "ohmnet/error.hpp"
#include "ohmnet/graph.hpp"
#include "ohmnet/walks.hpp"

namespace ohmnet {

namespace fs = std::filesystem;

namespace detail {

inline std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const auto b = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > b) out.push_back(line.substr(b, i - b));
    }
    return out;
}

inline bool skip_line(const std::vector<std::string_view>& tok) { return tok.empty() || tok[0].front() == '#'; }

template <typename T>
bool parse_number(std::string_view s, T& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

inline std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

inline std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    return out;
}

} // namespace detail

// --- edge lists ------------------------------------------------------------------

inline Layer parse_edgelist(std::istream& in, const std::string& source, NodeUniverse& universe, std::string name) {
    LayerBuilder b;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (detail::skip_line(tok)) continue;
        if (tok.size() > 3) throw ParseError(source, lineno, "expected `u v [w]`");
        const auto u = universe.intern(tok[0]);
        if (tok.size() == 1) {
            b.add_node(u);
            continue;
        }
        double w = 1.0;
        if (tok.size() == 3 && !detail::parse_number(tok[2], w))
            throw ParseError(source, lineno, "malformed weight '" + std::string(tok[2]) + "'");
        if (tok[0] == tok[1]) throw ParseError(source, lineno, "self-loop on '" + std::string(tok[0]) + "'");
        if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(source, lineno, "weight must be positive");
        b.add_edge(u, universe.intern(tok[1]), w);
    }
    return b.build(std::move(name));
}

inline Layer read_edgelist(const fs::path& path, NodeUniverse& universe, std::string name) {
    auto in = detail::open_in(path);
    return parse_edgelist(in, path.string(), universe, std::move(name));
}

inline void write_edgelist(std::ostream& out, const Layer& layer, const NodeUniverse& universe) {
    out.precision(17);
    std::vector<bool> has_edge(layer.size(), false);
    for (std::size_t a = 0; a < layer.size(); ++a) has_edge[a] = !layer.adjacency[a].empty();
    for (std::size_t a = 0; a < layer.size(); ++a)
        if (!has_edge[a]) out << universe.name(layer.nodes[a]) << '\n';
    layer.for_each_edge([&](NodeId u, NodeId v, double w) {
        out << universe.name(u) << ' ' << universe.name(v) << ' ' << detail::format_double(w) << '\n';
    });
}

// --- layer manifest ---------------------------------------------------------------

struct LayerManifest {
    struct Entry {
        std::string layer_name;
        fs::path edgelist_path;
    };
    std::vector<Entry> entries;
};

inline LayerManifest read_manifest(const fs::path& path) {
    auto in = detail::open_in(path);
    LayerManifest m;
    std::set<std::string, std::less<>> seen;
    std::string line;
    std::size_t lineno = 0;
    const auto base = path.parent_path();
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (detail::skip_line(tok)) continue;
        if (tok.size() != 2) throw ParseError(path.string(), lineno, "expected `layer_name edgelist_path`");
        if (!seen.emplace(tok[0]).second)
            throw ParseError(path.string(), lineno, "duplicate layer '" + std::string(tok[0]) + "'");
        fs::path p(tok[1]);
        if (p.is_relative()) p = base / p;
        m.entries.push_back({std::string(tok[0]), p});
    }
    if (m.entries.empty()) throw ParseError(path.string(), 0, "manifest lists no layers");
    return m;
}

inline MultiLayerNetwork read_network(const fs::path& manifest_path) {
    MultiLayerNetwork net;
    for (const auto& e : read_manifest(manifest_path).entries)
        net.layers.push_back(read_edgelist(e.edgelist_path, net.universe, e.layer_name));
    return net;
}

/// Writes `<dir>/<layer>.edgelist` per layer plus `<dir>/layers.txt`.
inline fs::path write_network(const MultiLayerNetwork& net, const fs::path& dir) {
    fs::create_directories(dir);
    const auto manifest = dir / "layers.txt";
    auto m = detail::open_out(manifest);
    for (const auto& layer : net.layers) {
        const auto file = layer.name + ".edgelist";
        auto out = detail::open_out(dir / file);
        write_edgelist(out, layer, net.universe);
        m << layer.name << ' ' << file << '\n';
    }
    return manifest;
}

// --- hierarchy ----------------------------------------------------------------------

/// Parses `child parent` lines. The root is the one name never seen as a
/// child; elements named like a layer become that layer's leaf.
inline Hierarchy parse_hierarchy(std::istream& in, const std::string& source, const MultiLayerNetwork& net) {
    Hierarchy h;
    std::set<std::string, std::less<>> children;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (detail::skip_line(tok)) continue;
        if (tok.size() != 2) throw ParseError(source, lineno, "expected `child parent`");
        if (tok[0] == tok[1]) throw ParseError(source, lineno, "element is its own parent (cycle)");
        if (!children.emplace(tok[0]).second)
            throw ParseError(source, lineno, "duplicate child line for '" + std::string(tok[0]) + "'");
        const auto c = h.find_or_add(tok[0]);
        const auto p = h.find_or_add(tok[1]);
        h.set_parent(c, p);
    }
    if (h.size() == 0) throw ParseError(source, 0, "empty hierarchy");

    std::size_t roots = 0;
    for (const auto& e : h.elements) roots += e.parent ? 0 : 1;
    if (roots == 0) throw ParseError(source, 0, "cycle in hierarchy (no root)");
    if (roots > 1) throw ParseError(source, 0, "multiple roots");
    for (ElementId i = 0; i < h.size(); ++i) {
        try {
            (void)h.depth(i);
        } catch (const Error&) {
            throw ParseError(source, 0, "cycle in hierarchy through '" + h.elements[i].name + "'");
        }
    }

    for (LayerId l = 0; l < net.layers.size(); ++l) {
        const auto e = h.find(net.layers[l].name);
        if (!e) throw ParseError(source, 0, "layer '" + net.layers[l].name + "' does not appear in the hierarchy");
        if (!h.elements[*e].is_leaf())
            throw ParseError(source, 0, "layer '" + net.layers[l].name + "' bound to a non-leaf element");
        h.bind(*e, l);
    }
    for (const auto& e : h.elements)
        if (e.is_leaf() && !e.layer) throw ParseError(source, 0, "leaf '" + e.name + "' matches no layer");
    return h;
}

inline Hierarchy read_hierarchy(const fs::path& path, const MultiLayerNetwork& net) {
    auto in = detail::open_in(path);
    return parse_hierarchy(in, path.string(), net);
}

inline void write_hierarchy(std::ostream& out, const Hierarchy& h) {
    for (const auto& e : h.elements)
        if (e.parent) out << e.name << ' ' << h.elements[*e.parent].name << '\n';
}

// --- labels --------------------------------------------------------------------------

/// (node, layer, function) annotations, deduplicated.
struct LabelSet {
    struct Annotation {
        NodeId node;
        LayerId layer;
        std::size_t function;
        auto operator<=>(const Annotation&) const = default;
    };
    std::vector<std::string> functions;
    std::vector<Annotation> annotations;

    std::size_t function_id(std::string_view name) {
        for (std::size_t i = 0; i < functions.size(); ++i)
            if (functions[i] == name) return i;
        functions.emplace_back(name);
        return functions.size() - 1;
    }

    void add(NodeId node, LayerId layer, std::string_view function) {
        Annotation a{node, layer, function_id(function)};
        auto it = std::lower_bound(annotations.begin(), annotations.end(), a);
        if (it == annotations.end() || *it != a) annotations.insert(it, a);
    }

    bool empty() const noexcept { return annotations.empty(); }

    /// Nodes annotated with `function` in `layer`, sorted.
    std::vector<NodeId> positives(LayerId layer, std::size_t function) const {
        std::vector<NodeId> out;
        for (const auto& a : annotations)
            if (a.layer == layer && a.function == function) out.push_back(a.node);
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline LabelSet parse_labels(std::istream& in, const std::string& source, const MultiLayerNetwork& net) {
    LabelSet labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (detail::skip_line(tok)) continue;
        if (tok.size() != 3) throw ParseError(source, lineno, "expected `node layer function_id`");
        const auto layer = net.find_layer(tok[1]);
        if (!layer) throw ParseError(source, lineno, "unknown layer '" + std::string(tok[1]) + "'");
        const auto node = net.universe.find(tok[0]);
        if (!node || !net.layers[*layer].contains(*node))
            throw ParseError(source, lineno,
                             "node '" + std::string(tok[0]) + "' not in layer '" + std::string(tok[1]) + "'");
        labels.add(*node, *layer, tok[2]);
    }
    return labels;
}

inline LabelSet read_labels(const fs::path& path, const MultiLayerNetwork& net) {
    auto in = detail::open_in(path);
    return parse_labels(in, path.string(), net);
}

inline void write_labels(std::ostream& out, const LabelSet& labels, const MultiLayerNetwork& net) {
    for (const auto& a : labels.annotations)
        out << net.universe.name(a.node) << ' ' << net.layers[a.layer].name << ' ' << labels.functions[a.function]
            << '\n';
}

// --- embeddings ------------------------------------------------------------------------

/// Shortest round-trip decimal form, so reading back is exact.
inline void write_table(std::ostream& out, const EmbeddingTable& t, const NodeUniverse& universe) {
    out << t.rows() << ' ' << t.dim << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        out << universe.name(t.nodes[r]);
        for (double x : t.row(r)) out << ' ' << detail::format_double(x);
        out << '\n';
    }
}

/// Reads a table; unknown node names are added to `universe`.
inline EmbeddingTable parse_table(std::istream& in, const std::string& source, NodeUniverse& universe) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t count = 0, dim = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        if (tok.size() != 2 || !detail::parse_number(tok[0], count) || !detail::parse_number(tok[1], dim))
            throw ParseError(source, lineno, "expected header `N d`");
        break;
    }
    if (lineno == 0) throw ParseError(source, 0, "missing header");

    std::vector<std::pair<NodeId, std::vector<double>>> rows;
    rows.reserve(count);
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        if (tok.size() != dim + 1)
            throw ParseError(source, lineno, "expected " + std::to_string(dim) + " values after the node name");
        std::vector<double> v(dim);
        for (std::size_t k = 0; k < dim; ++k)
            if (!detail::parse_number(tok[k + 1], v[k]))
                throw ParseError(source, lineno, "malformed value '" + std::string(tok[k + 1]) + "'");
        rows.emplace_back(universe.intern(tok[0]), std::move(v));
    }
    if (rows.size() != count)
        throw ParseError(source, 0,
                         "header declares " + std::to_string(count) + " rows, found " + std::to_string(rows.size()));
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].first == rows[r - 1].first)
            throw ParseError(source, 0, "duplicate node '" + universe.name(rows[r].first) + "'");

    EmbeddingTable t;
    t.dim = dim;
    t.nodes.reserve(rows.size());
    t.data.reserve(rows.size() * dim);
    for (auto& [id, v] : rows) {
        t.nodes.push_back(id);
        t.data.insert(t.data.end(), v.begin(), v.end());
    }
    return t;
}

inline EmbeddingTable read_table(const fs::path& path, NodeUniverse& universe) {
    auto in = detail::open_in(path);
    return parse_table(in, path.string(), universe);
}

inline void write_table(const fs::path& path, const EmbeddingTable& t, const NodeUniverse& universe) {
    auto out = detail::open_out(path);
    write_table(out, t, universe);
    if (!out) throw Error("failed writing " + path.string());
}

/// One `<element>.emb` per element, context tables under `context/`, and an
/// `elements.txt` index giving element order.
inline void write_embeddings(const EmbeddingSet& set, const NodeUniverse& universe, const fs::path& dir) {
    fs::create_directories(dir);
    auto index = detail::open_out(dir / "elements.txt");
    for (std::size_t i = 0; i < set.input.size(); ++i) {
        const auto& name = set.names.at(i);
        if (name.empty() || name.find('/') != std::string::npos) throw Error("element name unusable as file name");
        write_table(dir / (name + ".emb"), set.input[i], universe);
        const bool ctx = i < set.context.size() && set.context[i].rows() > 0;
        if (ctx) {
            fs::create_directories(dir / "context");
            write_table(dir / "context" / (name + ".emb"), set.context[i], universe);
        }
        index << name << ' ' << (ctx ? 1 : 0) << '\n';
    }
    if (!index) throw Error("failed writing embedding index");
}

inline EmbeddingSet read_embeddings(const fs::path& dir, NodeUniverse& universe) {
    const auto index_path = dir / "elements.txt";
    auto index = detail::open_in(index_path);
    EmbeddingSet set;
    bool have_dim = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(index, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        int ctx = 0;
        if (tok.size() != 2 || !detail::parse_number(tok[1], ctx))
            throw ParseError(index_path.string(), lineno, "expected `name has_context`");
        const std::string name(tok[0]);
        auto t = read_table(dir / (name + ".emb"), universe);
        if (!have_dim) {
            set.dim = t.dim;
            have_dim = true;
        } else if (t.dim != set.dim) {
            throw Error("dimension mismatch: '" + name + "' has d=" + std::to_string(t.dim) + ", expected " +
                        std::to_string(set.dim));
        }
        EmbeddingTable c(std::vector<NodeId>{}, set.dim);
        if (ctx) {
            c = read_table(dir / "context" / (name + ".emb"), universe);
            if (c.dim != set.dim) throw Error("dimension mismatch in context table of '" + name + "'");
        }
        set.names.push_back(name);
        set.input.push_back(std::move(t));
        set.context.push_back(std::move(c));
    }
    return set;
}

// --- walk corpus -------------------------------------------------------------------------

inline void write_walks(std::ostream& out, const std::vector<Walk>& walks, const NodeUniverse& universe) {
    for (const auto& w : walks) {
        for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << universe.name(w[i]);
        out << '\n';
    }
}

inline std::vector<Walk> parse_walks(std::istream& in, const std::string& source, const NodeUniverse& universe) {
    std::vector<Walk> walks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        auto& w = walks.emplace_back();
        w.reserve(tok.size());
        for (auto t : tok) {
            auto id = universe.find(t);
            if (!id) throw ParseError(source, lineno, "unknown node '" + std::string(t) + "'");
            w.push_back(*id);
        }
    }
    return walks;
}

inline void write_corpus(const WalkCorpus& corpus, const MultiLayerNetwork& net, const fs::path& dir) {
    fs::create_directories(dir);
    for (LayerId l = 0; l < net.layers.size(); ++l) {
        auto out = detail::open_out(dir / (net.layers[l].name + ".walks"));
        write_walks(out, corpus.layers.at(l), net.universe);
        if (!out) throw Error("failed writing walks for layer '" + net.layers[l].name + "'");
    }
}

inline WalkCorpus read_corpus(const fs::path& dir, const MultiLayerNetwork& net) {
    WalkCorpus corpus;
    for (const auto& layer : net.layers) {
        const auto path = dir / (layer.name + ".walks");
        auto in = detail::open_in(path);
        corpus.layers.push_back(parse_walks(in, path.string(), net.universe));
    }
    return corpus;
}

} // namespace ohmnet
