#pragma once

// Downstream tasks on learned embeddings: per-layer multi-label function
// prediction with protein-level cross-validation, hierarchy-weighted
// transfer to an unannotated layer, and a 2-D linear projection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ohmnet/classifier.hpp"
#include "ohmnet/embedding.hpp"
#include "ohmnet/error.hpp"
#include "ohmnet/graph.hpp"
#include "ohmnet/io.hpp"
#include "ohmnet/metrics.hpp"
#include "ohmnet/parallel.hpp"
#include "ohmnet/rng.hpp"

namespace ohmnet {

struct EvalConfig {
    std::size_t folds = 10;
    std::size_t min_annotated = 15;
    ClassifierConfig classifier;
    std::uint64_t seed = 1;
    ExecutionMode mode = ExecutionMode::sequential;
    std::size_t threads = 0;
    std::optional<LayerId> only_layer; // restrict cross-validation to one layer
};

struct EvalEntry {
    std::string layer;
    std::string function;
    double auroc = 0.0;
    double auprc = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

struct EvalReport {
    std::vector<EvalEntry> entries;
    std::size_t skipped_folds = 0;     // (fold, function) pairs with a single-class training split
    std::size_t skipped_functions = 0; // below min_annotated or no usable source
    std::string note;

    // Aggregated over (layer, function) pairs.
    Summary auroc_pairs, auprc_pairs;
    // Per-function mean over layers first, then aggregated over functions.
    Summary auroc_functions, auprc_functions;

    double mean_auroc() const {
        if (entries.empty()) return 0.0;
        double s = 0.0;
        for (const auto& e : entries) s += e.auroc;
        return s / static_cast<double>(entries.size());
    }

    void finalize() {
        std::vector<double> ar, ap;
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_function;
        for (const auto& e : entries) {
            ar.push_back(e.auroc);
            ap.push_back(e.auprc);
            by_function[e.function].first.push_back(e.auroc);
            by_function[e.function].second.push_back(e.auprc);
        }
        auroc_pairs = summarize(ar);
        auprc_pairs = summarize(ap);
        std::vector<double> fr, fp;
        for (const auto& [f, v] : by_function) {
            auto mean = [](const std::vector<double>& xs) {
                double s = 0.0;
                for (double x : xs) s += x;
                return s / static_cast<double>(xs.size());
            };
            fr.push_back(mean(v.first));
            fp.push_back(mean(v.second));
        }
        auroc_functions = summarize(fr);
        auprc_functions = summarize(fp);
    }
};

/// Tab-separated rows `layer function auroc auprc`, then `#aggregate` lines.
inline void write_report(std::ostream& out, const EvalReport& rep) {
    if (!rep.note.empty()) out << "# " << rep.note << '\n';
    out << "layer\tfunction\tauroc\tauprc\n";
    for (const auto& e : rep.entries)
        out << e.layer << '\t' << e.function << '\t' << e.auroc << '\t' << e.auprc << '\n';
    auto line = [&](const char* over, const Summary& r, const Summary& p) {
        out << "#aggregate\t" << over << "\tn=" << r.count << "\tauroc_median=" << r.median
            << "\tauroc_half_iqr=" << r.half_iqr << "\tauprc_median=" << p.median << "\tauprc_half_iqr=" << p.half_iqr
            << '\n';
    };
    line("pairs", rep.auroc_pairs, rep.auprc_pairs);
    line("functions", rep.auroc_functions, rep.auprc_functions);
    out << "#skipped\tfolds=" << rep.skipped_folds << "\tfunctions=" << rep.skipped_functions << '\n';
}

namespace detail {

/// The input table holding each layer's embeddings, looked up by layer name.
inline std::vector<const EmbeddingTable*> layer_tables(const EmbeddingSet& set, const MultiLayerNetwork& net) {
    std::vector<const EmbeddingTable*> out;
    for (const auto& layer : net.layers) {
        auto i = set.find(layer.name);
        if (!i) throw Error("no embeddings for layer '" + layer.name + "'");
        const auto* t = &set.input[*i];
        for (auto u : layer.nodes)
            if (!t->row_of(u)) throw Error("embeddings of layer '" + layer.name + "' miss a node");
        out.push_back(t);
    }
    return out;
}

inline std::vector<std::uint8_t> membership(const Layer& layer, const std::vector<NodeId>& positives) {
    std::vector<std::uint8_t> y(layer.size(), 0);
    for (auto u : positives)
        if (auto li = layer.local_index(u)) y[*li] = 1;
    return y;
}

} // namespace detail

/// Per (layer, function) one-vs-all cross-validation with folds over
/// proteins: a held-out protein is held out in every layer at once.
/// Out-of-fold decision values are pooled before computing AUROC/AUPRC.
inline EvalReport cross_validate(const EmbeddingSet& set, const MultiLayerNetwork& net, const LabelSet& labels,
                                 const EvalConfig& config) {
    if (labels.empty()) throw Error("cross_validate: empty label set");
    if (config.folds < 2) throw Error("cross_validate: need at least 2 folds");
    const auto tables = detail::layer_tables(set, net);

    std::vector<std::size_t> fold(net.num_nodes());
    {
        std::vector<NodeId> perm(net.num_nodes());
        for (NodeId u = 0; u < perm.size(); ++u) perm[u] = u;
        auto rng = make_rng(config.seed, {stream::folds});
        shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < perm.size(); ++i) fold[perm[i]] = i % config.folds;
    }

    struct Task {
        LayerId layer;
        std::size_t function;
    };
    std::vector<Task> tasks;
    EvalReport rep;
    for (LayerId l = 0; l < net.layers.size(); ++l) {
        if (config.only_layer && *config.only_layer != l) continue;
        for (std::size_t f = 0; f < labels.functions.size(); ++f) {
            const auto n = labels.positives(l, f).size();
            if (n == 0) continue;
            if (n < config.min_annotated || n >= net.layers[l].size()) {
                ++rep.skipped_functions;
                continue;
            }
            tasks.push_back({l, f});
        }
    }

    std::vector<std::optional<EvalEntry>> results(tasks.size());
    std::vector<std::size_t> skipped(tasks.size(), 0);
    parallel_for(tasks.size(), resolve_threads(config.mode, config.threads),
                 [&](std::size_t begin, std::size_t end, std::size_t) {
                     for (auto ti = begin; ti < end; ++ti) {
                         const auto [l, f] = tasks[ti];
                         const auto& layer = net.layers[l];
                         const auto& table = *tables[l];
                         const auto y = detail::membership(layer, labels.positives(l, f));
                         std::vector<double> scores(layer.size(), 0.0);
                         std::vector<bool> scored(layer.size(), false);
                         for (std::size_t k = 0; k < config.folds; ++k) {
                             FeatureRows xtr;
                             std::vector<std::uint8_t> ytr;
                             std::vector<std::size_t> test;
                             for (std::size_t a = 0; a < layer.size(); ++a) {
                                 if (fold[layer.nodes[a]] == k) {
                                     test.push_back(a);
                                 } else {
                                     xtr.push_back(table.row(*table.row_of(layer.nodes[a])));
                                     ytr.push_back(y[a]);
                                 }
                             }
                             if (test.empty()) continue;
                             const auto npos = std::count(ytr.begin(), ytr.end(), std::uint8_t{1});
                             if (npos == 0 || npos == static_cast<std::ptrdiff_t>(ytr.size())) {
                                 ++skipped[ti];
                                 continue;
                             }
                             auto cc = config.classifier;
                             cc.seed = derive_seed(config.seed, {stream::classifier, l, f, k});
                             const auto clf = train_classifier(xtr, ytr, cc);
                             for (auto a : test) {
                                 scores[a] = clf.decision(table.row(*table.row_of(layer.nodes[a])));
                                 scored[a] = true;
                             }
                         }
                         std::vector<double> s;
                         std::vector<std::uint8_t> yy;
                         for (std::size_t a = 0; a < layer.size(); ++a)
                             if (scored[a]) {
                                 s.push_back(scores[a]);
                                 yy.push_back(y[a]);
                             }
                         const auto pos = static_cast<std::size_t>(std::count(yy.begin(), yy.end(), std::uint8_t{1}));
                         if (pos == 0 || pos == yy.size()) continue;
                         results[ti] = EvalEntry{layer.name, labels.functions[f], auroc(s, yy), auprc(s, yy), pos,
                                                 yy.size() - pos};
                     }
                 });

    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        rep.skipped_folds += skipped[ti];
        if (results[ti])
            rep.entries.push_back(std::move(*results[ti]));
        else
            ++rep.skipped_functions;
    }
    rep.finalize();
    return rep;
}

enum class TransferWeighting { exp_distance, inverse_distance, uniform };

inline const char* to_string(TransferWeighting w) {
    switch (w) {
    case TransferWeighting::exp_distance: return "exp-distance";
    case TransferWeighting::inverse_distance: return "inverse-distance";
    case TransferWeighting::uniform: return "uniform";
    }
    return "?";
}

/// Source weights from tree distances to the target, normalized to sum to 1:
/// exp(-dist), 1/(1+dist), or constant.
inline std::vector<double> transfer_weights(const std::vector<std::size_t>& distances, TransferWeighting weighting) {
    if (distances.empty()) return {};
    std::vector<double> w;
    w.reserve(distances.size());
    const auto dmin = *std::min_element(distances.begin(), distances.end());
    for (auto d : distances) {
        switch (weighting) {
        case TransferWeighting::exp_distance:
            // Floored so far sources keep a (tiny) positive weight.
            w.push_back(std::max(std::exp(-static_cast<double>(d - dmin)), std::numeric_limits<double>::min()));
            break;
        case TransferWeighting::inverse_distance: w.push_back(1.0 / (1.0 + static_cast<double>(d))); break;
        case TransferWeighting::uniform: w.push_back(1.0); break;
        }
    }
    double s = 0.0;
    for (double x : w) s += x;
    for (auto& x : w) x /= s;
    return w;
}

/// Predict the target layer's functions without its annotations: per
/// function, one classifier per annotated source layer, each applied to the
/// target layer's embeddings, combined by hierarchy-distance weights.
inline EvalReport transfer_predict(const EmbeddingSet& set, const MultiLayerNetwork& net, const Hierarchy& h,
                                   const LabelSet& labels, LayerId target, const EvalConfig& config,
                                   TransferWeighting weighting = TransferWeighting::exp_distance) {
    if (target >= net.layers.size()) throw Error("transfer: unknown target layer");
    const auto tables = detail::layer_tables(set, net);
    const auto target_el = h.element_of_layer(target);
    if (!target_el) throw Error("transfer: target layer not in hierarchy");
    const auto& tlayer = net.layers[target];
    const auto& ttable = *tables[target];

    EvalReport rep;
    rep.note = std::string("transfer to '") + tlayer.name + "', weighting " + to_string(weighting) +
               " (approximate hierarchy-distance weighting)";

    for (std::size_t f = 0; f < labels.functions.size(); ++f) {
        const auto held_back = labels.positives(target, f);
        if (held_back.empty()) continue;
        if (held_back.size() < config.min_annotated || held_back.size() >= tlayer.size()) {
            ++rep.skipped_functions;
            continue;
        }
        std::vector<LayerId> sources;
        std::vector<std::size_t> dist;
        for (LayerId s = 0; s < net.layers.size(); ++s) {
            if (s == target) continue;
            const auto n = labels.positives(s, f).size();
            if (n < std::max<std::size_t>(1, config.min_annotated) || n >= net.layers[s].size()) continue;
            sources.push_back(s);
            dist.push_back(tree_distance(h, *h.element_of_layer(s), *target_el));
        }
        if (sources.empty()) {
            ++rep.skipped_functions;
            continue;
        }
        const auto weights = transfer_weights(dist, weighting);

        std::vector<double> scores(tlayer.size(), 0.0);
        std::vector<LinearClassifier> clfs(sources.size());
        parallel_for(sources.size(), resolve_threads(config.mode, config.threads),
                     [&](std::size_t begin, std::size_t end, std::size_t) {
                         for (auto si = begin; si < end; ++si) {
                             const auto s = sources[si];
                             const auto& layer = net.layers[s];
                             const auto y = detail::membership(layer, labels.positives(s, f));
                             FeatureRows x;
                             for (auto u : layer.nodes) x.push_back(tables[s]->row(*tables[s]->row_of(u)));
                             auto cc = config.classifier;
                             cc.seed = derive_seed(config.seed, {stream::classifier, s, f, 0xfeed});
                             clfs[si] = train_classifier(x, y, cc);
                         }
                     });
        for (std::size_t si = 0; si < sources.size(); ++si)
            for (std::size_t a = 0; a < tlayer.size(); ++a)
                scores[a] += weights[si] * clfs[si].decision(ttable.row(*ttable.row_of(tlayer.nodes[a])));

        const auto y = detail::membership(tlayer, held_back);
        rep.entries.push_back(EvalEntry{tlayer.name, labels.functions[f], auroc(scores, y), auprc(scores, y),
                                        held_back.size(), tlayer.size() - held_back.size()});
    }
    rep.finalize();
    return rep;
}

// --- projection ------------------------------------------------------------------

struct ProjectedPoint {
    NodeId node;
    double x;
    double y;
};

/// Scores on the top two principal components of the centered table.
/// Component signs are fixed so the largest-magnitude loading is positive.
inline std::vector<ProjectedPoint> project_2d(const EmbeddingTable& table) {
    if (table.rows() == 0) throw Error("project_2d: empty table");
    if (table.dim < 2) throw Error("project_2d: need d >= 2");
    const auto n = static_cast<Eigen::Index>(table.rows());
    const auto d = static_cast<Eigen::Index>(table.dim);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> raw(table.data.data(), n,
                                                                                                  d);
    const Eigen::MatrixXd centered = raw.rowwise() - raw.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericError("project_2d: eigen decomposition failed");

    Eigen::MatrixXd basis(d, 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - c); // eigenvalues ascending
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        basis.col(c) = v;
    }
    const Eigen::MatrixXd proj = centered * basis;
    std::vector<ProjectedPoint> out(table.rows());
    for (Eigen::Index r = 0; r < n; ++r) out[r] = {table.nodes[r], proj(r, 0), proj(r, 1)};
    return out;
}

} // namespace ohmnet
