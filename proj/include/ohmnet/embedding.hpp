#pragma once

// Joint training of per-layer skip-gram objectives and the hierarchical
// coupling regularizer. Leaves are trained by SGD epochs over their walk
// corpus; internal elements are refreshed by their exact coordinate
// minimizer (mean of parent and children vectors).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ohmnet/alias.hpp"
#include "ohmnet/error.hpp"
#include "ohmnet/graph.hpp"
#include "ohmnet/parallel.hpp"
#include "ohmnet/rng.hpp"
#include "ohmnet/walks.hpp"

namespace ohmnet {

/// Row-major |nodes| x dim table. `nodes` is sorted; row r belongs to nodes[r].
struct EmbeddingTable {
    std::vector<NodeId> nodes;
    std::size_t dim = 0;
    std::vector<double> data;

    EmbeddingTable() = default;
    EmbeddingTable(std::vector<NodeId> scope, std::size_t d)
        : nodes(std::move(scope)), dim(d), data(nodes.size() * d, 0.0) {}

    std::size_t rows() const noexcept { return nodes.size(); }

    std::span<double> row(std::size_t r) { return {data.data() + r * dim, dim}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * dim, dim}; }

    std::optional<std::size_t> row_of(NodeId u) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), u);
        if (it == nodes.end() || *it != u) return std::nullopt;
        return static_cast<std::size_t>(it - nodes.begin());
    }

    bool all_finite() const {
        return std::all_of(data.begin(), data.end(), [](double x) { return std::isfinite(x); });
    }

    bool operator==(const EmbeddingTable&) const = default;
};

/// One input table per hierarchy element (indexed like Hierarchy::elements)
/// plus skip-gram context tables, which are non-empty only for leaves.
struct EmbeddingSet {
    std::size_t dim = 0;
    std::vector<std::string> names;
    std::vector<EmbeddingTable> input;
    std::vector<EmbeddingTable> context;

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        return std::nullopt;
    }
};

struct TrainConfig {
    std::size_t dim = 128;
    double lambda = 0.1;
    std::size_t negatives = 5;
    std::size_t window = 10;
    double initial_step = 0.025;
    std::size_t outer_iters = 10;
    double tol = 1e-3;
    std::uint64_t seed = 1;
    ExecutionMode mode = ExecutionMode::sequential;
    std::size_t threads = 0;
    bool shuffle_walks = true;

    void check() const {
        if (dim < 1) throw Error("dimension must be >= 1");
        if (!(lambda >= 0.0)) throw Error("lambda must be nonnegative");
        if (negatives < 1) throw Error("at least one negative sample is required");
        if (window < 1) throw Error("window must be >= 1");
        if (!(initial_step > 0.0)) throw Error("initial step must be positive");
        if (outer_iters < 1) throw Error("outer iterations must be >= 1");
        if (!(tol > 0.0)) throw Error("tol must be positive");
    }
};

// --- initialization --------------------------------------------------------

namespace detail {
inline constexpr std::uint64_t leaf_stream = 0;
inline constexpr std::uint64_t internal_stream = 1;

inline void fill_uniform(EmbeddingTable& t, Rng& rng) {
    const double scale = 1.0 / static_cast<double>(t.dim);
    for (auto& x : t.data) x = (uniform01(rng) - 0.5) * scale;
}
} // namespace detail

/// Input table for a layer, uniform in [-0.5/d, 0.5/d]. The stream depends
/// only on (seed, layer), so hierarchical and independent runs agree.
inline EmbeddingTable init_layer_table(const Layer& layer, LayerId layer_id, const TrainConfig& config) {
    EmbeddingTable t(layer.nodes, config.dim);
    auto rng = make_rng(config.seed, {stream::init, detail::leaf_stream, layer_id});
    detail::fill_uniform(t, rng);
    return t;
}

inline EmbeddingSet init_embeddings(const MultiLayerNetwork& net, const Hierarchy& h, const TrainConfig& config) {
    config.check();
    auto scopes = subtree_scopes(h, net);
    EmbeddingSet set;
    set.dim = config.dim;
    for (ElementId e = 0; e < h.size(); ++e) {
        const auto& el = h.elements[e];
        set.names.push_back(el.name);
        if (el.layer) {
            set.input.push_back(init_layer_table(net.layers.at(*el.layer), *el.layer, config));
            set.context.emplace_back(scopes[e], config.dim);
        } else {
            EmbeddingTable t(std::move(scopes[e]), config.dim);
            auto rng = make_rng(config.seed, {stream::init, detail::internal_stream, e});
            detail::fill_uniform(t, rng);
            set.input.push_back(std::move(t));
            set.context.emplace_back(std::vector<NodeId>{}, config.dim);
        }
    }
    return set;
}

// --- skip-gram with negative sampling ---------------------------------------

inline double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

/// log(sigmoid(z)) without overflow.
inline double log_sigmoid(double z) noexcept {
    return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

/// Per-pair objective for center vector x with observed context vector
/// `positive` and noise context vectors `negatives`:
///   log s(positive.x) + sum_k log s(-negative_k.x) - lambda/2 |x - parent|^2
/// (the last term only when a parent vector is given).
struct PairObjective {
    double value = 0.0;
    std::vector<double> grad_center;
    std::vector<double> grad_positive;
    std::vector<std::vector<double>> grad_negatives;
};

inline PairObjective pair_objective(std::span<const double> x, std::span<const double> positive,
                                    const std::vector<std::span<const double>>& negatives,
                                    std::span<const double> parent = {}, double lambda = 0.0) {
    const auto d = x.size();
    PairObjective out;
    out.grad_center.assign(d, 0.0);

    const double fp = dot(positive, x);
    out.value += log_sigmoid(fp);
    const double gp = 1.0 - sigmoid(fp);
    out.grad_positive.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        out.grad_center[k] += gp * positive[k];
        out.grad_positive[k] = gp * x[k];
    }
    for (const auto& neg : negatives) {
        const double fn = dot(neg, x);
        out.value += log_sigmoid(-fn);
        const double gn = -sigmoid(fn);
        auto& gneg = out.grad_negatives.emplace_back(d);
        for (std::size_t k = 0; k < d; ++k) {
            out.grad_center[k] += gn * neg[k];
            gneg[k] = gn * x[k];
        }
    }
    if (!parent.empty() && lambda != 0.0) {
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = x[k] - parent[k];
            sq += diff * diff;
            out.grad_center[k] -= lambda * diff;
        }
        out.value -= 0.5 * lambda * sq;
    }
    return out;
}

namespace detail {

// Relaxed atomic access for lock-free parallel updates; plain access otherwise.
template <bool Shared>
struct Cell {
    static double load(double& x) noexcept {
        if constexpr (Shared)
            return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
        else
            return x;
    }
    static void store(double& x, double v) noexcept {
        if constexpr (Shared)
            std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
        else
            x = v;
    }
};

/// One gradient-ascent step on the pair surrogate. `targets[0]` is the
/// observed context row; the rest are negatives. `buf` needs 2*dim slots.
template <bool Shared>
void sgns_step(double* center, EmbeddingTable& ctx, std::span<const std::uint32_t> targets, double alpha,
               double* buf) {
    using C = Cell<Shared>;
    const auto d = ctx.dim;
    double* x = buf;
    double* accum = buf + d;
    for (std::size_t k = 0; k < d; ++k) {
        x[k] = C::load(center[k]);
        accum[k] = 0.0;
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
        double* c = ctx.data.data() + static_cast<std::size_t>(targets[t]) * d;
        double f = 0.0;
        for (std::size_t k = 0; k < d; ++k) f += x[k] * C::load(c[k]);
        const double g = ((t == 0 ? 1.0 : 0.0) - sigmoid(f)) * alpha;
        for (std::size_t k = 0; k < d; ++k) {
            const double ck = C::load(c[k]);
            accum[k] += g * ck;
            C::store(c[k], ck + g * x[k]);
        }
    }
    for (std::size_t k = 0; k < d; ++k) C::store(center[k], C::load(center[k]) + accum[k]);
}

/// Implicit step on lambda/2 |x - p|^2: x <- (x + lambda*alpha*p) / (1 + lambda*alpha).
/// Agrees with the explicit gradient step to first order and contracts
/// toward p for any step size.
template <bool Shared>
void regularize_step(double* x, const double* parent, std::size_t d, double lambda, double alpha) {
    using C = Cell<Shared>;
    const double la = lambda * alpha;
    const double inv = 1.0 / (1.0 + la);
    for (std::size_t k = 0; k < d; ++k) C::store(x[k], (C::load(x[k]) + la * parent[k]) * inv);
}

} // namespace detail

/// Row mapping from a child table into its parent's table (child row r ->
/// parent row), precomputed once per training run.
inline std::vector<std::size_t> parent_rows(const EmbeddingTable& child, const EmbeddingTable& parent) {
    std::vector<std::size_t> rows(child.rows());
    for (std::size_t r = 0; r < child.rows(); ++r) {
        auto pr = parent.row_of(child.nodes[r]);
        if (!pr) throw Error("child scope is not contained in parent scope");
        rows[r] = *pr;
    }
    return rows;
}

/// Regularization target for a leaf: the parent's table and the row map into it.
struct ParentLink {
    const EmbeddingTable* table = nullptr;
    const std::vector<std::size_t>* rows = nullptr;
};

/// SGD state for one layer: its walks (as local indices), the unigram^0.75
/// noise table, the RNG stream, and the learning-rate schedule, which decays
/// linearly from initial_step to initial_step*1e-4 over all planned epochs.
class LeafTrainer {
public:
    LeafTrainer(const Layer& layer, LayerId layer_id, const std::vector<Walk>& walks, const TrainConfig& config,
                std::size_t planned_epochs)
        : config_(config), layer_id_(layer_id), rng_(make_rng(config.seed, {stream::train, layer_id})) {
        config.check();
        walks_.reserve(walks.size());
        std::vector<double> counts(layer.size(), 0.0);
        has_pairs_.assign(layer.size(), 0);
        for (const auto& w : walks) {
            auto& local = walks_.emplace_back();
            local.reserve(w.size());
            for (auto u : w) {
                auto li = layer.local_index(u);
                if (!li) throw Error("walk visits node outside layer '" + layer.name + "'");
                local.push_back(*li);
                counts[*li] += 1.0;
            }
            for (std::size_t t = 0; t + 1 < local.size(); ++t)
                if (!layer.has_edge(local[t], local[t + 1]))
                    throw Error("walk steps across a non-edge in layer '" + layer.name + "'");
            if (local.size() > 1)
                for (auto li : local) has_pairs_[li] = 1;
            pairs_per_epoch_ += pair_count(local.size());
        }
        for (auto& c : counts) c = std::pow(c, 0.75);
        if (std::any_of(counts.begin(), counts.end(), [](double c) { return c > 0.0; })) noise_ = AliasTable(counts);
        planned_pairs_ = std::max<std::size_t>(1, pairs_per_epoch_ * planned_epochs);
    }

    std::size_t pairs_per_epoch() const noexcept { return pairs_per_epoch_; }
    std::size_t epochs_done() const noexcept { return epochs_; }

    double current_step() const noexcept { return step_at(processed_); }

    /// One pass over every (center, context) pair of the layer's walks.
    /// With a parent link and lambda > 0, each center update is followed by
    /// a regularization step toward the parent row; rows that occur in no
    /// pair get one regularization step at the end of the epoch.
    void epoch(EmbeddingTable& in, EmbeddingTable& ctx, ParentLink parent = {}, double lambda = 0.0) {
        std::vector<std::size_t> order(walks_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (config_.shuffle_walks) shuffle(order.begin(), order.end(), rng_);

        const bool coupled = parent.table != nullptr && lambda > 0.0;
        const auto threads = resolve_threads(config_.mode, config_.threads);
        if (threads <= 1) {
            run<false>(in, ctx, parent, coupled ? lambda : 0.0, order, 0, order.size(), rng_, processed_);
        } else {
            std::atomic<std::size_t> shared_processed{processed_};
            const auto epoch_no = epochs_;
            parallel_for(order.size(), threads, [&](std::size_t b, std::size_t e, std::size_t w) {
                auto rng = make_rng(config_.seed, {stream::train, layer_id_, epoch_no + 1, w + 1});
                std::size_t local = 0;
                run<true>(in, ctx, parent, coupled ? lambda : 0.0, order, b, e, rng, local, &shared_processed);
            });
            processed_ = shared_processed.load();
        }

        if (coupled) {
            const double alpha = current_step();
            for (std::size_t r = 0; r < in.rows(); ++r)
                if (!has_pairs_[r])
                    detail::regularize_step<false>(in.row(r).data(), parent.table->row((*parent.rows)[r]).data(),
                                                   in.dim, lambda, alpha);
        }
        ++epochs_;
        if (!in.all_finite() || !ctx.all_finite())
            throw NumericError("non-finite embedding after epoch " + std::to_string(epochs_) + " of layer " +
                               std::to_string(layer_id_));
    }

private:
    std::size_t pair_count(std::size_t len) const {
        std::size_t n = 0;
        for (std::size_t t = 0; t < len; ++t) {
            const auto lo = t >= config_.window ? t - config_.window : 0;
            const auto hi = std::min(len - 1, t + config_.window);
            n += hi - lo;
        }
        return n;
    }

    double step_at(std::size_t processed) const noexcept {
        const double frac = 1.0 - static_cast<double>(processed) / static_cast<double>(planned_pairs_);
        return config_.initial_step * std::max(frac, 1e-4);
    }

    template <bool Shared>
    void run(EmbeddingTable& in, EmbeddingTable& ctx, ParentLink parent, double lambda,
             const std::vector<std::size_t>& order, std::size_t begin, std::size_t end, Rng& rng,
             std::size_t& processed, std::atomic<std::size_t>* shared = nullptr) {
        const auto d = in.dim;
        std::vector<double> buf(2 * d);
        std::vector<std::uint32_t> targets;
        targets.reserve(config_.negatives + 1);
        std::size_t since_sync = 0;
        double alpha = step_at(shared ? shared->load(std::memory_order_relaxed) : processed);

        for (auto oi = begin; oi < end; ++oi) {
            const auto& walk = walks_[order[oi]];
            const auto len = walk.size();
            for (std::size_t t = 0; t < len; ++t) {
                const auto u = walk[t];
                double* x = in.data.data() + static_cast<std::size_t>(u) * d;
                const auto lo = t >= config_.window ? t - config_.window : 0;
                const auto hi = std::min(len - 1, t + config_.window);
                for (auto s = lo; s <= hi; ++s) {
                    if (s == t) continue;
                    const auto v = walk[s];
                    targets.clear();
                    targets.push_back(v);
                    for (std::size_t k = 0; k < config_.negatives; ++k) {
                        const auto n = noise_.sample(rng);
                        if (n != v) targets.push_back(n);
                    }
                    detail::sgns_step<Shared>(x, ctx, targets, alpha, buf.data());
                    if (lambda > 0.0)
                        detail::regularize_step<Shared>(x, parent.table->row((*parent.rows)[u]).data(), d, lambda,
                                                        alpha);
                    ++since_sync;
                }
                if (since_sync >= 256) {
                    if (shared) {
                        alpha = step_at(shared->fetch_add(since_sync, std::memory_order_relaxed) + since_sync);
                    } else {
                        processed += since_sync;
                        alpha = step_at(processed);
                    }
                    since_sync = 0;
                }
            }
        }
        if (shared)
            shared->fetch_add(since_sync, std::memory_order_relaxed);
        else
            processed += since_sync;
    }

    TrainConfig config_;
    LayerId layer_id_;
    Rng rng_;
    std::vector<std::vector<std::uint32_t>> walks_;
    std::vector<char> has_pairs_;
    AliasTable noise_;
    std::size_t pairs_per_epoch_ = 0;
    std::size_t planned_pairs_ = 1;
    std::size_t processed_ = 0;
    std::size_t epochs_ = 0;
};

// --- hierarchical regularizer ------------------------------------------------

/// c_i(u) = 1/2 |f_i(u) - f_parent(i)(u)|^2; zero at the root.
inline double regularizer_value(const EmbeddingSet& set, const Hierarchy& h, NodeId u, ElementId i) {
    const auto& el = h.elements.at(i);
    const auto r = set.input.at(i).row_of(u);
    if (!r) throw Error("node not in scope of element '" + el.name + "'");
    if (!el.parent) return 0.0;
    const auto pr = set.input.at(*el.parent).row_of(u);
    if (!pr) throw Error("node missing from parent scope of '" + el.name + "'");
    const auto a = set.input[i].row(*r);
    const auto b = set.input[*el.parent].row(*pr);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return 0.5 * s;
}

/// RegTerm_i: sum of c_i(u) over the scope of element i.
inline double regularizer_term(const EmbeddingSet& set, const Hierarchy& h, ElementId i) {
    double s = 0.0;
    for (auto u : set.input.at(i).nodes) s += regularizer_value(set, h, u, i);
    return s;
}

inline double regularizer_total(const EmbeddingSet& set, const Hierarchy& h) {
    double s = 0.0;
    for (ElementId i = 0; i < h.size(); ++i) s += regularizer_term(set, h, i);
    return s;
}

/// Precomputed row maps between each element's table and its parent's and
/// children's tables.
struct HierarchyIndex {
    std::vector<std::vector<std::size_t>> to_parent; // empty for the root
    /// to_child[i][k][r]: row of i's node r in the k-th child's table, or npos.
    std::vector<std::vector<std::vector<std::size_t>>> to_child;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    HierarchyIndex(const EmbeddingSet& set, const Hierarchy& h) : to_parent(h.size()), to_child(h.size()) {
        for (ElementId i = 0; i < h.size(); ++i) {
            const auto& el = h.elements[i];
            if (el.parent) to_parent[i] = parent_rows(set.input[i], set.input[*el.parent]);
            const auto& mine = set.input[i];
            for (auto c : el.children) {
                auto& map = to_child[i].emplace_back(mine.rows(), npos);
                const auto& child = set.input[c];
                // Both node lists are sorted: merge walk.
                std::size_t r = 0;
                for (std::size_t cr = 0; cr < child.rows(); ++cr) {
                    while (r < mine.rows() && mine.nodes[r] < child.nodes[cr]) ++r;
                    if (r < mine.rows() && mine.nodes[r] == child.nodes[cr]) map[r] = cr;
                }
            }
        }
    }
};

/// Closed-form coordinate minimizer of the regularizer for an internal
/// element: each row becomes the mean of the parent's row (absent at the
/// root) and the rows of all children whose scope holds the node. Returns
/// the largest absolute coordinate change.
inline double internal_update(EmbeddingSet& set, const Hierarchy& h, const HierarchyIndex& index, ElementId i,
                              std::size_t threads = 1) {
    const auto& el = h.elements.at(i);
    if (el.is_leaf()) throw Error("internal_update on leaf element '" + el.name + "'");
    auto& table = set.input[i];
    const auto d = table.dim;
    const EmbeddingTable* parent = el.parent ? &set.input[*el.parent] : nullptr;

    std::vector<double> worker_change(std::max<std::size_t>(threads, 1), 0.0);
    parallel_for(table.rows(), threads, [&](std::size_t begin, std::size_t end, std::size_t w) {
        std::vector<double> acc(d);
        double change = 0.0;
        for (auto r = begin; r < end; ++r) {
            std::fill(acc.begin(), acc.end(), 0.0);
            std::size_t count = 0;
            if (parent) {
                const auto pr = parent->row(index.to_parent[i][r]);
                for (std::size_t k = 0; k < d; ++k) acc[k] += pr[k];
                ++count;
            }
            for (std::size_t c = 0; c < el.children.size(); ++c) {
                const auto cr = index.to_child[i][c][r];
                if (cr == HierarchyIndex::npos) continue;
                const auto row = set.input[el.children[c]].row(cr);
                for (std::size_t k = 0; k < d; ++k) acc[k] += row[k];
                ++count;
            }
            if (count == 0) throw Error("node in scope of '" + el.name + "' but in no child");
            auto out = table.row(r);
            for (std::size_t k = 0; k < d; ++k) {
                const double v = acc[k] / static_cast<double>(count);
                change = std::max(change, std::abs(v - out[k]));
                out[k] = v;
            }
        }
        worker_change[w] = change;
    });
    return *std::max_element(worker_change.begin(), worker_change.end());
}

inline double internal_update(EmbeddingSet& set, const Hierarchy& h, ElementId i) {
    return internal_update(set, h, HierarchyIndex(set, h), i);
}

// --- full training -------------------------------------------------------------

struct TrainResult {
    EmbeddingSet embeddings;
    std::size_t iterations = 0;
    std::vector<double> internal_change; // max coordinate change per outer iteration
};

using CheckpointFn = std::function<void(const EmbeddingSet&, std::size_t iteration)>;

/// Alternating optimization over the hierarchy. Each outer iteration visits
/// elements children-first: a leaf gets one SGD epoch (coupled to its
/// parent), an internal element gets its closed-form update. Stops after
/// outer_iters, or earlier when lambda > 0 and the largest change on any
/// internal table falls below tol. With lambda == 0 leaves are decoupled and
/// all outer_iters epochs run.
inline TrainResult train(const MultiLayerNetwork& net, const Hierarchy& h, const WalkCorpus& corpus,
                         const TrainConfig& config, const CheckpointFn& checkpoint = {}) {
    config.check();
    if (corpus.layers.size() != net.layers.size()) throw Error("walk corpus does not cover every layer");
    if (auto rep = validate(net, h); !rep.ok()) throw Error("invalid input: " + rep.violations.front());

    TrainResult result;
    auto& set = result.embeddings;
    set = init_embeddings(net, h, config);
    const HierarchyIndex index(set, h);
    const auto threads = resolve_threads(config.mode, config.threads);

    std::vector<std::optional<LeafTrainer>> leaves(h.size());
    for (ElementId e = 0; e < h.size(); ++e)
        if (auto l = h.elements[e].layer)
            leaves[e].emplace(net.layers[*l], *l, corpus.layers[*l], config, config.outer_iters);

    const auto order = h.post_order();
    for (std::size_t it = 0; it < config.outer_iters; ++it) {
        double change = 0.0;
        for (auto e : order) {
            const auto& el = h.elements[e];
            if (el.is_leaf()) {
                ParentLink link;
                if (el.parent) link = {&set.input[*el.parent], &index.to_parent[e]};
                leaves[e]->epoch(set.input[e], set.context[e], link, config.lambda);
            } else {
                change = std::max(change, internal_update(set, h, index, e, threads));
                if (!set.input[e].all_finite())
                    throw NumericError("non-finite embedding in element '" + el.name + "'");
            }
        }
        result.internal_change.push_back(change);
        result.iterations = it + 1;
        if (checkpoint) checkpoint(set, result.iterations);
        if (config.lambda > 0.0 && change < config.tol) break;
    }
    return result;
}

/// Per-layer skip-gram training with no coupling. Element i of the result is
/// layer i. Uses the same init and SGD streams as `train`.
inline EmbeddingSet train_independent(const MultiLayerNetwork& net, const WalkCorpus& corpus,
                                      const TrainConfig& config) {
    config.check();
    if (corpus.layers.size() != net.layers.size()) throw Error("walk corpus does not cover every layer");
    EmbeddingSet set;
    set.dim = config.dim;
    for (LayerId l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        set.names.push_back(layer.name);
        set.input.push_back(init_layer_table(layer, l, config));
        set.context.emplace_back(layer.nodes, config.dim);
        LeafTrainer trainer(layer, l, corpus.layers[l], config, config.outer_iters);
        for (std::size_t it = 0; it < config.outer_iters; ++it) trainer.epoch(set.input[l], set.context[l]);
    }
    return set;
}

/// Collapsed-layers baseline: train one table on the summed union graph,
/// then give every layer the collapsed vectors of its own nodes.
inline EmbeddingSet train_collapsed(const MultiLayerNetwork& net, const WalkConfig& walk_config,
                                    const TrainConfig& config) {
    MultiLayerNetwork single;
    single.universe = net.universe;
    single.layers.push_back(collapse_layers(net));
    WalkCorpus corpus;
    corpus.layers.push_back(simulate_layer_walks(single.layers[0], 0, walk_config));
    const auto collapsed = train_independent(single, corpus, config);

    EmbeddingSet set;
    set.dim = config.dim;
    const auto& src = collapsed.input[0];
    for (const auto& layer : net.layers) {
        set.names.push_back(layer.name);
        EmbeddingTable t(layer.nodes, config.dim);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const auto sr = src.row_of(layer.nodes[r]);
            std::copy_n(src.row(*sr).begin(), config.dim, t.row(r).begin());
        }
        set.input.push_back(std::move(t));
        set.context.emplace_back(std::vector<NodeId>{}, config.dim);
    }
    return set;
}

} // namespace ohmnet
