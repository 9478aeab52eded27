// ohmnet command-line driver: synth | walk | train | eval | transfer | project.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ohmnet/ohmnet.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a(std::istream& in, std::uint64_t h = 0xcbf29ce484222325ULL) {
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

/// Digest of a file, or of every regular file under a directory in path order.
std::string digest(const fs::path& p) {
    if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(p))
            if (e.is_regular_file() && e.path().filename() != "run_manifest.json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const auto& f : files) {
            std::istringstream name(fs::relative(f, p).generic_string());
            h = fnv1a(name, h);
            std::ifstream in(f, std::ios::binary);
            h = fnv1a(in, h);
        }
        return hex(h);
    }
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ohmnet::Error("cannot open " + p.string());
    return hex(fnv1a(in));
}

struct Run {
    std::string command;
    std::map<std::string, fs::path> inputs;
    std::uint64_t seed = 0;
};

/// Snapshot of every option of `sub` as resolved after parsing (flags,
/// config file and environment).
json snapshot(const CLI::App& sub) {
    json cfg = json::object();
    for (const auto* opt : sub.get_options()) {
        const auto name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config" || name == "version") continue;
        const auto res = opt->results();
        if (res.empty()) {
            cfg[name] = opt->get_default_str();
        } else if (opt->get_expected_max() > 1) {
            cfg[name] = res;
        } else {
            cfg[name] = res.back();
        }
    }
    return cfg;
}

void write_manifest(const fs::path& dir, const Run& run, const CLI::App& sub) {
    json inputs = json::object();
    for (const auto& [role, path] : run.inputs) {
        inputs[role] = {{"path", path.generic_string()}, {"fnv1a", digest(path)}};
    }
    json m = {{"tool", "ohmnet"},         {"version", ohmnet::version}, {"command", run.command},
              {"seed", run.seed},         {"config", snapshot(sub)},    {"inputs", inputs}};
    std::ofstream out(dir / "run_manifest.json");
    out << m.dump(2) << '\n';
    if (!out) throw ohmnet::Error("failed writing " + (dir / "run_manifest.json").string());
}

/// Layer manifest plus the edge lists it names.
void add_network_inputs(Run& run, const fs::path& manifest) {
    run.inputs["layers"] = manifest;
    for (const auto& e : ohmnet::read_manifest(manifest).entries) run.inputs["edgelist:" + e.layer_name] = e.edgelist_path;
}

const std::map<std::string, ohmnet::ExecutionMode> kModes{{"sequential", ohmnet::ExecutionMode::sequential},
                                                           {"parallel", ohmnet::ExecutionMode::parallel}};

const std::map<std::string, ohmnet::TransferWeighting> kWeightings{
    {"exp", ohmnet::TransferWeighting::exp_distance},
    {"inverse", ohmnet::TransferWeighting::inverse_distance},
    {"uniform", ohmnet::TransferWeighting::uniform}};

// Every long option can also be set through OHMNET_<NAME>, dashes as underscores.
void add_env_names(CLI::App& app) {
    for (auto* opt : app.get_options()) {
        auto name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config" || name == "version" || opt->get_envname().size()) continue;
        std::string env = "OHMNET_";
        for (char c : name) env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        opt->envname(env);
    }
    for (auto* sub : app.get_subcommands({})) add_env_names(*sub);
}

struct WalkFlags {
    ohmnet::WalkConfig cfg;
    double cache_mb = 64.0;

    void add(CLI::App& app) {
        app.add_option("--walks", cfg.walks_per_node, "Walks started per node")->capture_default_str();
        app.add_option("--length", cfg.walk_length, "Steps per walk")->capture_default_str();
        app.add_option("--p", cfg.p, "Return parameter")->capture_default_str();
        app.add_option("--q", cfg.q, "In-out parameter")->capture_default_str();
        app.add_option("--cache-mb", cache_mb, "Transition cache budget per worker, MiB")->capture_default_str();
    }
    ohmnet::WalkConfig resolve(std::uint64_t seed, ohmnet::ExecutionMode mode, std::size_t threads) const {
        auto c = cfg;
        c.seed = seed;
        c.mode = mode;
        c.threads = threads;
        c.cache_budget_bytes = static_cast<std::size_t>(cache_mb * 1024.0 * 1024.0);
        return c;
    }
};

struct ExecFlags {
    std::uint64_t seed = 1;
    std::string mode = "sequential";
    std::size_t threads = 0;

    void add(CLI::App& app) {
        app.add_option("--seed", seed, "Root seed for every random stream")->capture_default_str();
        app.add_option("--mode", mode, "sequential (bit-reproducible) or parallel")
            ->check(CLI::IsMember({"sequential", "parallel"}))
            ->capture_default_str();
        app.add_option("--threads", threads, "Worker cap in parallel mode (0 = hardware)")->capture_default_str();
    }
    ohmnet::ExecutionMode execution() const { return kModes.at(mode); }
};

struct ClassifierFlags {
    ohmnet::EvalConfig cfg;

    void add(CLI::App& app) {
        app.add_option("--min-annotated", cfg.min_annotated, "Skip functions with fewer positives")
            ->capture_default_str();
        app.add_option("--strength", cfg.classifier.strength, "Elastic-net strength")->capture_default_str();
        app.add_option("--l1-ratio", cfg.classifier.l1_ratio, "Elastic-net L1 share")->capture_default_str();
        app.add_option("--epochs", cfg.classifier.epochs, "Classifier SGD epochs")->capture_default_str();
    }
};

fs::path prepare_out(const fs::path& dir) {
    fs::create_directories(dir);
    return dir;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-layer network embedding with hierarchical regularization"};
    app.set_version_flag("--version", std::string(ohmnet::version));
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a planted-partition benchmark");
    ohmnet::SynthConfig synth_cfg;
    fs::path synth_out;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--nodes", synth_cfg.nodes_per_layer, "Nodes per layer")->capture_default_str();
    synth->add_option("--layers", synth_cfg.layers, "Number of layers (leaves)")->capture_default_str();
    synth->add_option("--depth", synth_cfg.hierarchy_depth, "Hierarchy depth")->capture_default_str();
    synth->add_option("--communities", synth_cfg.communities, "Communities per layer")->capture_default_str();
    synth->add_option("--p-in", synth_cfg.p_in, "Within-community edge probability")->capture_default_str();
    synth->add_option("--p-out", synth_cfg.p_out, "Cross-community edge probability")->capture_default_str();
    synth->add_option("--divergence", synth_cfg.divergence, "Sibling disagreement fraction")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "Random seed")->capture_default_str();

    // walk
    auto* walk = app.add_subcommand("walk", "Simulate biased random walks for every layer");
    fs::path walk_layers, walk_out;
    WalkFlags walk_flags;
    ExecFlags walk_exec;
    walk->add_option("--layers", walk_layers, "Layer manifest")->required()->check(CLI::ExistingFile);
    walk->add_option("--out", walk_out, "Output directory for <layer>.walks")->required();
    walk_flags.add(*walk);
    walk_exec.add(*walk);

    // train
    auto* train = app.add_subcommand("train", "Learn embeddings for every hierarchy element");
    fs::path train_layers, train_hier, train_out, train_walks_dir, train_ckpt;
    ohmnet::TrainConfig train_cfg;
    WalkFlags train_walk;
    ExecFlags train_exec;
    bool independent = false, collapsed = false;
    train->add_option("--layers", train_layers, "Layer manifest")->required()->check(CLI::ExistingFile);
    auto* hier_opt =
        train->add_option("--hierarchy", train_hier, "Hierarchy file (child parent)")->check(CLI::ExistingFile);
    train->add_option("--out", train_out, "Output directory for embeddings")->required();
    train->add_option("--dim", train_cfg.dim, "Embedding dimension")->capture_default_str();
    train->add_option("--lambda", train_cfg.lambda, "Regularization strength")->capture_default_str();
    train->add_option("--window", train_cfg.window, "Context window")->capture_default_str();
    train->add_option("--negatives", train_cfg.negatives, "Negative samples per pair")->capture_default_str();
    train->add_option("--alpha", train_cfg.initial_step, "Initial SGD step")->capture_default_str();
    train->add_option("--outer-iters", train_cfg.outer_iters, "Outer iterations")->capture_default_str();
    train->add_option("--tol", train_cfg.tol, "Stop when internal tables move less than this")->capture_default_str();
    train_walk.add(*train);
    train_exec.add(*train);
    auto* walks_dir_opt =
        train->add_option("--walks-dir", train_walks_dir, "Reuse walks written by `walk`")->check(CLI::ExistingDirectory);
    train->add_option("--checkpoint-dir", train_ckpt, "Dump all tables after every outer iteration");
    auto* ind_flag = train->add_flag("--independent", independent, "Train layers without coupling");
    auto* col_flag = train->add_flag("--collapsed", collapsed, "Train on the union of all layers");
    ind_flag->excludes(col_flag);
    col_flag->excludes(walks_dir_opt);

    // eval
    auto* eval = app.add_subcommand("eval", "Cross-validated function prediction");
    fs::path eval_layers, eval_emb, eval_labels, eval_out;
    ClassifierFlags eval_clf;
    ExecFlags eval_exec;
    std::string eval_layer;
    eval->add_option("--layers", eval_layers, "Layer manifest")->required()->check(CLI::ExistingFile);
    eval->add_option("--embeddings", eval_emb, "Embedding directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--labels", eval_labels, "Label file (node layer function)")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", eval_out, "Output directory for report.tsv")->required();
    eval->add_option("--folds", eval_clf.cfg.folds, "Protein-level folds")->capture_default_str();
    eval->add_option("--layer", eval_layer, "Evaluate one layer only");
    eval_clf.add(*eval);
    eval_exec.add(*eval);

    // transfer
    auto* transfer = app.add_subcommand("transfer", "Predict an unannotated layer from the other layers");
    fs::path tr_layers, tr_hier, tr_emb, tr_labels, tr_out;
    std::string tr_target, tr_weighting = "exp";
    ClassifierFlags tr_clf;
    ExecFlags tr_exec;
    transfer->add_option("--layers", tr_layers, "Layer manifest")->required()->check(CLI::ExistingFile);
    transfer->add_option("--hierarchy", tr_hier, "Hierarchy file")->required()->check(CLI::ExistingFile);
    transfer->add_option("--embeddings", tr_emb, "Embedding directory")->required()->check(CLI::ExistingDirectory);
    transfer->add_option("--labels", tr_labels, "Label file")->required()->check(CLI::ExistingFile);
    transfer->add_option("--target", tr_target, "Target layer (its labels are only used for scoring)")->required();
    transfer->add_option("--weighting", tr_weighting, "Source weights: exp, inverse or uniform")
        ->check(CLI::IsMember({"exp", "inverse", "uniform"}))
        ->capture_default_str();
    transfer->add_option("--out", tr_out, "Output directory for report.tsv")->required();
    tr_clf.add(*transfer);
    tr_exec.add(*transfer);

    // project
    auto* project = app.add_subcommand("project", "2-D principal-component projection of one table");
    fs::path pr_emb, pr_out;
    std::string pr_element;
    project->add_option("--embeddings", pr_emb, "Embedding directory")->required()->check(CLI::ExistingDirectory);
    project->add_option("--element", pr_element, "Hierarchy element or layer name")->required();
    project->add_option("--out", pr_out, "Output directory")->required();

    add_env_names(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        Run run;
        if (synth->parsed()) {
            run.command = "synth";
            run.seed = synth_cfg.seed;
            const auto bench = ohmnet::generate(synth_cfg);
            ohmnet::write_benchmark(bench, prepare_out(synth_out));
            write_manifest(synth_out, run, *synth);
            std::cout << "wrote " << bench.network.layers.size() << " layers, " << bench.hierarchy.size()
                      << " hierarchy elements to " << synth_out.string() << '\n';
        } else if (walk->parsed()) {
            run.command = "walk";
            run.seed = walk_exec.seed;
            add_network_inputs(run, walk_layers);
            const auto net = ohmnet::read_network(walk_layers);
            const auto corpus =
                ohmnet::simulate_walks(net, walk_flags.resolve(walk_exec.seed, walk_exec.execution(), walk_exec.threads));
            ohmnet::write_corpus(corpus, net, prepare_out(walk_out));
            write_manifest(walk_out, run, *walk);
        } else if (train->parsed()) {
            run.command = "train";
            run.seed = train_exec.seed;
            add_network_inputs(run, train_layers);
            if (*hier_opt) run.inputs["hierarchy"] = train_hier;
            if (*walks_dir_opt) run.inputs["walks"] = train_walks_dir;
            train_cfg.seed = train_exec.seed;
            train_cfg.mode = train_exec.execution();
            train_cfg.threads = train_exec.threads;
            const auto wc = train_walk.resolve(train_exec.seed, train_exec.execution(), train_exec.threads);

            const auto net = ohmnet::read_network(train_layers);
            prepare_out(train_out);
            ohmnet::EmbeddingSet set;
            if (collapsed) {
                set = ohmnet::train_collapsed(net, wc, train_cfg);
            } else {
                const auto corpus =
                    *walks_dir_opt ? ohmnet::read_corpus(train_walks_dir, net) : ohmnet::simulate_walks(net, wc);
                if (independent) {
                    set = ohmnet::train_independent(net, corpus, train_cfg);
                } else {
                    if (!*hier_opt) throw ohmnet::Error("--hierarchy is required unless --independent or --collapsed");
                    const auto h = ohmnet::read_hierarchy(train_hier, net);
                    if (auto rep = ohmnet::validate(net, h); !rep.ok()) {
                        std::string msg = "invalid input:";
                        for (const auto& v : rep.violations) msg += "\n  " + v;
                        throw ohmnet::Error(msg);
                    }
                    ohmnet::CheckpointFn ckpt;
                    if (!train_ckpt.empty())
                        ckpt = [&](const ohmnet::EmbeddingSet& s, std::size_t it) {
                            ohmnet::write_embeddings(s, net.universe, train_ckpt / ("iter" + std::to_string(it)));
                        };
                    auto res = ohmnet::train(net, h, corpus, train_cfg, ckpt);
                    std::cout << "outer iterations: " << res.iterations << '\n';
                    set = std::move(res.embeddings);
                }
            }
            ohmnet::write_embeddings(set, net.universe, train_out);
            write_manifest(train_out, run, *train);
        } else if (eval->parsed()) {
            run.command = "eval";
            run.seed = eval_exec.seed;
            add_network_inputs(run, eval_layers);
            run.inputs["embeddings"] = eval_emb;
            run.inputs["labels"] = eval_labels;
            auto net = ohmnet::read_network(eval_layers);
            const auto labels = ohmnet::read_labels(eval_labels, net);
            const auto set = ohmnet::read_embeddings(eval_emb, net.universe);
            auto cfg = eval_clf.cfg;
            cfg.seed = eval_exec.seed;
            cfg.mode = eval_exec.execution();
            cfg.threads = eval_exec.threads;
            if (!eval_layer.empty()) {
                cfg.only_layer = net.find_layer(eval_layer);
                if (!cfg.only_layer) throw ohmnet::Error("unknown layer '" + eval_layer + "'");
            }
            const auto rep = ohmnet::cross_validate(set, net, labels, cfg);
            std::ofstream out(prepare_out(eval_out) / "report.tsv");
            ohmnet::write_report(out, rep);
            if (!out) throw ohmnet::Error("failed writing report");
            write_manifest(eval_out, run, *eval);
            std::cout << "pairs " << rep.entries.size() << " auroc median " << rep.auroc_pairs.median << " auprc median "
                      << rep.auprc_pairs.median << '\n';
        } else if (transfer->parsed()) {
            run.command = "transfer";
            run.seed = tr_exec.seed;
            add_network_inputs(run, tr_layers);
            run.inputs["hierarchy"] = tr_hier;
            run.inputs["embeddings"] = tr_emb;
            run.inputs["labels"] = tr_labels;
            auto net = ohmnet::read_network(tr_layers);
            const auto h = ohmnet::read_hierarchy(tr_hier, net);
            const auto labels = ohmnet::read_labels(tr_labels, net);
            const auto set = ohmnet::read_embeddings(tr_emb, net.universe);
            const auto target = net.find_layer(tr_target);
            if (!target) throw ohmnet::Error("unknown target layer '" + tr_target + "'");
            auto cfg = tr_clf.cfg;
            cfg.seed = tr_exec.seed;
            cfg.mode = tr_exec.execution();
            cfg.threads = tr_exec.threads;
            const auto rep = ohmnet::transfer_predict(set, net, h, labels, *target, cfg, kWeightings.at(tr_weighting));
            std::ofstream out(prepare_out(tr_out) / "report.tsv");
            ohmnet::write_report(out, rep);
            if (!out) throw ohmnet::Error("failed writing report");
            write_manifest(tr_out, run, *transfer);
            std::cout << "functions " << rep.entries.size() << " mean auroc " << rep.mean_auroc() << '\n';
        } else if (project->parsed()) {
            run.command = "project";
            run.inputs["embeddings"] = pr_emb;
            ohmnet::NodeUniverse uni;
            const auto set = ohmnet::read_embeddings(pr_emb, uni);
            const auto e = set.find(pr_element);
            if (!e) throw ohmnet::Error("no table named '" + pr_element + "'");
            const auto& table = set.input[*e];
            const auto pts = ohmnet::project_2d(table);
            prepare_out(pr_out);
            std::ofstream out(pr_out / "projection.tsv");
            for (const auto& p : pts)
                out << uni.name(p.node) << ' ' << ohmnet::detail::format_double(p.x) << ' '
                    << ohmnet::detail::format_double(p.y) << '\n';
            if (!out) throw ohmnet::Error("failed writing projection");
            ohmnet::write_table(pr_out / "vectors.emb", table, uni);
            write_manifest(pr_out, run, *project);
        }
    } catch (const std::exception& e) {
        std::cerr << "ohmnet: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
