#include "gevex/pipeline.hpp"

#include "gevex/attribution.hpp"
#include "gevex/errors.hpp"
#include "gevex/jsonio.hpp"
#include "gevex/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

using nlohmann::json;
namespace fs = std::filesystem;

namespace gevex {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::vector<MetaPathPattern> default_patterns() {
    auto C = NodeType::Company;
    auto P = NodeType::Person;
    return {
        {{C, C, C}, {"loan", "loan"}},
        {{C, C}, {"loan"}},
        {{C, C}, {"invest"}},
        {{C, C}, {"supply"}},
        {{P, C}, {"manage"}},
    };
}

MetaPathPattern pattern_from_json(const json& j) {
    check_keys(j, {"node_types", "relations"}, "patterns[]");
    MetaPathPattern p;
    if (!j.contains("node_types") || !j.contains("relations"))
        throw ConfigError("pattern needs node_types and relations");
    for (const auto& t : j.at("node_types"))
        p.node_types.push_back(node_type_from_string(t.get<std::string>()));
    for (const auto& r : j.at("relations")) p.relations.push_back(r.get<std::string>());
    p.validate();
    return p;
}

json pattern_to_json(const MetaPathPattern& p) {
    json types = json::array(), rels = json::array();
    for (auto t : p.node_types) types.push_back(node_type_to_string(t));
    for (const auto& r : p.relations) rels.push_back(r);
    return json{{"node_types", types}, {"relations", rels}};
}

void fill_default_paths(RunConfig& cfg) {
    std::string base = cfg.data_dir.empty() ? cfg.out_dir : cfg.data_dir;
    auto fill = [&](std::string& slot, const char* name) {
        if (slot.empty()) slot = base + "/" + name;
    };
    fill(cfg.data.nodes, "nodes.jsonl");
    fill(cfg.data.edges, "edges.jsonl");
    fill(cfg.data.features, "features.csv");
    fill(cfg.data.labels, "labels.jsonl");
    fill(cfg.data.splits, "splits.json");
    fill(cfg.data.ground_truth, "ground_truth.jsonl");
    fill(cfg.data.annotations, "annotations.jsonl");
}

void require_artifact(const std::string& path, const std::string& hint) {
    if (!fs::exists(path))
        throw DataError("missing '" + path + "': " + hint);
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

RunConfig parse_run_config(const json& j) {
    check_keys(j,
               {"seed", "out_dir", "data_dir", "workers", "hops", "top_m", "joint_removal", "dot",
                "data", "splits", "target", "explainer", "synth", "patterns"},
               "config");
    RunConfig cfg;
    read_into(j, "seed", cfg.seed);
    read_into(j, "out_dir", cfg.out_dir);
    read_into(j, "data_dir", cfg.data_dir);
    read_into(j, "workers", cfg.workers);
    read_into(j, "hops", cfg.hops);
    read_into(j, "top_m", cfg.top_m);
    read_into(j, "joint_removal", cfg.joint_removal);
    read_into(j, "dot", cfg.dot);
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.hops < 1) throw ConfigError("hops must be >= 1");
    if (cfg.top_m < 1) throw ConfigError("top_m must be >= 1");

    // the run seed cascades into every section unless the section pins one
    cfg.target.seed = cfg.seed;
    cfg.explainer.seed = cfg.seed;
    cfg.synth.seed = cfg.seed;

    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, {"nodes", "edges", "features", "labels", "splits", "ground_truth",
                       "annotations"},
                   "data");
        read_into(d, "nodes", cfg.data.nodes);
        read_into(d, "edges", cfg.data.edges);
        read_into(d, "features", cfg.data.features);
        read_into(d, "labels", cfg.data.labels);
        read_into(d, "splits", cfg.data.splits);
        read_into(d, "ground_truth", cfg.data.ground_truth);
        read_into(d, "annotations", cfg.data.annotations);
    }
    if (j.contains("splits")) {
        const json& s = j.at("splits");
        check_keys(s, {"max_train", "max_test"}, "splits");
        read_into(s, "max_train", cfg.splits.max_train);
        read_into(s, "max_test", cfg.splits.max_test);
        if (cfg.splits.max_train < 1 || cfg.splits.max_test < 1)
            throw ConfigError("split caps must be >= 1");
    }
    if (j.contains("target")) {
        const json& t = j.at("target");
        check_keys(t, {"hidden_dim", "num_layers", "num_classes", "learning_rate", "epochs", "l2",
                       "seed"},
                   "target");
        read_into(t, "hidden_dim", cfg.target.hidden_dim);
        read_into(t, "num_layers", cfg.target.num_layers);
        read_into(t, "num_classes", cfg.target.num_classes);
        read_into(t, "learning_rate", cfg.target.learning_rate);
        read_into(t, "epochs", cfg.target.epochs);
        read_into(t, "l2", cfg.target.l2);
        read_into(t, "seed", cfg.target.seed);
    }
    if (j.contains("explainer")) {
        const json& e = j.at("explainer");
        check_keys(e,
                   {"epochs", "learning_rate", "alpha", "beta", "gamma", "l2", "edge_budget",
                    "num_layers", "hidden_dim", "learn_loss_weights", "seed"},
                   "explainer");
        read_into(e, "epochs", cfg.explainer.epochs);
        read_into(e, "learning_rate", cfg.explainer.learning_rate);
        read_into(e, "alpha", cfg.explainer.alpha);
        read_into(e, "beta", cfg.explainer.beta);
        read_into(e, "gamma", cfg.explainer.gamma);
        read_into(e, "l2", cfg.explainer.l2);
        read_into(e, "edge_budget", cfg.explainer.edge_budget);
        read_into(e, "num_layers", cfg.explainer.num_layers);
        read_into(e, "hidden_dim", cfg.explainer.hidden_dim);
        read_into(e, "learn_loss_weights", cfg.explainer.learn_loss_weights);
        read_into(e, "seed", cfg.explainer.seed);
    }
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        check_keys(s,
                   {"num_companies", "num_persons", "num_relations", "attach_degree", "motif",
                    "motif_count", "motif_spread", "signal_dims", "noise_dims",
                    "noise_motif_edges", "label_threshold", "hot_mu", "hot_sigma",
                    "hot_min_per_motif", "decoy_count", "seed"},
                   "synth");
        read_into(s, "num_companies", cfg.synth.num_companies);
        read_into(s, "num_persons", cfg.synth.num_persons);
        read_into(s, "num_relations", cfg.synth.num_relations);
        read_into(s, "attach_degree", cfg.synth.attach_degree);
        if (s.contains("motif"))
            cfg.synth.motif = motif_kind_from_string(s.at("motif").get<std::string>());
        read_into(s, "motif_count", cfg.synth.motif_count);
        read_into(s, "motif_spread", cfg.synth.motif_spread);
        read_into(s, "signal_dims", cfg.synth.signal_dims);
        read_into(s, "noise_dims", cfg.synth.noise_dims);
        read_into(s, "noise_motif_edges", cfg.synth.noise_motif_edges);
        read_into(s, "label_threshold", cfg.synth.label_threshold);
        read_into(s, "hot_mu", cfg.synth.hot_mu);
        read_into(s, "hot_sigma", cfg.synth.hot_sigma);
        read_into(s, "hot_min_per_motif", cfg.synth.hot_min_per_motif);
        read_into(s, "decoy_count", cfg.synth.decoy_count);
        read_into(s, "seed", cfg.synth.seed);
    }
    if (j.contains("patterns")) {
        for (const auto& p : j.at("patterns")) cfg.patterns.push_back(pattern_from_json(p));
    } else {
        cfg.patterns = default_patterns();
    }
    fill_default_paths(cfg);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    json j = read_json_file(path);
    try {
        return parse_run_config(j);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json run_config_to_json(const RunConfig& cfg) {
    json pats = json::array();
    for (const auto& p : cfg.patterns) pats.push_back(pattern_to_json(p));
    return json{
        {"seed", cfg.seed},
        {"out_dir", cfg.out_dir},
        {"data_dir", cfg.data_dir},
        {"workers", cfg.workers},
        {"hops", cfg.hops},
        {"top_m", cfg.top_m},
        {"joint_removal", cfg.joint_removal},
        {"dot", cfg.dot},
        {"data",
         {{"nodes", cfg.data.nodes},
          {"edges", cfg.data.edges},
          {"features", cfg.data.features},
          {"labels", cfg.data.labels},
          {"splits", cfg.data.splits},
          {"ground_truth", cfg.data.ground_truth},
          {"annotations", cfg.data.annotations}}},
        {"splits", {{"max_train", cfg.splits.max_train}, {"max_test", cfg.splits.max_test}}},
        {"target",
         {{"hidden_dim", cfg.target.hidden_dim},
          {"num_layers", cfg.target.num_layers},
          {"num_classes", cfg.target.num_classes},
          {"learning_rate", cfg.target.learning_rate},
          {"epochs", cfg.target.epochs},
          {"l2", cfg.target.l2},
          {"seed", cfg.target.seed}}},
        {"explainer",
         {{"epochs", cfg.explainer.epochs},
          {"learning_rate", cfg.explainer.learning_rate},
          {"alpha", cfg.explainer.alpha},
          {"beta", cfg.explainer.beta},
          {"gamma", cfg.explainer.gamma},
          {"l2", cfg.explainer.l2},
          {"edge_budget", cfg.explainer.edge_budget},
          {"num_layers", cfg.explainer.num_layers},
          {"hidden_dim", cfg.explainer.hidden_dim},
          {"learn_loss_weights", cfg.explainer.learn_loss_weights},
          {"seed", cfg.explainer.seed}}},
        {"synth",
         {{"num_companies", cfg.synth.num_companies},
          {"num_persons", cfg.synth.num_persons},
          {"num_relations", cfg.synth.num_relations},
          {"attach_degree", cfg.synth.attach_degree},
          {"motif", motif_kind_to_string(cfg.synth.motif)},
          {"motif_count", cfg.synth.motif_count},
          {"motif_spread", cfg.synth.motif_spread},
          {"signal_dims", cfg.synth.signal_dims},
          {"noise_dims", cfg.synth.noise_dims},
          {"noise_motif_edges", cfg.synth.noise_motif_edges},
          {"label_threshold", cfg.synth.label_threshold},
          {"hot_mu", cfg.synth.hot_mu},
          {"hot_sigma", cfg.synth.hot_sigma},
          {"hot_min_per_motif", cfg.synth.hot_min_per_motif},
          {"decoy_count", cfg.synth.decoy_count},
          {"seed", cfg.synth.seed}}},
        {"patterns", pats}};
}

std::uint64_t run_config_hash(const RunConfig& cfg) {
    return fnv1a_str(run_config_to_json(cfg).dump());
}

Splits make_splits(const std::map<std::string, int>& labels, const SplitCaps& caps) {
    Splits s;
    int i = 0;
    for (const auto& [id, y] : labels) {
        if (y != 1) continue;
        // alternate risky nodes between the two sides, respecting the caps
        if (i % 2 == 0 && static_cast<int>(s.train.size()) < caps.max_train)
            s.train.push_back(id);
        else if (static_cast<int>(s.test.size()) < caps.max_test)
            s.test.push_back(id);
        else if (static_cast<int>(s.train.size()) < caps.max_train)
            s.train.push_back(id);
        ++i;
    }
    return s;
}

Splits load_splits(const std::string& path) {
    json j = read_json_file(path);
    check_keys(j, {"train", "test"}, "splits file");
    Splits s;
    if (!j.contains("train") || !j.contains("test"))
        throw ParseError(path + ": expected train and test arrays");
    for (const auto& v : j.at("train")) s.train.push_back(v.get<std::string>());
    for (const auto& v : j.at("test")) s.test.push_back(v.get<std::string>());
    return s;
}

void save_splits(const Splits& s, const std::string& path) {
    write_json_file(json{{"train", s.train}, {"test", s.test}}, path);
}

std::vector<CompSubgraph> build_instances(const HetGraph& g,
                                          const std::unordered_map<std::string, int>& labels,
                                          const std::vector<std::string>& ids, int hops) {
    std::vector<CompSubgraph> subs;
    subs.reserve(ids.size());
    for (const auto& id : ids) {
        CompSubgraph sub = computation_subgraph(g, id, hops);
        auto it = labels.find(id);
        if (it != labels.end()) sub.label = it->second;
        subs.push_back(std::move(sub));
    }
    return subs;
}

std::string evidence_dot(const EvidenceSubgraph& ev, const std::vector<NodeType>& node_types) {
    std::set<std::tuple<int, int, int>> kept;
    std::set<int> touched;
    for (const auto& k : ev.kept) {
        kept.insert({k.src, k.dst, k.rel});
        touched.insert(k.src);
        touched.insert(k.dst);
    }
    for (const auto& e : ev.support_edges) {
        touched.insert(e.src);
        touched.insert(e.dst);
    }
    std::string dot = "digraph evidence {\n  rankdir=LR;\n";
    for (int v : touched) {
        dot += "  \"" + ev.node_ids[v] + "\" [shape=" +
               (node_types[v] == NodeType::Company ? "box" : "ellipse");
        if (v == ev.center_local) dot += ", penwidth=2.5";
        dot += "];\n";
    }
    char buf[32];
    for (const auto& e : ev.support_edges) {
        bool is_kept = kept.count({e.src, e.dst, e.rel}) > 0;
        std::snprintf(buf, sizeof(buf), "%.3f", ev.fused_soft.at(e.src, e.dst));
        dot += "  \"" + ev.node_ids[e.src] + "\" -> \"" + ev.node_ids[e.dst] + "\" [label=\"" +
               ev.relations[e.rel] + " " + buf + "\"";
        if (!is_kept) dot += ", style=dashed, color=gray60";
        dot += "];\n";
    }
    dot += "}\n";
    return dot;
}

void cmd_synth(const RunConfig& cfg) {
    SynthResult res = generate(cfg.synth);
    save_graph(res.graph, cfg.out_dir);
    save_labels(res.labels, cfg.out_dir + "/labels.jsonl");
    save_ground_truth(res.truth, cfg.out_dir + "/ground_truth.jsonl");

    Splits splits = make_splits(res.labels, cfg.splits);
    save_splits(splits, cfg.out_dir + "/splits.json");

    // three simulated annotators who know the planted truth: each ranks the
    // center's motif partners, in an order of their own
    {
        std::ofstream out(cfg.out_dir + "/annotations.jsonl", std::ios::binary);
        if (!out) throw DataError("cannot write annotations.jsonl");
        Rng rng(cfg.seed ^ fnv1a_str("annotations"));
        for (const auto& id : splits.test) {
            auto it = res.truth.evidence_edges.find(id);
            if (it == res.truth.evidence_edges.end()) continue;
            std::set<std::string> partner_set;
            for (const auto& e : it->second) {
                if (e.src != id) partner_set.insert(e.src);
                if (e.dst != id) partner_set.insert(e.dst);
            }
            std::vector<std::string> partners(partner_set.begin(), partner_set.end());
            for (int expert = 0; expert < 3; ++expert) {
                std::vector<std::string> picks = partners;
                if (expert == 1) std::reverse(picks.begin(), picks.end());
                if (expert == 2 && picks.size() > 1 && rng.uniform() < 0.3)
                    std::swap(picks[0], picks[1]);
                json j{{"instance", id},
                       {"expert", "expert" + std::to_string(expert + 1)},
                       {"top_picks", picks}};
                out << j.dump() << "\n";
            }
        }
    }

    int risky = 0;
    for (const auto& [_, y] : res.labels) risky += y;
    std::printf("[synth] %d nodes, %zu edges, %d risky, %zu truth edges, train %zu / test %zu\n",
                res.graph.num_nodes(), res.graph.edges.size(), risky,
                res.truth.motif_edges.size(), splits.train.size(), splits.test.size());

    append_run_manifest(cfg.out_dir, "synth", run_config_hash(cfg), cfg.seed, {},
                        {"nodes.jsonl", "edges.jsonl", "features.csv", "labels.jsonl",
                         "ground_truth.jsonl", "splits.json", "annotations.jsonl"});
}

void cmd_train_target(const RunConfig& cfg) {
    require_artifact(cfg.data.nodes, "generate or point to a dataset first");
    HetGraph g = load_graph(cfg.data.nodes, cfg.data.edges, cfg.data.features);
    auto labels = load_labels(cfg.data.labels);
    TargetTrainResult res = train_target(g, labels, cfg.target);
    save_checkpoint(res.checkpoint, cfg.out_dir + "/target.json");
    write_json_file(json{{"ce_trace", res.ce_trace}}, cfg.out_dir + "/target_trace.json");

    int correct = 0, total = 0;
    for (const auto& [id, y] : labels) {
        CompSubgraph sub = computation_subgraph(g, id, cfg.hops);
        auto p = predict(res.checkpoint, sub);
        correct += ((p[1] > p[0]) == (y == 1)) ? 1 : 0;
        ++total;
    }
    std::printf("[train-target] ce %.4f -> %.4f, train accuracy %.3f (%d/%d)\n",
                res.ce_trace.front(), res.ce_trace.back(),
                static_cast<double>(correct) / total, correct, total);

    append_run_manifest(cfg.out_dir, "train-target", run_config_hash(cfg), cfg.seed,
                        {cfg.data.nodes, cfg.data.edges, cfg.data.features, cfg.data.labels},
                        {"target.json", "target_trace.json"});
}

void cmd_attribute(const RunConfig& cfg) {
    require_artifact(cfg.out_dir + "/target.json", "run train-target first");
    require_artifact(cfg.data.splits, "run synth or provide a splits file");
    HetGraph g = load_graph(cfg.data.nodes, cfg.data.edges, cfg.data.features);
    auto labels = load_labels(cfg.data.labels);
    TargetCheckpoint ckpt = load_checkpoint(cfg.out_dir + "/target.json");
    Splits splits = load_splits(cfg.data.splits);

    json records = json::array();
    for (const auto& id : splits.train) {
        CompSubgraph sub = computation_subgraph(g, id, cfg.hops);
        auto it = labels.find(id);
        if (it == labels.end()) throw DataError("train node '" + id + "' has no label");
        sub.label = it->second;
        AttributionSubgraph att =
            build_attribution_subgraph(ckpt, sub, cfg.patterns, cfg.top_m, cfg.joint_removal);

        json pats = json::array();
        for (const auto& p : cfg.patterns) pats.push_back(p.to_string());
        json contribs = json::array();
        for (const auto& c : att.contributions) {
            json path = json::array();
            for (int v : c.instance.node_ids) path.push_back(sub.node_ids[v]);
            contribs.push_back(json{{"pattern", c.pattern_index}, {"path", path},
                                    {"delta", c.delta}});
        }
        json a_att = json::array();
        for (int r = 0; r < sub.num_relations(); ++r)
            for (int i = 0; i < sub.num_nodes(); ++i)
                for (int jn = 0; jn < sub.num_nodes(); ++jn)
                    if (att.adjacency[r].at(i, jn) > 0.0)
                        a_att.push_back(json{{"src", sub.node_ids[i]},
                                             {"dst", sub.node_ids[jn]},
                                             {"rel", r},
                                             {"w", att.adjacency[r].at(i, jn)}});
        records.push_back(json{{"center", id},
                               {"warning", att.warning},
                               {"patterns", pats},
                               {"pattern_scores", att.pattern_scores},
                               {"kept", att.kept_patterns},
                               {"contributions", contribs},
                               {"a_att", a_att}});
    }
    write_json_file(records, cfg.out_dir + "/attribution.json");
    std::printf("[attribute] %zu instances, %zu patterns, top_m %d\n", records.size(),
                cfg.patterns.size(), cfg.top_m);

    append_run_manifest(cfg.out_dir, "attribute", run_config_hash(cfg), cfg.seed,
                        {cfg.data.nodes, cfg.data.edges, cfg.data.features, cfg.data.labels,
                         cfg.data.splits, "target.json"},
                        {"attribution.json"});
}

void cmd_train_explainer(const RunConfig& cfg) {
    require_artifact(cfg.out_dir + "/target.json", "run train-target first");
    require_artifact(cfg.out_dir + "/attribution.json", "run attribute first");
    HetGraph g = load_graph(cfg.data.nodes, cfg.data.edges, cfg.data.features);
    auto labels = load_labels(cfg.data.labels);
    TargetCheckpoint ckpt = load_checkpoint(cfg.out_dir + "/target.json");
    Splits splits = load_splits(cfg.data.splits);
    json att_records = read_json_file(cfg.out_dir + "/attribution.json");
    if (!att_records.is_array()) throw ParseError("attribution.json must be an array");

    std::map<std::string, const json*> by_center;
    for (const auto& rec : att_records) by_center[rec.at("center").get<std::string>()] = &rec;

    std::vector<CompSubgraph> instances = build_instances(g, labels, splits.train, cfg.hops);
    std::vector<AttributionSubgraph> atts;
    for (const auto& sub : instances) {
        if (!sub.label) throw DataError("train node '" + sub.center_id + "' has no label");
        auto it = by_center.find(sub.center_id);
        if (it == by_center.end())
            throw DataError("no attribution record for '" + sub.center_id +
                            "': run attribute first");
        std::unordered_map<std::string, int> local;
        for (int v = 0; v < sub.num_nodes(); ++v) local[sub.node_ids[v]] = v;
        AttributionSubgraph att;
        att.warning = it->second->at("warning").get<bool>();
        for (int r = 0; r < sub.num_relations(); ++r)
            att.adjacency.push_back(Tensor::zeros(sub.num_nodes(), sub.num_nodes()));
        for (const auto& e : it->second->at("a_att")) {
            auto si = local.find(e.at("src").get<std::string>());
            auto di = local.find(e.at("dst").get<std::string>());
            int r = e.at("rel").get<int>();
            if (si == local.end() || di == local.end() || r < 0 || r >= sub.num_relations())
                throw ReferentialError("attribution edge outside subgraph of '" +
                                       sub.center_id + "'");
            att.adjacency[r].at(si->second, di->second) = e.at("w").get<double>();
        }
        atts.push_back(std::move(att));
    }

    ExplainerTrainResult res = train_explainer(instances, atts, ckpt, cfg.explainer);
    save_explainer_params(res.params, cfg.out_dir + "/explainer.json");
    write_json_file(json{{"total", res.trace.total},
                         {"factual_ce", res.trace.factual_ce},
                         {"counterfactual_ce", res.trace.counterfactual_ce},
                         {"recon", res.trace.recon},
                         {"reg", res.trace.reg}},
                    cfg.out_dir + "/explainer_trace.json");
    std::printf("[train-explainer] %zu instances, loss %.4f -> %.4f, cf-ce %.4f -> %.4f\n",
                instances.size(), res.trace.total.front(), res.trace.total.back(),
                res.trace.counterfactual_ce.front(), res.trace.counterfactual_ce.back());

    append_run_manifest(cfg.out_dir, "train-explainer", run_config_hash(cfg), cfg.seed,
                        {cfg.data.nodes, cfg.data.edges, cfg.data.features, cfg.data.labels,
                         cfg.data.splits, "target.json", "attribution.json"},
                        {"explainer.json", "explainer_trace.json"});
}

void cmd_explain(const RunConfig& cfg) {
    require_artifact(cfg.out_dir + "/target.json", "run train-target first");
    require_artifact(cfg.out_dir + "/explainer.json",
                     "no trained parameters; run train-explainer first");
    HetGraph g = load_graph(cfg.data.nodes, cfg.data.edges, cfg.data.features);
    TargetCheckpoint ckpt = load_checkpoint(cfg.out_dir + "/target.json");
    ExplainerParams params = load_explainer_params(cfg.out_dir + "/explainer.json");
    Splits splits = load_splits(cfg.data.splits);

    std::vector<CompSubgraph> instances = build_instances(g, {}, splits.test, cfg.hops);
    std::vector<EvidenceSubgraph> evidences(instances.size());
    parallel_for(static_cast<int>(instances.size()), cfg.workers,
                 [&](int i) { evidences[i] = explain(instances[i], ckpt, params, cfg.explainer); });

    json out = json::array();
    std::vector<std::string> written{"evidence.json"};
    for (std::size_t i = 0; i < evidences.size(); ++i) {
        const EvidenceSubgraph& ev = evidences[i];
        json kept = json::array();
        for (const auto& k : ev.kept)
            kept.push_back(json{{"src", ev.node_ids[k.src]},
                                {"dst", ev.node_ids[k.dst]},
                                {"rel", ev.relations[k.rel]},
                                {"weight", k.weight}});
        std::vector<double> mask_cols(ev.global_mask.cols(), 0.0);
        for (int r = 0; r < ev.global_mask.rows(); ++r)
            for (int c = 0; c < ev.global_mask.cols(); ++c)
                mask_cols[c] += ev.global_mask.at(r, c) / ev.global_mask.rows();
        out.push_back(json{{"center", ev.center_id},
                           {"nodes", ev.node_ids},
                           {"support_count", ev.support_edges.size()},
                           {"kept", kept},
                           {"feature_mask_cols", mask_cols},
                           {"factual_prob", ev.factual_prob},
                           {"counterfactual_prob", ev.counterfactual_prob}});
        if (cfg.dot) {
            std::string name = "evidence_" + ev.center_id + ".dot";
            std::ofstream dotf(cfg.out_dir + "/" + name, std::ios::binary);
            if (!dotf) throw DataError("cannot write " + name);
            dotf << evidence_dot(ev, instances[i].node_types);
            written.push_back(name);
        }
    }
    write_json_file(out, cfg.out_dir + "/evidence.json");
    std::printf("[explain] %zu instances, budget %d%s\n", instances.size(),
                cfg.explainer.edge_budget, cfg.dot ? ", dot files written" : "");

    append_run_manifest(cfg.out_dir, "explain", run_config_hash(cfg), cfg.seed,
                        {cfg.data.nodes, cfg.data.edges, cfg.data.features, cfg.data.splits,
                         "target.json", "explainer.json"},
                        written);
}

void cmd_evaluate(const RunConfig& cfg) {
    require_artifact(cfg.out_dir + "/target.json", "run train-target first");
    require_artifact(cfg.out_dir + "/explainer.json",
                     "no trained parameters; run train-explainer first");
    HetGraph g = load_graph(cfg.data.nodes, cfg.data.edges, cfg.data.features);
    auto labels = load_labels(cfg.data.labels);
    TargetCheckpoint ckpt = load_checkpoint(cfg.out_dir + "/target.json");
    ExplainerParams params = load_explainer_params(cfg.out_dir + "/explainer.json");
    Splits splits = load_splits(cfg.data.splits);

    std::vector<CompSubgraph> instances = build_instances(g, labels, splits.test, cfg.hops);

    AnnotationSet ann;
    bool have_ann = fs::exists(cfg.data.annotations);
    if (have_ann) ann = load_annotations(cfg.data.annotations);
    MetricsReport rep =
        evaluate_explainer(instances, ckpt, params, cfg.explainer, have_ann ? &ann : nullptr);

    json report{{"num_instances", instances.size()},
                {"fid_plus", rep.fid_plus},
                {"fid_minus", rep.fid_minus},
                {"charact", rep.charact ? json(*rep.charact) : json(nullptr)},
                {"gef", rep.gef},
                {"ror", rep.ror ? json(*rep.ror) : json(nullptr)},
                {"fleiss_kappa", rep.fleiss ? json(*rep.fleiss) : json(nullptr)}};

    if (fs::exists(cfg.data.ground_truth)) {
        GroundTruth truth = load_ground_truth(cfg.data.ground_truth);
        std::vector<double> aucs(instances.size(), -1.0), precs(instances.size(), -1.0);
        parallel_for(static_cast<int>(instances.size()), cfg.workers, [&](int i) {
            const auto& sub = instances[i];
            auto it = truth.evidence_edges.find(sub.center_id);
            if (it == truth.evidence_edges.end()) return;
            EvidenceSubgraph ev = explain(sub, ckpt, params, cfg.explainer);
            aucs[i] = explanation_edge_auc(ev, truth);
            int k = static_cast<int>(truth.evidence_dims.at(sub.center_id).size());
            precs[i] = feature_precision_at_k(ev, truth, k);
        });
        double auc = 0.0, prec = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < aucs.size(); ++i) {
            if (aucs[i] < 0.0) continue;
            auc += aucs[i];
            prec += precs[i];
            ++n;
        }
        if (n > 0) {
            report["mean_edge_auc"] = auc / n;
            report["feature_precision"] = prec / n;
        }
    }

    json recs = json::array();
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const auto& r = rep.records[i];
        recs.push_back(json{{"id", r.instance_id},
                            {"y", r.y},
                            {"y_orig", r.y_orig},
                            {"y_sub", r.y_sub},
                            {"y_comp", r.y_comp},
                            {"p_orig", r.p_orig},
                            {"p_sub", r.p_sub},
                            {"p_comp", r.p_comp},
                            {"pick", rep.algo_picks[i]}});
    }
    report["instances"] = recs;
    write_json_file(report, cfg.out_dir + "/report.json");
    std::printf("[evaluate] fid+ %.3f, fid- %.3f, gef %.4f%s\n", rep.fid_plus, rep.fid_minus,
                rep.gef, rep.ror ? ", with annotations" : "");

    append_run_manifest(cfg.out_dir, "evaluate", run_config_hash(cfg), cfg.seed,
                        {cfg.data.nodes, cfg.data.edges, cfg.data.features, cfg.data.labels,
                         cfg.data.splits, "target.json", "explainer.json"},
                        {"report.json"});
}

double cmd_gradcheck(const RunConfig& cfg, double step) {
    // bundled probe fixture: 5 nodes, 2 relations, 6 features, hidden 4
    const int n = 5, nrel = 2, d = 6, h = 4;
    Rng rng(cfg.seed);

    CompSubgraph sub;
    sub.center_id = "n0";
    sub.center_local = 0;
    sub.hops = 2;
    for (int i = 0; i < n; ++i) {
        sub.orig_index.push_back(i);
        sub.node_ids.push_back("n" + std::to_string(i));
        sub.node_types.push_back(NodeType::Company);
    }
    sub.relations = {"r0", "r1"};
    for (int r = 0; r < nrel; ++r) {
        Tensor a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && rng.uniform() < 0.4) a.at(i, j) = 1.0;
        sub.adjacency.push_back(std::move(a));
    }
    Tensor x(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) x.at(i, j) = rng.normal();
    sub.features = std::move(x);
    sub.label = 1;
    sub.rebuild_edges_from_adjacency();

    TargetConfig tcfg;
    tcfg.hidden_dim = h;
    tcfg.seed = cfg.seed + 1;
    TargetCheckpoint ckpt = TargetCheckpoint::init(tcfg, d, nrel);

    AttributionSubgraph att;
    for (int r = 0; r < nrel; ++r) {
        Tensor a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (sub.adjacency[r].at(i, j) > 0.0) a.at(i, j) = rng.uniform();
        att.adjacency.push_back(std::move(a));
    }

    ExplainerConfig ecfg = cfg.explainer;
    ecfg.hidden_dim = h;
    TrainingGraph tg = build_training_graph(sub, ckpt, att, ecfg);
    ExplainerParams params = ExplainerParams::init(d, h, nrel, ecfg.num_layers, ecfg.seed);

    Bindings bindings = tg.constants;
    Bindings pb = params.to_bindings(ecfg.learn_loss_weights);
    bindings.insert(pb.begin(), pb.end());

    double err = finite_diff_check(tg.ex, bindings, tg.wrt, step);
    std::printf("[gradcheck] %zu parameter tensors, max relative error %.3e\n", tg.wrt.size(),
                err);
    if (!(err < 1e-4))
        throw NumericError("gradient check failed: max relative error " + std::to_string(err));
    return err;
}

} // namespace gevex
