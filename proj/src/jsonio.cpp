#include "gevex/jsonio.hpp"

#include "gevex/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using nlohmann::json;

namespace gevex {

namespace {

constexpr const char* kVersion = "0.1.0";

std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

json parse_or_throw(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

} // namespace

json tensor_to_json(const Tensor& t) {
    json j;
    j["shape"] = {t.rows(), t.cols()};
    j["data"] = t.vec();
    return j;
}

Tensor tensor_from_json(const json& j) {
    if (!j.is_object() || !j.contains("shape") || !j.contains("data") ||
        !j["shape"].is_array() || j["shape"].size() != 2 || !j["data"].is_array())
        throw ParseError("tensor json must be {\"shape\":[r,c],\"data\":[...]}");
    int r = j["shape"][0].get<int>();
    int c = j["shape"][1].get<int>();
    std::vector<double> data;
    data.reserve(j["data"].size());
    for (const auto& v : j["data"]) {
        if (!v.is_number()) throw ParseError("tensor data must be numbers");
        data.push_back(v.get<double>());
    }
    if (r < 0 || c < 0 || static_cast<std::size_t>(r) * c != data.size())
        throw DimensionError("tensor shape " + std::to_string(r) + "x" + std::to_string(c) +
                             " disagrees with " + std::to_string(data.size()) + " entries");
    return Tensor(r, c, std::move(data));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_or_throw(text, path);
}

void write_json_file(const json& j, const std::string& path) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    if (!out) throw DataError("short write to '" + path + "'");
}

void save_checkpoint(const TargetCheckpoint& ckpt, const std::string& path) {
    json j;
    j["kind"] = "target-checkpoint";
    j["config"] = {{"hidden_dim", ckpt.config.hidden_dim},
                   {"num_layers", ckpt.config.num_layers},
                   {"num_classes", ckpt.config.num_classes},
                   {"learning_rate", ckpt.config.learning_rate},
                   {"epochs", ckpt.config.epochs},
                   {"l2", ckpt.config.l2},
                   {"seed", ckpt.config.seed}};
    j["feature_dim"] = ckpt.feature_dim;
    j["num_relations"] = ckpt.num_relations;
    json layers = json::array();
    for (const auto& layer : ckpt.weights) {
        json rels = json::array();
        for (const auto& w : layer) rels.push_back(tensor_to_json(w));
        layers.push_back(rels);
    }
    j["weights"] = layers;
    j["w_cls"] = tensor_to_json(ckpt.w_cls);
    j["b_cls"] = tensor_to_json(ckpt.b_cls);
    j["fingerprint"] = ckpt.fingerprint;
    write_json_file(j, path);
}

TargetCheckpoint load_checkpoint(const std::string& path) {
    json j = read_json_file(path);
    if (!j.is_object() || j.value("kind", "") != "target-checkpoint")
        throw ParseError(path + ": not a target checkpoint file");
    TargetCheckpoint ckpt;
    try {
        const json& c = j.at("config");
        ckpt.config.hidden_dim = c.at("hidden_dim").get<int>();
        ckpt.config.num_layers = c.at("num_layers").get<int>();
        ckpt.config.num_classes = c.at("num_classes").get<int>();
        ckpt.config.learning_rate = c.at("learning_rate").get<double>();
        ckpt.config.epochs = c.at("epochs").get<int>();
        ckpt.config.l2 = c.at("l2").get<double>();
        ckpt.config.seed = c.at("seed").get<std::uint64_t>();
        ckpt.feature_dim = j.at("feature_dim").get<int>();
        ckpt.num_relations = j.at("num_relations").get<int>();
        for (const auto& layer : j.at("weights")) {
            std::vector<Tensor> rels;
            for (const auto& w : layer) rels.push_back(tensor_from_json(w));
            ckpt.weights.push_back(std::move(rels));
        }
        ckpt.w_cls = tensor_from_json(j.at("w_cls"));
        ckpt.b_cls = tensor_from_json(j.at("b_cls"));
        ckpt.fingerprint = j.at("fingerprint").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (static_cast<int>(ckpt.weights.size()) != ckpt.config.num_layers)
        throw DimensionError(path + ": layer count disagrees with config");
    for (const auto& layer : ckpt.weights)
        if (static_cast<int>(layer.size()) != ckpt.num_relations)
            throw DimensionError(path + ": relation count disagrees with config");
    return ckpt;
}

void save_explainer_params(const ExplainerParams& params, const std::string& path) {
    json j;
    j["kind"] = "explainer-params";
    j["feature_dim"] = params.feature_dim;
    j["hidden_dim"] = params.hidden_dim;
    j["num_relations"] = params.num_relations;
    j["num_layers"] = params.num_layers;
    json w0 = json::array(), w1 = json::array(), masks = json::array();
    for (const auto& t : params.enc_w0) w0.push_back(tensor_to_json(t));
    for (const auto& t : params.enc_w1) w1.push_back(tensor_to_json(t));
    for (const auto& t : params.mask_m) masks.push_back(tensor_to_json(t));
    j["enc_w0"] = w0;
    j["enc_w1"] = w1;
    j["mask_m"] = masks;
    j["loss_weights"] = params.loss_weights;
    j["trained"] = params.trained;
    write_json_file(j, path);
}

ExplainerParams load_explainer_params(const std::string& path) {
    json j = read_json_file(path);
    if (!j.is_object() || j.value("kind", "") != "explainer-params")
        throw ParseError(path + ": not an explainer params file");
    ExplainerParams p;
    try {
        p.feature_dim = j.at("feature_dim").get<int>();
        p.hidden_dim = j.at("hidden_dim").get<int>();
        p.num_relations = j.at("num_relations").get<int>();
        p.num_layers = j.at("num_layers").get<int>();
        for (const auto& t : j.at("enc_w0")) p.enc_w0.push_back(tensor_from_json(t));
        for (const auto& t : j.at("enc_w1")) p.enc_w1.push_back(tensor_from_json(t));
        for (const auto& t : j.at("mask_m")) p.mask_m.push_back(tensor_from_json(t));
        auto lw = j.at("loss_weights");
        for (std::size_t i = 0; i < 3 && i < lw.size(); ++i)
            p.loss_weights[i] = lw[i].get<double>();
        p.trained = j.at("trained").get<bool>();
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (static_cast<int>(p.enc_w0.size()) != p.num_relations ||
        static_cast<int>(p.enc_w1.size()) != p.num_relations ||
        static_cast<int>(p.mask_m.size()) != p.num_layers)
        throw DimensionError(path + ": tensor counts disagree with header fields");
    return p;
}

void save_graph(const HetGraph& g, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir + "/nodes.jsonl");
        for (const auto& n : g.nodes) {
            json j{{"id", n.id}, {"type", node_type_to_string(n.type)}};
            out << j.dump() << "\n";
        }
    }
    {
        auto out = open_out(dir + "/edges.jsonl");
        for (const auto& e : g.edges) {
            json j{{"src", g.nodes[e.src].id},
                   {"dst", g.nodes[e.dst].id},
                   {"rel", g.relations[e.rel]}};
            out << j.dump() << "\n";
        }
    }
    {
        auto out = open_out(dir + "/features.csv");
        for (std::size_t i = 0; i < g.feature_names.size(); ++i)
            out << (i ? "," : "") << g.feature_names[i];
        out << "\n";
        char buf[40];
        for (int i = 0; i < g.num_nodes(); ++i) {
            for (int j = 0; j < g.feature_dim(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", g.features.at(i, j));
                out << (j ? "," : "") << buf;
            }
            out << "\n";
        }
    }
}

void save_labels(const std::map<std::string, int>& labels, const std::string& path) {
    auto out = open_out(path);
    for (const auto& [id, y] : labels) {
        json j{{"id", id}, {"label", y}};
        out << j.dump() << "\n";
    }
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
    auto out = open_out(path);
    for (const auto& [id, edges] : truth.evidence_edges) {
        json ev = json::array();
        for (const auto& e : edges) ev.push_back(json::array({e.src, e.dst, e.rel}));
        json dims = json::array();
        auto dit = truth.evidence_dims.find(id);
        if (dit != truth.evidence_dims.end())
            for (int dim : dit->second) dims.push_back(dim);
        json j{{"id", id}, {"evidence_edges", ev}, {"evidence_dims", dims}};
        out << j.dump() << "\n";
    }
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    GroundTruth truth;
    std::set<EdgeTriple> all;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json j = parse_or_throw(line, path + " line " + std::to_string(lineno));
        if (!j.contains("id") || !j.contains("evidence_edges") || !j.contains("evidence_dims"))
            throw ParseError(path + " line " + std::to_string(lineno) +
                             ": expected id, evidence_edges, evidence_dims");
        std::string id = j["id"].get<std::string>();
        std::vector<EdgeTriple> edges;
        for (const auto& e : j["evidence_edges"]) {
            if (!e.is_array() || e.size() != 3)
                throw ParseError(path + " line " + std::to_string(lineno) +
                                 ": evidence edge must be [src,dst,rel]");
            EdgeTriple t{e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<int>()};
            all.insert(t);
            edges.push_back(std::move(t));
        }
        std::vector<int> dims;
        for (const auto& v : j["evidence_dims"]) dims.push_back(v.get<int>());
        truth.evidence_edges[id] = std::move(edges);
        truth.evidence_dims[id] = std::move(dims);
    }
    truth.motif_edges.assign(all.begin(), all.end());
    return truth;
}

void append_run_manifest(const std::string& out_dir, const std::string& command,
                         std::uint64_t config_hash, std::uint64_t seed,
                         const std::vector<std::string>& inputs,
                         const std::vector<std::string>& outputs) {
    std::string path = out_dir + "/run-manifest.json";
    json manifest = json::array();
    if (std::filesystem::exists(path)) {
        manifest = read_json_file(path);
        if (!manifest.is_array()) throw ParseError(path + ": manifest must be an array");
    }
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, config_hash);
    manifest.push_back(json{{"command", command},
                            {"config_hash", hash},
                            {"seed", seed},
                            {"inputs", inputs},
                            {"outputs", outputs},
                            {"version", kVersion}});
    write_json_file(manifest, path);
}

} // namespace gevex
