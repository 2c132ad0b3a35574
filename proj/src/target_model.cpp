#include "gevex/target_model.hpp"

#include "gevex/errors.hpp"
#include "gevex/rng.hpp"

#include <algorithm>
#include <cmath>

namespace gevex {

namespace {

Tensor uniform_init(int rows, int cols, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(rows));
    std::vector<double> data(static_cast<std::size_t>(rows) * cols);
    for (auto& x : data) x = rng.uniform(-bound, bound);
    return Tensor(rows, cols, std::move(data));
}

// find-or-create an input leaf so repeated forwards share weights
NodeId shared_input(Expression& ex, const std::string& name, const Tensor& value,
                    Bindings& constants) {
    auto it = ex.leaves().find(name);
    if (it != ex.leaves().end()) return it->second;
    NodeId id = ex.input(name, value.rows(), value.cols());
    constants[name] = value;
    return id;
}

} // namespace

TargetCheckpoint TargetCheckpoint::init(const TargetConfig& cfg, int feature_dim,
                                        int num_relations) {
    if (cfg.num_layers < 1) throw ConfigError("target model needs at least one layer");
    if (cfg.num_classes != 2) throw ConfigError("target model is binary; num_classes must be 2");
    if (cfg.hidden_dim < 1) throw ConfigError("target hidden_dim must be positive");
    if (num_relations < 1) throw ConfigError("target model needs at least one relation");

    TargetCheckpoint ckpt;
    ckpt.config = cfg;
    ckpt.feature_dim = feature_dim;
    ckpt.num_relations = num_relations;
    Rng rng(cfg.seed);
    ckpt.weights.resize(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l) {
        int in = l == 0 ? feature_dim : cfg.hidden_dim;
        for (int r = 0; r < num_relations; ++r)
            ckpt.weights[l].push_back(uniform_init(in, cfg.hidden_dim, rng));
    }
    ckpt.w_cls = uniform_init(cfg.hidden_dim, cfg.num_classes, rng);
    ckpt.b_cls = Tensor(1, cfg.num_classes);
    return ckpt;
}

NodeId build_target_logits(Expression& ex, const TargetCheckpoint& ckpt,
                           const std::vector<NodeId>& adjacency, NodeId features,
                           NodeId selector, Bindings& constants) {
    if (static_cast<int>(adjacency.size()) != ckpt.num_relations)
        throw ShapeError("build_target_logits: expected " + std::to_string(ckpt.num_relations) +
                         " adjacency nodes, got " + std::to_string(adjacency.size()));
    int n = ex.node(features).rows;
    NodeId eye = shared_input(ex, "tgt_eye", Tensor::identity(n), constants);

    // normalized adjacency per relation, shared across repeated forwards is
    // not possible here because the adjacency nodes differ per forward
    std::vector<NodeId> norm;
    for (NodeId a : adjacency) norm.push_back(ex.row_normalize(ex.add(a, eye)));

    NodeId h = features;
    for (int l = 0; l < ckpt.config.num_layers; ++l) {
        NodeId acc = -1;
        for (int r = 0; r < ckpt.num_relations; ++r) {
            std::string wname = "tgt_w_l" + std::to_string(l) + "_r" + std::to_string(r);
            NodeId w = shared_input(ex, wname, ckpt.weights[l][r], constants);
            NodeId term = ex.matmul(ex.matmul(norm[r], h), w);
            acc = acc < 0 ? term : ex.add(acc, term);
        }
        h = ex.relu(acc);
    }

    NodeId w_cls = shared_input(ex, "tgt_w_cls", ckpt.w_cls, constants);
    NodeId b_cls = shared_input(ex, "tgt_b_cls", ckpt.b_cls, constants);
    NodeId picked = ex.matmul(selector, h); // k x hidden
    NodeId logits = ex.matmul(picked, w_cls);
    int k = ex.node(selector).rows;
    NodeId ones_k = shared_input(ex, "tgt_ones_" + std::to_string(k), Tensor::ones(k, 1), constants);
    return ex.add(logits, ex.matmul(ones_k, b_cls));
}

namespace {

void validate_predict_inputs(const TargetCheckpoint& ckpt, const std::vector<Tensor>& adjacency,
                             const Tensor& features, int center) {
    int n = features.rows();
    if (features.cols() != ckpt.feature_dim)
        throw ShapeError("predict: features have " + std::to_string(features.cols()) +
                         " dims, checkpoint expects " + std::to_string(ckpt.feature_dim));
    if (static_cast<int>(adjacency.size()) != ckpt.num_relations)
        throw ShapeError("predict: " + std::to_string(adjacency.size()) +
                         " adjacency matrices for " + std::to_string(ckpt.num_relations) +
                         " relations");
    for (const auto& a : adjacency) {
        if (a.rows() != n || a.cols() != n)
            throw ShapeError("predict: adjacency shape " + a.shape_str() + " for " +
                             std::to_string(n) + " nodes");
        for (double v : a.vec())
            if (v < 0.0 || v > 1.0)
                throw DataError("predict: adjacency entry " + std::to_string(v) +
                                " outside [0,1]");
    }
    if (center < 0 || center >= n)
        throw ShapeError("predict: center index " + std::to_string(center) + " out of range");
}

} // namespace

std::array<double, 2> predict(const TargetCheckpoint& ckpt, const std::vector<Tensor>& adjacency,
                              const Tensor& features, int center) {
    validate_predict_inputs(ckpt, adjacency, features, center);
    int n = features.rows();

    Expression ex;
    Bindings binds;
    std::vector<NodeId> adj_nodes;
    for (int r = 0; r < ckpt.num_relations; ++r) {
        adj_nodes.push_back(ex.input("adj_r" + std::to_string(r), n, n));
        binds["adj_r" + std::to_string(r)] = adjacency[r];
    }
    NodeId feats = ex.input("features", n, features.cols());
    binds["features"] = features;
    NodeId sel = ex.input("selector", 1, n);
    Tensor s(1, n);
    s.at(0, center) = 1.0;
    binds["selector"] = s;

    NodeId logits = build_target_logits(ex, ckpt, adj_nodes, feats, sel, binds);
    ex.set_root(logits);
    Tensor out = evaluate(ex, binds);
    return softmax_pair(out.at(0, 0), out.at(0, 1));
}

std::array<double, 2> predict(const TargetCheckpoint& ckpt, const CompSubgraph& sub) {
    return predict(ckpt, sub.adjacency, sub.features, sub.center_local);
}

double model_loss(const TargetCheckpoint& ckpt, const CompSubgraph& sub, int label) {
    if (label != 0 && label != 1)
        throw DataError("model_loss: label must be 0 or 1");
    auto p = predict(ckpt, sub);
    return cross_entropy_pair(p, label);
}

double model_loss(const TargetCheckpoint& ckpt, const CompSubgraph& sub) {
    if (!sub.label)
        throw DataError("model_loss: subgraph for '" + sub.center_id + "' carries no label");
    return model_loss(ckpt, sub, *sub.label);
}

std::array<double, 2> softmax_pair(double l0, double l1) {
    double m = std::max(l0, l1);
    double e0 = std::exp(l0 - m);
    double e1 = std::exp(l1 - m);
    double z = e0 + e1;
    return {e0 / z, e1 / z};
}

double cross_entropy_pair(const std::array<double, 2>& probs, int label) {
    double p = probs[label == 0 ? 0 : 1];
    return -std::log(std::max(p, 1e-12));
}

Tensor onehot_row(int label, int classes) {
    Tensor t(1, classes);
    t.at(0, label) = 1.0;
    return t;
}

TargetTrainResult train_target(const HetGraph& g,
                               const std::unordered_map<std::string, int>& labels,
                               const TargetConfig& cfg) {
    if (labels.empty()) throw DataError("train_target: no labels");
    std::vector<std::pair<int, int>> labeled; // (node index, label)
    bool saw0 = false, saw1 = false;
    for (const auto& [id, y] : labels) {
        labeled.emplace_back(g.index_of(id), y);
        (y == 0 ? saw0 : saw1) = true;
    }
    if (!saw0 || !saw1) throw DataError("train_target: labels contain a single class");
    std::sort(labeled.begin(), labeled.end());

    int n = g.num_nodes();
    int d = g.feature_dim();
    int R = g.num_relations();
    int k = static_cast<int>(labeled.size());

    TargetCheckpoint ckpt = TargetCheckpoint::init(cfg, d, R);

    Expression ex;
    Bindings binds;
    std::vector<NodeId> adj_nodes;
    std::vector<Tensor> adjacency(R, Tensor(n, n));
    for (const auto& e : g.edges) adjacency[e.rel].at(e.src, e.dst) = 1.0;
    for (int r = 0; r < R; ++r) {
        adj_nodes.push_back(ex.input("adj_r" + std::to_string(r), n, n));
        binds["adj_r" + std::to_string(r)] = adjacency[r];
    }
    NodeId feats = ex.input("features", n, d);
    binds["features"] = g.features;

    Tensor sel(k, n), targets(k, cfg.num_classes);
    for (int i = 0; i < k; ++i) {
        sel.at(i, labeled[i].first) = 1.0;
        targets.at(i, labeled[i].second) = 1.0;
    }
    NodeId sel_node = ex.input("selector", k, n);
    binds["selector"] = sel;
    NodeId tgt_node = ex.input("targets", k, cfg.num_classes);
    binds["targets"] = targets;

    // swap the weights to trainable params: build with placeholder inputs
    // first, then rebuild leaf kinds is not possible, so declare params ahead
    // of the shared-input lookup inside build_target_logits.
    std::vector<std::string> param_names;
    for (int l = 0; l < cfg.num_layers; ++l)
        for (int r = 0; r < R; ++r) {
            std::string name = "tgt_w_l" + std::to_string(l) + "_r" + std::to_string(r);
            ex.param(name, l == 0 ? d : cfg.hidden_dim, cfg.hidden_dim);
            param_names.push_back(name);
        }
    ex.param("tgt_w_cls", cfg.hidden_dim, cfg.num_classes);
    param_names.push_back("tgt_w_cls");
    ex.param("tgt_b_cls", 1, cfg.num_classes);
    param_names.push_back("tgt_b_cls");

    NodeId logits = build_target_logits(ex, ckpt, adj_nodes, feats, sel_node, binds);
    NodeId ce = ex.softmax_cross_entropy(logits, tgt_node);
    ex.mark("ce", ce);
    NodeId loss = ce;
    if (cfg.l2 > 0.0) {
        NodeId reg = -1;
        for (const auto& name : param_names) {
            NodeId w = ex.leaves().at(name);
            NodeId sq = ex.reduce_sum(ex.hadamard(w, w));
            reg = reg < 0 ? sq : ex.add(reg, sq);
        }
        loss = ex.add(ce, ex.scalar_mul(reg, cfg.l2));
    }
    ex.set_root(loss);

    auto bind_params = [&](const TargetCheckpoint& c) {
        for (int l = 0; l < cfg.num_layers; ++l)
            for (int r = 0; r < R; ++r)
                binds["tgt_w_l" + std::to_string(l) + "_r" + std::to_string(r)] = c.weights[l][r];
        binds["tgt_w_cls"] = c.w_cls;
        binds["tgt_b_cls"] = c.b_cls;
    };

    TargetTrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        bind_params(ckpt);
        GradResult gr;
        try {
            gr = gradients(ex, binds, param_names);
        } catch (const NumericError& e) {
            throw NumericError("train_target: diverged at epoch " + std::to_string(epoch) + ": " +
                               e.what());
        }
        result.ce_trace.push_back(gr.marked.at("ce").at(0, 0));
        auto step = [&](Tensor& w, const std::string& name) {
            const Tensor& gw = gr.grads.at(name);
            for (std::size_t i = 0; i < w.size(); ++i)
                w.data()[i] -= cfg.learning_rate * gw.vec()[i];
        };
        for (int l = 0; l < cfg.num_layers; ++l)
            for (int r = 0; r < R; ++r)
                step(ckpt.weights[l][r], "tgt_w_l" + std::to_string(l) + "_r" + std::to_string(r));
        step(ckpt.w_cls, "tgt_w_cls");
        step(ckpt.b_cls, "tgt_b_cls");
    }
    if (cfg.epochs > 0) {
        bind_params(ckpt);
        EvalResult fin = evaluate_all(ex, binds);
        result.ce_trace.push_back(fin.marked.at("ce").at(0, 0));
    }

    // fingerprint of what was trained on
    std::uint64_t h = fnv1a_str("target/" + std::to_string(n) + "/" + std::to_string(R) + "/" +
                                std::to_string(d));
    for (const auto& [idx, y] : labeled)
        h = fnv1a_str(g.nodes[idx].id + ":" + std::to_string(y), h);
    h = fnv1a_str(std::to_string(cfg.hidden_dim) + "/" + std::to_string(cfg.num_layers) + "/" +
                      std::to_string(cfg.learning_rate) + "/" + std::to_string(cfg.epochs) + "/" +
                      std::to_string(cfg.l2) + "/" + std::to_string(cfg.seed),
                  h);
    ckpt.fingerprint = h;
    result.checkpoint = std::move(ckpt);
    return result;
}

} // namespace gevex
