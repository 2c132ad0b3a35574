#include "gevex/explainer.hpp"

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

// Shared expression fragments so the standalone ops and the training graph
// cannot drift apart.

NodeId build_layer_mask(Expression& ex, NodeId xs, NodeId m) {
    return ex.sigmoid(ex.matmul(xs, m));
}

NodeId build_encode_relation(Expression& ex, NodeId anorm, NodeId xs, NodeId xm0, NodeId xm1,
                             NodeId w0, NodeId w1) {
    NodeId h1 = ex.relu(ex.matmul(ex.matmul(anorm, ex.hadamard(xs, xm0)), w0));
    // second mask travels through the same hidden map and gates layer 1
    NodeId gate = ex.matmul(ex.matmul(anorm, xm1), w0);
    return ex.relu(ex.matmul(ex.matmul(anorm, ex.hadamard(h1, gate)), w1));
}

NodeId build_decode_relation(Expression& ex, NodeId zr, NodeId z) {
    NodeId zp = ex.concat_cols(zr, z);
    return ex.sigmoid(ex.matmul(zp, ex.transpose(zp)));
}

struct GeneratorNodes {
    std::vector<NodeId> as;  // adjacency leaves
    std::vector<NodeId> a_r; // decoder outputs
    NodeId xs = -1, xm0 = -1, xm1 = -1, ahat = -1, mstar = -1, xhat = -1;
};

// Declares the explainer parameter leaves and instance-tensor leaves, builds
// masks, encoder, decoder and the fused outputs.
GeneratorNodes build_generator(Expression& ex, Bindings& constants, const CompSubgraph& sub,
                               int hidden_dim) {
    int n = sub.num_nodes();
    int d = sub.features.cols();
    int R = sub.num_relations();

    GeneratorNodes g;
    g.xs = ex.input("xs", n, d);
    constants["xs"] = sub.features;
    NodeId eye = ex.input("eye", n, n);
    constants["eye"] = Tensor::identity(n);

    NodeId m0 = ex.param("exp_m0", d, d);
    NodeId m1 = ex.param("exp_m1", d, d);
    g.xm0 = build_layer_mask(ex, g.xs, m0);
    g.xm1 = build_layer_mask(ex, g.xs, m1);

    std::vector<NodeId> z_r;
    for (int r = 0; r < R; ++r) {
        NodeId a = ex.input("as_r" + std::to_string(r), n, n);
        constants["as_r" + std::to_string(r)] = sub.adjacency[r];
        g.as.push_back(a);
        NodeId anorm = ex.row_normalize(ex.add(a, eye));
        NodeId w0 = ex.param("exp_w0_r" + std::to_string(r), d, hidden_dim);
        NodeId w1 = ex.param("exp_w1_r" + std::to_string(r), hidden_dim, hidden_dim);
        z_r.push_back(build_encode_relation(ex, anorm, g.xs, g.xm0, g.xm1, w0, w1));
    }
    NodeId z = z_r[0];
    for (int r = 1; r < R; ++r) z = ex.add(z, z_r[r]);

    NodeId asum = -1;
    for (int r = 0; r < R; ++r) {
        NodeId ar = build_decode_relation(ex, z_r[r], z);
        g.a_r.push_back(ar);
        asum = asum < 0 ? ar : ex.add(asum, ar);
    }
    g.ahat = ex.scalar_mul(asum, 1.0 / R);

    g.mstar = ex.scalar_mul(ex.add(g.xm0, g.xm1), 0.5);
    g.xhat = ex.scalar_mul(ex.add(ex.hadamard(g.xs, g.xm0), ex.hadamard(g.xs, g.xm1)), 0.5);
    return g;
}

void validate_params(const ExplainerParams& p, const CompSubgraph& sub,
                     const ExplainerConfig& cfg) {
    if (p.num_layers != 2 || cfg.num_layers != 2)
        throw ConfigError("the explainer is two-layer; num_layers must be 2");
    if (p.feature_dim != sub.features.cols())
        throw ShapeError("explainer params built for " + std::to_string(p.feature_dim) +
                         "-dim features, subgraph has " + std::to_string(sub.features.cols()));
    if (p.num_relations != sub.num_relations())
        throw ShapeError("explainer params built for " + std::to_string(p.num_relations) +
                         " relations, subgraph has " + std::to_string(sub.num_relations()));
}

} // namespace

ExplainerParams ExplainerParams::init(int feature_dim, int hidden_dim, int num_relations,
                                      int num_layers, std::uint64_t seed) {
    if (num_layers != 2) throw ConfigError("the explainer is two-layer; num_layers must be 2");
    if (feature_dim < 1 || hidden_dim < 1 || num_relations < 1)
        throw ConfigError("explainer dims must be positive");
    ExplainerParams p;
    p.feature_dim = feature_dim;
    p.hidden_dim = hidden_dim;
    p.num_relations = num_relations;
    p.num_layers = num_layers;
    Rng rng(seed);
    for (int r = 0; r < num_relations; ++r) p.enc_w0.push_back(uniform_init(feature_dim, hidden_dim, rng));
    for (int r = 0; r < num_relations; ++r) p.enc_w1.push_back(uniform_init(hidden_dim, hidden_dim, rng));
    for (int l = 0; l < num_layers; ++l) p.mask_m.push_back(uniform_init(feature_dim, feature_dim, rng));
    return p;
}

Bindings ExplainerParams::to_bindings(bool learn_loss_weights) const {
    Bindings b;
    for (int r = 0; r < num_relations; ++r) {
        b["exp_w0_r" + std::to_string(r)] = enc_w0[r];
        b["exp_w1_r" + std::to_string(r)] = enc_w1[r];
    }
    for (int l = 0; l < num_layers; ++l) b["exp_m" + std::to_string(l)] = mask_m[l];
    if (learn_loss_weights) {
        b["exp_alpha"] = Tensor(1, 1, {loss_weights[0]});
        b["exp_beta"] = Tensor(1, 1, {loss_weights[1]});
        b["exp_gamma"] = Tensor(1, 1, {loss_weights[2]});
    }
    return b;
}

std::vector<std::string> ExplainerParams::names(bool learn_loss_weights) const {
    std::vector<std::string> out;
    for (int r = 0; r < num_relations; ++r) {
        out.push_back("exp_w0_r" + std::to_string(r));
        out.push_back("exp_w1_r" + std::to_string(r));
    }
    for (int l = 0; l < num_layers; ++l) out.push_back("exp_m" + std::to_string(l));
    if (learn_loss_weights) {
        out.push_back("exp_alpha");
        out.push_back("exp_beta");
        out.push_back("exp_gamma");
    }
    return out;
}

// --- value-level ops --------------------------------------------------------

Tensor layer_feature_mask(const Tensor& xs, const Tensor& m) {
    if (xs.cols() != m.rows() || m.rows() != m.cols())
        throw ShapeError("layer_feature_mask: mask must be d x d for d-dim features");
    Expression ex;
    NodeId x = ex.input("xs", xs.rows(), xs.cols());
    NodeId mm = ex.input("m", m.rows(), m.cols());
    ex.set_root(build_layer_mask(ex, x, mm));
    return evaluate(ex, {{"xs", xs}, {"m", m}});
}

Tensor encode_relation(const Tensor& adjacency, const Tensor& xs, const Tensor& xm0,
                       const Tensor& xm1, const Tensor& w0, const Tensor& w1) {
    int n = xs.rows();
    if (adjacency.rows() != n || adjacency.cols() != n)
        throw ShapeError("encode_relation: adjacency must be n x n");
    Expression ex;
    NodeId a = ex.input("a", n, n);
    NodeId eye = ex.input("eye", n, n);
    NodeId x = ex.input("xs", n, xs.cols());
    NodeId n0 = ex.input("xm0", xm0.rows(), xm0.cols());
    NodeId n1 = ex.input("xm1", xm1.rows(), xm1.cols());
    NodeId p0 = ex.input("w0", w0.rows(), w0.cols());
    NodeId p1 = ex.input("w1", w1.rows(), w1.cols());
    NodeId anorm = ex.row_normalize(ex.add(a, eye));
    ex.set_root(build_encode_relation(ex, anorm, x, n0, n1, p0, p1));
    return evaluate(ex, {{"a", adjacency},
                         {"eye", Tensor::identity(n)},
                         {"xs", xs},
                         {"xm0", xm0},
                         {"xm1", xm1},
                         {"w0", w0},
                         {"w1", w1}});
}

Tensor fuse_global(const std::vector<Tensor>& z_r) {
    if (z_r.empty()) throw ShapeError("fuse_global: no embeddings");
    Tensor out = z_r[0];
    for (std::size_t r = 1; r < z_r.size(); ++r) {
        if (!out.same_shape(z_r[r])) throw ShapeError("fuse_global: shape mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += z_r[r].vec()[i];
    }
    return out;
}

Tensor decode_relation(const Tensor& zr, const Tensor& z) {
    Expression ex;
    NodeId a = ex.input("zr", zr.rows(), zr.cols());
    NodeId b = ex.input("z", z.rows(), z.cols());
    ex.set_root(build_decode_relation(ex, a, b));
    return evaluate(ex, {{"zr", zr}, {"z", z}});
}

Tensor fuse_adjacency(const std::vector<Tensor>& a_r) {
    if (a_r.empty()) throw ShapeError("fuse_adjacency: no adjacencies");
    Tensor out = a_r[0];
    for (std::size_t r = 1; r < a_r.size(); ++r) {
        if (!out.same_shape(a_r[r])) throw ShapeError("fuse_adjacency: shape mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += a_r[r].vec()[i];
    }
    double inv = 1.0 / static_cast<double>(a_r.size());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= inv;
    return out;
}

std::pair<Tensor, Tensor> global_feature_mask(const Tensor& xs,
                                              const std::vector<Tensor>& layer_masks) {
    if (layer_masks.empty()) throw ShapeError("global_feature_mask: no layer masks");
    Tensor mstar(xs.rows(), xs.cols());
    for (const auto& m : layer_masks) {
        if (!m.same_shape(xs)) throw ShapeError("global_feature_mask: mask shape mismatch");
        for (std::size_t i = 0; i < mstar.size(); ++i) mstar.data()[i] += m.vec()[i];
    }
    double inv = 1.0 / static_cast<double>(layer_masks.size());
    for (std::size_t i = 0; i < mstar.size(); ++i) mstar.data()[i] *= inv;
    Tensor xhat(xs.rows(), xs.cols());
    for (std::size_t i = 0; i < xhat.size(); ++i) xhat.data()[i] = xs.vec()[i] * mstar.vec()[i];
    return {xhat, mstar};
}

ForwardProbs factual_counterfactual_forward(const TargetCheckpoint& ckpt,
                                            const CompSubgraph& sub, const Tensor& ahat,
                                            const Tensor& xhat, const Tensor& mstar) {
    int n = sub.num_nodes();
    if (ahat.rows() != n || ahat.cols() != n)
        throw ShapeError("factual_counterfactual_forward: soft adjacency must be n x n");
    int R = sub.num_relations();
    std::vector<Tensor> masked(R, Tensor(n, n)), comp(R, Tensor(n, n));
    for (int r = 0; r < R; ++r)
        for (std::size_t i = 0; i < ahat.size(); ++i) {
            double a = sub.adjacency[r].vec()[i];
            masked[r].data()[i] = a * ahat.vec()[i];
            comp[r].data()[i] = a * (1.0 - ahat.vec()[i]);
        }
    Tensor comp_feat(n, sub.features.cols());
    for (std::size_t i = 0; i < comp_feat.size(); ++i)
        comp_feat.data()[i] = sub.features.vec()[i] * (1.0 - mstar.vec()[i]);

    ForwardProbs out;
    out.factual = predict(ckpt, masked, xhat, sub.center_local);
    out.edges_only = predict(ckpt, masked, sub.features, sub.center_local);
    out.features_only = predict(ckpt, sub.adjacency, xhat, sub.center_local);
    out.counterfactual = predict(ckpt, comp, comp_feat, sub.center_local);
    return out;
}

// --- training graph ----------------------------------------------------------

TrainingGraph build_training_graph(const CompSubgraph& sub, const TargetCheckpoint& ckpt,
                                   const AttributionSubgraph& att, const ExplainerConfig& cfg) {
    if (!sub.label)
        throw DataError("build_training_graph: subgraph for '" + sub.center_id +
                        "' carries no label");
    if (static_cast<int>(att.adjacency.size()) != sub.num_relations())
        throw ShapeError("attribution has " + std::to_string(att.adjacency.size()) +
                         " relations, subgraph has " + std::to_string(sub.num_relations()));
    if (ckpt.feature_dim != sub.features.cols())
        throw ShapeError("target checkpoint feature dim mismatch");

    TrainingGraph tg;
    Expression& ex = tg.ex;
    int n = sub.num_nodes();
    int d = sub.features.cols();
    int R = sub.num_relations();
    int y = *sub.label;

    GeneratorNodes g = build_generator(ex, tg.constants, sub, cfg.hidden_dim);

    NodeId ones_nn = ex.input("ones_nn", n, n);
    tg.constants["ones_nn"] = Tensor::ones(n, n);
    NodeId ones_nd = ex.input("ones_nd", n, d);
    tg.constants["ones_nd"] = Tensor::ones(n, d);
    NodeId sel = ex.input("sel_center", 1, n);
    Tensor s(1, n);
    s.at(0, sub.center_local) = 1.0;
    tg.constants["sel_center"] = s;
    NodeId y_true = ex.input("y_onehot", 1, 2);
    tg.constants["y_onehot"] = onehot_row(y, 2);
    NodeId y_flip = ex.input("y_flipped", 1, 2);
    tg.constants["y_flipped"] = onehot_row(1 - y, 2);

    std::vector<NodeId> masked_adj, comp_adj;
    for (int r = 0; r < R; ++r) {
        masked_adj.push_back(ex.hadamard(g.as[r], g.ahat));
        comp_adj.push_back(
            ex.hadamard(g.as[r], ex.add(ones_nn, ex.scalar_mul(g.ahat, -1.0))));
    }
    NodeId comp_feat = ex.hadamard(g.xs, ex.add(ones_nd, ex.scalar_mul(g.mstar, -1.0)));

    NodeId log_fact = build_target_logits(ex, ckpt, masked_adj, g.xhat, sel, tg.constants);
    NodeId log_edges = build_target_logits(ex, ckpt, masked_adj, g.xs, sel, tg.constants);
    NodeId log_feats = build_target_logits(ex, ckpt, g.as, g.xhat, sel, tg.constants);
    NodeId log_cf = build_target_logits(ex, ckpt, comp_adj, comp_feat, sel, tg.constants);

    NodeId ce_fact = ex.add(ex.add(ex.softmax_cross_entropy(log_fact, y_true),
                                   ex.softmax_cross_entropy(log_edges, y_true)),
                            ex.softmax_cross_entropy(log_feats, y_true));
    NodeId ce_cf = ex.softmax_cross_entropy(log_cf, y_flip);

    tg.support_count = static_cast<int>(sub.edges.size());
    NodeId recon = -1;
    if (tg.support_count > 0) {
        for (int r = 0; r < R; ++r) {
            NodeId sup = ex.input("sup_r" + std::to_string(r), n, n);
            Tensor mask(n, n);
            for (std::size_t i = 0; i < mask.size(); ++i)
                mask.data()[i] = sub.adjacency[r].vec()[i] != 0.0 ? 1.0 : 0.0;
            tg.constants["sup_r" + std::to_string(r)] = mask;
            NodeId aatt = ex.input("aatt_r" + std::to_string(r), n, n);
            tg.constants["aatt_r" + std::to_string(r)] = att.adjacency[r];
            NodeId diff = ex.hadamard(ex.add(g.ahat, ex.scalar_mul(aatt, -1.0)), sup);
            NodeId term = ex.reduce_sum(ex.hadamard(diff, diff));
            recon = recon < 0 ? term : ex.add(recon, term);
        }
        recon = ex.scalar_mul(recon, 1.0 / tg.support_count);
    }

    ExplainerParams shape_only; // only for the name list
    shape_only.num_relations = R;
    shape_only.num_layers = cfg.num_layers;
    tg.wrt = shape_only.names(cfg.learn_loss_weights);

    NodeId reg = -1;
    for (int r = 0; r < R; ++r) {
        NodeId w0 = ex.leaves().at("exp_w0_r" + std::to_string(r));
        NodeId w1 = ex.leaves().at("exp_w1_r" + std::to_string(r));
        NodeId t = ex.add(ex.reduce_sum(ex.hadamard(w0, w0)), ex.reduce_sum(ex.hadamard(w1, w1)));
        reg = reg < 0 ? t : ex.add(reg, t);
    }
    for (int l = 0; l < cfg.num_layers; ++l) {
        NodeId m = ex.leaves().at("exp_m" + std::to_string(l));
        reg = ex.add(reg, ex.reduce_sum(ex.hadamard(m, m)));
    }
    reg = ex.scalar_mul(reg, cfg.l2);

    NodeId loss;
    if (cfg.learn_loss_weights) {
        NodeId alpha = ex.param("exp_alpha", 1, 1);
        NodeId beta = ex.param("exp_beta", 1, 1);
        NodeId gamma = ex.param("exp_gamma", 1, 1);
        loss = ex.hadamard(alpha, ce_fact);
        if (recon >= 0) loss = ex.add(loss, ex.hadamard(beta, recon));
        loss = ex.add(loss, ex.hadamard(gamma, ce_cf));
    } else {
        loss = ex.scalar_mul(ce_fact, cfg.alpha);
        if (recon >= 0) loss = ex.add(loss, ex.scalar_mul(recon, cfg.beta));
        loss = ex.add(loss, ex.scalar_mul(ce_cf, cfg.gamma));
    }
    loss = ex.add(loss, reg);
    ex.set_root(loss);

    ex.mark("loss", loss);
    ex.mark("ce_factual", ce_fact);
    ex.mark("ce_cf", ce_cf);
    if (recon >= 0) ex.mark("recon", recon);
    ex.mark("reg", reg);
    ex.mark("ahat", g.ahat);
    ex.mark("mstar", g.mstar);
    ex.mark("xhat", g.xhat);
    ex.mark("log_fact", log_fact);
    ex.mark("log_cf", log_cf);
    return tg;
}

double total_loss(const CompSubgraph& sub, const TargetCheckpoint& ckpt,
                  const AttributionSubgraph& att, const ExplainerConfig& cfg,
                  const ExplainerParams& params) {
    validate_params(params, sub, cfg);
    TrainingGraph tg = build_training_graph(sub, ckpt, att, cfg);
    Bindings binds = tg.constants;
    for (auto& [k, v] : params.to_bindings(cfg.learn_loss_weights)) binds[k] = v;
    return evaluate(tg.ex, binds).at(0, 0);
}

ExplainerTrainResult train_explainer(const std::vector<CompSubgraph>& instances,
                                     const std::vector<AttributionSubgraph>& attributions,
                                     const TargetCheckpoint& ckpt, const ExplainerConfig& cfg) {
    if (instances.empty()) throw DataError("train_explainer: no training instances");
    if (instances.size() != attributions.size())
        throw DataError("train_explainer: " + std::to_string(instances.size()) +
                        " instances but " + std::to_string(attributions.size()) +
                        " attribution subgraphs");
    int d = instances[0].features.cols();
    int R = instances[0].num_relations();
    for (const auto& sub : instances) {
        if (sub.features.cols() != d || sub.num_relations() != R)
            throw ShapeError("train_explainer: instances disagree on dims/relations");
        if (!sub.label) throw DataError("train_explainer: unlabeled instance '" + sub.center_id + "'");
    }

    ExplainerParams params = ExplainerParams::init(d, cfg.hidden_dim, R, cfg.num_layers, cfg.seed);

    std::vector<TrainingGraph> graphs;
    graphs.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i)
        graphs.push_back(build_training_graph(instances[i], ckpt, attributions[i], cfg));
    const auto& wrt = graphs[0].wrt;

    double inv_n = 1.0 / static_cast<double>(instances.size());
    ExplainerTrainResult result;

    auto accumulate_trace = [&](double tot, double fce, double cce, double rec, double rg,
                                bool fresh) {
        auto& t = result.trace;
        if (fresh) {
            t.total.push_back(0.0);
            t.factual_ce.push_back(0.0);
            t.counterfactual_ce.push_back(0.0);
            t.recon.push_back(0.0);
            t.reg.push_back(0.0);
        }
        t.total.back() += tot * inv_n;
        t.factual_ce.back() += fce * inv_n;
        t.counterfactual_ce.back() += cce * inv_n;
        t.recon.back() += rec * inv_n;
        t.reg.back() += rg * inv_n;
    };

    // mean losses over the training set at the current parameters
    auto record_trace = [&]() {
        Bindings pbinds = params.to_bindings(cfg.learn_loss_weights);
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            Bindings binds = graphs[i].constants;
            for (const auto& [k, v] : pbinds) binds[k] = v;
            EvalResult er = evaluate_all(graphs[i].ex, binds);
            accumulate_trace(er.value.at(0, 0), er.marked.at("ce_factual").at(0, 0),
                             er.marked.at("ce_cf").at(0, 0),
                             er.marked.count("recon") ? er.marked.at("recon").at(0, 0) : 0.0,
                             er.marked.at("reg").at(0, 0), i == 0);
        }
    };

    // one gradient step per instance per epoch, in instance order
    record_trace();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            Bindings binds = graphs[i].constants;
            Bindings pbinds = params.to_bindings(cfg.learn_loss_weights);
            for (auto& [k, v] : pbinds) binds[k] = std::move(v);
            GradResult gr;
            try {
                gr = gradients(graphs[i].ex, binds, wrt);
            } catch (const NumericError& e) {
                throw NumericError("train_explainer: epoch " + std::to_string(epoch) +
                                   ", instance '" + instances[i].center_id + "': " + e.what());
            }
            auto apply = [&](Tensor& w, const std::string& name) {
                const Tensor& gw = gr.grads.at(name);
                for (std::size_t k = 0; k < w.size(); ++k)
                    w.data()[k] -= cfg.learning_rate * gw.vec()[k];
            };
            for (int r = 0; r < R; ++r) {
                apply(params.enc_w0[r], "exp_w0_r" + std::to_string(r));
                apply(params.enc_w1[r], "exp_w1_r" + std::to_string(r));
            }
            for (int l = 0; l < cfg.num_layers; ++l)
                apply(params.mask_m[l], "exp_m" + std::to_string(l));
            if (cfg.learn_loss_weights) {
                params.loss_weights[0] -= cfg.learning_rate * gr.grads.at("exp_alpha").at(0, 0);
                params.loss_weights[1] -= cfg.learning_rate * gr.grads.at("exp_beta").at(0, 0);
                params.loss_weights[2] -= cfg.learning_rate * gr.grads.at("exp_gamma").at(0, 0);
            }
        }
        record_trace();
    }

    params.trained = true;
    result.params = std::move(params);
    return result;
}

// --- evidence ----------------------------------------------------------------

EvidenceSubgraph explain(const CompSubgraph& sub, const TargetCheckpoint& ckpt,
                         const ExplainerParams& params, const ExplainerConfig& cfg) {
    if (!params.trained)
        throw ConfigError("explain called with untrained explainer parameters");
    validate_params(params, sub, cfg);
    if (cfg.edge_budget < 1) throw ConfigError("edge_budget must be >= 1");

    Expression ex;
    Bindings constants;
    GeneratorNodes g = build_generator(ex, constants, sub, cfg.hidden_dim);
    ex.set_root(g.ahat);
    ex.mark("mstar", g.mstar);
    ex.mark("xhat", g.xhat);
    ex.mark("xm0", g.xm0);
    ex.mark("xm1", g.xm1);
    for (std::size_t r = 0; r < g.a_r.size(); ++r)
        ex.mark("a_r" + std::to_string(r), g.a_r[r]);

    Bindings binds = constants;
    for (auto& [k, v] : params.to_bindings(false)) binds[k] = v;
    EvalResult er = evaluate_all(ex, binds);

    EvidenceSubgraph ev;
    ev.center_id = sub.center_id;
    ev.center_local = sub.center_local;
    ev.node_ids = sub.node_ids;
    ev.relations = sub.relations;
    ev.support_edges = sub.edges;
    ev.fused_soft = er.value;
    for (std::size_t r = 0; r < g.a_r.size(); ++r)
        ev.relation_soft.push_back(er.marked.at("a_r" + std::to_string(r)));
    ev.layer_masks = {er.marked.at("xm0"), er.marked.at("xm1")};
    ev.global_mask = er.marked.at("mstar");
    ev.masked_features = er.marked.at("xhat");

    // rank support edges by the fused soft score
    std::vector<KeptEdge> cand;
    cand.reserve(sub.edges.size());
    for (const auto& e : sub.edges)
        cand.push_back({e.src, e.dst, e.rel, ev.fused_soft.at(e.src, e.dst)});
    std::sort(cand.begin(), cand.end(), [](const KeptEdge& a, const KeptEdge& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.src != b.src) return a.src < b.src;
        if (a.dst != b.dst) return a.dst < b.dst;
        return a.rel < b.rel;
    });
    int k = std::min<int>(cfg.edge_budget, static_cast<int>(cand.size()));
    ev.kept.assign(cand.begin(), cand.begin() + k);

    // hard evidence predictions
    Tensor bin = binarize_mask(ev.global_mask);
    Tensor feat_kept(sub.features.rows(), sub.features.cols());
    Tensor feat_drop(sub.features.rows(), sub.features.cols());
    for (std::size_t i = 0; i < feat_kept.size(); ++i) {
        feat_kept.data()[i] = sub.features.vec()[i] * bin.vec()[i];
        feat_drop.data()[i] = sub.features.vec()[i] * (1.0 - bin.vec()[i]);
    }
    ev.factual_prob = predict(ckpt, hard_kept_adjacency(sub, ev.kept), feat_kept, sub.center_local);
    ev.counterfactual_prob =
        predict(ckpt, hard_complement_adjacency(sub, ev.kept), feat_drop, sub.center_local);
    return ev;
}

Tensor binarize_mask(const Tensor& m) {
    Tensor out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) out.data()[i] = m.vec()[i] > 0.5 ? 1.0 : 0.0;
    return out;
}

std::vector<Tensor> hard_kept_adjacency(const CompSubgraph& sub,
                                        const std::vector<KeptEdge>& kept) {
    int n = sub.num_nodes();
    std::vector<Tensor> adj(sub.num_relations(), Tensor(n, n));
    for (const auto& e : kept) adj[e.rel].at(e.src, e.dst) = 1.0;
    return adj;
}

std::vector<Tensor> hard_complement_adjacency(const CompSubgraph& sub,
                                              const std::vector<KeptEdge>& kept) {
    std::vector<Tensor> adj = sub.adjacency; // support entries are exactly 0/1
    for (const auto& e : kept) adj[e.rel].at(e.src, e.dst) = 0.0;
    return adj;
}

} // namespace gevex
