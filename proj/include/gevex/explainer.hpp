#pragma once

#include "gevex/attribution.hpp"
#include "gevex/expr.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/target_model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gevex {

struct ExplainerConfig {
    int epochs = 200;
    double learning_rate = 0.0015;
    double alpha = 1.0; // factual cross-entropy weight
    double beta = 1.0;  // reconstruction weight
    double gamma = 1.0; // counterfactual cross-entropy weight
    double l2 = 1e-5;
    int edge_budget = 25;
    int num_layers = 2; // masked layers; the architecture is two-layer
    int hidden_dim = 32;
    bool learn_loss_weights = false;
    std::uint64_t seed = 7;
};

// Trainable state: per-relation encoder weights plus one d x d feature-mask
// matrix per layer. The target model's weights never live here.
struct ExplainerParams {
    int feature_dim = 0;
    int hidden_dim = 0;
    int num_relations = 0;
    int num_layers = 2;
    std::vector<Tensor> enc_w0; // per relation, d x h
    std::vector<Tensor> enc_w1; // per relation, h x h
    std::vector<Tensor> mask_m; // per layer, d x d
    std::array<double, 3> loss_weights{1.0, 1.0, 1.0}; // used when learned
    bool trained = false;

    static ExplainerParams init(int feature_dim, int hidden_dim, int num_relations,
                                int num_layers, std::uint64_t seed);
    Bindings to_bindings(bool learn_loss_weights) const;
    std::vector<std::string> names(bool learn_loss_weights) const;
};

// --- value-level building blocks -------------------------------------------

// sigmoid(X_s * M_l), entries strictly inside (0,1)
Tensor layer_feature_mask(const Tensor& xs, const Tensor& m);

// Two-layer masked encoder for one relation. The first mask gates the input
// features; the second is pushed through the same hidden map and gates the
// layer-1 output.
Tensor encode_relation(const Tensor& adjacency, const Tensor& xs, const Tensor& xm0,
                       const Tensor& xm1, const Tensor& w0, const Tensor& w1);

// elementwise sum of per-relation embeddings
Tensor fuse_global(const std::vector<Tensor>& z_r);

// sigmoid([Z_r | Z] [Z_r | Z]^T); exactly symmetric
Tensor decode_relation(const Tensor& zr, const Tensor& z);

// mean over per-relation reconstructed adjacencies
Tensor fuse_adjacency(const std::vector<Tensor>& a_r);

// (masked features X^, global mask M*): both are means over the layer masks
std::pair<Tensor, Tensor> global_feature_mask(const Tensor& xs,
                                              const std::vector<Tensor>& layer_masks);

struct ForwardProbs {
    std::array<double, 2> factual;       // soft-masked edges, masked features
    std::array<double, 2> edges_only;    // soft-masked edges, original features
    std::array<double, 2> features_only; // original edges, masked features
    std::array<double, 2> counterfactual; // soft complements of both
};

ForwardProbs factual_counterfactual_forward(const TargetCheckpoint& ckpt,
                                            const CompSubgraph& sub, const Tensor& ahat,
                                            const Tensor& xhat, const Tensor& mstar);

// --- training --------------------------------------------------------------

// Full joint loss and every probe the trainer needs, assembled once per
// instance and re-evaluated with fresh parameter bindings each epoch.
struct TrainingGraph {
    Expression ex;
    Bindings constants; // instance tensors + frozen target weights
    std::vector<std::string> wrt;
    int support_count = 0;
};

TrainingGraph build_training_graph(const CompSubgraph& sub, const TargetCheckpoint& ckpt,
                                   const AttributionSubgraph& att, const ExplainerConfig& cfg);

double total_loss(const CompSubgraph& sub, const TargetCheckpoint& ckpt,
                  const AttributionSubgraph& att, const ExplainerConfig& cfg,
                  const ExplainerParams& params);

struct ExplainTrainTrace {
    std::vector<double> total;             // epochs + 1 entries
    std::vector<double> factual_ce;
    std::vector<double> counterfactual_ce;
    std::vector<double> recon;
    std::vector<double> reg;
};

struct ExplainerTrainResult {
    ExplainerParams params;
    ExplainTrainTrace trace;
};

ExplainerTrainResult train_explainer(const std::vector<CompSubgraph>& instances,
                                     const std::vector<AttributionSubgraph>& attributions,
                                     const TargetCheckpoint& ckpt, const ExplainerConfig& cfg);

// --- evidence --------------------------------------------------------------

struct KeptEdge {
    int src, dst, rel; // local indices
    double weight;
};

struct EvidenceSubgraph {
    std::string center_id;
    int center_local = -1;
    std::vector<std::string> node_ids;
    std::vector<std::string> relations;
    std::vector<CompSubgraph::Edge> support_edges;
    std::vector<KeptEdge> kept;        // weight descending, ties by (src,dst,rel)
    Tensor fused_soft;                 // n x n soft adjacency
    std::vector<Tensor> relation_soft; // per-relation decoder outputs
    std::vector<Tensor> layer_masks;
    Tensor global_mask;     // M*, n x d
    Tensor masked_features; // X^, n x d
    std::array<double, 2> factual_prob{};        // hard evidence subgraph
    std::array<double, 2> counterfactual_prob{}; // hard complement
};

// Forward-only extraction; never touches the parameters. Edge scores come
// from the fused soft adjacency restricted to the subgraph's edge support.
EvidenceSubgraph explain(const CompSubgraph& sub, const TargetCheckpoint& ckpt,
                         const ExplainerParams& params, const ExplainerConfig& cfg);

// --- hard subgraph helpers (shared with metric evaluation) ------------------

Tensor binarize_mask(const Tensor& m); // entry > 0.5 -> 1 else 0

std::vector<Tensor> hard_kept_adjacency(const CompSubgraph& sub,
                                        const std::vector<KeptEdge>& kept);
std::vector<Tensor> hard_complement_adjacency(const CompSubgraph& sub,
                                              const std::vector<KeptEdge>& kept);

} // namespace gevex
