#pragma once

#include "gevex/expr.hpp"
#include "gevex/hetgraph.hpp"
#include "gevex/tensor.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace gevex {

struct TargetConfig {
    int hidden_dim = 32;
    int num_layers = 2;
    int num_classes = 2;
    double learning_rate = 0.05;
    int epochs = 200;
    double l2 = 1e-4;
    std::uint64_t seed = 1;
};

// Frozen relational GCN: H^{l+1} = ReLU(sum_r rownorm(A_r + I) H^l W_r^l),
// readout is the center row of the last layer through a linear classifier.
struct TargetCheckpoint {
    TargetConfig config;
    int feature_dim = 0;
    int num_relations = 0;
    std::vector<std::vector<Tensor>> weights; // [layer][relation]
    Tensor w_cls;                             // hidden x classes
    Tensor b_cls;                             // 1 x classes
    std::uint64_t fingerprint = 0;

    static TargetCheckpoint init(const TargetConfig& cfg, int feature_dim, int num_relations);
};

struct TargetTrainResult {
    TargetCheckpoint checkpoint;
    std::vector<double> ce_trace; // per-epoch training cross-entropy
};

// Full-batch gradient descent on every labeled node at once. Deterministic
// for a fixed seed; epochs = 0 returns the seeded initialization.
TargetTrainResult train_target(const HetGraph& g,
                               const std::unordered_map<std::string, int>& labels,
                               const TargetConfig& cfg);

// Class probabilities for one center node given explicit per-relation
// adjacency (entries in [0,1]) and features. Built on the expression kernel,
// so the same forward is differentiable when composed into a larger graph.
std::array<double, 2> predict(const TargetCheckpoint& ckpt, const std::vector<Tensor>& adjacency,
                              const Tensor& features, int center);

std::array<double, 2> predict(const TargetCheckpoint& ckpt, const CompSubgraph& sub);

// Cross-entropy of the model's prediction for the subgraph's center against
// the given label.
double model_loss(const TargetCheckpoint& ckpt, const CompSubgraph& sub, int label);
double model_loss(const TargetCheckpoint& ckpt, const CompSubgraph& sub); // uses sub.label

// Builds the forward pass into an existing expression. `adjacency` and
// `features` are node ids inside `ex`; `selector` is a (k x n) row-selection
// matrix. Weight leaves are created on first use (shared thereafter) and
// bound into `constants`. Returns the (k x classes) logits node.
NodeId build_target_logits(Expression& ex, const TargetCheckpoint& ckpt,
                           const std::vector<NodeId>& adjacency, NodeId features,
                           NodeId selector, Bindings& constants);

std::array<double, 2> softmax_pair(double l0, double l1);

// -log p[label] with the probability clamped away from zero.
double cross_entropy_pair(const std::array<double, 2>& probs, int label);

Tensor onehot_row(int label, int classes);

} // namespace gevex
