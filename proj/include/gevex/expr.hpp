#pragma once

#include "gevex/tensor.hpp"

#include <map>
#include <string>
#include <vector>

namespace gevex {

// A static DAG of tensor operations with known shapes. Leaves are named and
// bound at evaluation time; everything else is one of a small set of
// primitives. Reverse-mode gradients are available for scalar (1x1) roots.
//
// Node ids are indices into the node table; operands always precede their
// consumers, so insertion order is a topological order.

enum class Op {
    Leaf,
    Matmul,
    Add,
    Hadamard,
    ConcatCols,
    Relu,
    Sigmoid,
    RowNormalize,
    Transpose,
    ScalarMul,
    SoftmaxCrossEntropy,
    MeanSquaredError,
    ReduceSum,
};

enum class LeafKind { Input, Param };

using NodeId = int;

struct Node {
    Op op;
    NodeId a = -1, b = -1;
    double scalar = 0.0; // ScalarMul only
    int rows = 0, cols = 0;
    std::string name; // leaves only
    LeafKind leaf_kind = LeafKind::Input;
};

using Bindings = std::map<std::string, Tensor>;

class Expression {
public:
    NodeId input(const std::string& name, int rows, int cols);
    NodeId param(const std::string& name, int rows, int cols);

    NodeId matmul(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);
    NodeId hadamard(NodeId a, NodeId b);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId relu(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId row_normalize(NodeId a);
    NodeId transpose(NodeId a);
    NodeId scalar_mul(NodeId a, double c);
    NodeId softmax_cross_entropy(NodeId logits, NodeId targets);
    NodeId mean_squared_error(NodeId a, NodeId b);
    NodeId reduce_sum(NodeId a);

    void set_root(NodeId r);
    NodeId root() const;

    // Tag a node so evaluate/gradients report its value alongside the root.
    void mark(const std::string& tag, NodeId n);

    const Node& node(NodeId id) const { return nodes_[id]; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::map<std::string, NodeId>& leaves() const { return leaf_ids_; }
    const std::map<std::string, NodeId>& marks() const { return marks_; }

private:
    friend struct Evaluator;
    NodeId push(Node n);
    NodeId leaf(const std::string& name, int rows, int cols, LeafKind kind);
    void check_id(NodeId id, const char* op) const;

    std::vector<Node> nodes_;
    std::map<std::string, NodeId> leaf_ids_;
    std::map<std::string, NodeId> marks_;
    NodeId root_ = -1;
};

struct EvalResult {
    Tensor value;
    std::map<std::string, Tensor> marked;
};

struct GradResult {
    Tensor value; // root value (1x1)
    std::map<std::string, Tensor> grads;
    std::map<std::string, Tensor> marked;
};

Tensor evaluate(const Expression& expr, const Bindings& bindings);
EvalResult evaluate_all(const Expression& expr, const Bindings& bindings);

// Reverse-mode gradients of a scalar root with respect to the named leaves.
GradResult gradients(const Expression& expr, const Bindings& bindings,
                     const std::vector<std::string>& wrt);

// Central-difference check of gradients(); returns the maximum relative error
// across every entry of every listed leaf. Relative error uses
// |analytic - numeric| / max(|analytic| + |numeric|, 1e-6).
double finite_diff_check(const Expression& expr, const Bindings& bindings,
                         const std::vector<std::string>& wrt, double step);

} // namespace gevex
