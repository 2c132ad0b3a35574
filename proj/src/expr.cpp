#include "gevex/expr.hpp"

#include "gevex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace gevex {

namespace {

const char* op_name(Op op) {
    switch (op) {
        case Op::Leaf: return "leaf";
        case Op::Matmul: return "matmul";
        case Op::Add: return "add";
        case Op::Hadamard: return "hadamard";
        case Op::ConcatCols: return "concat-cols";
        case Op::Relu: return "relu";
        case Op::Sigmoid: return "sigmoid";
        case Op::RowNormalize: return "row-normalize";
        case Op::Transpose: return "transpose";
        case Op::ScalarMul: return "scalar-multiply";
        case Op::SoftmaxCrossEntropy: return "softmax-cross-entropy";
        case Op::MeanSquaredError: return "mean-squared-error";
        case Op::ReduceSum: return "reduce-sum";
    }
    return "?";
}

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// C (m x n) += A (m x k) * B (k x n). Accumulation order over k is ascending
// for every output entry, which makes A * A^T exactly symmetric.
void mm_nn(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            double av = arow[kk];
            if (av == 0.0) continue; // adding an exact zero never changes bits
            const double* brow = b + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C (m x n) += A (m x k) * B^T, B stored (n x k)
void mm_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = b + static_cast<std::size_t>(j) * k;
            double s = 0.0;
            for (int kk = 0; kk < k; ++kk) s += arow[kk] * brow[kk];
            crow[j] += s;
        }
    }
}

// C (k x n) += A^T * B, A stored (m x k), B stored (m x n)
void mm_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        const double* brow = b + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            double av = arow[kk];
            if (av == 0.0) continue;
            double* crow = c + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

} // namespace

NodeId Expression::push(Node n) {
    nodes_.push_back(std::move(n));
    root_ = static_cast<NodeId>(nodes_.size()) - 1;
    return root_;
}

void Expression::check_id(NodeId id, const char* op) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
        throw ShapeError(std::string(op) + ": operand id out of range");
}

NodeId Expression::leaf(const std::string& name, int rows, int cols, LeafKind kind) {
    if (rows <= 0 || cols <= 0)
        throw ShapeError("leaf '" + name + "' must have positive shape");
    if (leaf_ids_.count(name))
        throw ShapeError("duplicate leaf name '" + name + "'");
    Node n;
    n.op = Op::Leaf;
    n.rows = rows;
    n.cols = cols;
    n.name = name;
    n.leaf_kind = kind;
    NodeId id = push(std::move(n));
    leaf_ids_[name] = id;
    return id;
}

NodeId Expression::input(const std::string& name, int rows, int cols) {
    return leaf(name, rows, cols, LeafKind::Input);
}

NodeId Expression::param(const std::string& name, int rows, int cols) {
    return leaf(name, rows, cols, LeafKind::Param);
}

NodeId Expression::matmul(NodeId a, NodeId b) {
    check_id(a, "matmul");
    check_id(b, "matmul");
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.cols != nb.rows)
        throw ShapeError("matmul: inner dimensions disagree, (" + std::to_string(na.rows) +
                         "," + std::to_string(na.cols) + ") x (" + std::to_string(nb.rows) +
                         "," + std::to_string(nb.cols) + ")");
    Node n;
    n.op = Op::Matmul;
    n.a = a;
    n.b = b;
    n.rows = na.rows;
    n.cols = nb.cols;
    return push(std::move(n));
}

NodeId Expression::add(NodeId a, NodeId b) {
    check_id(a, "add");
    check_id(b, "add");
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.rows != nb.rows || na.cols != nb.cols)
        throw ShapeError("add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.rows = na.rows;
    n.cols = na.cols;
    return push(std::move(n));
}

NodeId Expression::hadamard(NodeId a, NodeId b) {
    check_id(a, "hadamard");
    check_id(b, "hadamard");
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.rows != nb.rows || na.cols != nb.cols)
        throw ShapeError("hadamard: shape mismatch");
    Node n;
    n.op = Op::Hadamard;
    n.a = a;
    n.b = b;
    n.rows = na.rows;
    n.cols = na.cols;
    return push(std::move(n));
}

NodeId Expression::concat_cols(NodeId a, NodeId b) {
    check_id(a, "concat-cols");
    check_id(b, "concat-cols");
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.rows != nb.rows)
        throw ShapeError("concat-cols: row counts disagree");
    Node n;
    n.op = Op::ConcatCols;
    n.a = a;
    n.b = b;
    n.rows = na.rows;
    n.cols = na.cols + nb.cols;
    return push(std::move(n));
}

NodeId Expression::relu(NodeId a) {
    check_id(a, "relu");
    Node n;
    n.op = Op::Relu;
    n.a = a;
    n.rows = nodes_[a].rows;
    n.cols = nodes_[a].cols;
    return push(std::move(n));
}

NodeId Expression::sigmoid(NodeId a) {
    check_id(a, "sigmoid");
    Node n;
    n.op = Op::Sigmoid;
    n.a = a;
    n.rows = nodes_[a].rows;
    n.cols = nodes_[a].cols;
    return push(std::move(n));
}

NodeId Expression::row_normalize(NodeId a) {
    check_id(a, "row-normalize");
    Node n;
    n.op = Op::RowNormalize;
    n.a = a;
    n.rows = nodes_[a].rows;
    n.cols = nodes_[a].cols;
    return push(std::move(n));
}

NodeId Expression::transpose(NodeId a) {
    check_id(a, "transpose");
    Node n;
    n.op = Op::Transpose;
    n.a = a;
    n.rows = nodes_[a].cols;
    n.cols = nodes_[a].rows;
    return push(std::move(n));
}

NodeId Expression::scalar_mul(NodeId a, double c) {
    check_id(a, "scalar-multiply");
    if (!std::isfinite(c))
        throw NumericError("scalar-multiply with non-finite constant");
    Node n;
    n.op = Op::ScalarMul;
    n.a = a;
    n.scalar = c;
    n.rows = nodes_[a].rows;
    n.cols = nodes_[a].cols;
    return push(std::move(n));
}

NodeId Expression::softmax_cross_entropy(NodeId logits, NodeId targets) {
    check_id(logits, "softmax-cross-entropy");
    check_id(targets, "softmax-cross-entropy");
    const Node& na = nodes_[logits];
    const Node& nb = nodes_[targets];
    if (na.rows != nb.rows || na.cols != nb.cols)
        throw ShapeError("softmax-cross-entropy: logits and targets must share shape");
    Node n;
    n.op = Op::SoftmaxCrossEntropy;
    n.a = logits;
    n.b = targets;
    n.rows = 1;
    n.cols = 1;
    return push(std::move(n));
}

NodeId Expression::mean_squared_error(NodeId a, NodeId b) {
    check_id(a, "mean-squared-error");
    check_id(b, "mean-squared-error");
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.rows != nb.rows || na.cols != nb.cols)
        throw ShapeError("mean-squared-error: shape mismatch");
    Node n;
    n.op = Op::MeanSquaredError;
    n.a = a;
    n.b = b;
    n.rows = 1;
    n.cols = 1;
    return push(std::move(n));
}

NodeId Expression::reduce_sum(NodeId a) {
    check_id(a, "reduce-sum");
    Node n;
    n.op = Op::ReduceSum;
    n.a = a;
    n.rows = 1;
    n.cols = 1;
    return push(std::move(n));
}

void Expression::set_root(NodeId r) {
    check_id(r, "set_root");
    root_ = r;
}

NodeId Expression::root() const {
    if (root_ < 0) throw ShapeError("expression has no nodes");
    return root_;
}

void Expression::mark(const std::string& tag, NodeId n) {
    check_id(n, "mark");
    if (marks_.count(tag)) throw ShapeError("duplicate mark '" + tag + "'");
    marks_[tag] = n;
}

// ---------------------------------------------------------------------------

struct Evaluator {
    const Expression& ex;
    const Bindings& binds;
    std::vector<Tensor> val;

    Evaluator(const Expression& e, const Bindings& b) : ex(e), binds(b) {
        val.resize(ex.nodes_.size());
    }

    void check_finite(const Tensor& t, const Node& n, NodeId id) {
        if (!t.all_finite()) {
            std::string what = std::string(op_name(n.op)) + " produced a non-finite value at node " +
                               std::to_string(id);
            if (n.op == Op::Leaf) what += " (leaf '" + n.name + "')";
            throw NumericError(what);
        }
    }

    void forward() {
        for (NodeId id = 0; id < static_cast<NodeId>(ex.nodes_.size()); ++id) {
            const Node& n = ex.nodes_[id];
            Tensor out;
            switch (n.op) {
                case Op::Leaf: {
                    auto it = binds.find(n.name);
                    if (it == binds.end())
                        throw ShapeError("no binding for leaf '" + n.name + "'");
                    if (it->second.rows() != n.rows || it->second.cols() != n.cols)
                        throw ShapeError("binding for leaf '" + n.name + "' has shape " +
                                         it->second.shape_str() + ", expected (" +
                                         std::to_string(n.rows) + "," + std::to_string(n.cols) + ")");
                    out = it->second;
                    break;
                }
                case Op::Matmul: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    std::vector<double> c(static_cast<std::size_t>(n.rows) * n.cols, 0.0);
                    mm_nn(A.data(), B.data(), c.data(), A.rows(), A.cols(), B.cols());
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::Add: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    std::vector<double> c(A.size());
                    for (std::size_t i = 0; i < c.size(); ++i) c[i] = A.vec()[i] + B.vec()[i];
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::Hadamard: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    std::vector<double> c(A.size());
                    for (std::size_t i = 0; i < c.size(); ++i) c[i] = A.vec()[i] * B.vec()[i];
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::ConcatCols: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    std::vector<double> c(static_cast<std::size_t>(n.rows) * n.cols);
                    for (int i = 0; i < n.rows; ++i) {
                        std::memcpy(c.data() + static_cast<std::size_t>(i) * n.cols,
                                    A.data() + static_cast<std::size_t>(i) * A.cols(),
                                    sizeof(double) * A.cols());
                        std::memcpy(c.data() + static_cast<std::size_t>(i) * n.cols + A.cols(),
                                    B.data() + static_cast<std::size_t>(i) * B.cols(),
                                    sizeof(double) * B.cols());
                    }
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::Relu: {
                    const Tensor& A = val[n.a];
                    std::vector<double> c(A.size());
                    for (std::size_t i = 0; i < c.size(); ++i)
                        c[i] = A.vec()[i] > 0.0 ? A.vec()[i] : 0.0;
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::Sigmoid: {
                    const Tensor& A = val[n.a];
                    std::vector<double> c(A.size());
                    for (std::size_t i = 0; i < c.size(); ++i) c[i] = stable_sigmoid(A.vec()[i]);
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::RowNormalize: {
                    const Tensor& A = val[n.a];
                    std::vector<double> c(A.size());
                    for (int i = 0; i < A.rows(); ++i) {
                        double s = 0.0;
                        for (int j = 0; j < A.cols(); ++j) s += A.at(i, j);
                        if (s == 0.0)
                            throw NumericError("row-normalize: row " + std::to_string(i) +
                                               " sums to zero at node " + std::to_string(id));
                        for (int j = 0; j < A.cols(); ++j)
                            c[static_cast<std::size_t>(i) * A.cols() + j] = A.at(i, j) / s;
                    }
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::Transpose: {
                    const Tensor& A = val[n.a];
                    std::vector<double> c(A.size());
                    for (int i = 0; i < A.rows(); ++i)
                        for (int j = 0; j < A.cols(); ++j)
                            c[static_cast<std::size_t>(j) * A.rows() + i] = A.at(i, j);
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::ScalarMul: {
                    const Tensor& A = val[n.a];
                    std::vector<double> c(A.size());
                    for (std::size_t i = 0; i < c.size(); ++i) c[i] = n.scalar * A.vec()[i];
                    out = Tensor::raw(n.rows, n.cols, std::move(c));
                    break;
                }
                case Op::SoftmaxCrossEntropy: {
                    const Tensor& L = val[n.a];
                    const Tensor& T = val[n.b];
                    double total = 0.0;
                    for (int i = 0; i < L.rows(); ++i) {
                        double m = L.at(i, 0);
                        for (int j = 1; j < L.cols(); ++j) m = std::max(m, L.at(i, j));
                        double z = 0.0;
                        for (int j = 0; j < L.cols(); ++j) z += std::exp(L.at(i, j) - m);
                        double lse = m + std::log(z);
                        for (int j = 0; j < L.cols(); ++j)
                            total += T.at(i, j) * (lse - L.at(i, j));
                    }
                    out = Tensor::raw(1, 1, {total / L.rows()});
                    break;
                }
                case Op::MeanSquaredError: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    double total = 0.0;
                    for (std::size_t i = 0; i < A.size(); ++i) {
                        double d = A.vec()[i] - B.vec()[i];
                        total += d * d;
                    }
                    out = Tensor::raw(1, 1, {total / static_cast<double>(A.size())});
                    break;
                }
                case Op::ReduceSum: {
                    const Tensor& A = val[n.a];
                    double total = 0.0;
                    for (std::size_t i = 0; i < A.size(); ++i) total += A.vec()[i];
                    out = Tensor::raw(1, 1, {total});
                    break;
                }
            }
            check_finite(out, n, id);
            val[id] = std::move(out);
        }
    }

    // Reverse pass; root must be 1x1. Fills grad tensors for every node that
    // influences the root, walking the node table backwards.
    std::vector<Tensor> backward(NodeId root) {
        std::vector<Tensor> adj(ex.nodes_.size());
        std::vector<char> touched(ex.nodes_.size(), 0);
        auto bump = [&](NodeId id) {
            if (!touched[id]) {
                adj[id] = Tensor::zeros(ex.nodes_[id].rows, ex.nodes_[id].cols);
                touched[id] = 1;
            }
        };
        bump(root);
        adj[root].at(0, 0) = 1.0;

        for (NodeId id = root; id >= 0; --id) {
            if (!touched[id]) continue;
            const Node& n = ex.nodes_[id];
            const Tensor& g = adj[id];
            switch (n.op) {
                case Op::Leaf:
                    break;
                case Op::Matmul: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    bump(n.a);
                    bump(n.b);
                    // dA += g * B^T ; dB += A^T * g
                    mm_nt(g.data(), B.data(), adj[n.a].data(), g.rows(), g.cols(), B.rows());
                    mm_tn(A.data(), g.data(), adj[n.b].data(), A.rows(), A.cols(), g.cols());
                    break;
                }
                case Op::Add: {
                    bump(n.a);
                    bump(n.b);
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        adj[n.a].data()[i] += g.vec()[i];
                        adj[n.b].data()[i] += g.vec()[i];
                    }
                    break;
                }
                case Op::Hadamard: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    bump(n.a);
                    bump(n.b);
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        adj[n.a].data()[i] += g.vec()[i] * B.vec()[i];
                        adj[n.b].data()[i] += g.vec()[i] * A.vec()[i];
                    }
                    break;
                }
                case Op::ConcatCols: {
                    const Tensor& A = val[n.a];
                    bump(n.a);
                    bump(n.b);
                    int ca = A.cols();
                    for (int i = 0; i < n.rows; ++i)
                        for (int j = 0; j < n.cols; ++j) {
                            double v = g.at(i, j);
                            if (j < ca)
                                adj[n.a].at(i, j) += v;
                            else
                                adj[n.b].at(i, j - ca) += v;
                        }
                    break;
                }
                case Op::Relu: {
                    const Tensor& A = val[n.a];
                    bump(n.a);
                    for (std::size_t i = 0; i < g.size(); ++i)
                        if (A.vec()[i] > 0.0) adj[n.a].data()[i] += g.vec()[i];
                    break;
                }
                case Op::Sigmoid: {
                    const Tensor& S = val[id]; // use the cached output
                    bump(n.a);
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        double s = S.vec()[i];
                        adj[n.a].data()[i] += g.vec()[i] * s * (1.0 - s);
                    }
                    break;
                }
                case Op::RowNormalize: {
                    const Tensor& A = val[n.a];
                    const Tensor& Y = val[id];
                    bump(n.a);
                    for (int i = 0; i < A.rows(); ++i) {
                        double s = 0.0;
                        for (int j = 0; j < A.cols(); ++j) s += A.at(i, j);
                        double dot = 0.0;
                        for (int j = 0; j < A.cols(); ++j) dot += g.at(i, j) * Y.at(i, j);
                        for (int j = 0; j < A.cols(); ++j)
                            adj[n.a].at(i, j) += (g.at(i, j) - dot) / s;
                    }
                    break;
                }
                case Op::Transpose: {
                    bump(n.a);
                    for (int i = 0; i < n.rows; ++i)
                        for (int j = 0; j < n.cols; ++j) adj[n.a].at(j, i) += g.at(i, j);
                    break;
                }
                case Op::ScalarMul: {
                    bump(n.a);
                    for (std::size_t i = 0; i < g.size(); ++i)
                        adj[n.a].data()[i] += n.scalar * g.vec()[i];
                    break;
                }
                case Op::SoftmaxCrossEntropy: {
                    const Tensor& L = val[n.a];
                    const Tensor& T = val[n.b];
                    bump(n.a);
                    bump(n.b);
                    double gs = g.at(0, 0) / L.rows();
                    for (int i = 0; i < L.rows(); ++i) {
                        double m = L.at(i, 0);
                        for (int j = 1; j < L.cols(); ++j) m = std::max(m, L.at(i, j));
                        double z = 0.0;
                        for (int j = 0; j < L.cols(); ++j) z += std::exp(L.at(i, j) - m);
                        double lse = m + std::log(z);
                        double tsum = 0.0;
                        for (int j = 0; j < L.cols(); ++j) tsum += T.at(i, j);
                        for (int j = 0; j < L.cols(); ++j) {
                            double p = std::exp(L.at(i, j) - lse);
                            adj[n.a].at(i, j) += gs * (p * tsum - T.at(i, j));
                            adj[n.b].at(i, j) += gs * (lse - L.at(i, j));
                        }
                    }
                    break;
                }
                case Op::MeanSquaredError: {
                    const Tensor& A = val[n.a];
                    const Tensor& B = val[n.b];
                    bump(n.a);
                    bump(n.b);
                    double gs = 2.0 * g.at(0, 0) / static_cast<double>(A.size());
                    for (std::size_t i = 0; i < A.size(); ++i) {
                        double d = gs * (A.vec()[i] - B.vec()[i]);
                        adj[n.a].data()[i] += d;
                        adj[n.b].data()[i] -= d;
                    }
                    break;
                }
                case Op::ReduceSum: {
                    bump(n.a);
                    double gs = g.at(0, 0);
                    for (std::size_t i = 0; i < adj[n.a].size(); ++i) adj[n.a].data()[i] += gs;
                    break;
                }
            }
        }
        return adj;
    }
};

Tensor evaluate(const Expression& expr, const Bindings& bindings) {
    Evaluator ev(expr, bindings);
    ev.forward();
    return ev.val[expr.root()];
}

EvalResult evaluate_all(const Expression& expr, const Bindings& bindings) {
    Evaluator ev(expr, bindings);
    ev.forward();
    EvalResult r;
    r.value = ev.val[expr.root()];
    for (const auto& [tag, id] : expr.marks()) r.marked[tag] = ev.val[id];
    return r;
}

GradResult gradients(const Expression& expr, const Bindings& bindings,
                     const std::vector<std::string>& wrt) {
    NodeId root = expr.root();
    const Node& rn = expr.node(root);
    if (rn.rows != 1 || rn.cols != 1)
        throw ShapeError("gradients: root must be a 1x1 scalar, got (" +
                         std::to_string(rn.rows) + "," + std::to_string(rn.cols) + ")");
    Evaluator ev(expr, bindings);
    ev.forward();
    auto adj = ev.backward(root);

    GradResult r;
    r.value = ev.val[root];
    for (const auto& [tag, id] : expr.marks()) r.marked[tag] = ev.val[id];
    for (const auto& name : wrt) {
        auto it = expr.leaves().find(name);
        if (it == expr.leaves().end())
            throw ShapeError("gradients: '" + name + "' is not a leaf of this expression");
        NodeId id = it->second;
        const Node& n = expr.node(id);
        if (adj[id].rows() == 0)
            r.grads[name] = Tensor::zeros(n.rows, n.cols);
        else
            r.grads[name] = adj[id];
        if (!r.grads[name].all_finite())
            throw NumericError("gradient for leaf '" + name + "' is non-finite");
    }
    return r;
}

double finite_diff_check(const Expression& expr, const Bindings& bindings,
                         const std::vector<std::string>& wrt, double step) {
    if (step <= 0.0) throw NumericError("finite_diff_check: step must be positive");
    GradResult g = gradients(expr, bindings, wrt);
    Bindings work = bindings;
    double worst = 0.0;
    for (const auto& name : wrt) {
        Tensor& t = work.at(name);
        const Tensor& analytic = g.grads.at(name);
        for (int i = 0; i < t.rows(); ++i) {
            for (int j = 0; j < t.cols(); ++j) {
                double orig = t.at(i, j);
                t.at(i, j) = orig + step;
                double up = evaluate(expr, work).at(0, 0);
                t.at(i, j) = orig - step;
                double dn = evaluate(expr, work).at(0, 0);
                t.at(i, j) = orig;
                double numeric = (up - dn) / (2.0 * step);
                double a = analytic.at(i, j);
                double denom = std::max(std::fabs(a) + std::fabs(numeric), 1e-6);
                worst = std::max(worst, std::fabs(a - numeric) / denom);
            }
        }
    }
    return worst;
}

} // namespace gevex
