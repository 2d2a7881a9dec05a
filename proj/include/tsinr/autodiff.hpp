#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tsinr/errors.hpp"
#include "tsinr/tensor.hpp"

// Reverse-mode automatic differentiation over dense 2-D tensors, plus Adam.
// A Tape records one forward computation; nodes are appended in topological
// order and the backward pass walks them in strict reverse insertion order.
// Tapes are rebuilt per training step (define-by-run).

namespace tsinr::autodiff {

struct NodeId {
    std::uint32_t index = UINT32_MAX;
    bool valid() const { return index != UINT32_MAX; }
    bool operator==(const NodeId&) const = default;
};

enum class OpKind : std::uint8_t {
    Leaf,
    MatMul,
    Add,
    AddBias,
    Sub,
    Mul,
    Scale,
    Sin,
    Cos,
    Relu,
    Tanh,
    Sigmoid,
    Step,
    Square,
    Abs,
    Mean,
    MeanCols,
    Slice,
    ConcatRows,
    Reshape,
    Custom,
};

inline const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Leaf: return "leaf";
        case OpKind::MatMul: return "matmul";
        case OpKind::Add: return "add";
        case OpKind::AddBias: return "add_bias";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::Scale: return "scale";
        case OpKind::Sin: return "sin";
        case OpKind::Cos: return "cos";
        case OpKind::Relu: return "relu";
        case OpKind::Tanh: return "tanh";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Step: return "step";
        case OpKind::Square: return "square";
        case OpKind::Abs: return "abs";
        case OpKind::Mean: return "mean";
        case OpKind::MeanCols: return "mean_cols";
        case OpKind::Slice: return "slice";
        case OpKind::ConcatRows: return "concat_rows";
        case OpKind::Reshape: return "reshape";
        case OpKind::Custom: return "custom";
    }
    return "?";
}

class Tape;

// Escape hatch for ops whose backward rule lives outside this module
// (e.g. the spectral loss). `backward` receives the node's adjoint and the
// input values, and accumulates into the input adjoints.
struct CustomOp {
    std::string name;
    std::function<void(const Tensor& out_grad, const std::vector<const Tensor*>& inputs,
                       const std::vector<Tensor*>& input_grads)>
        backward;
};

class Tape {
public:
    Tape() { nodes_.reserve(64); }

    // --- graph construction -------------------------------------------------

    NodeId input(Tensor value, bool requires_grad) {
        return push(OpKind::Leaf, {}, std::move(value), requires_grad);
    }
    NodeId constant(Tensor value) { return input(std::move(value), false); }

    NodeId matmul(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (ta.cols() != tb.rows())
            throw ValidationError("matmul: shape mismatch " + ta.shape().str() + " * " +
                                  tb.shape().str());
        Tensor out(Shape{ta.rows(), tb.cols()});
        linalg::matmul_into(out.data(), ta.data(), ta.rows(), ta.cols(), tb.data(), tb.cols());
        return push(OpKind::MatMul, {a, b}, std::move(out));
    }

    NodeId add(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (!(ta.shape() == tb.shape()))
            throw ValidationError("add: shape mismatch " + ta.shape().str() + " vs " +
                                  tb.shape().str());
        Tensor out = ta;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += tb[i];
        return push(OpKind::Add, {a, b}, std::move(out));
    }

    // a is r x c, bias r x 1, broadcast over columns.
    NodeId add_bias(NodeId a, NodeId bias) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(bias);
        if (tb.rows() != ta.rows() || tb.cols() != 1)
            throw ValidationError("add_bias: bias " + tb.shape().str() + " does not broadcast over " +
                                  ta.shape().str());
        Tensor out = ta;
        for (std::size_t i = 0; i < out.rows(); ++i) {
            const double b = tb[i];
            double* row = out.row_ptr(i);
            for (std::size_t j = 0; j < out.cols(); ++j) row[j] += b;
        }
        return push(OpKind::AddBias, {a, bias}, std::move(out));
    }

    NodeId sub(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (!(ta.shape() == tb.shape()))
            throw ValidationError("sub: shape mismatch " + ta.shape().str() + " vs " +
                                  tb.shape().str());
        Tensor out = ta;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= tb[i];
        return push(OpKind::Sub, {a, b}, std::move(out));
    }

    NodeId mul(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (!(ta.shape() == tb.shape()))
            throw ValidationError("mul: shape mismatch " + ta.shape().str() + " vs " +
                                  tb.shape().str());
        Tensor out = ta;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= tb[i];
        return push(OpKind::Mul, {a, b}, std::move(out));
    }

    NodeId scale(NodeId a, double c) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
        NodeId id = push(OpKind::Scale, {a}, std::move(out));
        node(id).scalar = c;
        return id;
    }

    NodeId sin(NodeId a) { return unary(OpKind::Sin, a, [](double x) { return std::sin(x); }); }
    NodeId cos(NodeId a) { return unary(OpKind::Cos, a, [](double x) { return std::cos(x); }); }
    NodeId relu(NodeId a) {
        return unary(OpKind::Relu, a, [](double x) { return x > 0.0 ? x : 0.0; });
    }
    NodeId tanh(NodeId a) { return unary(OpKind::Tanh, a, [](double x) { return std::tanh(x); }); }
    NodeId sigmoid(NodeId a) {
        return unary(OpKind::Sigmoid, a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    }
    NodeId step(NodeId a) {
        return unary(OpKind::Step, a, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
    }
    NodeId square(NodeId a) { return unary(OpKind::Square, a, [](double x) { return x * x; }); }
    NodeId abs(NodeId a) { return unary(OpKind::Abs, a, [](double x) { return std::abs(x); }); }

    NodeId mean(NodeId a) {
        const Tensor& ta = value(a);
        if (ta.empty()) throw ValidationError("mean: empty input");
        double acc = 0.0;
        for (std::size_t i = 0; i < ta.size(); ++i) acc += ta[i];
        return push(OpKind::Mean, {a}, Tensor::scalar(acc / static_cast<double>(ta.size())));
    }

    NodeId mean_cols(NodeId a) {
        const Tensor& ta = value(a);
        if (ta.cols() == 0) throw ValidationError("mean_cols: empty input");
        Tensor out(Shape{ta.rows(), 1});
        for (std::size_t i = 0; i < ta.rows(); ++i) {
            const double* row = ta.row_ptr(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < ta.cols(); ++j) acc += row[j];
            out[i] = acc / static_cast<double>(ta.cols());
        }
        return push(OpKind::MeanCols, {a}, std::move(out));
    }

    // Contiguous range [offset, offset + rows*cols) of a's flat buffer,
    // reinterpreted as rows x cols.
    NodeId slice(NodeId a, std::size_t offset, std::size_t rows, std::size_t cols) {
        const Tensor& ta = value(a);
        if (offset + rows * cols > ta.size())
            throw ValidationError("slice: range [" + std::to_string(offset) + ", " +
                                  std::to_string(offset + rows * cols) + ") exceeds " +
                                  ta.shape().str());
        Tensor out(Shape{rows, cols});
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = ta[offset + i];
        NodeId id = push(OpKind::Slice, {a}, std::move(out));
        node(id).offset = offset;
        return id;
    }

    NodeId concat_rows(NodeId a, NodeId b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (ta.cols() != tb.cols())
            throw ValidationError("concat_rows: column mismatch " + ta.shape().str() + " vs " +
                                  tb.shape().str());
        Tensor out(Shape{ta.rows() + tb.rows(), ta.cols()});
        for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i];
        for (std::size_t i = 0; i < tb.size(); ++i) out[ta.size() + i] = tb[i];
        return push(OpKind::ConcatRows, {a, b}, std::move(out));
    }

    NodeId reshape(NodeId a, std::size_t rows, std::size_t cols) {
        const Tensor& ta = value(a);
        if (rows * cols != ta.size())
            throw ValidationError("reshape: cannot view " + ta.shape().str() + " as " +
                                  Shape{rows, cols}.str());
        Tensor out(Shape{rows, cols});
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = ta[i];
        return push(OpKind::Reshape, {a}, std::move(out));
    }

    NodeId custom(CustomOp op, Tensor value, const std::vector<NodeId>& inputs) {
        NodeId id = push_multi(OpKind::Custom, inputs, std::move(value));
        node(id).custom = std::make_unique<CustomOp>(std::move(op));
        return id;
    }

    // --- access -------------------------------------------------------------

    const Tensor& value(NodeId id) const { return nodes_[id.index].value; }
    std::size_t size() const { return nodes_.size(); }

    // Adjoint of a node after backward(); zero tensor if the loss does not
    // reach it (unreachable parameters get zero gradient).
    const Tensor& grad(NodeId id) {
        Tensor& g = nodes_[id.index].grad;
        if (g.empty()) g = Tensor(nodes_[id.index].value.shape());
        return g;
    }

    // --- reverse pass -------------------------------------------------------

    void backward(NodeId loss) {
        Node& top = nodes_[loss.index];
        if (!(top.value.shape() == Shape{1, 1}))
            throw ValidationError("backward: loss must be scalar, got " + top.value.shape().str());
        touch(loss.index);
        top.grad[0] = 1.0;
        for (std::uint32_t i = loss.index + 1; i-- > 0;) {
            Node& n = nodes_[i];
            if (!n.requires_grad || n.grad.empty() || n.kind == OpKind::Leaf) continue;
            propagate(n);
        }
    }

private:
    struct Node {
        OpKind kind = OpKind::Leaf;
        bool requires_grad = false;
        std::array<NodeId, 2> in{};
        std::uint8_t n_in = 0;
        std::vector<NodeId> extra_in; // only for Custom with > 2 inputs
        double scalar = 0.0;          // Scale payload
        std::size_t offset = 0;       // Slice payload
        Tensor value;
        Tensor grad;
        std::unique_ptr<CustomOp> custom;
    };

    Node& node(NodeId id) { return nodes_[id.index]; }

    template <typename F>
    NodeId unary(OpKind kind, NodeId a, F&& f) {
        Tensor out = value(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(out[i]);
        return push(kind, {a}, std::move(out));
    }

    NodeId push(OpKind kind, std::initializer_list<NodeId> inputs, Tensor value,
                bool leaf_requires_grad = false) {
        if (!value.all_finite())
            throw NumericError(std::string("op ") + op_name(kind) + " produced non-finite values");
        Node n;
        n.kind = kind;
        n.requires_grad = leaf_requires_grad;
        for (NodeId in : inputs) {
            n.in[n.n_in++] = in;
            n.requires_grad = n.requires_grad || nodes_[in.index].requires_grad;
        }
        n.value = std::move(value);
        nodes_.push_back(std::move(n));
        return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
    }

    NodeId push_multi(OpKind kind, const std::vector<NodeId>& inputs, Tensor value) {
        if (!value.all_finite())
            throw NumericError(std::string("op ") + op_name(kind) + " produced non-finite values");
        Node n;
        n.kind = kind;
        for (NodeId in : inputs) n.requires_grad = n.requires_grad || nodes_[in.index].requires_grad;
        n.extra_in = inputs;
        n.value = std::move(value);
        nodes_.push_back(std::move(n));
        return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
    }

    Tensor& touch(std::uint32_t idx) {
        Tensor& g = nodes_[idx].grad;
        if (g.empty()) g = Tensor(nodes_[idx].value.shape());
        return g;
    }

    // Accumulates n's adjoint into its inputs' adjoints.
    void propagate(Node& n) {
        const Tensor& g = n.grad;
        auto in_val = [&](int i) -> const Tensor& { return nodes_[n.in[i].index].value; };
        auto in_grad = [&](int i) -> Tensor& { return touch(n.in[i].index); };
        auto in_rg = [&](int i) { return nodes_[n.in[i].index].requires_grad; };

        switch (n.kind) {
            case OpKind::Leaf:
                break;
            case OpKind::MatMul: {
                const Tensor& a = in_val(0);
                const Tensor& b = in_val(1);
                if (in_rg(0))
                    linalg::matmul_nt_accum(in_grad(0).data(), g.data(), g.rows(), g.cols(),
                                            b.data(), b.rows());
                if (in_rg(1))
                    linalg::matmul_tn_accum(in_grad(1).data(), a.data(), a.rows(), a.cols(),
                                            g.data(), g.cols());
                break;
            }
            case OpKind::Add: {
                for (int s = 0; s < 2; ++s) {
                    if (!in_rg(s)) continue;
                    Tensor& d = in_grad(s);
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                }
                break;
            }
            case OpKind::AddBias: {
                if (in_rg(0)) {
                    Tensor& d = in_grad(0);
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                }
                if (in_rg(1)) {
                    Tensor& d = in_grad(1);
                    for (std::size_t i = 0; i < g.rows(); ++i) {
                        const double* row = g.row_ptr(i);
                        double acc = 0.0;
                        for (std::size_t j = 0; j < g.cols(); ++j) acc += row[j];
                        d[i] += acc;
                    }
                }
                break;
            }
            case OpKind::Sub: {
                if (in_rg(0)) {
                    Tensor& d = in_grad(0);
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                }
                if (in_rg(1)) {
                    Tensor& d = in_grad(1);
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
                }
                break;
            }
            case OpKind::Mul: {
                if (in_rg(0)) {
                    Tensor& d = in_grad(0);
                    const Tensor& b = in_val(1);
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * b[i];
                }
                if (in_rg(1)) {
                    Tensor& d = in_grad(1);
                    const Tensor& a = in_val(0);
                    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * a[i];
                }
                break;
            }
            case OpKind::Scale: {
                Tensor& d = in_grad(0);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * n.scalar;
                break;
            }
            case OpKind::Sin: {
                Tensor& d = in_grad(0);
                const Tensor& x = in_val(0);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * std::cos(x[i]);
                break;
            }
            case OpKind::Cos: {
                Tensor& d = in_grad(0);
                const Tensor& x = in_val(0);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i] * std::sin(x[i]);
                break;
            }
            case OpKind::Relu: {
                Tensor& d = in_grad(0);
                const Tensor& x = in_val(0);
                for (std::size_t i = 0; i < g.size(); ++i)
                    if (x[i] > 0.0) d[i] += g[i];
                break;
            }
            case OpKind::Tanh: {
                Tensor& d = in_grad(0);
                const Tensor& y = n.value;
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case OpKind::Sigmoid: {
                Tensor& d = in_grad(0);
                const Tensor& y = n.value;
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case OpKind::Step:
                break; // derivative zero almost everywhere
            case OpKind::Square: {
                Tensor& d = in_grad(0);
                const Tensor& x = in_val(0);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * 2.0 * x[i];
                break;
            }
            case OpKind::Abs: {
                Tensor& d = in_grad(0);
                const Tensor& x = in_val(0);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (x[i] > 0.0)
                        d[i] += g[i];
                    else if (x[i] < 0.0)
                        d[i] -= g[i]; // subgradient 0 at the kink
                }
                break;
            }
            case OpKind::Mean: {
                Tensor& d = in_grad(0);
                const double w = g[0] / static_cast<double>(d.size());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] += w;
                break;
            }
            case OpKind::MeanCols: {
                Tensor& d = in_grad(0);
                const double inv = 1.0 / static_cast<double>(d.cols());
                for (std::size_t i = 0; i < d.rows(); ++i) {
                    const double w = g[i] * inv;
                    double* row = d.row_ptr(i);
                    for (std::size_t j = 0; j < d.cols(); ++j) row[j] += w;
                }
                break;
            }
            case OpKind::Slice: {
                Tensor& d = in_grad(0);
                for (std::size_t i = 0; i < g.size(); ++i) d[n.offset + i] += g[i];
                break;
            }
            case OpKind::ConcatRows: {
                const std::size_t na = in_val(0).size();
                if (in_rg(0)) {
                    Tensor& d = in_grad(0);
                    for (std::size_t i = 0; i < na; ++i) d[i] += g[i];
                }
                if (in_rg(1)) {
                    Tensor& d = in_grad(1);
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[na + i];
                }
                break;
            }
            case OpKind::Reshape: {
                Tensor& d = in_grad(0);
                for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                break;
            }
            case OpKind::Custom: {
                std::vector<const Tensor*> ins;
                std::vector<Tensor*> grads;
                ins.reserve(n.extra_in.size());
                grads.reserve(n.extra_in.size());
                for (NodeId in : n.extra_in) {
                    ins.push_back(&nodes_[in.index].value);
                    grads.push_back(nodes_[in.index].requires_grad ? &touch(in.index) : nullptr);
                }
                n.custom->backward(g, ins, grads);
                break;
            }
        }
    }

    std::vector<Node> nodes_;
};

// --- Adam -------------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction. One instance owns the moments for a
// fixed list of parameter tensors; step count is shared across them.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    const AdamConfig& config() const { return cfg_; }
    std::uint64_t step_count() const { return step_; }

    void update(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
        if (params.size() != grads.size())
            throw ValidationError("adam: params/grads count mismatch");
        if (m_.empty()) {
            for (const Tensor* p : params) {
                m_.emplace_back(p->shape());
                v_.emplace_back(p->shape());
            }
        }
        if (m_.size() != params.size()) throw ValidationError("adam: parameter group changed size");
        ++step_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (std::size_t p = 0; p < params.size(); ++p) {
            Tensor& w = *params[p];
            const Tensor& g = *grads[p];
            if (!(w.shape() == g.shape()))
                throw ValidationError("adam: grad shape " + g.shape().str() +
                                      " does not match param " + w.shape().str());
            if (!g.all_finite()) throw NumericError("adam: non-finite gradient");
            Tensor& m = m_[p];
            Tensor& v = v_[p];
            for (std::size_t i = 0; i < w.size(); ++i) {
                m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
                v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

    void update(Tensor& param, const Tensor& grad) { update({&param}, {&grad}); }

private:
    AdamConfig cfg_;
    std::uint64_t step_ = 0;
    std::vector<Tensor> m_, v_;
};

} // namespace tsinr::autodiff
