#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tsinr/autodiff.hpp"
#include "tsinr/errors.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/tensor.hpp"

// MLP description, parameter flattening, initialization, and forward passes —
// both the plain (tape-free) evaluation path and the tape-built path used for
// training. Sine layers compute sin(omega0 * W x + b).

namespace tsinr {

enum class Activation : std::uint8_t { Sine = 0, Relu = 1, Tanh = 2, Sigmoid = 3 };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Sine: return "sine";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

inline Activation activation_from_name(const std::string& name) {
    for (Activation a : {Activation::Sine, Activation::Relu, Activation::Tanh,
                         Activation::Sigmoid})
        if (name == activation_name(a)) return a;
    throw ValidationError("unknown activation '" + name +
                          "' (expected sine, relu, tanh or sigmoid)");
}

struct MlpSpec {
    std::vector<std::size_t> widths; // input, hidden..., output
    Activation activation = Activation::Sine;
    double omega0 = 30.0;

    std::size_t layer_count() const { return widths.empty() ? 0 : widths.size() - 1; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l)
            n += widths[l] * widths[l + 1] + widths[l + 1];
        return n;
    }

    void validate() const {
        if (widths.size() < 2) throw ValidationError("MlpSpec: need at least 2 layer widths");
        for (std::size_t w : widths)
            if (w == 0) throw ValidationError("MlpSpec: zero layer width");
        if (activation == Activation::Sine && !(omega0 > 0.0))
            throw ValidationError("MlpSpec: omega0 must be positive for sine activation");
    }

    // The INR shape used throughout: 1 x 60 x 60 x 60 x channels.
    static MlpSpec inr_default(std::size_t channels, Activation act = Activation::Sine,
                               double omega0 = 30.0) {
        return MlpSpec{{1, 60, 60, 60, channels}, act, omega0};
    }

    bool operator==(const MlpSpec&) const = default;
};

// Flat parameter buffer ordered layer by layer, W (out x in, row-major) then b.
struct ParamVector {
    MlpSpec spec;
    std::vector<double> flat;

    void validate() const {
        spec.validate();
        if (flat.size() != spec.param_count())
            throw ValidationError("ParamVector: have " + std::to_string(flat.size()) +
                                  " values, spec needs " + std::to_string(spec.param_count()));
    }
};

namespace mlp {

struct LayerView {
    std::size_t w_offset, b_offset;
    std::size_t in, out;
};

inline std::vector<LayerView> layer_views(const MlpSpec& spec) {
    std::vector<LayerView> views;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
        LayerView v;
        v.in = spec.widths[l];
        v.out = spec.widths[l + 1];
        v.w_offset = off;
        off += v.in * v.out;
        v.b_offset = off;
        off += v.out;
        views.push_back(v);
    }
    return views;
}

// Uniform init. Sine networks follow the SIREN scheme: first layer bounded by
// 1/n_in, deeper layers by sqrt(6/n_in)/omega0; other activations use the
// Glorot bound sqrt(6/(n_in+n_out)). Biases share their layer's bound.
inline ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    ParamVector p{spec, std::vector<double>(spec.param_count())};
    Rng rng(seed);
    std::size_t layer = 0;
    for (const LayerView& v : layer_views(spec)) {
        double bound;
        if (spec.activation == Activation::Sine)
            bound = layer == 0 ? 1.0 / static_cast<double>(v.in)
                               : std::sqrt(6.0 / static_cast<double>(v.in)) / spec.omega0;
        else
            bound = std::sqrt(6.0 / static_cast<double>(v.in + v.out));
        for (std::size_t i = 0; i < v.in * v.out; ++i)
            p.flat[v.w_offset + i] = rng.uniform(-bound, bound);
        for (std::size_t i = 0; i < v.out; ++i) p.flat[v.b_offset + i] = rng.uniform(-bound, bound);
        ++layer;
    }
    return p;
}

// Plain forward pass over a batch of input columns; returns output x N.
// Mirrors the tape path operation for operation so both produce identical
// floating-point results.
inline Tensor forward(const ParamVector& p, Tensor h) {
    p.validate();
    if (h.cols() == 0) throw ValidationError("mlp::forward: no input columns");
    const std::size_t n = h.cols();
    if (h.rows() != p.spec.widths.front())
        throw ValidationError("mlp::forward: input has " + std::to_string(h.rows()) +
                              " rows, spec expects " + std::to_string(p.spec.widths.front()));
    const auto views = layer_views(p.spec);
    for (std::size_t l = 0; l < views.size(); ++l) {
        const LayerView& v = views[l];
        Tensor z(Shape{v.out, n});
        linalg::matmul_into(z.data(), p.flat.data() + v.w_offset, v.out, v.in, h.data(), n);
        const bool last = l + 1 == views.size();
        if (!last && p.spec.activation == Activation::Sine)
            for (std::size_t i = 0; i < z.size(); ++i) z[i] *= p.spec.omega0;
        for (std::size_t r = 0; r < v.out; ++r) {
            const double b = p.flat[v.b_offset + r];
            double* row = z.row_ptr(r);
            for (std::size_t j = 0; j < n; ++j) row[j] += b;
        }
        if (!last) {
            switch (p.spec.activation) {
                case Activation::Sine:
                    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::sin(z[i]);
                    break;
                case Activation::Relu:
                    for (std::size_t i = 0; i < z.size(); ++i) z[i] = z[i] > 0.0 ? z[i] : 0.0;
                    break;
                case Activation::Tanh:
                    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::tanh(z[i]);
                    break;
                case Activation::Sigmoid:
                    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 1.0 / (1.0 + std::exp(-z[i]));
                    break;
            }
        }
        h = std::move(z);
    }
    return h;
}

inline Tensor forward(const ParamVector& p, const std::vector<double>& coords) {
    return forward(p, Tensor(Shape{1, coords.size()}, coords));
}

using autodiff::NodeId;
using autodiff::Tape;

struct TapeLayer {
    NodeId w, b;
};

// Parameters as independent leaves (the per-series fitting path).
inline std::vector<TapeLayer> leaf_params(Tape& tape, const ParamVector& p, bool requires_grad) {
    p.validate();
    std::vector<TapeLayer> layers;
    for (const LayerView& v : layer_views(p.spec)) {
        Tensor w(Shape{v.out, v.in});
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = p.flat[v.w_offset + i];
        Tensor b(Shape{v.out, 1});
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = p.flat[v.b_offset + i];
        layers.push_back({tape.input(std::move(w), requires_grad),
                          tape.input(std::move(b), requires_grad)});
    }
    return layers;
}

// Parameters as views into one flat node (the hyponet path, where the flat
// vector is itself the output of another network).
inline std::vector<TapeLayer> slice_params(Tape& tape, const MlpSpec& spec, NodeId flat) {
    spec.validate();
    if (tape.value(flat).size() != spec.param_count())
        throw ValidationError("mlp::slice_params: flat node has " +
                              std::to_string(tape.value(flat).size()) + " values, spec needs " +
                              std::to_string(spec.param_count()));
    std::vector<TapeLayer> layers;
    for (const LayerView& v : layer_views(spec)) {
        layers.push_back({tape.slice(flat, v.w_offset, v.out, v.in),
                          tape.slice(flat, v.b_offset, v.out, 1)});
    }
    return layers;
}

inline NodeId tape_forward(Tape& tape, const MlpSpec& spec, const std::vector<TapeLayer>& layers,
                           NodeId x) {
    NodeId h = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const bool last = l + 1 == layers.size();
        NodeId z = tape.matmul(layers[l].w, h);
        if (!last && spec.activation == Activation::Sine) z = tape.scale(z, spec.omega0);
        z = tape.add_bias(z, layers[l].b);
        if (!last) {
            switch (spec.activation) {
                case Activation::Sine: z = tape.sin(z); break;
                case Activation::Relu: z = tape.relu(z); break;
                case Activation::Tanh: z = tape.tanh(z); break;
                case Activation::Sigmoid: z = tape.sigmoid(z); break;
            }
        }
        h = z;
    }
    return h;
}

struct ForwardWithDerivative {
    NodeId out;  // output x N
    NodeId dout; // d(out)/dt, output x N
};

// Forward pass that also carries d/dt through every layer (exact chain rule
// for the scalar input), so |d(out)/dt| can enter a differentiable loss.
inline ForwardWithDerivative tape_forward_with_derivative(Tape& tape, const MlpSpec& spec,
                                                          const std::vector<TapeLayer>& layers,
                                                          NodeId x) {
    if (spec.widths.front() != 1)
        throw ValidationError("tape_forward_with_derivative: expected scalar input");
    NodeId h = x;
    NodeId dh = tape.constant(Tensor::full(1, tape.value(x).cols(), 1.0));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const bool last = l + 1 == layers.size();
        NodeId z = tape.matmul(layers[l].w, h);
        NodeId dz = tape.matmul(layers[l].w, dh);
        if (!last && spec.activation == Activation::Sine) {
            z = tape.scale(z, spec.omega0);
            dz = tape.scale(dz, spec.omega0);
        }
        z = tape.add_bias(z, layers[l].b);
        if (!last) {
            switch (spec.activation) {
                case Activation::Sine:
                    dz = tape.mul(tape.cos(z), dz);
                    z = tape.sin(z);
                    break;
                case Activation::Relu:
                    dz = tape.mul(tape.step(z), dz);
                    z = tape.relu(z);
                    break;
                case Activation::Tanh: {
                    NodeId y = tape.tanh(z);
                    NodeId one = tape.constant(Tensor::full(tape.value(y).rows(),
                                                            tape.value(y).cols(), 1.0));
                    dz = tape.mul(tape.sub(one, tape.square(y)), dz);
                    z = y;
                    break;
                }
                case Activation::Sigmoid: {
                    NodeId y = tape.sigmoid(z);
                    NodeId one = tape.constant(Tensor::full(tape.value(y).rows(),
                                                            tape.value(y).cols(), 1.0));
                    dz = tape.mul(tape.mul(y, tape.sub(one, y)), dz);
                    z = y;
                    break;
                }
            }
        }
        h = z;
        dh = dz;
    }
    return {h, dh};
}

} // namespace mlp
} // namespace tsinr
