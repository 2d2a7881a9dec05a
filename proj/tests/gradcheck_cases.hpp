#pragma once

// Gradient-check cases shared by the unit tests and the acceptance suite.
// Each case declares parameter shapes and builds a scalar loss on a fresh
// tape; the runner compares tape gradients against central differences.

#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsinr/autodiff.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/spectral.hpp"

namespace gradcheck {

using tsinr::Shape;
using tsinr::Tensor;
using tsinr::autodiff::NodeId;
using tsinr::autodiff::Tape;

struct GradCase {
    std::string name;
    std::vector<Shape> shapes;
    std::function<NodeId(Tape&, const std::vector<NodeId>&)> build;
    double tol = 1e-5;
};

// Values bounded away from zero so kinked ops (relu, abs) see no crossings
// within the finite-difference step.
inline std::vector<double> random_params(const std::vector<Shape>& shapes, std::uint64_t seed) {
    std::size_t total = 0;
    for (const Shape& s : shapes) total += s.size();
    tsinr::Rng rng(seed);
    std::vector<double> x(total);
    for (double& v : x) {
        const double mag = rng.uniform(0.3, 1.5);
        v = rng.uniform01() < 0.5 ? -mag : mag;
    }
    return x;
}

inline std::vector<NodeId> leaves_from_flat(Tape& tape, const std::vector<Shape>& shapes,
                                            const std::vector<double>& flat) {
    std::vector<NodeId> ids;
    std::size_t off = 0;
    for (const Shape& s : shapes) {
        Tensor t(s);
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = flat[off + i];
        off += s.size();
        ids.push_back(tape.input(std::move(t), true));
    }
    return ids;
}

// Max relative error of the tape gradient vs central differences.
inline double run_case(const GradCase& c, std::uint64_t seed) {
    const std::vector<double> x0 = random_params(c.shapes, seed);
    auto eval = [&](const std::vector<double>& x) {
        Tape tape;
        auto ids = leaves_from_flat(tape, c.shapes, x);
        return tape.value(c.build(tape, ids))[0];
    };
    Tape tape;
    auto ids = leaves_from_flat(tape, c.shapes, x0);
    NodeId loss = c.build(tape, ids);
    tape.backward(loss);
    std::vector<double> analytic;
    for (NodeId id : ids) {
        const Tensor& g = tape.grad(id);
        analytic.insert(analytic.end(), g.data(), g.data() + g.size());
    }
    return oracles::max_grad_rel_err(eval, x0, analytic);
}

inline std::vector<GradCase> op_cases() {
    std::vector<GradCase> cases;
    auto mean_of = [](auto op) {
        return [op](Tape& t, const std::vector<NodeId>& p) { return t.mean(op(t, p)); };
    };

    cases.push_back({"matmul",
                     {Shape{3, 4}, Shape{4, 2}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.matmul(p[0], p[1]);
                     })});
    cases.push_back({"add",
                     {Shape{3, 3}, Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.add(p[0], p[1]));
                     })});
    cases.push_back({"add_bias",
                     {Shape{3, 5}, Shape{3, 1}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.add_bias(p[0], p[1]));
                     })});
    cases.push_back({"sub",
                     {Shape{3, 3}, Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.sub(p[0], p[1]));
                     })});
    cases.push_back({"mul",
                     {Shape{3, 3}, Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.mul(p[0], p[1]);
                     })});
    cases.push_back({"scale",
                     {Shape{2, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.scale(p[0], 2.5));
                     })});
    cases.push_back({"sin",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) { return t.sin(p[0]); })});
    cases.push_back({"cos",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) { return t.cos(p[0]); })});
    cases.push_back({"relu",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) { return t.relu(p[0]); })});
    cases.push_back({"tanh",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) { return t.tanh(p[0]); })});
    cases.push_back({"sigmoid",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.sigmoid(p[0]);
                     })});
    cases.push_back({"square",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) { return t.square(p[0]); })});
    cases.push_back({"abs",
                     {Shape{3, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) { return t.abs(p[0]); })});
    cases.push_back({"mean", {Shape{4, 3}}, [](Tape& t, const std::vector<NodeId>& p) {
                         return t.mean(t.square(p[0]));
                     }});
    cases.push_back({"mean_cols",
                     {Shape{4, 6}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.mean_cols(p[0]));
                     })});
    cases.push_back({"slice",
                     {Shape{4, 4}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.slice(p[0], 2, 3, 2));
                     })});
    cases.push_back({"concat_rows",
                     {Shape{2, 3}, Shape{1, 3}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.concat_rows(p[0], p[1]));
                     })});
    cases.push_back({"reshape",
                     {Shape{2, 6}},
                     mean_of([](Tape& t, const std::vector<NodeId>& p) {
                         return t.square(t.reshape(p[0], 3, 4));
                     })});
    // sin(omega0 * W x + b) with gradient through W and b
    cases.push_back({"sine_layer",
                     {Shape{4, 3}, Shape{4, 1}},
                     [](Tape& t, const std::vector<NodeId>& p) {
                         Tensor x(Shape{3, 5});
                         tsinr::Rng rng(99);
                         for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
                         NodeId xc = t.constant(std::move(x));
                         NodeId pre = t.add_bias(t.scale(t.matmul(p[0], xc), 30.0), p[1]);
                         return t.mean(t.square(t.sin(pre)));
                     }});
    cases.push_back({"fft_loss",
                     {Shape{1, 8}},
                     [](Tape& t, const std::vector<NodeId>& p) {
                         static const std::vector<double> target = {0.9, -0.3, 0.5, 0.1,
                                                                    -0.7, 0.2, -0.4, 0.6};
                         return tsinr::spectral::fft_loss_node(t, p[0], target);
                     }});
    return cases;
}

} // namespace gradcheck
