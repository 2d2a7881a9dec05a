#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "tsinr/autodiff.hpp"
#include "tsinr/binio.hpp"
#include "tsinr/errors.hpp"
#include "tsinr/mlp.hpp"
#include "tsinr/parallel.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/tensor.hpp"
#include "tsinr/timeseries.hpp"

// Per-series implicit representations: fitting one MLP to one series by
// full-batch Adam on the observed samples, the activation comparison, and the
// INR1 model container.

namespace tsinr::inr {

struct FitOptions {
    std::size_t epochs = 2000;
    autodiff::AdamConfig adam{};
    std::uint64_t seed = 0;
    double tv_weight = 0.0;        // > 0 adds the mean |d out/dt| smoothness prior
    std::size_t tv_oversample = 1; // 1: prior on the series grid; k>1: on a
                                   // uniform grid k times finer, reaching the
                                   // wiggle between observed samples
};

struct FitResult {
    ParamVector params;
    std::vector<double> loss_history; // per-epoch data MSE, before that epoch's update
    double final_mse = 0.0;           // on the observed samples, after training
};

namespace detail {

// Observed-sample view: coordinates as a row, targets as channels x observed.
inline std::pair<Tensor, Tensor> observed_batch(const TimeSeries& s) {
    std::vector<double> coords;
    for (std::size_t i = 0; i < s.length(); ++i)
        if (s.observed(i)) coords.push_back(s.t[i]);
    if (coords.size() < 2)
        throw ValidationError("fit: need at least 2 observed samples, have " +
                              std::to_string(coords.size()));
    Tensor target(Shape{s.channels(), coords.size()});
    for (std::size_t c = 0; c < s.channels(); ++c) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < s.length(); ++i)
            if (s.observed(i)) target(c, j++) = s.values[c][i];
    }
    const std::size_t n_obs = coords.size();
    return {Tensor(Shape{1, n_obs}, std::move(coords)), std::move(target)};
}

} // namespace detail

inline FitResult fit(const TimeSeries& series, const MlpSpec& spec, const FitOptions& opts) {
    validate_series(series, "fit");
    spec.validate();
    if (spec.widths.front() != 1)
        throw ValidationError("fit: spec input width must be 1 for a time coordinate");
    if (spec.widths.back() != series.channels())
        throw ValidationError("fit: spec output width " + std::to_string(spec.widths.back()) +
                              " does not match " + std::to_string(series.channels()) +
                              " channels");

    auto [coords, target] = detail::observed_batch(series);
    // The smoothness prior runs over the full time grid, observed or not:
    // coordinates alone reveal nothing about hidden values, and the spurious
    // oscillation it exists to damp lives between the observed samples.
    std::vector<double> grid_t = opts.tv_oversample > 1
                                     ? uniform_grid(series.length() * opts.tv_oversample)
                                     : series.t;
    const std::size_t n_grid = grid_t.size();
    const Tensor tv_coords(Shape{1, n_grid}, std::move(grid_t));
    ParamVector params = mlp::init_params(spec, opts.seed);
    const auto views = mlp::layer_views(spec);

    autodiff::Adam adam(opts.adam);
    FitResult result;
    result.loss_history.reserve(opts.epochs);

    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        try {
            autodiff::Tape tape;
            auto layers = mlp::leaf_params(tape, params, true);
            autodiff::NodeId x = tape.constant(coords);
            autodiff::NodeId y = tape.constant(target);
            autodiff::NodeId data_loss;
            autodiff::NodeId loss;
            if (opts.tv_weight > 0.0) {
                autodiff::NodeId out = mlp::tape_forward(tape, spec, layers, x);
                data_loss = tape.mean(tape.square(tape.sub(out, y)));
                auto fw = mlp::tape_forward_with_derivative(tape, spec, layers,
                                                            tape.constant(tv_coords));
                autodiff::NodeId tv = tape.mean(tape.abs(fw.dout));
                loss = tape.add(data_loss, tape.scale(tv, opts.tv_weight));
            } else {
                autodiff::NodeId out = mlp::tape_forward(tape, spec, layers, x);
                data_loss = tape.mean(tape.square(tape.sub(out, y)));
                loss = data_loss;
            }
            result.loss_history.push_back(tape.value(data_loss)[0]);
            tape.backward(loss);

            std::vector<Tensor*> ps;
            std::vector<const Tensor*> gs;
            std::vector<Tensor> snapshot;
            snapshot.reserve(layers.size() * 2);
            for (const mlp::TapeLayer& l : layers) {
                snapshot.push_back(tape.value(l.w));
                snapshot.push_back(tape.value(l.b));
                gs.push_back(&tape.grad(l.w));
                gs.push_back(&tape.grad(l.b));
            }
            for (Tensor& t : snapshot) ps.push_back(&t);
            adam.update(ps, gs);
            for (std::size_t l = 0; l < views.size(); ++l) {
                const mlp::LayerView& v = views[l];
                const Tensor& w = snapshot[2 * l];
                const Tensor& b = snapshot[2 * l + 1];
                for (std::size_t i = 0; i < w.size(); ++i) params.flat[v.w_offset + i] = w[i];
                for (std::size_t i = 0; i < b.size(); ++i) params.flat[v.b_offset + i] = b[i];
            }
        } catch (const NumericError& e) {
            throw NumericError("fit diverged at epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }

    const Tensor out = mlp::forward(params, coords);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out[i] - target[i];
        acc += d * d;
    }
    result.final_mse = acc / static_cast<double>(out.size());
    result.params = std::move(params);
    return result;
}

// Continuous evaluation of a fitted representation on any coordinate grid.
inline Tensor evaluate(const ParamVector& params, const std::vector<double>& coords) {
    return mlp::forward(params, coords);
}

struct CompareOptions {
    FitOptions fit{};
    std::vector<Activation> activations{Activation::Sine, Activation::Relu, Activation::Tanh,
                                        Activation::Sigmoid};
    double omega0 = 30.0;
    unsigned threads = 0; // 0 = hardware
};

struct ActivationReport {
    Activation activation = Activation::Sine;
    double mean_mse = 0.0;
    std::vector<double> per_series_mse;
    std::vector<std::vector<double>> loss_curves; // per series, per epoch
};

// One fit per (series, activation); per-series seeds are shared across
// activations so initial draws are paired.
inline std::vector<ActivationReport> compare_activations(const std::vector<TimeSeries>& dataset,
                                                         const CompareOptions& opts) {
    if (dataset.empty()) throw ValidationError("compare_activations: empty dataset");
    std::vector<ActivationReport> reports(opts.activations.size());
    for (std::size_t a = 0; a < opts.activations.size(); ++a) {
        ActivationReport& rep = reports[a];
        rep.activation = opts.activations[a];
        rep.per_series_mse.resize(dataset.size());
        rep.loss_curves.resize(dataset.size());
    }
    struct Job {
        std::size_t a, s;
    };
    std::vector<Job> jobs;
    for (std::size_t a = 0; a < opts.activations.size(); ++a)
        for (std::size_t s = 0; s < dataset.size(); ++s) jobs.push_back({a, s});

    parallel_for(jobs.size(), opts.threads, [&](std::size_t j) {
        const Job job = jobs[j];
        const TimeSeries& series = dataset[job.s];
        MlpSpec spec = MlpSpec::inr_default(series.channels(), opts.activations[job.a],
                                            opts.omega0);
        FitOptions fo = opts.fit;
        fo.seed = mix_seed(opts.fit.seed, job.s);
        FitResult r = fit(series, spec, fo);
        reports[job.a].per_series_mse[job.s] = r.final_mse;
        reports[job.a].loss_curves[job.s] = std::move(r.loss_history);
    });

    for (ActivationReport& rep : reports) {
        double acc = 0.0;
        for (double m : rep.per_series_mse) acc += m;
        rep.mean_mse = acc / static_cast<double>(rep.per_series_mse.size());
    }
    return reports;
}

// --- INR1 container ----------------------------------------------------------

struct InrModel {
    ParamVector params;
    std::vector<ChannelScale> scale;
    std::size_t native_length = 0; // grid size the series was fitted on
};

inline void save_inr(std::ostream& out, const InrModel& model) {
    model.params.validate();
    out.write("INR1", 4);
    binio::write_u32(out, static_cast<std::uint32_t>(model.params.spec.widths.size()));
    for (std::size_t w : model.params.spec.widths) binio::write_u64(out, w);
    binio::write_u32(out, static_cast<std::uint32_t>(model.params.spec.activation));
    binio::write_f64(out, model.params.spec.omega0);
    binio::write_u32(out, static_cast<std::uint32_t>(model.scale.size()));
    for (const ChannelScale& s : model.scale) {
        binio::write_f64(out, s.offset);
        binio::write_f64(out, s.gain);
    }
    binio::write_u64(out, model.native_length);
    binio::write_f64_vec(out, model.params.flat);
}

inline InrModel load_inr(std::istream& in) {
    binio::expect_magic(in, "INR1");
    InrModel model;
    const std::uint32_t n_widths = binio::read_u32(in, "width count");
    model.params.spec.widths.resize(n_widths);
    for (std::size_t i = 0; i < n_widths; ++i)
        model.params.spec.widths[i] = binio::read_u64(in, "layer width");
    const std::uint32_t act = binio::read_u32(in, "activation id");
    if (act > 3) throw ValidationError("INR1: unknown activation id " + std::to_string(act));
    model.params.spec.activation = static_cast<Activation>(act);
    model.params.spec.omega0 = binio::read_f64(in, "omega0");
    const std::uint32_t n_scale = binio::read_u32(in, "channel count");
    model.scale.resize(n_scale);
    for (ChannelScale& s : model.scale) {
        s.offset = binio::read_f64(in, "channel offset");
        s.gain = binio::read_f64(in, "channel gain");
    }
    model.native_length = binio::read_u64(in, "native length");
    model.params.flat = binio::read_f64_vec(in, "parameters");
    model.params.validate();
    return model;
}

inline void save_inr_file(const std::string& path, const InrModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    save_inr(out, model);
    if (!out) throw ValidationError("write failed for '" + path + "'");
}

inline InrModel load_inr_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return load_inr(in);
}

} // namespace tsinr::inr
