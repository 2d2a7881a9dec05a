#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsinr/autodiff.hpp"
#include "tsinr/binio.hpp"
#include "tsinr/errors.hpp"
#include "tsinr/mlp.hpp"
#include "tsinr/parallel.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/spectral.hpp"
#include "tsinr/tensor.hpp"
#include "tsinr/timeseries.hpp"

// HyperTime: a set encoder maps (t, f(t)) pairs to one latent per series, a
// hypernet decodes latents into the weights of a per-series INR (the hyponet),
// and the whole chain trains end to end under
//     L = L_rec + lambda1 * L_weights + lambda2 * L_latent + lambda3 * L_FFT.
// New series come from interpolating latents of known pairs.

namespace tsinr::hypertime {

struct Lambdas {
    double weights = 1e-4;
    double latent = 1e-3;
    double fft = 1e-2;
};

struct Embedding {
    std::vector<double> z;
    std::string source;
};

struct HyperTimeModel {
    ParamVector encoder; // sine MLP, widths (1+C) x hidden x hidden x latent
    ParamVector hyper;   // relu MLP, widths latent x hidden x P
    MlpSpec hypo_spec;   // the INR every latent decodes into
    Lambdas lambdas;
    std::size_t native_length = 0;
    std::vector<std::vector<ChannelScale>> corpus_scales; // per training series

    std::size_t latent_dim() const { return encoder.spec.widths.back(); }
    std::size_t channels() const { return hypo_spec.widths.back(); }

    void validate() const {
        encoder.validate();
        hyper.validate();
        hypo_spec.validate();
        if (hyper.spec.widths.back() != hypo_spec.param_count())
            throw ValidationError("HyperTimeModel: hypernet emits " +
                                  std::to_string(hyper.spec.widths.back()) +
                                  " values, hyponet needs " +
                                  std::to_string(hypo_spec.param_count()));
        if (hyper.spec.widths.front() != encoder.spec.widths.back())
            throw ValidationError("HyperTimeModel: latent width mismatch between encoder and "
                                  "hypernet");
        if (encoder.spec.widths.front() != 1 + hypo_spec.widths.back())
            throw ValidationError("HyperTimeModel: encoder input width must be 1 + channels");
    }
};

namespace detail {

// Order-canonical mean: sort, then reduce as a balanced pairwise tree. The
// result is bit-identical under permutation (sorting) and under duplication of
// the whole set (duplicates pair off first, exactly doubling every partial
// sum).
inline double invariant_mean(std::vector<double> vals) {
    if (vals.empty()) throw ValidationError("invariant_mean: empty input");
    const double denom = static_cast<double>(vals.size());
    std::sort(vals.begin(), vals.end());
    std::size_t n = vals.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) vals[i] = vals[2 * i] + vals[2 * i + 1];
        if (n % 2 != 0) {
            vals[half] = vals[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return vals[0] / denom;
}

inline Tensor invariant_mean_cols(const Tensor& a) {
    Tensor out(Shape{a.rows(), 1});
    for (std::size_t r = 0; r < a.rows(); ++r)
        out[r] = invariant_mean(std::vector<double>(a.row_ptr(r), a.row_ptr(r) + a.cols()));
    return out;
}

// Set-pooling as a tape node: canonical forward, uniform 1/cols backward
// (the derivative of a mean does not depend on summation order).
inline autodiff::NodeId set_pool_node(autodiff::Tape& tape, autodiff::NodeId a) {
    const Tensor& ta = tape.value(a);
    const std::size_t cols = ta.cols();
    autodiff::CustomOp op;
    op.name = "set_pool";
    op.backward = [cols](const Tensor& out_grad, const std::vector<const Tensor*>&,
                         const std::vector<Tensor*>& input_grads) {
        if (input_grads[0] == nullptr) return;
        Tensor& d = *input_grads[0];
        const double inv = 1.0 / static_cast<double>(cols);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            const double w = out_grad[r] * inv;
            double* row = d.row_ptr(r);
            for (std::size_t j = 0; j < cols; ++j) row[j] += w;
        }
    };
    return tape.custom(std::move(op), invariant_mean_cols(ta), {a});
}

// Encoder input: row 0 is the time grid, rows 1..C the channel values.
inline Tensor encoder_input(const TimeSeries& s) {
    Tensor x(Shape{1 + s.channels(), s.length()});
    for (std::size_t i = 0; i < s.length(); ++i) x(0, i) = s.t[i];
    for (std::size_t c = 0; c < s.channels(); ++c)
        for (std::size_t i = 0; i < s.length(); ++i) x(1 + c, i) = s.values[c][i];
    return x;
}

} // namespace detail

// Per-series latent from mean-pooled per-pair encodings. The input is a set
// of (t, value) pairs: order and multiplicity are irrelevant, so unlike the
// training entry points this accepts unsorted and duplicated time stamps.
inline Embedding encode(const HyperTimeModel& model, const TimeSeries& s) {
    model.validate();
    if (s.channels() != model.channels())
        throw ValidationError("encode: series has " + std::to_string(s.channels()) +
                              " channels, model expects " + std::to_string(model.channels()));
    if (s.length() == 0) throw ValidationError("encode: empty series");
    if (s.observed_count() != s.length())
        throw ValidationError("encode: series has missing samples");
    for (std::size_t i = 0; i < s.length(); ++i)
        if (!(s.t[i] >= -1.0 && s.t[i] <= 1.0))
            throw ValidationError("encode: t[" + std::to_string(i) + "] outside [-1, 1]");
    for (std::size_t c = 0; c < s.channels(); ++c) {
        if (s.values[c].size() != s.length())
            throw ValidationError("encode: channel " + std::to_string(c) +
                                  " length does not match grid");
        for (double v : s.values[c])
            if (!std::isfinite(v)) throw ValidationError("encode: non-finite value");
    }
    const Tensor e = mlp::forward(model.encoder, detail::encoder_input(s));
    const Tensor z = detail::invariant_mean_cols(e);
    Embedding emb;
    emb.z.assign(z.data(), z.data() + z.size());
    return emb;
}

// Latent to hyponet weights.
inline ParamVector decode(const HyperTimeModel& model, const std::vector<double>& z) {
    model.validate();
    if (z.size() != model.latent_dim())
        throw ValidationError("decode: latent has " + std::to_string(z.size()) +
                              " entries, model expects " + std::to_string(model.latent_dim()));
    Tensor col(Shape{z.size(), 1}, z);
    Tensor flat = mlp::forward(model.hyper, std::move(col));
    ParamVector p;
    p.spec = model.hypo_spec;
    p.flat.assign(flat.data(), flat.data() + flat.size());
    return p;
}

struct LossComponents {
    double rec = 0.0;
    double weights = 0.0;
    double latent = 0.0;
    double fft = 0.0;

    double total(const Lambdas& l) const {
        return rec + l.weights * weights + l.latent * latent + l.fft * fft;
    }
};

namespace detail {

struct SeriesTerms {
    autodiff::NodeId rec, wgt, lat, fft, total;
};

// One series' slice of the loss: encoder -> pool -> hypernet -> hyponet ->
// reconstruction, plus the three regularizers.
inline SeriesTerms series_terms(autodiff::Tape& tape, const HyperTimeModel& model,
                                const std::vector<mlp::TapeLayer>& enc_layers,
                                const std::vector<mlp::TapeLayer>& hyper_layers,
                                const TimeSeries& s) {
    using autodiff::NodeId;
    NodeId x_pairs = tape.constant(encoder_input(s));
    NodeId enc_out = mlp::tape_forward(tape, model.encoder.spec, enc_layers, x_pairs);
    NodeId z = set_pool_node(tape, enc_out);
    NodeId flat = mlp::tape_forward(tape, model.hyper.spec, hyper_layers, z);
    auto hypo_layers = mlp::slice_params(tape, model.hypo_spec, flat);
    NodeId coords = tape.constant(Tensor(Shape{1, s.length()}, s.t));
    NodeId out = mlp::tape_forward(tape, model.hypo_spec, hypo_layers, coords);

    Tensor target(Shape{s.channels(), s.length()});
    for (std::size_t c = 0; c < s.channels(); ++c)
        for (std::size_t i = 0; i < s.length(); ++i) target(c, i) = s.values[c][i];
    SeriesTerms t;
    t.rec = tape.mean(tape.square(tape.sub(out, tape.constant(std::move(target)))));
    t.wgt = tape.mean(tape.square(flat));
    t.lat = tape.mean(tape.square(z));
    NodeId fft_acc{};
    for (std::size_t c = 0; c < s.channels(); ++c) {
        NodeId row = s.channels() == 1 ? out : tape.slice(out, c * s.length(), 1, s.length());
        NodeId term = spectral::fft_loss_node(tape, row, s.values[c]);
        fft_acc = c == 0 ? term : tape.add(fft_acc, term);
    }
    t.fft = s.channels() == 1 ? fft_acc
                              : tape.scale(fft_acc, 1.0 / static_cast<double>(s.channels()));
    const Lambdas& l = model.lambdas;
    t.total = tape.add(t.rec, tape.add(tape.scale(t.wgt, l.weights),
                                       tape.add(tape.scale(t.lat, l.latent),
                                                tape.scale(t.fft, l.fft))));
    return t;
}

inline void check_components(const LossComponents& c) {
    if (!std::isfinite(c.rec)) throw NumericError("hypertime loss: non-finite L_rec");
    if (!std::isfinite(c.weights)) throw NumericError("hypertime loss: non-finite L_weights");
    if (!std::isfinite(c.latent)) throw NumericError("hypertime loss: non-finite L_latent");
    if (!std::isfinite(c.fft)) throw NumericError("hypertime loss: non-finite L_FFT");
}

} // namespace detail

// Mean loss components over a batch; values only, no gradients.
inline LossComponents batch_loss(const HyperTimeModel& model,
                                 const std::vector<TimeSeries>& batch) {
    model.validate();
    if (batch.empty()) throw ValidationError("hypertime loss: empty batch");
    LossComponents sum;
    for (const TimeSeries& s : batch) {
        autodiff::Tape tape;
        auto enc = mlp::leaf_params(tape, model.encoder, false);
        auto hyp = mlp::leaf_params(tape, model.hyper, false);
        detail::SeriesTerms t = detail::series_terms(tape, model, enc, hyp, s);
        sum.rec += tape.value(t.rec)[0];
        sum.weights += tape.value(t.wgt)[0];
        sum.latent += tape.value(t.lat)[0];
        sum.fft += tape.value(t.fft)[0];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    LossComponents mean{sum.rec * inv, sum.weights * inv, sum.latent * inv, sum.fft * inv};
    detail::check_components(mean);
    return mean;
}

// Mean loss plus its gradient with respect to encoder.flat followed by
// hyper.flat (the layout finite-difference checks work against).
inline std::pair<LossComponents, std::vector<double>>
batch_loss_with_grad(const HyperTimeModel& model, const std::vector<TimeSeries>& batch) {
    model.validate();
    if (batch.empty()) throw ValidationError("hypertime loss: empty batch");
    const std::size_t ne = model.encoder.flat.size();
    const std::size_t nh = model.hyper.flat.size();
    std::vector<double> grad(ne + nh, 0.0);
    LossComponents sum;
    const auto enc_views = mlp::layer_views(model.encoder.spec);
    const auto hyp_views = mlp::layer_views(model.hyper.spec);
    for (const TimeSeries& s : batch) {
        autodiff::Tape tape;
        auto enc = mlp::leaf_params(tape, model.encoder, true);
        auto hyp = mlp::leaf_params(tape, model.hyper, true);
        detail::SeriesTerms t = detail::series_terms(tape, model, enc, hyp, s);
        sum.rec += tape.value(t.rec)[0];
        sum.weights += tape.value(t.wgt)[0];
        sum.latent += tape.value(t.lat)[0];
        sum.fft += tape.value(t.fft)[0];
        tape.backward(t.total);
        for (std::size_t l = 0; l < enc.size(); ++l) {
            const Tensor& gw = tape.grad(enc[l].w);
            const Tensor& gb = tape.grad(enc[l].b);
            for (std::size_t i = 0; i < gw.size(); ++i)
                grad[enc_views[l].w_offset + i] += gw[i];
            for (std::size_t i = 0; i < gb.size(); ++i)
                grad[enc_views[l].b_offset + i] += gb[i];
        }
        for (std::size_t l = 0; l < hyp.size(); ++l) {
            const Tensor& gw = tape.grad(hyp[l].w);
            const Tensor& gb = tape.grad(hyp[l].b);
            for (std::size_t i = 0; i < gw.size(); ++i)
                grad[ne + hyp_views[l].w_offset + i] += gw[i];
            for (std::size_t i = 0; i < gb.size(); ++i)
                grad[ne + hyp_views[l].b_offset + i] += gb[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad) g *= inv;
    LossComponents mean{sum.rec * inv, sum.weights * inv, sum.latent * inv, sum.fft * inv};
    detail::check_components(mean);
    return {mean, std::move(grad)};
}

struct TrainConfig {
    std::size_t steps = 2000;
    autodiff::AdamConfig adam{};
    std::uint64_t seed = 0;
    Lambdas lambdas{};
    std::size_t latent_dim = 40;
    std::size_t encoder_hidden = 128;
    std::size_t hyper_hidden = 128;
    std::vector<std::size_t> hypo_hidden{60, 60, 60};
    double encoder_omega0 = 30.0;
    double hypo_omega0 = 30.0;
    std::size_t chunk = 16; // series per tape; fixes the gradient summation order
    unsigned threads = 0;
    std::size_t checkpoint_every = 0; // 0 = no intermediate checkpoints
    std::string checkpoint_path;
};

struct TrainResult {
    HyperTimeModel model;
    std::vector<LossComponents> history; // one entry per step, pre-update loss
};

inline void save_hypertime_file(const std::string& path, const HyperTimeModel& model);

inline HyperTimeModel init_hypertime(const std::vector<TimeSeries>& corpus,
                                     const TrainConfig& cfg) {
    if (corpus.empty()) throw ValidationError("train_hypertime: empty corpus");
    const std::size_t channels = corpus.front().channels();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        validate_series(corpus[i], "train_hypertime series " + std::to_string(i));
        if (corpus[i].channels() != channels)
            throw ValidationError("train_hypertime: series " + std::to_string(i) + " has " +
                                  std::to_string(corpus[i].channels()) +
                                  " channels, expected " + std::to_string(channels));
        if (corpus[i].observed_count() != corpus[i].length())
            throw ValidationError("train_hypertime: series " + std::to_string(i) +
                                  " has missing samples; the training corpus must be fully "
                                  "observed");
    }
    HyperTimeModel model;
    std::vector<std::size_t> hypo_widths{1};
    hypo_widths.insert(hypo_widths.end(), cfg.hypo_hidden.begin(), cfg.hypo_hidden.end());
    hypo_widths.push_back(channels);
    model.hypo_spec = MlpSpec{hypo_widths, Activation::Sine, cfg.hypo_omega0};
    MlpSpec enc_spec{{1 + channels, cfg.encoder_hidden, cfg.encoder_hidden, cfg.latent_dim},
                     Activation::Sine, cfg.encoder_omega0};
    MlpSpec hyper_spec{{cfg.latent_dim, cfg.hyper_hidden, model.hypo_spec.param_count()},
                       Activation::Relu, 30.0};
    model.encoder = mlp::init_params(enc_spec, mix_seed(cfg.seed, 1));
    model.hyper = mlp::init_params(hyper_spec, mix_seed(cfg.seed, 2));
    model.lambdas = cfg.lambdas;
    model.native_length = corpus.front().length();
    for (const TimeSeries& s : corpus) model.corpus_scales.push_back(s.scale);
    model.validate();
    return model;
}

// Full-batch training. Each step accumulates per-series gradients chunk by
// chunk in a fixed order, so results do not depend on thread count.
inline TrainResult train_hypertime(const std::vector<TimeSeries>& corpus, const TrainConfig& cfg) {
    TrainResult result;
    result.model = init_hypertime(corpus, cfg);
    HyperTimeModel& model = result.model;

    const std::size_t chunk = std::max<std::size_t>(1, cfg.chunk);
    const std::size_t n_chunks = (corpus.size() + chunk - 1) / chunk;
    const std::size_t ne = model.encoder.flat.size();
    const std::size_t nh = model.hyper.flat.size();
    const auto enc_views = mlp::layer_views(model.encoder.spec);
    const auto hyp_views = mlp::layer_views(model.hyper.spec);

    autodiff::Adam adam(cfg.adam);
    Tensor enc_flat(Shape{ne, 1}, model.encoder.flat);
    Tensor hyp_flat(Shape{nh, 1}, model.hyper.flat);

    struct ChunkOut {
        LossComponents sum;
        std::vector<double> grad; // encoder then hyper layout
    };

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        std::vector<ChunkOut> outs(n_chunks);
        try {
            parallel_for(n_chunks, cfg.threads, [&](std::size_t ci) {
                ChunkOut& out = outs[ci];
                out.grad.assign(ne + nh, 0.0);
                const std::size_t lo = ci * chunk;
                const std::size_t hi = std::min(corpus.size(), lo + chunk);
                autodiff::Tape tape;
                auto enc = mlp::leaf_params(tape, model.encoder, true);
                auto hyp = mlp::leaf_params(tape, model.hyper, true);
                autodiff::NodeId chunk_total{};
                for (std::size_t s = lo; s < hi; ++s) {
                    detail::SeriesTerms t =
                        detail::series_terms(tape, model, enc, hyp, corpus[s]);
                    out.sum.rec += tape.value(t.rec)[0];
                    out.sum.weights += tape.value(t.wgt)[0];
                    out.sum.latent += tape.value(t.lat)[0];
                    out.sum.fft += tape.value(t.fft)[0];
                    chunk_total = s == lo ? t.total : tape.add(chunk_total, t.total);
                }
                tape.backward(chunk_total);
                for (std::size_t l = 0; l < enc.size(); ++l) {
                    const Tensor& gw = tape.grad(enc[l].w);
                    const Tensor& gb = tape.grad(enc[l].b);
                    for (std::size_t i = 0; i < gw.size(); ++i)
                        out.grad[enc_views[l].w_offset + i] += gw[i];
                    for (std::size_t i = 0; i < gb.size(); ++i)
                        out.grad[enc_views[l].b_offset + i] += gb[i];
                }
                for (std::size_t l = 0; l < hyp.size(); ++l) {
                    const Tensor& gw = tape.grad(hyp[l].w);
                    const Tensor& gb = tape.grad(hyp[l].b);
                    for (std::size_t i = 0; i < gw.size(); ++i)
                        out.grad[ne + hyp_views[l].w_offset + i] += gw[i];
                    for (std::size_t i = 0; i < gb.size(); ++i)
                        out.grad[ne + hyp_views[l].b_offset + i] += gb[i];
                }
            });
        } catch (const NumericError& e) {
            throw NumericError("train_hypertime diverged at step " + std::to_string(step) + ": " +
                               e.what());
        }

        const double inv = 1.0 / static_cast<double>(corpus.size());
        LossComponents mean;
        Tensor genc(Shape{ne, 1}), ghyp(Shape{nh, 1});
        for (const ChunkOut& out : outs) { // ascending chunk order: deterministic sums
            mean.rec += out.sum.rec;
            mean.weights += out.sum.weights;
            mean.latent += out.sum.latent;
            mean.fft += out.sum.fft;
            for (std::size_t i = 0; i < ne; ++i) genc[i] += out.grad[i];
            for (std::size_t i = 0; i < nh; ++i) ghyp[i] += out.grad[ne + i];
        }
        mean.rec *= inv;
        mean.weights *= inv;
        mean.latent *= inv;
        mean.fft *= inv;
        detail::check_components(mean);
        result.history.push_back(mean);
        for (std::size_t i = 0; i < ne; ++i) genc[i] *= inv;
        for (std::size_t i = 0; i < nh; ++i) ghyp[i] *= inv;

        adam.update({&enc_flat, &hyp_flat}, {&genc, &ghyp});
        std::copy(enc_flat.data(), enc_flat.data() + ne, model.encoder.flat.begin());
        std::copy(hyp_flat.data(), hyp_flat.data() + nh, model.hyper.flat.begin());

        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
            (step + 1) % cfg.checkpoint_every == 0)
            save_hypertime_file(cfg.checkpoint_path, model);
    }
    return result;
}

// --- generation --------------------------------------------------------------

struct GeneratedSeries {
    TimeSeries series;
    std::vector<double> z;
    std::size_t from_a = 0, from_b = 0;
    double alpha = 0.0;
};

// Decodes a latent onto the native grid and attaches an interpolated
// normalization scale.
inline TimeSeries materialize(const HyperTimeModel& model, const std::vector<double>& z,
                              const std::vector<ChannelScale>& scale) {
    ParamVector hypo = decode(model, z);
    TimeSeries s;
    s.t = uniform_grid(model.native_length);
    const Tensor out = mlp::forward(hypo, s.t);
    s.values.resize(model.channels());
    for (std::size_t c = 0; c < model.channels(); ++c)
        s.values[c].assign(out.row_ptr(c), out.row_ptr(c) + s.t.size());
    s.scale = scale;
    return s;
}

struct GenerateOptions {
    std::size_t n_samples = 100;
    double alpha_lo = 0.25;
    double alpha_hi = 0.75;
    std::uint64_t seed = 0;
};

// New series from convex combinations of corpus latents; alpha = 0 or 1 give
// back the decoded endpoints exactly.
inline std::vector<GeneratedSeries> interpolate_generate(const HyperTimeModel& model,
                                                         const std::vector<TimeSeries>& corpus,
                                                         const GenerateOptions& opts) {
    model.validate();
    if (corpus.size() < 2)
        throw ValidationError("interpolate_generate: need at least 2 corpus series");
    if (!(opts.alpha_lo <= opts.alpha_hi))
        throw ValidationError("interpolate_generate: alpha_lo must not exceed alpha_hi");
    std::vector<Embedding> latents(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) latents[i] = encode(model, corpus[i]);

    Rng rng(opts.seed);
    std::vector<GeneratedSeries> out;
    out.reserve(opts.n_samples);
    for (std::size_t k = 0; k < opts.n_samples; ++k) {
        const std::size_t a = rng.integer(corpus.size());
        std::size_t b = rng.integer(corpus.size() - 1);
        if (b >= a) ++b;
        const double alpha = rng.uniform(opts.alpha_lo, opts.alpha_hi);
        GeneratedSeries g;
        g.from_a = a;
        g.from_b = b;
        g.alpha = alpha;
        g.z.resize(model.latent_dim());
        for (std::size_t i = 0; i < g.z.size(); ++i)
            g.z[i] = (1.0 - alpha) * latents[a].z[i] + alpha * latents[b].z[i];
        std::vector<ChannelScale> scale(model.channels());
        for (std::size_t c = 0; c < model.channels(); ++c) {
            const ChannelScale& sa = corpus[a].scale[c];
            const ChannelScale& sb = corpus[b].scale[c];
            scale[c].offset = (1.0 - alpha) * sa.offset + alpha * sb.offset;
            scale[c].gain = (1.0 - alpha) * sa.gain + alpha * sb.gain;
        }
        g.series = materialize(model, g.z, scale);
        out.push_back(std::move(g));
    }
    return out;
}

// --- HYT1 container ----------------------------------------------------------

namespace detail {

inline void write_spec(std::ostream& out, const MlpSpec& spec) {
    binio::write_u32(out, static_cast<std::uint32_t>(spec.widths.size()));
    for (std::size_t w : spec.widths) binio::write_u64(out, w);
    binio::write_u32(out, static_cast<std::uint32_t>(spec.activation));
    binio::write_f64(out, spec.omega0);
}

inline MlpSpec read_spec(std::istream& in) {
    MlpSpec spec;
    const std::uint32_t n = binio::read_u32(in, "width count");
    spec.widths.resize(n);
    for (std::size_t i = 0; i < n; ++i) spec.widths[i] = binio::read_u64(in, "layer width");
    const std::uint32_t act = binio::read_u32(in, "activation id");
    if (act > 3) throw ValidationError("HYT1: unknown activation id " + std::to_string(act));
    spec.activation = static_cast<Activation>(act);
    spec.omega0 = binio::read_f64(in, "omega0");
    return spec;
}

} // namespace detail

inline void save_hypertime(std::ostream& out, const HyperTimeModel& model) {
    model.validate();
    out.write("HYT1", 4);
    detail::write_spec(out, model.encoder.spec);
    binio::write_f64_vec(out, model.encoder.flat);
    detail::write_spec(out, model.hyper.spec);
    binio::write_f64_vec(out, model.hyper.flat);
    detail::write_spec(out, model.hypo_spec);
    binio::write_f64(out, model.lambdas.weights);
    binio::write_f64(out, model.lambdas.latent);
    binio::write_f64(out, model.lambdas.fft);
    binio::write_u64(out, model.native_length);
    binio::write_u32(out, static_cast<std::uint32_t>(model.corpus_scales.size()));
    for (const auto& scales : model.corpus_scales) {
        binio::write_u32(out, static_cast<std::uint32_t>(scales.size()));
        for (const ChannelScale& s : scales) {
            binio::write_f64(out, s.offset);
            binio::write_f64(out, s.gain);
        }
    }
}

inline HyperTimeModel load_hypertime(std::istream& in) {
    binio::expect_magic(in, "HYT1");
    HyperTimeModel model;
    model.encoder.spec = detail::read_spec(in);
    model.encoder.flat = binio::read_f64_vec(in, "encoder parameters");
    model.hyper.spec = detail::read_spec(in);
    model.hyper.flat = binio::read_f64_vec(in, "hypernet parameters");
    model.hypo_spec = detail::read_spec(in);
    model.lambdas.weights = binio::read_f64(in, "lambda1");
    model.lambdas.latent = binio::read_f64(in, "lambda2");
    model.lambdas.fft = binio::read_f64(in, "lambda3");
    model.native_length = binio::read_u64(in, "native length");
    const std::uint32_t n_series = binio::read_u32(in, "series count");
    model.corpus_scales.resize(n_series);
    for (auto& scales : model.corpus_scales) {
        const std::uint32_t n_ch = binio::read_u32(in, "scale channel count");
        scales.resize(n_ch);
        for (ChannelScale& s : scales) {
            s.offset = binio::read_f64(in, "channel offset");
            s.gain = binio::read_f64(in, "channel gain");
        }
    }
    model.validate();
    return model;
}

inline void save_hypertime_file(const std::string& path, const HyperTimeModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    save_hypertime(out, model);
    if (!out) throw ValidationError("write failed for '" + path + "'");
}

inline HyperTimeModel load_hypertime_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return load_hypertime(in);
}

} // namespace tsinr::hypertime
