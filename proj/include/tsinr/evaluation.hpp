#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsinr/autodiff.hpp"
#include "tsinr/errors.hpp"
#include "tsinr/hypertime.hpp"
#include "tsinr/mlp.hpp"
#include "tsinr/pca.hpp"
#include "tsinr/spectral.hpp"
#include "tsinr/tensor.hpp"
#include "tsinr/timeseries.hpp"

// Generative-quality metrics: train-on-synthetic / test-on-real predictive
// score, per-timestep quantile-band precision and recall folded into F1,
// plot-ready 2-D projections, spectral spread profiles, and the paired
// FFT-loss ablation.

namespace tsinr::evaluation {

struct PredictorSpec {
    std::size_t window = 8;
    std::size_t hidden = 32;
    std::size_t epochs = 500;
    double lr = 1e-3;
    std::uint64_t seed = 0;
};

struct EvalReport {
    double predictive_mae = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t n_real = 0;
    std::size_t n_synth = 0;
    std::string config_hash;
};

namespace detail {

inline void require_equal_lengths(const std::vector<TimeSeries>& set, const char* which) {
    if (set.empty()) throw ValidationError(std::string(which) + " set is empty");
    const std::size_t n = set.front().length();
    const std::size_t ch = set.front().channels();
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set[i].length() != n || set[i].channels() != ch)
            throw ValidationError(std::string(which) + " set: series " + std::to_string(i) +
                                  " does not match the common shape");
}

// Raw per-channel values of one series, channels concatenated.
inline std::vector<double> raw_vector(const TimeSeries& s) {
    std::vector<double> v;
    v.reserve(s.length() * s.channels());
    for (std::size_t c = 0; c < s.channels(); ++c)
        for (std::size_t i = 0; i < s.length(); ++i) v.push_back(s.raw(c, i));
    return v;
}

struct MinMax {
    double lo = 0.0, hi = 1.0;
    double map(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

inline MinMax global_minmax(const std::vector<TimeSeries>& set) {
    MinMax mm;
    bool first = true;
    for (const TimeSeries& s : set)
        for (std::size_t c = 0; c < s.channels(); ++c)
            for (std::size_t i = 0; i < s.length(); ++i) {
                const double v = s.raw(c, i);
                if (first) {
                    mm.lo = mm.hi = v;
                    first = false;
                } else {
                    mm.lo = std::min(mm.lo, v);
                    mm.hi = std::max(mm.hi, v);
                }
            }
    return mm;
}

// Sliding windows (p lags -> next value) on the normalized scale, sorted
// lexicographically so the training set is invariant to series order.
inline std::vector<std::vector<double>> windows(const std::vector<TimeSeries>& set,
                                                std::size_t p, const MinMax& mm) {
    std::vector<std::vector<double>> rows;
    for (const TimeSeries& s : set) {
        if (s.length() < p + 1)
            throw ValidationError("predictive_score: series of length " +
                                  std::to_string(s.length()) + " is too short for window " +
                                  std::to_string(p));
        for (std::size_t c = 0; c < s.channels(); ++c) {
            for (std::size_t i = 0; i + p < s.length(); ++i) {
                std::vector<double> row(p + 1);
                for (std::size_t j = 0; j < p; ++j) row[j] = mm.map(s.raw(c, i + j));
                row[p] = mm.map(s.raw(c, i + p));
                rows.push_back(std::move(row));
            }
        }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

} // namespace detail

// MAE of a next-step predictor trained on the synthetic set and tested on the
// real set. Values are normalized by the real set's global min-max.
inline double predictive_score(const std::vector<TimeSeries>& synth,
                               const std::vector<TimeSeries>& real, const PredictorSpec& spec) {
    detail::require_equal_lengths(synth, "synthetic");
    detail::require_equal_lengths(real, "real");
    if (spec.window < 1) throw ValidationError("predictive_score: window must be at least 1");
    const detail::MinMax mm = detail::global_minmax(real);
    const auto train = detail::windows(synth, spec.window, mm);
    const auto test = detail::windows(real, spec.window, mm);

    const std::size_t p = spec.window;
    Tensor x(Shape{p, train.size()}), y(Shape{1, train.size()});
    for (std::size_t i = 0; i < train.size(); ++i) {
        for (std::size_t j = 0; j < p; ++j) x(j, i) = train[i][j];
        y(0, i) = train[i][p];
    }

    MlpSpec net{{p, spec.hidden, 1}, Activation::Relu, 30.0};
    ParamVector params = mlp::init_params(net, spec.seed);
    autodiff::Adam adam(autodiff::AdamConfig{spec.lr, 0.9, 0.999, 1e-8});
    const auto views = mlp::layer_views(net);
    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        autodiff::Tape tape;
        auto layers = mlp::leaf_params(tape, params, true);
        autodiff::NodeId out = mlp::tape_forward(tape, net, layers, tape.constant(x));
        autodiff::NodeId loss = tape.mean(tape.square(tape.sub(out, tape.constant(y))));
        tape.backward(loss);
        std::vector<Tensor> snapshot;
        std::vector<Tensor*> ps;
        std::vector<const Tensor*> gs;
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
            for (std::size_t i = 0; i < v.in * v.out; ++i)
                params.flat[v.w_offset + i] = snapshot[2 * l][i];
            for (std::size_t i = 0; i < v.out; ++i)
                params.flat[v.b_offset + i] = snapshot[2 * l + 1][i];
        }
    }

    Tensor xt(Shape{p, test.size()});
    for (std::size_t i = 0; i < test.size(); ++i)
        for (std::size_t j = 0; j < p; ++j) xt(j, i) = test[i][j];
    const Tensor pred = mlp::forward(params, std::move(xt));
    double mae = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) mae += std::abs(pred[i] - test[i][p]);
    return mae / static_cast<double>(test.size());
}

struct Band {
    double lo = 0.01;
    double hi = 0.99;
};

namespace detail {

// Quantile band with outward index rounding, so the band always includes the
// order statistics flanking the requested quantiles.
inline std::pair<double, double> quantile_band(std::vector<double>& vals, const Band& band) {
    std::sort(vals.begin(), vals.end());
    const double m = static_cast<double>(vals.size() - 1);
    const std::size_t lo_idx = static_cast<std::size_t>(std::floor(band.lo * m));
    const std::size_t hi_idx = static_cast<std::size_t>(std::ceil(band.hi * m));
    const double eps = 1e-9; // keeps collapsed (all-equal) bands non-empty
    return {vals[lo_idx] - eps, vals[hi_idx] + eps};
}

} // namespace detail

struct PrecisionRecall {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Per time step, precision is the fraction of synthetic values inside the real
// set's quantile band and recall the mirror image; both average over steps.
inline PrecisionRecall precision_recall_f1(const std::vector<TimeSeries>& real,
                                           const std::vector<TimeSeries>& synth,
                                           const Band& band = {}) {
    detail::require_equal_lengths(real, "real");
    detail::require_equal_lengths(synth, "synthetic");
    if (real.size() < 10 || synth.size() < 10)
        throw ValidationError("precision_recall_f1: need at least 10 series per set, have " +
                              std::to_string(real.size()) + " and " +
                              std::to_string(synth.size()));
    if (!(band.lo >= 0.0 && band.lo < band.hi && band.hi <= 1.0))
        throw ValidationError("precision_recall_f1: band quantiles must satisfy 0 <= lo < hi <= 1");
    if (real.front().length() != synth.front().length() ||
        real.front().channels() != synth.front().channels())
        throw ValidationError("precision_recall_f1: real and synthetic shapes differ");

    const std::size_t n = real.front().length();
    const std::size_t ch = real.front().channels();
    double p_acc = 0.0, r_acc = 0.0;
    std::size_t steps = 0;
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t t = 0; t < n; ++t) {
            std::vector<double> rv(real.size()), sv(synth.size());
            for (std::size_t i = 0; i < real.size(); ++i) rv[i] = real[i].raw(c, t);
            for (std::size_t i = 0; i < synth.size(); ++i) sv[i] = synth[i].raw(c, t);
            std::vector<double> rs = rv, ss = sv;
            const auto [rl, rh] = detail::quantile_band(rs, band);
            const auto [sl, sh] = detail::quantile_band(ss, band);
            std::size_t in_real = 0, in_synth = 0;
            for (double v : sv) in_real += (v >= rl && v <= rh);
            for (double v : rv) in_synth += (v >= sl && v <= sh);
            p_acc += static_cast<double>(in_real) / static_cast<double>(sv.size());
            r_acc += static_cast<double>(in_synth) / static_cast<double>(rv.size());
            ++steps;
        }
    }
    PrecisionRecall out;
    out.precision = p_acc / static_cast<double>(steps);
    out.recall = r_acc / static_cast<double>(steps);
    out.f1 = out.precision + out.recall > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

struct ProjectedPoint {
    double x = 0.0, y = 0.0;
    bool synthetic = false;
};

// 2-D PCA of the union, for external plotting.
inline std::vector<ProjectedPoint> export_projection(const std::vector<TimeSeries>& real,
                                                     const std::vector<TimeSeries>& synth) {
    detail::require_equal_lengths(real, "real");
    detail::require_equal_lengths(synth, "synthetic");
    std::vector<std::vector<double>> rows;
    for (const TimeSeries& s : real) rows.push_back(detail::raw_vector(s));
    for (const TimeSeries& s : synth) rows.push_back(detail::raw_vector(s));
    const pca::Pca p = pca::fit(rows, 2);
    std::vector<ProjectedPoint> pts;
    pts.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::vector<double> c = pca::project(p, rows[i]);
        pts.push_back({c[0], c[1], i >= real.size()});
    }
    return pts;
}

// Per-frequency-bin standard deviation of magnitude spectra across the corpus
// (channel profiles averaged).
inline std::vector<double> spectral_variance_profile(const std::vector<TimeSeries>& corpus) {
    detail::require_equal_lengths(corpus, "corpus");
    if (corpus.size() < 2)
        throw ValidationError("spectral_variance_profile: need at least 2 series");
    const std::size_t ch = corpus.front().channels();
    std::vector<double> profile;
    for (std::size_t c = 0; c < ch; ++c) {
        std::vector<std::vector<double>> mags;
        for (const TimeSeries& s : corpus) {
            std::vector<double> raw(s.length());
            for (std::size_t i = 0; i < s.length(); ++i) raw[i] = s.raw(c, i);
            const spectral::Spectrum sp = spectral::rfft(raw);
            std::vector<double> m(sp.bins());
            for (std::size_t k = 0; k < sp.bins(); ++k) m[k] = sp.magnitude(k);
            mags.push_back(std::move(m));
        }
        const std::size_t bins = mags.front().size();
        if (profile.empty()) profile.assign(bins, 0.0);
        for (std::size_t k = 0; k < bins; ++k) {
            double mean = 0.0;
            for (const auto& m : mags) mean += m[k];
            mean /= static_cast<double>(mags.size());
            double var = 0.0;
            for (const auto& m : mags) var += (m[k] - mean) * (m[k] - mean);
            var /= static_cast<double>(mags.size() - 1);
            profile[k] += std::sqrt(var) / static_cast<double>(ch);
        }
    }
    return profile;
}

// Both sets against each other with every metric; the common CLI payload.
inline EvalReport evaluate_sets(const std::vector<TimeSeries>& real,
                                const std::vector<TimeSeries>& synth,
                                const PredictorSpec& predictor, const Band& band = {}) {
    EvalReport rep;
    rep.n_real = real.size();
    rep.n_synth = synth.size();
    rep.predictive_mae = predictive_score(synth, real, predictor);
    const PrecisionRecall pr = precision_recall_f1(real, synth, band);
    rep.precision = pr.precision;
    rep.recall = pr.recall;
    rep.f1 = pr.f1;
    return rep;
}

struct AblationConfig {
    hypertime::TrainConfig train{};
    hypertime::GenerateOptions generate{};
    PredictorSpec predictor{};
    Band band{};
};

struct AblationResult {
    EvalReport with_fft;
    EvalReport without_fft;
    hypertime::LossComponents final_with;
    hypertime::LossComponents final_without;
};

// Two trainings differing only in lambda3, with shared seeds end to end, so
// metric gaps isolate the spectral loss term.
inline AblationResult ablation_fft(const std::vector<TimeSeries>& corpus,
                                   const AblationConfig& cfg) {
    AblationResult result;
    for (int arm = 0; arm < 2; ++arm) {
        hypertime::TrainConfig tc = cfg.train;
        if (arm == 1) tc.lambdas.fft = 0.0;
        hypertime::TrainResult trained = hypertime::train_hypertime(corpus, tc);
        const auto generated = hypertime::interpolate_generate(trained.model, corpus,
                                                               cfg.generate);
        std::vector<TimeSeries> synth;
        synth.reserve(generated.size());
        for (const auto& g : generated) synth.push_back(g.series);
        EvalReport rep = evaluate_sets(corpus, synth, cfg.predictor, cfg.band);
        if (arm == 0) {
            result.with_fft = rep;
            result.final_with = trained.history.back();
        } else {
            result.without_fft = rep;
            result.final_without = trained.history.back();
        }
    }
    return result;
}

} // namespace tsinr::evaluation
