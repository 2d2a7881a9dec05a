#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsinr/errors.hpp"
#include "tsinr/inr.hpp"
#include "tsinr/mlp.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/spectral.hpp"
#include "tsinr/timeseries.hpp"

// Missing-value imputation: random masking, INR fitting on the observed subset
// (optionally with the total-variation prior), classical baselines, and the
// MSE/FFTE report against held ground truth.

namespace tsinr::imputation {

struct MaskedSeries {
    TimeSeries series; // values intact; mask marks the hidden subset
    double missing_fraction = 0.0;
};

struct ImputationReport {
    std::string method;
    double mse = 0.0;
    double ffte = 0.0;
    double fraction = 0.0;
};

// Hides round(fraction * N) uniformly chosen samples.
inline MaskedSeries mask_series(const TimeSeries& series, double fraction, std::uint64_t seed) {
    validate_series(series, "mask_series");
    if (fraction < 0.0 || fraction >= 1.0)
        throw ValidationError("mask_series: fraction must be in [0, 1), got " +
                              std::to_string(fraction));
    const std::size_t n = series.length();
    const std::size_t hide =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n - hide < 2)
        throw ValidationError("mask_series: fraction " + std::to_string(fraction) + " leaves " +
                              std::to_string(n - hide) + " observed samples, need at least 2");
    MaskedSeries out{series, fraction};
    out.series.mask.assign(n, 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    for (std::size_t i = 0; i < hide; ++i) out.series.mask[order[i]] = 0;
    return out;
}

// Mean absolute input-derivative of the representation at the given
// coordinates.
inline double tv_prior(const ParamVector& params, const std::vector<double>& t_samples) {
    if (t_samples.empty()) throw ValidationError("tv_prior: empty sample set");
    autodiff::Tape tape;
    auto layers = mlp::leaf_params(tape, params, false);
    autodiff::NodeId x = tape.constant(Tensor(Shape{1, t_samples.size()}, t_samples));
    auto fw = mlp::tape_forward_with_derivative(tape, params.spec, layers, x);
    return tape.value(tape.mean(tape.abs(fw.dout)))[0];
}

namespace detail {

// MSE and FFTE of a full-grid reconstruction against the intact values,
// averaged over channels. Both metrics are on the normalized scale.
inline ImputationReport report_against_truth(const TimeSeries& truth,
                                             const std::vector<std::vector<double>>& imputed,
                                             std::string method, double fraction) {
    ImputationReport rep;
    rep.method = std::move(method);
    rep.fraction = fraction;
    double mse = 0.0, ffte = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < truth.channels(); ++c) {
        for (std::size_t i = 0; i < truth.length(); ++i) {
            const double d = imputed[c][i] - truth.values[c][i];
            mse += d * d;
            ++count;
        }
        ffte += spectral::ffte(truth.values[c], imputed[c]);
    }
    rep.mse = mse / static_cast<double>(count);
    rep.ffte = ffte / static_cast<double>(truth.channels());
    return rep;
}

inline std::vector<std::size_t> observed_indices(const TimeSeries& s) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.length(); ++i)
        if (s.observed(i)) idx.push_back(i);
    return idx;
}

// Natural cubic spline through (knots, values); second derivatives from the
// standard tridiagonal system with zero end curvature.
struct CubicSpline {
    std::vector<double> x, y, m;

    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x(std::move(xs)), y(std::move(ys)) {
        const std::size_t n = x.size();
        if (n < 4) throw ValidationError("cubic spline needs at least 4 points, have " +
                                         std::to_string(n));
        m.assign(n, 0.0);
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        // Thomas algorithm; the first and last rows are identities.
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1]; // sub-diagonal entry of row i
            const double w = h0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }

    double operator()(double xq) const {
        if (xq <= x.front()) return y.front();
        if (xq >= x.back()) return y.back();
        std::size_t hi = static_cast<std::size_t>(
            std::upper_bound(x.begin(), x.end(), xq) - x.begin());
        const std::size_t lo = hi - 1;
        const double h = x[hi] - x[lo];
        const double a = (x[hi] - xq) / h;
        const double b = (xq - x[lo]) / h;
        return a * y[lo] + b * y[hi] +
               ((a * a * a - a) * m[lo] + (b * b * b - b) * m[hi]) * h * h / 6.0;
    }
};

} // namespace detail

struct InrImputeOptions {
    inr::FitOptions fit{};
    double tv_weight = 1e-3; // applied only when use_tv is set
    double omega0 = 30.0;    // lower values bias the fill toward smoother signals
};

// Fits an INR on the observed subset and reads off the full grid.
inline std::pair<TimeSeries, ImputationReport> impute_inr(const MaskedSeries& masked, bool use_tv,
                                                          const InrImputeOptions& opts) {
    const TimeSeries& s = masked.series;
    validate_series(s, "impute_inr");
    MlpSpec spec = MlpSpec::inr_default(s.channels(), Activation::Sine, opts.omega0);
    inr::FitOptions fo = opts.fit;
    fo.tv_weight = use_tv ? opts.tv_weight : 0.0;
    inr::FitResult fitted = inr::fit(s, spec, fo);
    const Tensor out = mlp::forward(fitted.params, s.t);

    TimeSeries imputed = s;
    imputed.mask.clear();
    std::vector<std::vector<double>> filled(s.channels());
    for (std::size_t c = 0; c < s.channels(); ++c) {
        filled[c].assign(out.row_ptr(c), out.row_ptr(c) + s.length());
        imputed.values[c] = filled[c];
    }
    ImputationReport rep = detail::report_against_truth(s, filled, use_tv ? "siren_tv" : "siren",
                                                        masked.missing_fraction);
    return {std::move(imputed), rep};
}

enum class BaselineMethod { Mean, Knn, Linear, CubicSpline };

inline const char* baseline_name(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::Mean: return "mean";
        case BaselineMethod::Knn: return "knn";
        case BaselineMethod::Linear: return "linear";
        case BaselineMethod::CubicSpline: return "cubic_spline";
    }
    return "?";
}

inline BaselineMethod baseline_from_name(const std::string& name) {
    for (BaselineMethod m : {BaselineMethod::Mean, BaselineMethod::Knn, BaselineMethod::Linear,
                             BaselineMethod::CubicSpline})
        if (name == baseline_name(m)) return m;
    throw ValidationError("unknown imputation method '" + name +
                          "' (expected mean, knn, linear or cubic_spline)");
}

struct BaselineOptions {
    std::size_t knn_k = 5;
};

// Classical fills. Observed samples are copied through untouched.
inline std::pair<TimeSeries, ImputationReport> impute_baseline(const MaskedSeries& masked,
                                                               BaselineMethod method,
                                                               const BaselineOptions& opts = {}) {
    const TimeSeries& s = masked.series;
    validate_series(s, "impute_baseline");
    const std::vector<std::size_t> obs = detail::observed_indices(s);
    if (obs.size() < 2) throw ValidationError("impute_baseline: need at least 2 observed samples");

    TimeSeries imputed = s;
    imputed.mask.clear();
    std::vector<std::vector<double>> filled(s.channels());
    for (std::size_t c = 0; c < s.channels(); ++c) {
        const std::vector<double>& v = s.values[c];
        std::vector<double> out = v;
        switch (method) {
            case BaselineMethod::Mean: {
                double acc = 0.0;
                for (std::size_t i : obs) acc += v[i];
                const double fill = acc / static_cast<double>(obs.size());
                for (std::size_t i = 0; i < s.length(); ++i)
                    if (!s.observed(i)) out[i] = fill;
                break;
            }
            case BaselineMethod::Knn: {
                const std::size_t k = std::min(opts.knn_k, obs.size());
                for (std::size_t i = 0; i < s.length(); ++i) {
                    if (s.observed(i)) continue;
                    std::vector<std::pair<double, std::size_t>> near;
                    near.reserve(obs.size());
                    for (std::size_t j : obs) near.emplace_back(std::abs(s.t[j] - s.t[i]), j);
                    std::sort(near.begin(), near.end());
                    double acc = 0.0;
                    for (std::size_t q = 0; q < k; ++q) acc += v[near[q].second];
                    out[i] = acc / static_cast<double>(k);
                }
                break;
            }
            case BaselineMethod::Linear: {
                for (std::size_t i = 0; i < s.length(); ++i) {
                    if (s.observed(i)) continue;
                    auto hi = std::upper_bound(obs.begin(), obs.end(), i);
                    if (hi == obs.begin()) {
                        out[i] = v[obs.front()]; // before the first observed point
                    } else if (hi == obs.end()) {
                        out[i] = v[obs.back()];
                    } else {
                        const std::size_t r = *hi;
                        const std::size_t l = *(hi - 1);
                        const double w = (s.t[i] - s.t[l]) / (s.t[r] - s.t[l]);
                        out[i] = v[l] + w * (v[r] - v[l]);
                    }
                }
                break;
            }
            case BaselineMethod::CubicSpline: {
                std::vector<double> xs, ys;
                xs.reserve(obs.size());
                ys.reserve(obs.size());
                for (std::size_t j : obs) {
                    xs.push_back(s.t[j]);
                    ys.push_back(v[j]);
                }
                detail::CubicSpline spline(std::move(xs), std::move(ys));
                for (std::size_t i = 0; i < s.length(); ++i)
                    if (!s.observed(i)) out[i] = spline(s.t[i]);
                break;
            }
        }
        filled[c] = out;
        imputed.values[c] = std::move(out);
    }
    ImputationReport rep = detail::report_against_truth(s, filled, baseline_name(method),
                                                        masked.missing_fraction);
    return {std::move(imputed), rep};
}

} // namespace tsinr::imputation
