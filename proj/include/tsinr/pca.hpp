#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "tsinr/errors.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/tensor.hpp"
#include "tsinr/timeseries.hpp"

// Principal components via a cyclic Jacobi eigensolver on the sample
// covariance, plus the PCA-interpolation generation baseline.

namespace tsinr::pca {

struct Pca {
    std::vector<double> mean;        // d
    Tensor components;               // k x d, rows orthonormal, eigenvalue-descending
    std::vector<double> eigenvalues; // k
};

namespace detail {

// Cyclic Jacobi on a symmetric matrix. Rotations zero one off-diagonal pair at
// a time; V accumulates eigenvectors as columns.
inline void jacobi_eigen(Tensor& a, Tensor& v) {
    const std::size_t d = a.rows();
    v = Tensor(Shape{d, d});
    for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) norm += a(i, j) * a(i, j);
    const double tol = 1e-28 * std::max(1.0, norm);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
        if (off <= tol) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < d; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
}

} // namespace detail

inline Pca fit(const std::vector<std::vector<double>>& rows, std::size_t k) {
    if (rows.size() < 2) throw ValidationError("pca: need at least 2 samples");
    const std::size_t d = rows.front().size();
    if (d == 0) throw ValidationError("pca: empty samples");
    for (const auto& r : rows)
        if (r.size() != d) throw ValidationError("pca: samples have inconsistent dimensions");
    if (k == 0 || k > d)
        throw ValidationError("pca: component count " + std::to_string(k) +
                              " outside [1, " + std::to_string(d) + "]");

    Pca p;
    p.mean.assign(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) p.mean[j] += r[j];
    for (double& m : p.mean) m /= static_cast<double>(rows.size());

    Tensor cov(Shape{d, d});
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = r[i] - p.mean[i];
            for (std::size_t j = i; j < d; ++j) cov(i, j) += xi * (r[j] - p.mean[j]);
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size() - 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov(i, j) *= inv;
            cov(j, i) = cov(i, j);
        }

    Tensor v;
    detail::jacobi_eigen(cov, v);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cov(a, a) > cov(b, b); });

    p.components = Tensor(Shape{k, d});
    p.eigenvalues.resize(k);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t col = order[r];
        p.eigenvalues[r] = cov(col, col);
        // sign convention: the largest-magnitude entry is positive
        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::abs(v(i, col)) > std::abs(v(arg, col))) arg = i;
        const double flip = v(arg, col) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) p.components(r, i) = flip * v(i, col);
    }
    return p;
}

inline std::vector<double> project(const Pca& p, const std::vector<double>& x) {
    const std::size_t d = p.mean.size();
    if (x.size() != d)
        throw ValidationError("pca::project: dimension mismatch " + std::to_string(x.size()) +
                              " vs " + std::to_string(d));
    std::vector<double> c(p.components.rows(), 0.0);
    for (std::size_t r = 0; r < p.components.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += p.components(r, j) * (x[j] - p.mean[j]);
        c[r] = acc;
    }
    return c;
}

inline std::vector<double> reconstruct(const Pca& p, const std::vector<double>& coeffs) {
    if (coeffs.size() != p.components.rows())
        throw ValidationError("pca::reconstruct: coefficient count mismatch");
    std::vector<double> x(p.mean);
    for (std::size_t r = 0; r < coeffs.size(); ++r)
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += coeffs[r] * p.components(r, j);
    return x;
}

// Series as raw-value vectors (channels concatenated). All series must share
// length and channel count.
inline std::vector<std::vector<double>> series_matrix(const std::vector<TimeSeries>& corpus) {
    if (corpus.empty()) throw ValidationError("pca: empty corpus");
    const std::size_t n = corpus.front().length();
    const std::size_t ch = corpus.front().channels();
    std::vector<std::vector<double>> rows;
    rows.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const TimeSeries& s = corpus[i];
        if (s.length() != n || s.channels() != ch)
            throw ValidationError("pca: series " + std::to_string(i) +
                                  " does not match the corpus shape (equal lengths required)");
        std::vector<double> row;
        row.reserve(n * ch);
        for (std::size_t c = 0; c < ch; ++c)
            for (std::size_t j = 0; j < n; ++j) row.push_back(s.raw(c, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct PcaGenerated {
    TimeSeries series;
    std::vector<double> coeffs;
    std::size_t from_a = 0, from_b = 0;
    double alpha = 0.0;
};

struct PcaGenerateOptions {
    std::size_t n_components = 40;
    std::size_t n_samples = 100;
    double alpha_lo = 0.25;
    double alpha_hi = 0.75;
    std::uint64_t seed = 0;
};

// The linear stand-in for latent interpolation: principal coefficients of two
// series are mixed with the same alpha policy, then mapped back.
inline std::vector<PcaGenerated> pca_generate(const std::vector<TimeSeries>& corpus,
                                              const PcaGenerateOptions& opts) {
    if (corpus.size() < 2) throw ValidationError("pca_generate: need at least 2 corpus series");
    const std::vector<std::vector<double>> rows = series_matrix(corpus);
    const std::size_t d = rows.front().size();
    const Pca p = fit(rows, std::min(opts.n_components, d));
    std::vector<std::vector<double>> coeffs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) coeffs[i] = project(p, rows[i]);

    const std::size_t n = corpus.front().length();
    const std::size_t ch = corpus.front().channels();
    Rng rng(opts.seed);
    std::vector<PcaGenerated> out;
    out.reserve(opts.n_samples);
    for (std::size_t k = 0; k < opts.n_samples; ++k) {
        const std::size_t a = rng.integer(corpus.size());
        std::size_t b = rng.integer(corpus.size() - 1);
        if (b >= a) ++b;
        const double alpha = rng.uniform(opts.alpha_lo, opts.alpha_hi);
        PcaGenerated g;
        g.from_a = a;
        g.from_b = b;
        g.alpha = alpha;
        g.coeffs.resize(coeffs[a].size());
        for (std::size_t i = 0; i < g.coeffs.size(); ++i)
            g.coeffs[i] = (1.0 - alpha) * coeffs[a][i] + alpha * coeffs[b][i];
        const std::vector<double> x = reconstruct(p, g.coeffs);
        TimeSeries s;
        s.t = uniform_grid(n);
        s.values.resize(ch);
        s.scale.assign(ch, ChannelScale{0.0, 1.0});
        for (std::size_t c = 0; c < ch; ++c)
            s.values[c].assign(x.begin() + static_cast<std::ptrdiff_t>(c * n),
                               x.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
        g.series = std::move(s);
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace tsinr::pca
