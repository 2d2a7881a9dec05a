#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "tsinr/autodiff.hpp"
#include "tsinr/errors.hpp"

// FFT machinery and spectral metrics: forward real-input FFT, its adjoint for
// backpropagation, the L1 spectral training loss, and the FFTE metric (MAE
// between magnitude spectra).

namespace tsinr::spectral {

// One-sided spectrum of a real signal, after zero-padding to a power of two.
// Bins cover frequencies 0..n_padded/2; bin 0 and the Nyquist bin are real.
struct Spectrum {
    std::vector<double> re, im;
    std::size_t n_original = 0;
    std::size_t n_padded = 0;

    std::size_t bins() const { return re.size(); }
    double magnitude(std::size_t i) const { return std::hypot(re[i], im[i]); }
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// cos/sin of 2*pi*m/n for m in [0, n); shared by the transform and the
// adjoint loop. Cached per padded length, per thread.
struct TrigTable {
    std::vector<double> cos_tab, sin_tab;
};

inline const TrigTable& trig_table(std::size_t n) {
    thread_local std::unordered_map<std::size_t, TrigTable> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    TrigTable t;
    t.cos_tab.resize(n);
    t.sin_tab.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        t.cos_tab[m] = std::cos(a);
        t.sin_tab[m] = std::sin(a);
    }
    return cache.emplace(n, std::move(t)).first->second;
}

// In-place iterative radix-2 FFT (decimation in time), e^{-2*pi*i*k/n} kernel.
inline void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
    const std::size_t n = re.size();
    const TrigTable& tw = trig_table(n);
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        const std::size_t half = len / 2;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const double wr = tw.cos_tab[k * stride];
                const double wi = -tw.sin_tab[k * stride];
                const std::size_t a = start + k;
                const std::size_t b = a + half;
                const double xr = re[b] * wr - im[b] * wi;
                const double xi = re[b] * wi + im[b] * wr;
                re[b] = re[a] - xr;
                im[b] = im[a] - xi;
                re[a] += xr;
                im[a] += xi;
            }
        }
    }
}

} // namespace detail

// Forward FFT of a real signal, zero-padded to the next power of two.
inline Spectrum rfft(std::span<const double> signal) {
    if (signal.size() < 2)
        throw ValidationError("rfft: need at least 2 samples, got " +
                              std::to_string(signal.size()));
    const std::size_t n = detail::next_pow2(signal.size());
    std::vector<double> re(n, 0.0), im(n, 0.0);
    for (std::size_t i = 0; i < signal.size(); ++i) re[i] = signal[i];
    detail::fft_radix2(re, im);
    Spectrum s;
    s.n_original = signal.size();
    s.n_padded = n;
    const std::size_t bins = n / 2 + 1;
    s.re.assign(re.begin(), re.begin() + bins);
    s.im.assign(im.begin(), im.begin() + bins);
    s.im.front() = 0.0; // structurally real bins
    s.im.back() = 0.0;
    return s;
}

// (1/B) * sum_i ||F[f]_i - F[f_hat]_i|| over the B retained one-sided bins.
inline double fft_loss(std::span<const double> f, std::span<const double> f_hat) {
    if (f.size() != f_hat.size())
        throw ValidationError("fft_loss: length mismatch " + std::to_string(f.size()) + " vs " +
                              std::to_string(f_hat.size()));
    const Spectrum a = rfft(f);
    const Spectrum b = rfft(f_hat);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.bins(); ++i)
        acc += std::hypot(a.re[i] - b.re[i], a.im[i] - b.im[i]);
    return acc / static_cast<double>(a.bins());
}

// MAE between the magnitude spectra of f and f_hat.
inline double ffte(std::span<const double> f, std::span<const double> f_hat) {
    if (f.size() != f_hat.size())
        throw ValidationError("ffte: length mismatch " + std::to_string(f.size()) + " vs " +
                              std::to_string(f_hat.size()));
    const Spectrum a = rfft(f);
    const Spectrum b = rfft(f_hat);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.bins(); ++i) acc += std::abs(a.magnitude(i) - b.magnitude(i));
    return acc / static_cast<double>(a.bins());
}

// fft_loss as a tape node, differentiable w.r.t. the prediction. The backward
// pass applies the conjugate-transposed DFT matrix (restricted to the retained
// bins) to the normalized per-bin differences.
inline autodiff::NodeId fft_loss_node(autodiff::Tape& tape, autodiff::NodeId prediction,
                                      std::span<const double> target) {
    const Tensor& pred = tape.value(prediction);
    if (pred.size() != target.size())
        throw ValidationError("fft_loss: length mismatch " + std::to_string(target.size()) +
                              " vs prediction " + std::to_string(pred.size()));
    const std::size_t n = target.size();
    const Spectrum ft = rfft(target);
    const Spectrum fp = rfft(std::span<const double>(pred.data(), n));
    const std::size_t bins = ft.bins();
    double acc = 0.0;
    std::vector<double> dre(bins), dim(bins), inv_mod(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        dre[i] = ft.re[i] - fp.re[i];
        dim[i] = ft.im[i] - fp.im[i];
        const double mod = std::hypot(dre[i], dim[i]);
        acc += mod;
        inv_mod[i] = mod > 0.0 ? 1.0 / mod : 0.0; // subgradient 0 at the kink
    }
    const double loss = acc / static_cast<double>(bins);
    const std::size_t n_padded = ft.n_padded;

    autodiff::CustomOp op;
    op.name = "fft_loss";
    op.backward = [n, bins, n_padded, dre = std::move(dre), dim = std::move(dim),
                   inv_mod = std::move(inv_mod)](const Tensor& out_grad,
                                                 const std::vector<const Tensor*>&,
                                                 const std::vector<Tensor*>& input_grads) {
        if (input_grads[0] == nullptr) return;
        Tensor& d = *input_grads[0];
        const detail::TrigTable& tw = detail::trig_table(n_padded);
        const double w = out_grad[0] / static_cast<double>(bins);
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t stepm = t % n_padded;
            std::size_t m = 0;
            double acc_t = 0.0;
            for (std::size_t i = 0; i < bins; ++i) {
                acc_t += (-dre[i] * tw.cos_tab[m] + dim[i] * tw.sin_tab[m]) * inv_mod[i];
                m += stepm;
                if (m >= n_padded) m -= n_padded;
            }
            d[t] += w * acc_t;
        }
    };
    return tape.custom(std::move(op), Tensor::scalar(loss), {prediction});
}

} // namespace tsinr::spectral
