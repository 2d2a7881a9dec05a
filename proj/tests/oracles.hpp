#pragma once

// Independent oracles used by the test suites: a naive O(N^2) DFT and a
// central finite-difference gradient checker. These must stay decoupled from
// the implementation paths they verify.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace oracles {

struct DftResult {
    std::vector<double> re, im; // full two-sided spectrum
};

// Direct DFT of the signal zero-padded to padded_len: X_k = sum_n x_n e^{-2*pi*i*k*n/N}.
inline DftResult naive_dft(std::span<const double> signal, std::size_t padded_len) {
    DftResult out;
    out.re.assign(padded_len, 0.0);
    out.im.assign(padded_len, 0.0);
    for (std::size_t k = 0; k < padded_len; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < signal.size(); ++n) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k) *
                             static_cast<double>(n) / static_cast<double>(padded_len);
            re += signal[n] * std::cos(a);
            im += signal[n] * std::sin(a);
        }
        out.re[k] = re;
        out.im[k] = im;
    }
    return out;
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Central finite difference of a scalar function of one coordinate of x.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x, std::size_t i, double h = 1e-6) {
    x[i] += h;
    const double fp = f(x);
    x[i] -= 2.0 * h;
    const double fm = f(x);
    return (fp - fm) / (2.0 * h);
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Max relative error between an analytic gradient and central differences.
inline double max_grad_rel_err(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& x, std::span<const double> analytic,
                               double h = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fd = central_diff(f, x, i, h);
        worst = std::max(worst, rel_err(analytic[i], fd));
    }
    return worst;
}

} // namespace oracles
