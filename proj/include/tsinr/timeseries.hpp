#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tsinr/errors.hpp"

namespace tsinr {

// Affine map between stored values and raw units: raw = offset + gain * value.
struct ChannelScale {
    double offset = 0.0;
    double gain = 1.0;
};

// One series on a time grid in [-1, 1]. Values are stored normalized per
// channel; `scale` inverts the normalization. An empty mask means fully
// observed.
struct TimeSeries {
    std::vector<double> t;
    std::vector<std::vector<double>> values; // channels x samples
    std::vector<std::uint8_t> mask;          // 1 = observed; empty = all observed
    std::vector<ChannelScale> scale;

    std::size_t length() const { return t.size(); }
    std::size_t channels() const { return values.size(); }
    bool observed(std::size_t i) const { return mask.empty() || mask[i] != 0; }

    std::size_t observed_count() const {
        if (mask.empty()) return t.size();
        std::size_t n = 0;
        for (std::uint8_t m : mask) n += m != 0;
        return n;
    }

    double raw(std::size_t channel, std::size_t i) const {
        return scale[channel].offset + scale[channel].gain * values[channel][i];
    }
};

// Uniform grid of n points spanning [-1, 1].
inline std::vector<double> uniform_grid(std::size_t n) {
    if (n < 2) throw ValidationError("uniform_grid: need at least 2 points");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

// Min-max normalization of raw values into [-1, 1]; a constant channel keeps
// unit gain so the map stays invertible.
inline ChannelScale normalize_channel(std::vector<double>& v) {
    double lo = v.empty() ? 0.0 : v[0];
    double hi = lo;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    ChannelScale s;
    if (hi > lo) {
        s.offset = 0.5 * (hi + lo);
        s.gain = 0.5 * (hi - lo);
    } else {
        s.offset = lo;
        s.gain = 1.0;
    }
    for (double& x : v) x = (x - s.offset) / s.gain;
    return s;
}

inline void validate_series(const TimeSeries& s, const std::string& where) {
    if (s.t.size() < 2) throw ValidationError(where + ": series needs at least 2 samples");
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] < -1.0 || s.t[i] > 1.0)
            throw ValidationError(where + ": t[" + std::to_string(i) + "] outside [-1, 1]");
        if (i > 0 && s.t[i] <= s.t[i - 1])
            throw ValidationError(where + ": time grid not strictly increasing at index " +
                                  std::to_string(i));
    }
    if (s.values.empty()) throw ValidationError(where + ": series has no channels");
    if (s.scale.size() != s.values.size())
        throw ValidationError(where + ": scale/channel count mismatch");
    if (!s.mask.empty() && s.mask.size() != s.t.size())
        throw ValidationError(where + ": mask length does not match grid");
    for (std::size_t c = 0; c < s.values.size(); ++c) {
        if (s.values[c].size() != s.t.size())
            throw ValidationError(where + ": channel " + std::to_string(c) +
                                  " length does not match grid");
        for (std::size_t i = 0; i < s.values[c].size(); ++i)
            if (s.observed(i) && !std::isfinite(s.values[c][i]))
                throw ValidationError(where + ": non-finite observed value at channel " +
                                      std::to_string(c) + ", index " + std::to_string(i));
    }
}

} // namespace tsinr
