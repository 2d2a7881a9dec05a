#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tsinr/errors.hpp"
#include "tsinr/rng.hpp"
#include "tsinr/timeseries.hpp"

// Dataset ingestion and emission (UCR-style TSV, uni- and multivariate CSV)
// plus the synthetic corpora the acceptance experiments run on.

namespace tsinr::data {

struct Dataset {
    std::string name;
    std::vector<TimeSeries> series;
    std::vector<std::string> labels; // empty, or one per series; carried through
};

namespace detail {

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                              ", column " + std::to_string(col));
    }
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Raw channel rows -> normalized TimeSeries on a uniform grid.
inline TimeSeries make_series(std::vector<std::vector<double>> raw_channels) {
    TimeSeries s;
    s.t = uniform_grid(raw_channels.front().size());
    s.scale.reserve(raw_channels.size());
    for (auto& ch : raw_channels) s.scale.push_back(normalize_channel(ch));
    s.values = std::move(raw_channels);
    return s;
}

} // namespace detail

// Rows of "label<TAB>v1<TAB>v2...", one univariate series per row.
inline Dataset load_ucr_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    Dataset ds;
    ds.name = path;
    std::string line;
    std::size_t row = 0;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> cells = detail::split(line, '\t');
        if (cells.size() < 3)
            throw ValidationError("row " + std::to_string(row) +
                                  " has fewer than 2 values after the label");
        if (expected == 0) expected = cells.size();
        if (cells.size() != expected)
            throw ValidationError("ragged row " + std::to_string(row) + ": " +
                                  std::to_string(cells.size() - 1) + " values, expected " +
                                  std::to_string(expected - 1));
        std::vector<double> values(cells.size() - 1);
        for (std::size_t i = 1; i < cells.size(); ++i)
            values[i - 1] = detail::parse_cell(cells[i], row, i);
        ds.labels.push_back(cells[0]);
        ds.series.push_back(detail::make_series({std::move(values)}));
    }
    if (ds.series.empty()) throw ValidationError("'" + path + "' contains no series");
    return ds;
}

inline void save_ucr_tsv(const std::string& path, const Dataset& ds) {
    if (!ds.labels.empty() && ds.labels.size() != ds.series.size())
        throw ValidationError("save_ucr_tsv: label count does not match series count");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < ds.series.size(); ++i) {
        const TimeSeries& s = ds.series[i];
        if (s.channels() != 1)
            throw ValidationError("save_ucr_tsv: series " + std::to_string(i) +
                                  " is multivariate; use CSV output");
        out << (ds.labels.empty() ? std::string("0") : ds.labels[i]);
        for (std::size_t j = 0; j < s.length(); ++j)
            out << '\t' << detail::format_value(s.raw(0, j));
        out << '\n';
    }
    if (!out) throw ValidationError("write failed for '" + path + "'");
}

// Wide layout (no header): one series per row, channel-major blocks of equal
// length, comma-separated. Long layout (header "series_id,..."): one time step
// per row, one column per channel, steps of one series contiguous.
inline Dataset load_csv_multivariate(const std::string& path, std::size_t channels) {
    if (channels == 0) throw ValidationError("load_csv_multivariate: channels must be positive");
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    Dataset ds;
    ds.name = path;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("'" + path + "' is empty");

    if (line.rfind("series_id", 0) == 0) {
        const std::vector<std::string> header = detail::split(line, ',');
        if (header.size() != channels + 1)
            throw ValidationError("long-format header has " + std::to_string(header.size() - 1) +
                                  " value columns, expected " + std::to_string(channels));
        std::vector<std::string> ids;
        std::vector<std::vector<std::vector<double>>> groups; // per id, per channel
        std::size_t row = 1;
        while (std::getline(in, line)) {
            ++row;
            if (line.empty()) continue;
            const std::vector<std::string> cells = detail::split(line, ',');
            if (cells.size() != channels + 1)
                throw ValidationError("row " + std::to_string(row) + " has " +
                                      std::to_string(cells.size() - 1) +
                                      " value columns, expected " + std::to_string(channels));
            if (ids.empty() || ids.back() != cells[0]) {
                for (std::size_t k = 0; k + 1 < ids.size(); ++k)
                    if (ids[k] == cells[0])
                        throw ValidationError("series '" + cells[0] +
                                              "' appears in non-contiguous blocks (row " +
                                              std::to_string(row) + ")");
                ids.push_back(cells[0]);
                groups.emplace_back(channels);
            }
            for (std::size_t c = 0; c < channels; ++c)
                groups.back()[c].push_back(detail::parse_cell(cells[c + 1], row, c + 1));
        }
        if (groups.empty()) throw ValidationError("'" + path + "' contains no series");
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (groups[g][0].size() < 2)
                throw ValidationError("series '" + ids[g] + "' has fewer than 2 samples");
            ds.labels.push_back(ids[g]);
            ds.series.push_back(detail::make_series(std::move(groups[g])));
        }
        return ds;
    }

    std::size_t row = 0;
    std::size_t expected = 0;
    do {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> cells = detail::split(line, ',');
        if (expected == 0) {
            expected = cells.size();
            if (expected % channels != 0)
                throw ValidationError("wide-format row has " + std::to_string(expected) +
                                      " cells, not divisible by " + std::to_string(channels) +
                                      " channels");
            if (expected / channels < 2)
                throw ValidationError("wide-format rows need at least 2 samples per channel");
        }
        if (cells.size() != expected)
            throw ValidationError("ragged row " + std::to_string(row) + ": " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(expected));
        const std::size_t n = expected / channels;
        std::vector<std::vector<double>> raw(channels, std::vector<double>(n));
        for (std::size_t i = 0; i < cells.size(); ++i)
            raw[i / n][i % n] = detail::parse_cell(cells[i], row, i);
        ds.series.push_back(detail::make_series(std::move(raw)));
    } while (std::getline(in, line));
    if (ds.series.empty()) throw ValidationError("'" + path + "' contains no series");
    return ds;
}

inline void save_csv_multivariate(const std::string& path, const Dataset& ds, bool long_format) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    if (long_format) {
        const std::size_t ch = ds.series.empty() ? 1 : ds.series.front().channels();
        out << "series_id";
        for (std::size_t c = 0; c < ch; ++c) out << ",ch" << c;
        out << '\n';
        for (std::size_t i = 0; i < ds.series.size(); ++i) {
            const TimeSeries& s = ds.series[i];
            const std::string id =
                ds.labels.empty() ? "s" + std::to_string(i) : ds.labels[i];
            for (std::size_t j = 0; j < s.length(); ++j) {
                out << id;
                for (std::size_t c = 0; c < s.channels(); ++c)
                    out << ',' << detail::format_value(s.raw(c, j));
                out << '\n';
            }
        }
    } else {
        for (const TimeSeries& s : ds.series) {
            bool first = true;
            for (std::size_t c = 0; c < s.channels(); ++c)
                for (std::size_t j = 0; j < s.length(); ++j) {
                    if (!first) out << ',';
                    out << detail::format_value(s.raw(c, j));
                    first = false;
                }
            out << '\n';
        }
    }
    if (!out) throw ValidationError("write failed for '" + path + "'");
}

inline void apply_max_series(Dataset& ds, std::size_t cap) {
    if (cap == 0) throw ValidationError("max series cap must be positive");
    if (ds.series.size() > cap) {
        ds.series.resize(cap);
        if (!ds.labels.empty()) ds.labels.resize(cap);
    }
}

enum class SynthPreset { Multisine, AmChirp, SpectralSpread };

inline const char* preset_name(SynthPreset p) {
    switch (p) {
        case SynthPreset::Multisine: return "multisine";
        case SynthPreset::AmChirp: return "am_chirp";
        case SynthPreset::SpectralSpread: return "spectral_spread";
    }
    return "?";
}

inline SynthPreset preset_from_name(const std::string& name) {
    for (SynthPreset p : {SynthPreset::Multisine, SynthPreset::AmChirp,
                          SynthPreset::SpectralSpread})
        if (name == preset_name(p)) return p;
    throw ValidationError("unknown preset '" + name +
                          "' (expected multisine, am_chirp or spectral_spread)");
}

// Desk-scale univariate corpora.
//   multisine:       three fixed tones, random amplitude/phase per series —
//                    spectra share support, low per-bin spread.
//   spectral_spread: one random tone per series drawn from a wide continuous
//                    range — spectra disagree everywhere, high per-bin spread.
//   am_chirp:        amplitude-modulated rising chirp — broadband and smooth,
//                    the imputation testbed.
inline Dataset synth_corpus(SynthPreset preset, std::size_t n, std::size_t length,
                            std::uint64_t seed) {
    if (n < 2) throw ValidationError("synth_corpus: need at least 2 series");
    if (length < 16) throw ValidationError("synth_corpus: length must be at least 16");
    Dataset ds;
    ds.name = preset_name(preset);
    const std::vector<double> grid = uniform_grid(length);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, i));
        std::vector<double> v(length, 0.0);
        switch (preset) {
            case SynthPreset::Multisine: {
                static constexpr double freqs[3] = {3.0, 7.0, 13.0};
                double amp[3], phase[3];
                for (int k = 0; k < 3; ++k) {
                    amp[k] = rng.uniform(0.5, 1.5);
                    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
                }
                for (std::size_t j = 0; j < length; ++j)
                    for (int k = 0; k < 3; ++k)
                        v[j] += amp[k] * std::sin(std::numbers::pi * freqs[k] * grid[j] +
                                                  phase[k]);
                break;
            }
            case SynthPreset::AmChirp: {
                const double f0 = rng.uniform(1.0, 2.0);
                const double f1 = rng.uniform(4.0, 6.0);
                const double fm = rng.uniform(0.5, 1.0);
                const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                const double mphase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                for (std::size_t j = 0; j < length; ++j) {
                    const double s = 0.5 * (grid[j] + 1.0); // [0, 1]
                    const double carrier = std::sin(
                        2.0 * std::numbers::pi * (f0 * s + 0.5 * (f1 - f0) * s * s) + phase);
                    const double envelope =
                        0.45 + 0.55 * std::sin(2.0 * std::numbers::pi * fm * s + mphase);
                    v[j] = envelope * carrier;
                }
                break;
            }
            case SynthPreset::SpectralSpread: {
                const double f = rng.uniform(16.0, 48.0);
                const double amp = rng.uniform(0.5, 1.5);
                const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                for (std::size_t j = 0; j < length; ++j)
                    v[j] = amp * std::sin(std::numbers::pi * f * grid[j] + phase);
                break;
            }
        }
        ds.labels.push_back("0");
        ds.series.push_back(detail::make_series({std::move(v)}));
    }
    return ds;
}

} // namespace tsinr::data
