#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tsinr/dataset.hpp"
#include "tsinr/pca.hpp"
#include "tsinr/rng.hpp"

using namespace tsinr;

namespace {

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
        for (double& v : r) v = rng.uniform(-2.0, 2.0);
    return rows;
}

} // namespace

TEST_CASE("full-rank projection reconstructs every sample") {
    const auto rows = random_rows(12, 6, 5);
    const pca::Pca p = pca::fit(rows, 6);
    for (const auto& r : rows) {
        const std::vector<double> back = pca::reconstruct(p, pca::project(p, r));
        for (std::size_t j = 0; j < r.size(); ++j)
            CHECK(std::abs(back[j] - r[j]) < 1e-9);
    }
}

TEST_CASE("components are orthonormal and eigenvalue-ordered") {
    const auto rows = random_rows(20, 8, 11);
    const pca::Pca p = pca::fit(rows, 8);
    for (std::size_t a = 0; a < 8; ++a) {
        for (std::size_t b = a; b < 8; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < 8; ++j) dot += p.components(a, j) * p.components(b, j);
            if (a == b)
                CHECK(dot == Catch::Approx(1.0).margin(1e-10));
            else
                CHECK(std::abs(dot) < 1e-10);
        }
    }
    for (std::size_t a = 0; a + 1 < 8; ++a) CHECK(p.eigenvalues[a] >= p.eigenvalues[a + 1]);
    for (double e : p.eigenvalues) CHECK(e >= -1e-12);
}

TEST_CASE("a collinear cloud yields its direction and a zero second eigenvalue") {
    std::vector<std::vector<double>> rows;
    for (double s : {-2.0, -1.0, 1.0, 2.0}) rows.push_back({s, 2.0 * s});
    const pca::Pca p = pca::fit(rows, 2);

    const double inv_n = 1.0 / std::sqrt(5.0);
    CHECK(p.eigenvalues[0] == Catch::Approx(50.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(p.eigenvalues[1]) < 1e-12);
    CHECK(p.components(0, 0) == Catch::Approx(inv_n).epsilon(1e-9));
    CHECK(p.components(0, 1) == Catch::Approx(2.0 * inv_n).epsilon(1e-9));
}

TEST_CASE("the sign convention fixes the largest-magnitude entry positive") {
    std::vector<std::vector<double>> rows;
    for (double s : {-2.0, -1.0, 1.0, 2.0}) rows.push_back({-s, 2.0 * s});
    const pca::Pca p = pca::fit(rows, 1);
    CHECK(p.components(0, 1) > 0.0); // |2nd entry| dominates, so it is positive
    CHECK(p.components(0, 0) < 0.0);
}

TEST_CASE("pca validates its inputs") {
    CHECK_THROWS_AS(pca::fit(random_rows(1, 3, 0), 1), ValidationError);
    CHECK_THROWS_AS(pca::fit(random_rows(5, 3, 0), 0), ValidationError);
    CHECK_THROWS_AS(pca::fit(random_rows(5, 3, 0), 4), ValidationError);
    auto rows = random_rows(5, 3, 0);
    rows[2].resize(2);
    CHECK_THROWS_WITH(pca::fit(rows, 2),
                      Catch::Matchers::ContainsSubstring("inconsistent dimensions"));
    CHECK_THROWS_AS(pca::project(pca::fit(random_rows(5, 3, 0), 2), {1.0, 2.0}),
                    ValidationError);
    CHECK_THROWS_AS(pca::reconstruct(pca::fit(random_rows(5, 3, 0), 2), {1.0}),
                    ValidationError);
}

TEST_CASE("pca fitting is deterministic") {
    const auto rows = random_rows(15, 7, 3);
    const pca::Pca a = pca::fit(rows, 5);
    const pca::Pca b = pca::fit(rows, 5);
    CHECK(a.eigenvalues == b.eigenvalues);
    bool same = true;
    for (std::size_t i = 0; i < a.components.size(); ++i)
        same = same && a.components[i] == b.components[i];
    CHECK(same);
}

TEST_CASE("series_matrix flattens raw values channel by channel") {
    data::Dataset ds;
    ds.series.push_back(data::detail::make_series({{0.0, 2.0, 4.0}, {1.0, 1.5, 2.0}}));
    ds.series.push_back(data::detail::make_series({{5.0, 3.0, 1.0}, {0.0, 0.5, 1.0}}));
    const auto rows = pca::series_matrix(ds.series);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].size() == 6);
    CHECK(rows[0] == std::vector<double>{0.0, 2.0, 4.0, 1.0, 1.5, 2.0});
    CHECK(rows[1] == std::vector<double>{5.0, 3.0, 1.0, 0.0, 0.5, 1.0});

    data::Dataset ragged = ds;
    ragged.series.push_back(data::detail::make_series({{1.0, 2.0}, {0.0, 1.0}}));
    CHECK_THROWS_WITH(pca::series_matrix(ragged.series),
                      Catch::Matchers::ContainsSubstring("corpus shape"));
}

TEST_CASE("pca generation mixes samples linearly at full rank") {
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::Multisine, 6, 24, 19);
    pca::PcaGenerateOptions opts;
    opts.n_components = 24; // full rank: reconstruction is exact
    opts.n_samples = 5;
    opts.seed = 4;
    const auto out = pca::pca_generate(ds.series, opts);
    REQUIRE(out.size() == 5);

    const auto rows = pca::series_matrix(ds.series);
    for (const pca::PcaGenerated& g : out) {
        CHECK(g.from_a != g.from_b);
        CHECK(g.from_a < 6);
        CHECK(g.from_b < 6);
        CHECK(g.alpha >= 0.25);
        CHECK(g.alpha <= 0.75);
        REQUIRE(g.series.length() == 24);
        // linear map: mixing coefficients equals mixing the raw vectors
        for (std::size_t j = 0; j < 24; ++j) {
            const double expect =
                (1.0 - g.alpha) * rows[g.from_a][j] + g.alpha * rows[g.from_b][j];
            CHECK(g.series.raw(0, j) == Catch::Approx(expect).margin(1e-9));
        }
    }

    const auto rerun = pca::pca_generate(ds.series, opts);
    bool same = true;
    for (std::size_t i = 0; i < out.size(); ++i)
        same = same && rerun[i].series.values[0] == out[i].series.values[0];
    CHECK(same);
}
