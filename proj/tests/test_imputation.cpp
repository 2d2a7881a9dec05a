#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tsinr/dataset.hpp"
#include "tsinr/imputation.hpp"

using namespace tsinr;
using imputation::BaselineMethod;

namespace {

TimeSeries series_from_raw(std::vector<double> raw) {
    return data::detail::make_series({std::move(raw)});
}

// Series with the given indices hidden, bypassing the random masker.
imputation::MaskedSeries with_mask(TimeSeries s, const std::vector<std::size_t>& hidden) {
    imputation::MaskedSeries m;
    m.series = std::move(s);
    m.series.mask.assign(m.series.length(), 1);
    for (std::size_t i : hidden) m.series.mask[i] = 0;
    m.missing_fraction =
        static_cast<double>(hidden.size()) / static_cast<double>(m.series.length());
    return m;
}

} // namespace

TEST_CASE("mask_series hides round(fraction * N) samples") {
    std::vector<double> raw(20);
    for (std::size_t i = 0; i < 20; ++i) raw[i] = std::sin(0.3 * static_cast<double>(i));
    const TimeSeries s = series_from_raw(std::move(raw));

    const imputation::MaskedSeries half = imputation::mask_series(s, 0.5, 1);
    CHECK(half.series.observed_count() == 10);
    CHECK(half.missing_fraction == 0.5);
    // values stay intact; only the mask changes
    CHECK(half.series.values == s.values);

    CHECK(imputation::mask_series(s, 0.0, 1).series.observed_count() == 20);
    CHECK(imputation::mask_series(s, 0.7, 1).series.observed_count() == 6);

    const imputation::MaskedSeries a = imputation::mask_series(s, 0.5, 9);
    const imputation::MaskedSeries b = imputation::mask_series(s, 0.5, 9);
    const imputation::MaskedSeries c = imputation::mask_series(s, 0.5, 10);
    CHECK(a.series.mask == b.series.mask);
    CHECK(a.series.mask != c.series.mask);

    CHECK_THROWS_AS(imputation::mask_series(s, -0.1, 0), ValidationError);
    CHECK_THROWS_AS(imputation::mask_series(s, 1.0, 0), ValidationError);
    // 0.95 * 20 = 19 hidden leaves a single observed sample
    CHECK_THROWS_WITH(imputation::mask_series(s, 0.95, 0),
                      Catch::Matchers::ContainsSubstring("at least 2"));
}

TEST_CASE("mean fill uses the observed average") {
    // raw {0,?,2,?,4}: observed mean of normalized values fills the gaps
    auto m = with_mask(series_from_raw({0.0, 1.0, 2.0, 3.0, 4.0}), {1, 3});
    auto [imputed, rep] = imputation::impute_baseline(m, BaselineMethod::Mean);
    // normalized: offset 2, gain 2 -> observed {-1, 0, 1}, mean 0
    CHECK(imputed.values[0][1] == 0.0);
    CHECK(imputed.values[0][3] == 0.0);
    CHECK(imputed.mask.empty());
    // truth at the gaps is {-0.5, 0.5}: mse = (0.25 + 0.25) / 5
    CHECK(rep.mse == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(rep.ffte >= 0.0);
    CHECK(rep.method == "mean");
    CHECK(rep.fraction == Catch::Approx(0.4));
}

TEST_CASE("linear fill interpolates interior gaps and clamps the edges") {
    auto m = with_mask(series_from_raw({0.0, -1.0, 2.0, -1.0, 4.0, -1.0}), {1, 3, 5});
    // observed raw: 0 @ t0, 2 @ t2, 4 @ t4; t grid uniform
    auto [imputed, rep] = imputation::impute_baseline(m, BaselineMethod::Linear);
    const TimeSeries& s = m.series;
    const double v1 = s.values[0][0] + (s.values[0][2] - s.values[0][0]) * 0.5;
    CHECK(imputed.values[0][1] == Catch::Approx(v1).margin(1e-14));
    CHECK(imputed.values[0][5] == imputed.values[0][4]); // trailing edge clamps
    CHECK(rep.method == "linear");

    auto lead = with_mask(series_from_raw({9.0, 1.0, 2.0, 3.0}), {0});
    auto [li, lr] = imputation::impute_baseline(lead, BaselineMethod::Linear);
    CHECK(li.values[0][0] == li.values[0][1]); // leading edge clamps
}

TEST_CASE("knn fill averages the nearest observed values with index tie-breaks") {
    // hidden middle point, equidistant neighbors on both sides
    auto m = with_mask(series_from_raw({5.0, 0.0, 9.0}), {1});
    imputation::BaselineOptions opts;
    opts.knn_k = 1;
    auto [one, r1] = imputation::impute_baseline(m, BaselineMethod::Knn, opts);
    // distances tie; the lower index (first sample) wins
    CHECK(one.values[0][1] == m.series.values[0][0]);

    opts.knn_k = 2;
    auto [two, r2] = imputation::impute_baseline(m, BaselineMethod::Knn, opts);
    CHECK(two.values[0][1] ==
          Catch::Approx(0.5 * (m.series.values[0][0] + m.series.values[0][2])));

    // k larger than the observed count falls back to all observed samples
    opts.knn_k = 50;
    auto [all, r3] = imputation::impute_baseline(m, BaselineMethod::Knn, opts);
    CHECK(all.values[0][1] ==
          Catch::Approx(0.5 * (m.series.values[0][0] + m.series.values[0][2])));
}

TEST_CASE("natural cubic spline matches the hand-solved tridiagonal system") {
    // knots x = {0,1,2,3}, y = {0,1,0,1}: second derivatives M = {0,-4,4,0},
    // so S(0.5) = 0.75 and S(1.5) = 0.5
    imputation::detail::CubicSpline s({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 0.0, 1.0});
    CHECK(s(0.5) == Catch::Approx(0.75).epsilon(1e-12));
    CHECK(s(1.5) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(s(1.0) == Catch::Approx(1.0).epsilon(1e-12)); // interpolates the knots
    CHECK(s(-2.0) == 0.0);                              // constant extrapolation
    CHECK(s(10.0) == 1.0);
    CHECK_THROWS_WITH((imputation::detail::CubicSpline({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0})),
                      Catch::Matchers::ContainsSubstring("at least 4"));
}

TEST_CASE("natural cubic spline reproduces affine data exactly") {
    std::vector<double> x{-0.9, -0.4, 0.1, 0.35, 0.8};
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0 * x[i] + 1.0;
    imputation::detail::CubicSpline s(x, y);
    for (double q : {-0.7, -0.2, 0.2, 0.6})
        CHECK(s(q) == Catch::Approx(2.0 * q + 1.0).epsilon(1e-12));
}

TEST_CASE("spline imputation goes through the baseline front end") {
    auto m = with_mask(series_from_raw({0.0, -1.0, 2.0, -1.0, 4.0, -1.0, 6.0, 5.0}), {1, 3, 5});
    auto [imputed, rep] = imputation::impute_baseline(m, BaselineMethod::CubicSpline);
    CHECK(rep.method == "cubic_spline");
    // the observed samples pass through untouched
    for (std::size_t i : {0, 2, 4, 6, 7})
        CHECK(imputed.values[0][i] == m.series.values[0][i]);
    for (double v : imputed.values[0]) CHECK(std::isfinite(v));
}

TEST_CASE("all baselines preserve observed samples bitwise") {
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::AmChirp, 2, 48, 31);
    const imputation::MaskedSeries m = imputation::mask_series(ds.series[0], 0.5, 5);
    for (BaselineMethod method :
         {BaselineMethod::Mean, BaselineMethod::Knn, BaselineMethod::Linear,
          BaselineMethod::CubicSpline}) {
        auto [imputed, rep] = imputation::impute_baseline(m, method);
        for (std::size_t i = 0; i < m.series.length(); ++i)
            if (m.series.observed(i))
                CHECK(imputed.values[0][i] == m.series.values[0][i]);
        CHECK(rep.mse >= 0.0);
        CHECK(rep.ffte >= 0.0);
    }
}

TEST_CASE("baseline method names round-trip") {
    for (BaselineMethod m : {BaselineMethod::Mean, BaselineMethod::Knn, BaselineMethod::Linear,
                             BaselineMethod::CubicSpline})
        CHECK(imputation::baseline_from_name(imputation::baseline_name(m)) == m);
    CHECK_THROWS_AS(imputation::baseline_from_name("spline"), ValidationError);
}

TEST_CASE("tv prior is zero for a constant representation") {
    ParamVector p{MlpSpec{{1, 4, 1}}, std::vector<double>(13, 0.0)};
    p.flat.back() = 0.7; // output bias only: constant function
    CHECK(imputation::tv_prior(p, uniform_grid(16)) == 0.0);
    CHECK_THROWS_AS(imputation::tv_prior(p, {}), ValidationError);
}

TEST_CASE("tv prior matches the closed form for a single sine unit") {
    const double w1 = 0.4, b1 = 0.9, w2 = 1.7, b2 = -0.3;
    ParamVector p{MlpSpec{{1, 1, 1}}, {w1, b1, w2, b2}};
    const std::vector<double> t = uniform_grid(25);
    double expect = 0.0;
    for (double ti : t) expect += std::abs(30.0 * w1 * w2 * std::cos(30.0 * w1 * ti + b1));
    expect /= static_cast<double>(t.size());
    CHECK(imputation::tv_prior(p, t) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("INR imputation fills gaps and reports both metrics") {
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::AmChirp, 2, 64, 13);
    const imputation::MaskedSeries m = imputation::mask_series(ds.series[0], 0.3, 3);

    imputation::InrImputeOptions opts;
    opts.fit.epochs = 150;
    opts.fit.adam.lr = 5e-4;

    auto [plain, plain_rep] = imputation::impute_inr(m, false, opts);
    auto [tv, tv_rep] = imputation::impute_inr(m, true, opts);

    CHECK(plain_rep.method == "siren");
    CHECK(tv_rep.method == "siren_tv");
    CHECK(plain_rep.fraction == Catch::Approx(0.3));
    CHECK(plain.mask.empty());
    CHECK(tv.mask.empty());
    for (double v : plain.values[0]) CHECK(std::isfinite(v));
    for (double v : tv.values[0]) CHECK(std::isfinite(v));
    CHECK(plain_rep.mse >= 0.0);
    CHECK(tv_rep.ffte >= 0.0);
    // the two variants actually differ: the prior changed the optimum
    CHECK(plain.values[0] != tv.values[0]);
}

TEST_CASE("stronger smoothness prior reduces output roughness") {
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::AmChirp, 2, 48, 7);
    const imputation::MaskedSeries m = imputation::mask_series(ds.series[0], 0.5, 11);

    auto roughness = [&](double weight) {
        imputation::InrImputeOptions opts;
        opts.fit.epochs = 200;
        opts.fit.adam.lr = 5e-4;
        opts.tv_weight = weight;
        auto [imputed, rep] = imputation::impute_inr(m, weight > 0.0, opts);
        double acc = 0.0;
        for (std::size_t i = 1; i < imputed.length(); ++i)
            acc += std::abs(imputed.values[0][i] - imputed.values[0][i - 1]);
        return acc;
    };

    const double none = roughness(0.0);
    const double heavy = roughness(10.0);
    INFO("roughness without prior " << none << ", with heavy prior " << heavy);
    CHECK(heavy < none);
}
