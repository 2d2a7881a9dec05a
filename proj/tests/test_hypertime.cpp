#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "chain_checks.hpp"
#include "tsinr/dataset.hpp"
#include "tsinr/hypertime.hpp"
#include "tsinr/spectral.hpp"

using namespace tsinr;

namespace {

// Small stack and corpus used by most cases; full-size shapes are exercised
// only where the contract is about them.
chain_checks::TinyChain tiny(std::uint64_t seed = 3) { return chain_checks::tiny_chain(seed); }

} // namespace

TEST_CASE("default configuration decodes exactly 7501 hyponet parameters") {
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::Multisine, 3, 32, 1);
    hypertime::TrainConfig cfg;
    const hypertime::HyperTimeModel model = hypertime::init_hypertime(ds.series, cfg);

    CHECK(model.latent_dim() == 40);
    CHECK(model.hypo_spec == MlpSpec::inr_default(1));
    CHECK(model.encoder.spec.widths == std::vector<std::size_t>{2, 128, 128, 40});
    CHECK(model.hyper.spec.widths == std::vector<std::size_t>{40, 128, 7501});
    CHECK(model.hyper.spec.activation == Activation::Relu);

    const hypertime::Embedding z = hypertime::encode(model, ds.series[0]);
    REQUIRE(z.z.size() == 40);
    for (double v : z.z) CHECK(std::isfinite(v));

    const ParamVector hypo = hypertime::decode(model, z.z);
    CHECK(hypo.flat.size() == 7501);
    CHECK(hypo.spec == model.hypo_spec);
}

TEST_CASE("instantiated hyponet equals the reference MLP bitwise") {
    const chain_checks::TinyChain tc = tiny();
    const hypertime::Embedding emb = hypertime::encode(tc.model, tc.corpus[0]);
    const ParamVector hypo = hypertime::decode(tc.model, emb.z);
    const std::vector<double> coords = uniform_grid(19);

    autodiff::Tape tape;
    autodiff::NodeId flat = tape.input(Tensor(Shape{hypo.flat.size(), 1}, hypo.flat), false);
    auto layers = mlp::slice_params(tape, hypo.spec, flat);
    autodiff::NodeId x = tape.constant(Tensor(Shape{1, coords.size()}, coords));
    const Tensor& taped = tape.value(mlp::tape_forward(tape, hypo.spec, layers, x));

    const Tensor reference = mlp::forward(hypo, coords);
    REQUIRE(taped.shape() == reference.shape());
    for (std::size_t i = 0; i < taped.size(); ++i) {
        CHECK(taped[i] == reference[i]);
        CHECK(std::abs(taped[i] - reference[i]) <= 1e-12);
    }
}

TEST_CASE("invariant mean pooling is exact under permutation and duplication") {
    Rng rng(41);
    std::vector<double> vals(257);
    for (double& v : vals) v = rng.uniform(-3.0, 3.0);

    const double base = hypertime::detail::invariant_mean(vals);
    std::vector<double> shuffled = vals;
    rng.shuffle(shuffled);
    CHECK(hypertime::detail::invariant_mean(shuffled) == base);

    std::vector<double> doubled = vals;
    doubled.insert(doubled.end(), vals.begin(), vals.end());
    rng.shuffle(doubled);
    CHECK(hypertime::detail::invariant_mean(doubled) == base);

    double naive = 0.0;
    for (double v : vals) naive += v;
    naive /= static_cast<double>(vals.size());
    CHECK(base == Catch::Approx(naive).epsilon(1e-13));

    CHECK_THROWS_AS(hypertime::detail::invariant_mean({}), ValidationError);
}

TEST_CASE("encode is exactly invariant under pair permutation and duplication") {
    const chain_checks::TinyChain tc = tiny(5);
    const TimeSeries& s = tc.corpus[0];
    const hypertime::Embedding base = hypertime::encode(tc.model, s);

    SECTION("permuted pairs") {
        std::vector<std::size_t> order(s.length());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(8);
        rng.shuffle(order);
        TimeSeries perm = s;
        for (std::size_t i = 0; i < order.size(); ++i) {
            perm.t[i] = s.t[order[i]];
            perm.values[0][i] = s.values[0][order[i]];
        }
        CHECK(hypertime::encode(tc.model, perm).z == base.z);
    }
    SECTION("duplicated pairs") {
        TimeSeries dup = s;
        dup.t.insert(dup.t.end(), s.t.begin(), s.t.end());
        dup.values[0].insert(dup.values[0].end(), s.values[0].begin(), s.values[0].end());
        CHECK(hypertime::encode(tc.model, dup).z == base.z);
    }
    SECTION("distinct series produce distinct embeddings") {
        CHECK(hypertime::encode(tc.model, tc.corpus[1]).z != base.z);
    }
    SECTION("shape and content validation") {
        TimeSeries bad = s;
        bad.values.push_back(bad.values[0]);
        bad.scale.push_back(bad.scale[0]);
        CHECK_THROWS_AS(hypertime::encode(tc.model, bad), ValidationError);
        bad = s;
        bad.mask.assign(s.length(), 0);
        CHECK_THROWS_WITH(hypertime::encode(tc.model, bad),
                          Catch::Matchers::ContainsSubstring("missing samples"));
    }
}

TEST_CASE("loss components reproduce independent plain-path computations") {
    const chain_checks::TinyChain tc = tiny(9);
    const TimeSeries& s = tc.corpus[0];
    const hypertime::LossComponents c = hypertime::batch_loss(tc.model, {s});

    // same quantities assembled without the tape
    const hypertime::Embedding emb = hypertime::encode(tc.model, s);
    const ParamVector hypo = hypertime::decode(tc.model, emb.z);
    const Tensor out = mlp::forward(hypo, s.t);

    double rec = 0.0;
    for (std::size_t i = 0; i < s.length(); ++i) {
        const double d = out[i] - s.values[0][i];
        rec += d * d;
    }
    rec /= static_cast<double>(s.length());
    double wgt = 0.0;
    for (double w : hypo.flat) wgt += w * w;
    wgt /= static_cast<double>(hypo.flat.size());
    double lat = 0.0;
    for (double z : emb.z) lat += z * z;
    lat /= static_cast<double>(emb.z.size());
    const std::vector<double> pred(out.data(), out.data() + out.size());
    const double fft = spectral::fft_loss(s.values[0], pred);

    CHECK(c.rec == Catch::Approx(rec).epsilon(1e-13));
    CHECK(c.weights == Catch::Approx(wgt).epsilon(1e-13));
    CHECK(c.latent == Catch::Approx(lat).epsilon(1e-13));
    CHECK(c.fft == Catch::Approx(fft).epsilon(1e-13));
}

TEST_CASE("total composes the components with the lambda weights") {
    chain_checks::TinyChain tc = tiny(2);
    tc.model.lambdas = {0.0, 0.0, 0.0};
    const hypertime::LossComponents zero = hypertime::batch_loss(tc.model, tc.corpus);
    CHECK(zero.total(tc.model.lambdas) == zero.rec);

    tc.model.lambdas = {1e-4, 1e-3, 1e-2};
    const hypertime::LossComponents c = hypertime::batch_loss(tc.model, tc.corpus);
    CHECK(c.total(tc.model.lambdas) ==
          c.rec + 1e-4 * c.weights + 1e-3 * c.latent + 1e-2 * c.fft);
    CHECK(c.total(tc.model.lambdas) >= c.rec);

    CHECK_THROWS_AS(hypertime::batch_loss(tc.model, {}), ValidationError);
}

TEST_CASE("batch loss gradient matches central finite differences") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const double err = chain_checks::hypertime_chain_max_rel_err(seed);
        INFO("seed " << seed << " max rel err " << err);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("carried input-derivative matches differencing the forward pass") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const double err = chain_checks::tv_derivative_max_rel_err(seed);
        INFO("seed " << seed << " max rel err " << err);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("gradient layout agrees between the value and gradient entry points") {
    const chain_checks::TinyChain tc = tiny(12);
    const hypertime::LossComponents plain = hypertime::batch_loss(tc.model, tc.corpus);
    const auto [with_grad, grad] = hypertime::batch_loss_with_grad(tc.model, tc.corpus);
    CHECK(plain.rec == with_grad.rec);
    CHECK(plain.weights == with_grad.weights);
    CHECK(plain.latent == with_grad.latent);
    CHECK(plain.fft == with_grad.fft);
    CHECK(grad.size() == tc.model.encoder.flat.size() + tc.model.hyper.flat.size());
}

TEST_CASE("training reduces the loss and is reproducible") {
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::Multisine, 4, 16, 7);
    hypertime::TrainConfig cfg;
    cfg.steps = 80;
    cfg.adam.lr = 1e-3;
    cfg.latent_dim = 4;
    cfg.encoder_hidden = 8;
    cfg.hyper_hidden = 8;
    cfg.hypo_hidden = {6};
    cfg.chunk = 2;
    cfg.threads = 1;

    const hypertime::TrainResult a = hypertime::train_hypertime(ds.series, cfg);
    REQUIRE(a.history.size() == 80);
    INFO("loss " << a.history.front().total(cfg.lambdas) << " -> "
                 << a.history.back().total(cfg.lambdas));
    CHECK(a.history.back().total(cfg.lambdas) < a.history.front().total(cfg.lambdas));

    const hypertime::TrainResult b = hypertime::train_hypertime(ds.series, cfg);
    CHECK(a.model.encoder.flat == b.model.encoder.flat);
    CHECK(a.model.hyper.flat == b.model.hyper.flat);

    hypertime::TrainConfig threaded = cfg;
    threaded.threads = 4;
    const hypertime::TrainResult c = hypertime::train_hypertime(ds.series, threaded);
    CHECK(a.model.encoder.flat == c.model.encoder.flat);
    CHECK(a.model.hyper.flat == c.model.hyper.flat);
}

TEST_CASE("training rejects malformed corpora") {
    hypertime::TrainConfig cfg;
    cfg.steps = 1;
    CHECK_THROWS_AS(hypertime::init_hypertime({}, cfg), ValidationError);

    data::Dataset ds = data::synth_corpus(data::SynthPreset::Multisine, 3, 16, 0);
    data::Dataset two = data::synth_corpus(data::SynthPreset::Multisine, 2, 16, 0);
    std::vector<TimeSeries> mixed = ds.series;
    mixed.push_back(data::detail::make_series({{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}}));
    CHECK_THROWS_WITH(hypertime::init_hypertime(mixed, cfg),
                      Catch::Matchers::ContainsSubstring("channels"));

    std::vector<TimeSeries> masked = two.series;
    masked[0].mask.assign(masked[0].length(), 1);
    masked[0].mask[3] = 0;
    CHECK_THROWS_WITH(hypertime::init_hypertime(masked, cfg),
                      Catch::Matchers::ContainsSubstring("fully observed"));
}

TEST_CASE("checkpoints are written during training and load cleanly") {
    const std::string path = "/tmp/tsinr_test_checkpoint.hyt";
    std::remove(path.c_str());
    const data::Dataset ds = data::synth_corpus(data::SynthPreset::Multisine, 2, 16, 77);
    hypertime::TrainConfig cfg;
    cfg.steps = 10;
    cfg.latent_dim = 3;
    cfg.encoder_hidden = 5;
    cfg.hyper_hidden = 5;
    cfg.hypo_hidden = {4};
    cfg.checkpoint_every = 5;
    cfg.checkpoint_path = path;

    const hypertime::TrainResult r = hypertime::train_hypertime(ds.series, cfg);
    const hypertime::HyperTimeModel loaded = hypertime::load_hypertime_file(path);
    // the final checkpoint lands on the last step
    CHECK(loaded.encoder.flat == r.model.encoder.flat);
    CHECK(loaded.hyper.flat == r.model.hyper.flat);
    std::remove(path.c_str());
}

TEST_CASE("HYT1 container round-trips bit-exactly") {
    chain_checks::TinyChain tc = tiny(30);
    tc.model.lambdas = {1e-5, 2e-4, 3e-3};

    std::stringstream buf;
    hypertime::save_hypertime(buf, tc.model);
    const hypertime::HyperTimeModel back = hypertime::load_hypertime(buf);

    CHECK(back.encoder.spec == tc.model.encoder.spec);
    CHECK(back.encoder.flat == tc.model.encoder.flat);
    CHECK(back.hyper.spec == tc.model.hyper.spec);
    CHECK(back.hyper.flat == tc.model.hyper.flat);
    CHECK(back.hypo_spec == tc.model.hypo_spec);
    CHECK(back.lambdas.weights == 1e-5);
    CHECK(back.lambdas.latent == 2e-4);
    CHECK(back.lambdas.fft == 3e-3);
    CHECK(back.native_length == tc.model.native_length);
    REQUIRE(back.corpus_scales.size() == tc.model.corpus_scales.size());
    for (std::size_t i = 0; i < back.corpus_scales.size(); ++i)
        for (std::size_t c = 0; c < back.corpus_scales[i].size(); ++c) {
            CHECK(back.corpus_scales[i][c].offset == tc.model.corpus_scales[i][c].offset);
            CHECK(back.corpus_scales[i][c].gain == tc.model.corpus_scales[i][c].gain);
        }

    std::stringstream bad("YYT1");
    CHECK_THROWS_AS(hypertime::load_hypertime(bad), ValidationError);
}

TEST_CASE("alpha = 0 reproduces the decoded endpoint exactly") {
    const chain_checks::TinyChain tc = tiny(6);
    hypertime::GenerateOptions opts;
    opts.n_samples = 3;
    opts.alpha_lo = 0.0;
    opts.alpha_hi = 0.0;
    const auto out = hypertime::interpolate_generate(tc.model, tc.corpus, opts);
    REQUIRE(out.size() == 3);
    for (const hypertime::GeneratedSeries& g : out) {
        CHECK(g.alpha == 0.0);
        const hypertime::Embedding za = hypertime::encode(tc.model, tc.corpus[g.from_a]);
        CHECK(g.z == za.z);
        const TimeSeries ref =
            hypertime::materialize(tc.model, za.z, tc.corpus[g.from_a].scale);
        CHECK(g.series.values == ref.values);
        for (std::size_t c = 0; c < g.series.channels(); ++c) {
            CHECK(g.series.scale[c].offset == tc.corpus[g.from_a].scale[c].offset);
            CHECK(g.series.scale[c].gain == tc.corpus[g.from_a].scale[c].gain);
        }
    }
}

TEST_CASE("generation draws distinct pairs with alphas in range") {
    const chain_checks::TinyChain tc = tiny(14);
    hypertime::GenerateOptions opts;
    opts.n_samples = 20;
    const auto out = hypertime::interpolate_generate(tc.model, tc.corpus, opts);
    REQUIRE(out.size() == 20);
    for (const auto& g : out) {
        CHECK(g.from_a != g.from_b);
        CHECK(g.from_a < tc.corpus.size());
        CHECK(g.from_b < tc.corpus.size());
        CHECK(g.alpha >= 0.25);
        CHECK(g.alpha <= 0.75);
        CHECK(g.series.length() == tc.model.native_length);
    }
    const auto rerun = hypertime::interpolate_generate(tc.model, tc.corpus, opts);
    bool same = true;
    for (std::size_t i = 0; i < out.size(); ++i)
        same = same && out[i].series.values == rerun[i].series.values;
    CHECK(same);

    CHECK_THROWS_AS(hypertime::interpolate_generate(tc.model, {tc.corpus[0]}, opts),
                    ValidationError);
    hypertime::GenerateOptions bad;
    bad.alpha_lo = 0.8;
    bad.alpha_hi = 0.2;
    CHECK_THROWS_AS(hypertime::interpolate_generate(tc.model, tc.corpus, bad),
                    ValidationError);
}

TEST_CASE("model validation catches inconsistent stacks") {
    chain_checks::TinyChain tc = tiny(1);
    hypertime::HyperTimeModel broken = tc.model;
    broken.hyper.spec.widths.back() += 1;
    broken.hyper.flat.resize(broken.hyper.spec.param_count());
    CHECK_THROWS_WITH(broken.validate(), Catch::Matchers::ContainsSubstring("hyponet needs"));

    broken = tc.model;
    broken.encoder.spec.widths.front() = 5;
    broken.encoder.flat.resize(broken.encoder.spec.param_count());
    CHECK_THROWS_WITH(broken.validate(),
                      Catch::Matchers::ContainsSubstring("1 + channels"));

    CHECK_THROWS_AS(hypertime::decode(tc.model, std::vector<double>(3, 0.0)),
                    ValidationError);
}
