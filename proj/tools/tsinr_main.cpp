// Command-line front end: fit, reconstruct, compare-activations, impute,
// train-hypertime, generate, baseline-pca, evaluate, synth-data.
//
// Every subcommand accepts --config <file.json> whose keys are the long
// option names; explicit flags override file values, unknown keys are
// rejected. The effective configuration is echoed into every emitted report
// so outputs are self-describing. Relative output paths are placed under
// $TSINR_OUT_DIR when set. All outputs are pure functions of (inputs,
// config, seed): reruns are byte-identical.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsinr/dataset.hpp"
#include "tsinr/errors.hpp"
#include "tsinr/evaluation.hpp"
#include "tsinr/hypertime.hpp"
#include "tsinr/imputation.hpp"
#include "tsinr/inr.hpp"
#include "tsinr/pca.hpp"

using nlohmann::json;
using namespace tsinr;

namespace {

std::string out_path(const std::string& p) {
    if (p.empty() || p.front() == '/') return p;
    const char* dir = std::getenv("TSINR_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return p;
    return std::string(dir) + "/" + p;
}

void write_json_file(const std::string& path, const json& j) {
    const std::string full = out_path(path);
    std::ofstream out(full);
    if (!out) throw ValidationError("cannot open '" + full + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ValidationError("write failed for '" + full + "'");
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Input flags shared by every dataset-consuming subcommand.
struct DataArgs {
    std::string path;
    std::string format = "tsv";
    std::size_t channels = 1;
    std::size_t max_series = 300;

    void attach(CLI::App& cmd, const char* flag, const char* what, bool with_cap = true) {
        cmd.add_option(flag, path, what)->required();
        cmd.add_option("--format", format, "input layout: tsv (UCR) or csv")
            ->check(CLI::IsMember({"tsv", "csv"}));
        cmd.add_option("--channels", channels, "channels per series for csv input");
        if (with_cap)
            cmd.add_option("--max-series", max_series,
                           "load at most this many series (default 300)");
    }

    data::Dataset load() const {
        data::Dataset ds = format == "csv" ? data::load_csv_multivariate(path, channels)
                                           : data::load_ucr_tsv(path);
        data::apply_max_series(ds, max_series);
        return ds;
    }

    json effective(const char* key) const {
        return json{{key, path},
                    {"format", format},
                    {"channels", channels},
                    {"max-series", max_series}};
    }
};

const TimeSeries& pick_series(const data::Dataset& ds, std::size_t index) {
    if (index >= ds.series.size())
        throw ValidationError("series index " + std::to_string(index) + " out of range: file has " +
                              std::to_string(ds.series.size()) + " series");
    return ds.series[index];
}

json series_meta(const data::Dataset& ds) {
    return json{{"series", ds.series.size()},
                {"length", ds.series.front().length()},
                {"channels", ds.series.front().channels()}};
}

void save_series(const std::string& path, const data::Dataset& ds) {
    if (ds.series.front().channels() == 1)
        data::save_ucr_tsv(out_path(path), ds);
    else
        data::save_csv_multivariate(out_path(path), ds, false);
}

// ---------------------------------------------------------------------------
// fit

struct FitCmd {
    DataArgs data;
    std::size_t series_index = 0;
    std::string activation = "sine";
    double omega0 = 30.0;
    std::size_t epochs = 2000;
    double lr = 1e-4;
    double tv_weight = 0.0;
    std::uint64_t seed = 0;
    std::string model_out = "model.inr";
    std::string report_out = "fit_report.json";

    json effective() const {
        json c = data.effective("data");
        c["series-index"] = series_index;
        c["activation"] = activation;
        c["omega0"] = omega0;
        c["epochs"] = epochs;
        c["lr"] = lr;
        c["tv-weight"] = tv_weight;
        c["seed"] = seed;
        c["model"] = model_out;
        c["report"] = report_out;
        return c;
    }

    void run() const {
        const data::Dataset ds = data.load();
        const TimeSeries& s = pick_series(ds, series_index);
        const MlpSpec spec =
            MlpSpec::inr_default(s.channels(), activation_from_name(activation), omega0);
        inr::FitOptions opts;
        opts.epochs = epochs;
        opts.adam.lr = lr;
        opts.seed = seed;
        opts.tv_weight = tv_weight;
        const inr::FitResult r = inr::fit(s, spec, opts);

        inr::save_inr_file(out_path(model_out), {r.params, s.scale, s.length()});
        write_json_file(report_out, json{{"command", "fit"},
                                         {"config", effective()},
                                         {"final_mse", r.final_mse},
                                         {"loss_history", r.loss_history},
                                         {"model", model_out}});
    }
};

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructCmd {
    std::string model;
    std::size_t length = 0; // 0 = the grid the model was fitted on
    std::string out = "reconstruction.tsv";

    json effective() const {
        return json{{"model", model}, {"length", length}, {"out", out}};
    }

    void run() const {
        const inr::InrModel m = inr::load_inr_file(model);
        const std::size_t n = length == 0 ? m.native_length : length;
        const std::vector<double> grid = uniform_grid(n);
        const Tensor values = inr::evaluate(m.params, grid);

        TimeSeries s;
        s.t = grid;
        s.scale = m.scale;
        s.values.resize(m.scale.size());
        for (std::size_t c = 0; c < m.scale.size(); ++c)
            s.values[c].assign(values.row_ptr(c), values.row_ptr(c) + n);

        data::Dataset ds;
        ds.series.push_back(std::move(s));
        save_series(out, ds);
        write_json_file(out + ".meta.json", json{{"command", "reconstruct"},
                                                 {"config", effective()},
                                                 {"grid_length", n},
                                                 {"channels", m.scale.size()}});
    }
};

// ---------------------------------------------------------------------------
// compare-activations

struct CompareCmd {
    DataArgs data;
    std::size_t epochs = 2000;
    double lr = 1e-4;
    double omega0 = 30.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out = "compare_activations.json";

    json effective() const {
        json c = data.effective("data");
        c["epochs"] = epochs;
        c["lr"] = lr;
        c["omega0"] = omega0;
        c["seed"] = seed;
        c["threads"] = threads;
        c["out"] = out;
        return c;
    }

    void run() const {
        const data::Dataset ds = data.load();
        inr::CompareOptions opts;
        opts.fit.epochs = epochs;
        opts.fit.adam.lr = lr;
        opts.fit.seed = seed;
        opts.omega0 = omega0;
        opts.threads = threads;
        const auto reports = inr::compare_activations(ds.series, opts);

        json results = json::array();
        for (const inr::ActivationReport& r : reports) {
            std::vector<double> mean_curve(epochs, 0.0);
            for (const auto& curve : r.loss_curves)
                for (std::size_t e = 0; e < curve.size(); ++e) mean_curve[e] += curve[e];
            for (double& v : mean_curve) v /= static_cast<double>(r.loss_curves.size());
            results.push_back(json{{"activation", activation_name(r.activation)},
                                   {"mean_mse", r.mean_mse},
                                   {"per_series_mse", r.per_series_mse},
                                   {"mean_loss_curve", mean_curve}});
        }
        write_json_file(out, json{{"command", "compare-activations"},
                                  {"config", effective()},
                                  {"dataset", series_meta(ds)},
                                  {"results", results}});
    }
};

// ---------------------------------------------------------------------------
// impute

struct ImputeCmd {
    DataArgs data;
    std::size_t series_index = 0;
    std::vector<double> fractions{0.0, 0.1, 0.5, 0.7, 0.9};
    std::vector<std::string> methods{"siren", "siren_tv", "mean", "knn", "linear",
                                     "cubic_spline"};
    std::size_t epochs = 2000;
    double lr = 1e-4;
    double tv_weight = 1e-3;
    std::size_t knn_k = 5;
    std::uint64_t seed = 0;
    std::string report_out = "impute_report.json";
    std::string csv_out = "imputed.csv";

    json effective() const {
        json c = data.effective("data");
        c["series-index"] = series_index;
        c["fractions"] = fractions;
        c["methods"] = methods;
        c["epochs"] = epochs;
        c["lr"] = lr;
        c["tv-weight"] = tv_weight;
        c["knn-k"] = knn_k;
        c["seed"] = seed;
        c["report"] = report_out;
        c["csv"] = csv_out;
        return c;
    }

    void run() const {
        const data::Dataset ds = data.load();
        const TimeSeries& s = pick_series(ds, series_index);

        const std::string csv_full = out_path(csv_out);
        std::ofstream csv(csv_full);
        if (!csv) throw ValidationError("cannot open '" + csv_full + "' for writing");
        csv << "method,fraction";
        csv << ",t";
        for (std::size_t c = 0; c < s.channels(); ++c) csv << ",ch" << c;
        csv << ",observed\n";

        json reports = json::array();
        for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
            const imputation::MaskedSeries masked =
                imputation::mask_series(s, fractions[fi], mix_seed(seed, fi));
            for (const std::string& method : methods) {
                TimeSeries imputed;
                imputation::ImputationReport rep;
                if (method == "siren" || method == "siren_tv") {
                    imputation::InrImputeOptions opts;
                    opts.fit.epochs = epochs;
                    opts.fit.adam.lr = lr;
                    opts.fit.seed = seed;
                    opts.tv_weight = tv_weight;
                    std::tie(imputed, rep) =
                        imputation::impute_inr(masked, method == "siren_tv", opts);
                } else {
                    imputation::BaselineOptions opts;
                    opts.knn_k = knn_k;
                    std::tie(imputed, rep) = imputation::impute_baseline(
                        masked, imputation::baseline_from_name(method), opts);
                }
                reports.push_back(json{{"method", rep.method},
                                       {"fraction", rep.fraction},
                                       {"mse", rep.mse},
                                       {"ffte", rep.ffte}});
                for (std::size_t i = 0; i < imputed.length(); ++i) {
                    csv << method << ',' << format_value(fractions[fi]) << ','
                        << format_value(imputed.t[i]);
                    for (std::size_t c = 0; c < imputed.channels(); ++c)
                        csv << ',' << format_value(imputed.raw(c, i));
                    csv << ',' << (masked.series.observed(i) ? 1 : 0) << '\n';
                }
            }
        }
        if (!csv) throw ValidationError("write failed for '" + csv_full + "'");
        csv.close();

        write_json_file(report_out, json{{"command", "impute"},
                                         {"config", effective()},
                                         {"series_length", s.length()},
                                         {"reports", reports}});
    }
};

// ---------------------------------------------------------------------------
// train-hypertime

struct TrainCmd {
    DataArgs data;
    std::size_t steps = 2000;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    double lambda_weights = 1e-4;
    double lambda_latent = 1e-3;
    double lambda_fft = 1e-2;
    std::size_t latent_dim = 40;
    std::size_t encoder_hidden = 128;
    std::size_t hyper_hidden = 128;
    std::vector<std::size_t> hypo_hidden{60, 60, 60};
    double encoder_omega0 = 30.0;
    double hypo_omega0 = 30.0;
    std::size_t chunk = 16;
    unsigned threads = 0;
    std::size_t checkpoint_every = 0;
    std::string model_out = "hypertime.hyt";
    std::string history_out = "train_history.json";

    hypertime::TrainConfig train_config() const {
        hypertime::TrainConfig cfg;
        cfg.steps = steps;
        cfg.adam.lr = lr;
        cfg.seed = seed;
        cfg.lambdas = {lambda_weights, lambda_latent, lambda_fft};
        cfg.latent_dim = latent_dim;
        cfg.encoder_hidden = encoder_hidden;
        cfg.hyper_hidden = hyper_hidden;
        cfg.hypo_hidden = hypo_hidden;
        cfg.encoder_omega0 = encoder_omega0;
        cfg.hypo_omega0 = hypo_omega0;
        cfg.chunk = chunk;
        cfg.threads = threads;
        cfg.checkpoint_every = checkpoint_every;
        cfg.checkpoint_path = checkpoint_every > 0 ? out_path(model_out) : "";
        return cfg;
    }

    json effective() const {
        json c = data.effective("data");
        c["steps"] = steps;
        c["lr"] = lr;
        c["seed"] = seed;
        c["lambda-weights"] = lambda_weights;
        c["lambda-latent"] = lambda_latent;
        c["lambda-fft"] = lambda_fft;
        c["latent-dim"] = latent_dim;
        c["encoder-hidden"] = encoder_hidden;
        c["hyper-hidden"] = hyper_hidden;
        c["hypo-hidden"] = hypo_hidden;
        c["encoder-omega0"] = encoder_omega0;
        c["hypo-omega0"] = hypo_omega0;
        c["chunk"] = chunk;
        c["threads"] = threads;
        c["checkpoint-every"] = checkpoint_every;
        c["model"] = model_out;
        c["history"] = history_out;
        return c;
    }

    void run() const {
        const data::Dataset ds = data.load();
        const hypertime::TrainResult r = hypertime::train_hypertime(ds.series, train_config());
        hypertime::save_hypertime_file(out_path(model_out), r.model);

        json history = json::array();
        for (const hypertime::LossComponents& c : r.history)
            history.push_back(json{{"rec", c.rec},
                                   {"weights", c.weights},
                                   {"latent", c.latent},
                                   {"fft", c.fft},
                                   {"total", c.total(r.model.lambdas)}});
        write_json_file(history_out, json{{"command", "train-hypertime"},
                                          {"config", effective()},
                                          {"dataset", series_meta(ds)},
                                          {"model", model_out},
                                          {"history", history}});
    }
};

// ---------------------------------------------------------------------------
// generate

struct GenerateCmd {
    std::string model;
    DataArgs data;
    std::size_t n = 100;
    double alpha_lo = 0.25;
    double alpha_hi = 0.75;
    std::uint64_t seed = 0;
    std::string out = "generated.tsv";

    json effective() const {
        json c = data.effective("data");
        c["model"] = model;
        c["n"] = n;
        c["alpha-lo"] = alpha_lo;
        c["alpha-hi"] = alpha_hi;
        c["seed"] = seed;
        c["out"] = out;
        return c;
    }

    void run() const {
        const hypertime::HyperTimeModel m = hypertime::load_hypertime_file(model);
        const data::Dataset ds = data.load();
        hypertime::GenerateOptions opts;
        opts.n_samples = n;
        opts.alpha_lo = alpha_lo;
        opts.alpha_hi = alpha_hi;
        opts.seed = seed;
        const auto generated = hypertime::interpolate_generate(m, ds.series, opts);

        data::Dataset out_ds;
        json samples = json::array();
        for (const hypertime::GeneratedSeries& g : generated) {
            out_ds.series.push_back(g.series);
            out_ds.labels.push_back("0");
            samples.push_back(
                json{{"from_a", g.from_a}, {"from_b", g.from_b}, {"alpha", g.alpha}});
        }
        save_series(out, out_ds);
        write_json_file(out + ".meta.json", json{{"command", "generate"},
                                                 {"config", effective()},
                                                 {"samples", samples}});
    }
};

// ---------------------------------------------------------------------------
// baseline-pca

struct BaselinePcaCmd {
    DataArgs data;
    std::size_t components = 40;
    std::size_t n = 100;
    double alpha_lo = 0.25;
    double alpha_hi = 0.75;
    std::uint64_t seed = 0;
    std::string out = "pca_generated.tsv";

    json effective() const {
        json c = data.effective("data");
        c["components"] = components;
        c["n"] = n;
        c["alpha-lo"] = alpha_lo;
        c["alpha-hi"] = alpha_hi;
        c["seed"] = seed;
        c["out"] = out;
        return c;
    }

    void run() const {
        const data::Dataset ds = data.load();
        pca::PcaGenerateOptions opts;
        opts.n_components = components;
        opts.n_samples = n;
        opts.alpha_lo = alpha_lo;
        opts.alpha_hi = alpha_hi;
        opts.seed = seed;
        const auto generated = pca::pca_generate(ds.series, opts);

        data::Dataset out_ds;
        json samples = json::array();
        for (const pca::PcaGenerated& g : generated) {
            out_ds.series.push_back(g.series);
            out_ds.labels.push_back("0");
            samples.push_back(
                json{{"from_a", g.from_a}, {"from_b", g.from_b}, {"alpha", g.alpha}});
        }
        save_series(out, out_ds);
        write_json_file(out + ".meta.json", json{{"command", "baseline-pca"},
                                                 {"config", effective()},
                                                 {"samples", samples}});
    }
};

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateCmd {
    std::string real_path, synth_path;
    std::string format = "tsv";
    std::size_t channels = 1;
    std::size_t max_series = 300;
    std::size_t window = 8;
    std::size_t hidden = 32;
    std::size_t predictor_epochs = 500;
    double predictor_lr = 1e-3;
    double band_lo = 0.01;
    double band_hi = 0.99;
    std::uint64_t seed = 0;
    std::string projection;
    std::string out = "evaluation.json";

    json effective() const {
        return json{{"real", real_path},
                    {"synth", synth_path},
                    {"format", format},
                    {"channels", channels},
                    {"max-series", max_series},
                    {"window", window},
                    {"hidden", hidden},
                    {"predictor-epochs", predictor_epochs},
                    {"predictor-lr", predictor_lr},
                    {"band-lo", band_lo},
                    {"band-hi", band_hi},
                    {"seed", seed},
                    {"projection", projection},
                    {"out", out}};
    }

    data::Dataset load(const std::string& path) const {
        data::Dataset ds = format == "csv" ? data::load_csv_multivariate(path, channels)
                                           : data::load_ucr_tsv(path);
        data::apply_max_series(ds, max_series);
        return ds;
    }

    void run() const {
        const data::Dataset real = load(real_path);
        const data::Dataset synth = load(synth_path);
        evaluation::PredictorSpec spec{window, hidden, predictor_epochs, predictor_lr, seed};
        const evaluation::Band band{band_lo, band_hi};
        evaluation::EvalReport rep =
            evaluation::evaluate_sets(real.series, synth.series, spec, band);

        if (!projection.empty()) {
            const auto pts = evaluation::export_projection(real.series, synth.series);
            const std::string full = out_path(projection);
            std::ofstream csv(full);
            if (!csv) throw ValidationError("cannot open '" + full + "' for writing");
            csv << "x,y,set\n";
            for (const auto& p : pts)
                csv << format_value(p.x) << ',' << format_value(p.y) << ','
                    << (p.synthetic ? "synth" : "real") << '\n';
            if (!csv) throw ValidationError("write failed for '" + full + "'");
        }

        write_json_file(out, json{{"command", "evaluate"},
                                  {"config", effective()},
                                  {"predictive_mae", rep.predictive_mae},
                                  {"precision", rep.precision},
                                  {"recall", rep.recall},
                                  {"f1", rep.f1},
                                  {"n_real", rep.n_real},
                                  {"n_synth", rep.n_synth}});
    }
};

// ---------------------------------------------------------------------------
// synth-data

struct SynthCmd {
    std::string preset = "multisine";
    std::size_t n = 100;
    std::size_t length = 128;
    std::uint64_t seed = 0;
    std::string out;

    json effective() const {
        return json{{"preset", preset},
                    {"n", n},
                    {"length", length},
                    {"seed", seed},
                    {"out", out}};
    }

    void run() {
        if (out.empty()) out = preset + ".tsv";
        const data::Dataset ds =
            data::synth_corpus(data::preset_from_name(preset), n, length, seed);
        data::save_ucr_tsv(out_path(out), ds);
        write_json_file(out + ".meta.json",
                        json{{"command", "synth-data"}, {"config", effective()}});
    }
};

// ---------------------------------------------------------------------------
// config file expansion

bool arg_present(const std::vector<std::string>& args, const std::string& flag) {
    for (const std::string& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// Turns config-file entries into synthetic command-line arguments appended
// after the user's own (which therefore win), validating keys against the
// chosen subcommand's options.
std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::map<std::string, CLI::App*>& subs) {
    std::string config_path;
    std::string sub_name;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (sub_name.empty() && !args[i].empty() && args[i][0] != '-') sub_name = args[i];
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;
    auto it = subs.find(sub_name);
    if (it == subs.end())
        throw ValidationError("--config requires a subcommand");

    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot open config '" + config_path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ValidationError("config '" + config_path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ValidationError("config must be a JSON object");

    std::vector<std::string> expanded = args;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config")
            throw ValidationError("config files cannot nest a 'config' key");
        const std::string flag = "--" + key;
        if (it->second->get_option_no_throw(flag) == nullptr)
            throw ValidationError("config key '" + key + "' is not an option of '" + sub_name +
                                  "'");
        if (arg_present(args, flag)) continue; // explicit flag wins
        auto append = [&](const json& v) {
            expanded.push_back(flag + "=" +
                               (v.is_string() ? v.get<std::string>() : v.dump()));
        };
        if (value.is_array())
            for (const json& v : value) append(v);
        else
            append(value);
    }
    return expanded;
}

int dispatch(std::vector<std::string> args) {
    CLI::App app{"implicit neural representations for time series: fitting, imputation, "
                 "HyperTime training, generation and evaluation"};
    app.require_subcommand(1);
    std::map<std::string, CLI::App*> subs;
    std::string config_path; // parsed for completeness; consumed by expand_config
    auto add_sub = [&](const char* name, const char* what) {
        CLI::App* cmd = app.add_subcommand(name, what);
        cmd->add_option("--config", config_path, "JSON config file; flags override its values");
        subs[name] = cmd;
        return cmd;
    };

    FitCmd fit;
    {
        CLI::App* c = add_sub("fit", "fit one INR to one series");
        fit.data.attach(*c, "--data", "input dataset");
        c->add_option("--series-index", fit.series_index, "which series to fit");
        c->add_option("--activation", fit.activation, "sine, relu, tanh or sigmoid");
        c->add_option("--omega0", fit.omega0, "sine frequency scale");
        c->add_option("--epochs", fit.epochs, "full-batch training epochs");
        c->add_option("--lr", fit.lr, "Adam learning rate");
        c->add_option("--tv-weight", fit.tv_weight, "total-variation prior weight");
        c->add_option("--seed", fit.seed, "RNG seed");
        c->add_option("--model", fit.model_out, "output INR1 container");
        c->add_option("--report", fit.report_out, "output JSON report");
        c->callback([&fit] { fit.run(); });
    }

    ReconstructCmd rec;
    {
        CLI::App* c = add_sub("reconstruct", "evaluate a fitted INR on a uniform grid");
        c->add_option("--model", rec.model, "INR1 container")->required();
        c->add_option("--length", rec.length, "grid size (default: fitted length)");
        c->add_option("--out", rec.out, "output series file");
        c->callback([&rec] { rec.run(); });
    }

    CompareCmd cmp;
    {
        CLI::App* c = add_sub("compare-activations",
                              "fit every series with each activation and compare errors");
        cmp.data.attach(*c, "--data", "input dataset");
        c->add_option("--epochs", cmp.epochs, "full-batch training epochs");
        c->add_option("--lr", cmp.lr, "Adam learning rate");
        c->add_option("--omega0", cmp.omega0, "sine frequency scale");
        c->add_option("--seed", cmp.seed, "RNG seed");
        c->add_option("--threads", cmp.threads, "worker threads (0 = hardware)");
        c->add_option("--out", cmp.out, "output JSON report");
        c->callback([&cmp] { cmp.run(); });
    }

    ImputeCmd imp;
    {
        CLI::App* c = add_sub("impute", "mask one series and fill it with every method");
        imp.data.attach(*c, "--data", "input dataset");
        c->add_option("--series-index", imp.series_index, "which series to impute");
        c->add_option("--fractions", imp.fractions, "missing fractions to test");
        c->add_option("--methods", imp.methods,
                      "siren, siren_tv, mean, knn, linear, cubic_spline");
        c->add_option("--epochs", imp.epochs, "INR training epochs");
        c->add_option("--lr", imp.lr, "Adam learning rate");
        c->add_option("--tv-weight", imp.tv_weight, "prior weight for siren_tv");
        c->add_option("--knn-k", imp.knn_k, "neighbors for the knn baseline");
        c->add_option("--seed", imp.seed, "RNG seed (masks and init)");
        c->add_option("--report", imp.report_out, "output JSON report");
        c->add_option("--csv", imp.csv_out, "output CSV of imputed series");
        c->callback([&imp] { imp.run(); });
    }

    TrainCmd trn;
    {
        CLI::App* c = add_sub("train-hypertime", "train the set encoder and hypernet");
        trn.data.attach(*c, "--data", "training corpus");
        c->add_option("--steps", trn.steps, "optimization steps");
        c->add_option("--lr", trn.lr, "Adam learning rate");
        c->add_option("--seed", trn.seed, "RNG seed");
        c->add_option("--lambda-weights", trn.lambda_weights, "hyponet weight penalty");
        c->add_option("--lambda-latent", trn.lambda_latent, "latent norm penalty");
        c->add_option("--lambda-fft", trn.lambda_fft, "spectral loss weight");
        c->add_option("--latent-dim", trn.latent_dim, "embedding size");
        c->add_option("--encoder-hidden", trn.encoder_hidden, "encoder hidden width");
        c->add_option("--hyper-hidden", trn.hyper_hidden, "hypernet hidden width");
        c->add_option("--hypo-hidden", trn.hypo_hidden, "hyponet hidden widths");
        c->add_option("--encoder-omega0", trn.encoder_omega0, "encoder sine scale");
        c->add_option("--hypo-omega0", trn.hypo_omega0, "hyponet sine scale");
        c->add_option("--chunk", trn.chunk, "series per gradient chunk");
        c->add_option("--threads", trn.threads, "worker threads (0 = hardware)");
        c->add_option("--checkpoint-every", trn.checkpoint_every,
                      "save the model every N steps (0 = only at the end)");
        c->add_option("--model", trn.model_out, "output HYT1 container");
        c->add_option("--history", trn.history_out, "output JSON loss history");
        c->callback([&trn] { trn.run(); });
    }

    GenerateCmd gen;
    {
        CLI::App* c = add_sub("generate", "sample new series by latent interpolation");
        c->add_option("--model", gen.model, "HYT1 container")->required();
        gen.data.attach(*c, "--data", "corpus providing the interpolation endpoints");
        c->add_option("--n", gen.n, "number of samples");
        c->add_option("--alpha-lo", gen.alpha_lo, "lower interpolation bound");
        c->add_option("--alpha-hi", gen.alpha_hi, "upper interpolation bound");
        c->add_option("--seed", gen.seed, "RNG seed");
        c->add_option("--out", gen.out, "output series file");
        c->callback([&gen] { gen.run(); });
    }

    BaselinePcaCmd bpc;
    {
        CLI::App* c = add_sub("baseline-pca", "sample new series by PCA-coefficient mixing");
        bpc.data.attach(*c, "--data", "corpus to decompose");
        c->add_option("--components", bpc.components, "principal components to keep");
        c->add_option("--n", bpc.n, "number of samples");
        c->add_option("--alpha-lo", bpc.alpha_lo, "lower interpolation bound");
        c->add_option("--alpha-hi", bpc.alpha_hi, "upper interpolation bound");
        c->add_option("--seed", bpc.seed, "RNG seed");
        c->add_option("--out", bpc.out, "output series file");
        c->callback([&bpc] { bpc.run(); });
    }

    EvaluateCmd ev;
    {
        CLI::App* c = add_sub("evaluate", "score a synthetic set against a real set");
        c->add_option("--real", ev.real_path, "real dataset")->required();
        c->add_option("--synth", ev.synth_path, "synthetic dataset")->required();
        c->add_option("--format", ev.format, "input layout: tsv or csv")
            ->check(CLI::IsMember({"tsv", "csv"}));
        c->add_option("--channels", ev.channels, "channels per series for csv input");
        c->add_option("--max-series", ev.max_series, "load at most this many series");
        c->add_option("--window", ev.window, "predictor lag window");
        c->add_option("--hidden", ev.hidden, "predictor hidden width");
        c->add_option("--predictor-epochs", ev.predictor_epochs, "predictor training epochs");
        c->add_option("--predictor-lr", ev.predictor_lr, "predictor learning rate");
        c->add_option("--band-lo", ev.band_lo, "lower quantile of the coverage band");
        c->add_option("--band-hi", ev.band_hi, "upper quantile of the coverage band");
        c->add_option("--seed", ev.seed, "RNG seed");
        c->add_option("--projection", ev.projection, "also write a 2-D PCA projection CSV");
        c->add_option("--out", ev.out, "output JSON report");
        c->callback([&ev] { ev.run(); });
    }

    SynthCmd syn;
    {
        CLI::App* c = add_sub("synth-data", "emit a synthetic corpus");
        c->add_option("--preset", syn.preset, "multisine, am_chirp or spectral_spread");
        c->add_option("--n", syn.n, "number of series");
        c->add_option("--length", syn.length, "samples per series");
        c->add_option("--seed", syn.seed, "RNG seed");
        c->add_option("--out", syn.out, "output TSV (default: <preset>.tsv)");
        c->callback([&syn] { syn.run(); });
    }

    args = expand_config(args, subs);
    std::reverse(args.begin(), args.end()); // CLI11 consumes back to front
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
