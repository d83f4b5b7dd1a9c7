// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pamc/autoencoder.hpp"
#include "pamc/config.hpp"
#include "pamc/dataset.hpp"
#include "pamc/errors.hpp"
#include "pamc/metrics.hpp"
#include "pamc/theory.hpp"
#include "pamc/trainer.hpp"

namespace {

namespace fs = std::filesystem;
using pamc::Config;

auto format_double(double value) -> std::string
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return {buf, ptr};
}

auto ensure_out_dir(const std::string& out_dir) -> fs::path
{
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw pamc::IoError("cannot create out_dir '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

// Records which flags were given so an underlying config/manifest file can
// fill in everything else; explicitly passed flags always win.
template <typename S>
class FlagOverlay {
  public:
    template <typename T>
    auto add(CLI::App& cmd, const std::string& flag, T S::*member, const std::string& help)
      -> CLI::Option*
    {
        auto* opt = cmd.add_option(flag, values.*member, help)->capture_default_str();
        bindings_.push_back({opt, [member](S& dst, const S& src) { dst.*member = src.*member; }});
        return opt;
    }

    void overlay_given(S& target) const
    {
        for (const auto& binding : bindings_) {
            if (binding.opt->count() > 0) {
                binding.copy(target, values);
            }
        }
    }

    S values;

  private:
    struct Binding {
        CLI::Option* opt;
        std::function<void(S&, const S&)> copy;
    };
    std::vector<Binding> bindings_;
};

// --- shared config plumbing -------------------------------------------------

struct ConfigCli {
    FlagOverlay<Config> flags;
    std::string config_path;
    CLI::Option* config_opt = nullptr;

    void attach(CLI::App& cmd)
    {
        config_opt = cmd.add_option("--config", config_path,
                                    "key=value config file; explicit flags override it");
        flags.add(cmd, "--features", &Config::features, "features CSV, no header");
        flags.add(cmd, "--edges", &Config::edges, "edge list, two tab-separated node ids per line");
        flags.add(cmd, "--labels", &Config::labels, "ground-truth labels, one integer per line");
        flags.add(cmd, "--knn_k", &Config::knn_k,
                  "build a k-nearest-neighbour graph from the features instead of reading edges");
        flags.add(cmd, "--clusters", &Config::clusters, "number of clusters");
        flags.add(cmd, "--alpha", &Config::alpha, "weight of the contrastive pair of terms");
        flags.add(cmd, "--beta", &Config::beta, "weight of the cluster self-supervision term");
        flags.add(cmd, "--influence_k", &Config::influence_k,
                  "hops accumulated into the positive-pair weights");
        flags.add(cmd, "--tau", &Config::tau, "similarity scale");
        flags.add(cmd, "--eta", &Config::eta, "soft-assignment degrees of freedom");
        flags.add(cmd, "--lr", &Config::lr, "joint-phase learning rate");
        flags.add(cmd, "--epochs", &Config::epochs, "joint training epochs");
        flags.add(cmd, "--pretrain_epochs", &Config::pretrain_epochs, "autoencoder pretraining epochs");
        flags.add(cmd, "--pretrain_lr", &Config::pretrain_lr, "autoencoder pretraining learning rate");
        flags.add(cmd, "--batch_size", &Config::batch_size, "pretraining mini-batch size");
        flags.add(cmd, "--seed", &Config::seed, "master RNG seed");
        flags.add(cmd, "--out_dir", &Config::out_dir, "directory receiving all output files");
    }

    // File (if any) under flags, echoed to stderr so stdout stays machine-readable.
    [[nodiscard]] auto resolve() const -> Config
    {
        Config effective = flags.values;
        if (config_opt->count() > 0) {
            effective = pamc::load_config_file(config_path);
            flags.overlay_given(effective);
        }
        std::cerr << pamc::describe_config(effective);
        return effective;
    }
};

auto optional_path(const std::string& path) -> std::optional<std::string>
{
    if (path.empty()) {
        return std::nullopt;
    }
    return path;
}

// --- gen-data ----------------------------------------------------------------

// Generation knobs; the defaults are exactly the "sbm-accept" preset used
// by the acceptance suite.
struct GenParams {
    int n = 300;
    int c = 3;
    double p_in = 0.2;
    double p_out = 0.01;
    int feature_dim = 16;
    double separation = 6.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;
};

void apply_manifest_value(GenParams& params, const std::string& key, const std::string& value)
{
    const auto parse_int = [&](int& dst) {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), dst);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw pamc::ParameterError("manifest: bad value '" + value + "' for key '" + key + "'");
        }
    };
    const auto parse_real = [&](double& dst) {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), dst);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw pamc::ParameterError("manifest: bad value '" + value + "' for key '" + key + "'");
        }
    };
    if (key == "n") {
        parse_int(params.n);
    } else if (key == "c") {
        parse_int(params.c);
    } else if (key == "p_in") {
        parse_real(params.p_in);
    } else if (key == "p_out") {
        parse_real(params.p_out);
    } else if (key == "feature_dim") {
        parse_int(params.feature_dim);
    } else if (key == "separation") {
        parse_real(params.separation);
    } else if (key == "noise_sigma") {
        parse_real(params.noise_sigma);
    } else if (key == "seed") {
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw pamc::ParameterError("manifest: bad value '" + value + "' for key '" + key + "'");
        }
        params.seed = seed;
    } else {
        throw pamc::ParameterError("manifest: unknown key '" + key + "'");
    }
}

auto load_manifest(const std::string& path) -> GenParams
{
    std::ifstream in(path);
    if (!in) {
        throw pamc::IoError("manifest: cannot open '" + path + "'");
    }
    GenParams params;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw pamc::IoError(path + ": line " + std::to_string(line_no) + ": expected key=value");
        }
        auto strip = [](std::string text) {
            const auto first = text.find_first_not_of(" \t\r");
            const auto last = text.find_last_not_of(" \t\r");
            if (first == std::string::npos) {
                return std::string{};
            }
            return text.substr(first, last - first + 1);
        };
        try {
            apply_manifest_value(params, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
        } catch (const pamc::ParameterError& e) {
            throw pamc::ParameterError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return params;
}

void write_manifest(const fs::path& path, const GenParams& params)
{
    std::ofstream out(path);
    if (!out) {
        throw pamc::IoError("cannot write '" + path.string() + "'");
    }
    out << "n = " << params.n << '\n';
    out << "c = " << params.c << '\n';
    out << "p_in = " << format_double(params.p_in) << '\n';
    out << "p_out = " << format_double(params.p_out) << '\n';
    out << "feature_dim = " << params.feature_dim << '\n';
    out << "separation = " << format_double(params.separation) << '\n';
    out << "noise_sigma = " << format_double(params.noise_sigma) << '\n';
    out << "seed = " << params.seed << '\n';
}

struct GenState {
    FlagOverlay<GenParams> flags;
    std::string preset = "sbm-accept";
    std::string manifest_path;
    std::string out_dir = ".";
    CLI::Option* manifest_opt = nullptr;
};

void run_gen_data(const GenState& state)
{
    if (state.preset != "sbm-accept") {
        throw pamc::ParameterError("gen-data: unknown preset '" + state.preset
                                   + "' (only 'sbm-accept' can be generated)");
    }
    GenParams params = state.flags.values;
    if (state.manifest_opt->count() > 0) {
        params = load_manifest(state.manifest_path);
        state.flags.overlay_given(params);
    }
    const auto out = ensure_out_dir(state.out_dir);
    const auto dataset = pamc::generate_sbm(params.n, params.c, params.p_in, params.p_out,
                                            params.feature_dim, params.separation,
                                            params.noise_sigma, params.seed);
    pamc::save_features_csv((out / "features.csv").string(), dataset.features);
    pamc::save_edges((out / "edges.csv").string(), dataset.graph->edges());
    pamc::save_labels((out / "labels.csv").string(), dataset.labels);
    write_manifest(out / "manifest.txt", params);
    std::cerr << "gen-data: " << params.n << " nodes, " << dataset.graph->num_edges()
              << " edges, " << params.c << " blocks -> " << out.string() << '\n';
}

void setup_gen_data(CLI::App& app)
{
    auto* cmd = app.add_subcommand("gen-data",
                                   "generate a stochastic-block-model dataset with Gaussian features");
    auto state = std::make_shared<GenState>();
    cmd->add_option("--preset", state->preset, "generation preset")->capture_default_str();
    state->manifest_opt = cmd->add_option("--manifest", state->manifest_path,
                                          "regenerate from a manifest written by a previous run");
    cmd->add_option("--out_dir", state->out_dir, "output directory")->capture_default_str();
    state->flags.add(*cmd, "--n", &GenParams::n, "number of nodes");
    state->flags.add(*cmd, "--c", &GenParams::c, "number of blocks");
    state->flags.add(*cmd, "--p_in", &GenParams::p_in, "intra-block edge probability");
    state->flags.add(*cmd, "--p_out", &GenParams::p_out, "inter-block edge probability");
    state->flags.add(*cmd, "--feature_dim", &GenParams::feature_dim, "feature dimensionality");
    state->flags.add(*cmd, "--separation", &GenParams::separation,
                     "pairwise distance between block feature centers");
    state->flags.add(*cmd, "--noise_sigma", &GenParams::noise_sigma,
                     "per-coordinate feature noise");
    state->flags.add(*cmd, "--seed", &GenParams::seed, "RNG seed");
    cmd->callback([state] { run_gen_data(*state); });
}

// --- pretrain ----------------------------------------------------------------

void run_pretrain(const ConfigCli& cli)
{
    const Config cfg = cli.resolve();
    if (cfg.features.empty()) {
        throw pamc::ParameterError("pretrain: --features is required");
    }
    const auto features = pamc::load_features_csv(cfg.features);
    const auto out = ensure_out_dir(cfg.out_dir);
    const auto init = pamc::init_autoencoder(features.cols(), cfg.seed);
    const auto result = pamc::pretrain(init, features, cfg.pretrain_epochs, cfg.pretrain_lr,
                                       cfg.batch_size, cfg.seed);
    pamc::save_checkpoint(result.params, (out / "ae.ckpt").string());

    const auto csv_path = out / "pretrain_loss.csv";
    std::ofstream csv(csv_path);
    if (!csv) {
        throw pamc::IoError("cannot write '" + csv_path.string() + "'");
    }
    csv << "epoch,loss\n";
    for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
        csv << (i + 1) << ',' << format_double(result.epoch_loss[i]) << '\n';
    }
    std::cerr << "pretrain: reconstruction loss " << format_double(result.epoch_loss.front())
              << " -> " << format_double(result.epoch_loss.back()) << " over "
              << result.epoch_loss.size() << " epochs\n";
}

void setup_pretrain(CLI::App& app)
{
    auto* cmd = app.add_subcommand("pretrain",
                                   "pretrain the autoencoder and write ae.ckpt + pretrain_loss.csv");
    auto cli = std::make_shared<ConfigCli>();
    cli->attach(*cmd);
    cmd->callback([cli] { run_pretrain(*cli); });
}

// --- train -------------------------------------------------------------------

struct TrainState {
    ConfigCli cli;
    std::string checkpoint;
};

void run_train(const TrainState& state)
{
    const Config cfg = state.cli.resolve();
    if (cfg.features.empty()) {
        throw pamc::ParameterError("train: --features is required");
    }
    const auto dataset = pamc::load_dataset(cfg.features, optional_path(cfg.edges),
                                            optional_path(cfg.labels),
                                            cfg.knn_k > 0 ? std::optional<int>(cfg.knn_k)
                                                          : std::nullopt);
    const auto out = ensure_out_dir(cfg.out_dir);

    pamc::AutoEncoderParams pretrained;
    if (!state.checkpoint.empty()) {
        pretrained = pamc::load_checkpoint(state.checkpoint);
        if (pretrained.input_dim != dataset.features.cols()) {
            throw pamc::DimensionError("train: checkpoint expects input dim "
                                       + std::to_string(pretrained.input_dim) + ", features have "
                                       + std::to_string(dataset.features.cols()));
        }
    } else {
        std::cerr << "train: no --checkpoint given, pretraining in-process\n";
        const auto init = pamc::init_autoencoder(dataset.features.cols(), cfg.seed);
        pretrained = pamc::pretrain(init, dataset.features, cfg.pretrain_epochs, cfg.pretrain_lr,
                                    cfg.batch_size, cfg.seed)
                       .params;
    }

    const auto started = std::chrono::steady_clock::now();
    const auto result = pamc::run_training(dataset, cfg.hyperparams(), pretrained);
    const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    pamc::write_curve_csv(result.history, (out / "curve.csv").string());
    pamc::save_features_csv((out / "embeddings.csv").string(), result.embeddings);
    pamc::save_labels((out / "pred_labels.csv").string(), result.labels);
    pamc::save_checkpoint(result.params, (out / "model.ckpt").string());

    if (result.aborted) {
        // Artifacts above still describe the last finite state.
        throw pamc::NumericError("train: aborted: " + result.abort_reason);
    }

    nlohmann::ordered_json summary;
    if (dataset.has_labels()) {
        const auto scores = pamc::score_clustering(dataset.labels, result.labels);
        summary["acc"] = scores.acc;
        summary["nmi"] = scores.nmi;
        summary["ari"] = scores.ari;
        summary["f1"] = scores.f1;
    } else {
        summary["acc"] = nullptr;
        summary["nmi"] = nullptr;
        summary["ari"] = nullptr;
        summary["f1"] = nullptr;
    }
    summary["epochs"] = static_cast<int>(result.history.size());
    summary["seconds"] = seconds;
    std::cout << summary.dump() << '\n';
}

void setup_train(CLI::App& app)
{
    auto* cmd = app.add_subcommand(
      "train", "joint contrastive + self-supervision training; metrics JSON on stdout");
    auto state = std::make_shared<TrainState>();
    state->cli.attach(*cmd);
    cmd->add_option("--checkpoint", state->checkpoint,
                    "pretrained autoencoder checkpoint (pretrains in-process when omitted)");
    cmd->callback([state] { run_train(*state); });
}

// --- eval --------------------------------------------------------------------

struct EvalState {
    std::string true_path;
    std::string pred_path;
};

void run_eval(const EvalState& state)
{
    const auto y_true = pamc::load_labels(state.true_path);
    const auto y_pred = pamc::load_labels(state.pred_path);
    const auto scores = pamc::score_clustering(y_true, y_pred);
    nlohmann::ordered_json summary;
    summary["acc"] = scores.acc;
    summary["nmi"] = scores.nmi;
    summary["ari"] = scores.ari;
    summary["f1"] = scores.f1;
    std::cout << summary.dump() << '\n';
}

void setup_eval(CLI::App& app)
{
    auto* cmd = app.add_subcommand("eval", "score a predicted labeling against ground truth");
    auto state = std::make_shared<EvalState>();
    cmd->add_option("--true_labels", state->true_path, "ground-truth label file")->required();
    cmd->add_option("--pred_labels", state->pred_path, "predicted label file")->required();
    cmd->callback([state] { run_eval(*state); });
}

// --- bench -------------------------------------------------------------------

struct BenchState {
    std::vector<int> n_list = {1000, 2000, 4000};
    int avg_degree = 10;
    int clusters = 8;
    double tau = 0.5;
    int repeats = 5;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

void run_bench(const BenchState& state)
{
    const auto out = ensure_out_dir(state.out_dir);
    const auto rows = pamc::benchmark_scaling(state.n_list, state.avg_degree, state.clusters,
                                              state.tau, state.repeats, state.seed);
    pamc::write_bench_csv(rows, (out / "bench.csv").string());
    for (const auto& row : rows) {
        std::cerr << "bench: n=" << row.n << " dense=" << format_double(row.dense_ms)
                  << "ms pamc=" << format_double(row.pamc_ms) << "ms\n";
    }
}

void setup_bench(CLI::App& app)
{
    auto* cmd = app.add_subcommand(
      "bench", "time the dense all-pairs loss against the sparse + meta-node pair");
    auto state = std::make_shared<BenchState>();
    cmd->add_option("--n_list", state->n_list, "node counts, strictly ascending")
      ->delimiter(',')
      ->capture_default_str();
    cmd->add_option("--avg_degree", state->avg_degree, "average degree of the synthetic graph")
      ->capture_default_str();
    cmd->add_option("--clusters", state->clusters, "meta-node count")->capture_default_str();
    cmd->add_option("--tau", state->tau, "similarity scale")->capture_default_str();
    cmd->add_option("--repeats", state->repeats, "timed repetitions per size (median kept)")
      ->capture_default_str();
    cmd->add_option("--seed", state->seed, "RNG seed")->capture_default_str();
    cmd->add_option("--out_dir", state->out_dir, "output directory")->capture_default_str();
    cmd->callback([state] { run_bench(*state); });
}

// --- theory-surface ----------------------------------------------------------

struct SurfaceState {
    // Defaults span the published dataset shapes, so the default grid
    // contains every (N, C, tau) row of the evaluated corpora.
    std::vector<int> n_list = {100, 300, 1000, 3025, 3327, 4057, 9298, 10000, 10299};
    std::vector<int> c_list = {2, 3, 4, 6, 10};
    std::vector<double> tau_list = {0.25, 0.5, 1.0, 1.5};
    std::string out_dir = ".";
};

void run_theory_surface(const SurfaceState& state)
{
    const auto out = ensure_out_dir(state.out_dir);
    const auto cells = pamc::boundary_surface(state.n_list, state.c_list, state.tau_list);
    pamc::write_surface_csv(cells, (out / "surface.csv").string());
    std::cerr << "theory-surface: " << cells.size() << " cells -> "
              << (out / "surface.csv").string() << '\n';
}

void setup_theory_surface(CLI::App& app)
{
    auto* cmd = app.add_subcommand(
      "theory-surface", "tabulate the pairwise-vs-cluster bound ratio over an (n, c, tau) grid");
    auto state = std::make_shared<SurfaceState>();
    cmd->add_option("--n_list", state->n_list, "node counts")->delimiter(',')->capture_default_str();
    cmd->add_option("--c_list", state->c_list, "cluster counts")
      ->delimiter(',')
      ->capture_default_str();
    cmd->add_option("--tau_list", state->tau_list, "similarity scales")
      ->delimiter(',')
      ->capture_default_str();
    cmd->add_option("--out_dir", state->out_dir, "output directory")->capture_default_str();
    cmd->callback([state] { run_theory_surface(*state); });
}

} // namespace

auto main(int argc, char** argv) -> int
{
    CLI::App app{"self-supervised graph clustering with meta-node proxy negatives"};
    app.require_subcommand(1);
    setup_gen_data(app);
    setup_pretrain(app);
    setup_train(app);
    setup_eval(app);
    setup_bench(app);
    setup_theory_surface(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const pamc::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
