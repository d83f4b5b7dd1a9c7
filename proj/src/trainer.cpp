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

#include "pamc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "pamc/adam.hpp"
#include "pamc/clustering.hpp"
#include "pamc/graph.hpp"
#include "pamc/rng.hpp"

namespace pamc {

namespace {

using Clock = std::chrono::steady_clock;

auto elapsed_ms(const Clock::time_point start) -> double
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

auto format_value(const double v) -> std::string
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Keeps timed loss evaluations observable so they cannot be elided.
volatile double bench_sink = 0.0;

auto median(std::vector<double> values) -> double
{
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

auto random_embeddings(Rng& rng, const int n, const int dim) -> DenseMatrix
{
    DenseMatrix z(n, dim);
    for (std::size_t i = 0; i < z.size(); ++i) {
        z.data()[i] = rng.normal();
    }
    return z;
}

// Symmetric binary weights with ~avg_degree stored entries per row.
auto random_positive_weights(Rng& rng, const int n, const int avg_degree) -> SparseMatrix
{
    std::vector<std::pair<int, int>> pairs;
    const long target = static_cast<long>(n) * avg_degree / 2;
    pairs.reserve(static_cast<std::size_t>(target));
    for (long t = 0; t < target; ++t) {
        const int a = rng.uniform_int(n);
        const int b = rng.uniform_int(n);
        if (a != b) {
            pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
    for (const auto& [a, b] : pairs) {
        rows[static_cast<std::size_t>(a)].emplace_back(b, 1.0);
        rows[static_cast<std::size_t>(b)].emplace_back(a, 1.0);
    }
    for (auto& row : rows) {
        std::sort(row.begin(), row.end());
    }
    return SparseMatrix::from_rows(n, n, rows);
}

} // namespace

auto run_training(const Dataset& dataset, const Hyperparams& hp,
                  const AutoEncoderParams& pretrained) -> TrainResult
{
    hp.validate();
    if (!dataset.graph.has_value()) {
        throw ParameterError("run_training: dataset carries no graph");
    }
    const SparseMatrix gamma = influence_weights(*dataset.graph, hp.influence_k);

    TrainResult result;
    result.params = pretrained;
    result.centroids = kmeans_restarts(encode(result.params, dataset.features),
                                       hp.clusters_c, hp.seed);

    Adam opt(hp.lr);
    const int encoder_layers = result.params.encoder_layers();
    // Rollback target: the newest state whose loss was verified finite.
    AutoEncoderParams good_params = result.params;
    DenseMatrix good_centroids = result.centroids;
    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
        const auto start = Clock::now();

        Tape tape;
        const AutoEncoderVars vars = insert_params(tape, result.params);
        const Var x = tape.constant(dataset.features);
        const Var z = encoder_forward(tape, vars, x);
        if (!tape.value(z).all_finite()) {
            result.aborted = true;
            result.abort_reason
              = "non-finite embeddings at epoch " + std::to_string(epoch);
            result.params = std::move(good_params);
            result.centroids = std::move(good_centroids);
            break;
        }

        // Assignments and targets freeze at the epoch's incoming state.
        const DenseMatrix q = soft_assign(tape.value(z), result.centroids, hp.eta);
        const auto labels = hard_labels(q);
        const DenseMatrix p = target_distribution(q);

        const Var centroids = tape.input(result.centroids);
        TrainRecord record;
        record.epoch = epoch;
        int isolated = 0;
        const LossNodes nodes = total_loss_node(tape, z, gamma, labels, centroids, p,
                                                hp, &record.empty_clusters, &isolated);
        record.loss.positive_term = tape.scalar(nodes.positive);
        record.loss.proxy_term = tape.scalar(nodes.proxy);
        record.loss.kl_term = tape.scalar(nodes.kl);
        record.loss.total = tape.scalar(nodes.total);
        record.loss.tau = hp.tau;
        record.loss.alpha = hp.alpha;
        record.loss.beta = hp.beta;
        record.loss.isolated_nodes = isolated;

        if (!std::isfinite(record.loss.total)) {
            result.aborted = true;
            result.abort_reason = "non-finite loss at epoch " + std::to_string(epoch);
            result.params = std::move(good_params);
            result.centroids = std::move(good_centroids);
            break;
        }
        good_params = result.params;
        good_centroids = result.centroids;

        tape.backward(nodes.total);
        std::vector<DenseMatrix*> tensors;
        std::vector<const DenseMatrix*> grads;
        for (int l = 0; l < encoder_layers; ++l) {
            const auto k = static_cast<std::size_t>(l);
            tensors.push_back(&result.params.weights[k]);
            grads.push_back(&tape.grad(vars.weights[k]));
            tensors.push_back(&result.params.biases[k]);
            grads.push_back(&tape.grad(vars.biases[k]));
        }
        tensors.push_back(&result.centroids);
        grads.push_back(&tape.grad(centroids));
        opt.step(tensors, grads);

        if (dataset.has_labels()) {
            record.has_scores = true;
            record.scores = score_clustering(dataset.labels, labels);
        }
        record.wall_ms = elapsed_ms(start);
        result.history.push_back(record);
    }

    result.embeddings = encode(result.params, dataset.features);
    result.labels
      = hard_labels(soft_assign(result.embeddings, result.centroids, hp.eta));
    return result;
}

void write_curve_csv(const std::vector<TrainRecord>& history, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "epoch,total,positive,proxy,kl,acc,nmi,ari,f1\n";
    for (const auto& record : history) {
        out << record.epoch << ',' << format_value(record.loss.total) << ','
            << format_value(record.loss.positive_term) << ','
            << format_value(record.loss.proxy_term) << ','
            << format_value(record.loss.kl_term) << ',';
        if (record.has_scores) {
            out << format_value(record.scores.acc) << ','
                << format_value(record.scores.nmi) << ','
                << format_value(record.scores.ari) << ','
                << format_value(record.scores.f1);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
    if (!out.flush()) {
        throw IoError("write to '" + path + "' failed");
    }
}

auto benchmark_scaling(std::span<const int> n_list, const int avg_degree, const int c,
                       const double tau, const int repeats, const std::uint64_t seed)
  -> std::vector<BenchRow>
{
    if (n_list.empty()) {
        throw ParameterError("benchmark_scaling: empty size list");
    }
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
        if (n_list[i] >= n_list[i + 1]) {
            throw ParameterError("benchmark_scaling: sizes must be strictly ascending");
        }
    }
    if (repeats < 3) {
        throw ParameterError("benchmark_scaling: repeats must be >= 3");
    }
    if (c < 2) {
        throw ParameterError("benchmark_scaling: c must be >= 2");
    }
    if (avg_degree < 1 || avg_degree >= n_list.front()) {
        throw ParameterError("benchmark_scaling: avg_degree must be in [1, min(n))");
    }

    constexpr int dim = 10;
    const Rng master(seed);

    struct Instance {
        DenseMatrix z;
        SparseMatrix gamma;
        DenseMatrix meta;
        std::vector<double> dense_times;
        std::vector<double> pamc_times;
    };
    std::vector<Instance> instances;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        Rng rng = master.fork(idx);
        Instance inst{random_embeddings(rng, n_list[idx], dim),
                      random_positive_weights(rng, n_list[idx], avg_degree),
                      random_embeddings(rng, c, dim),
                      {},
                      {}};
        // Warm-up, discarded.
        bench_sink = loss_traditional(inst.z, inst.gamma, tau).mean;
        bench_sink = positive_loss_sparse(inst.z, inst.gamma, tau).value
                     + proxy_loss(inst.meta, tau);
        instances.push_back(std::move(inst));
    }

    // Repeats interleave the sizes so a machine-wide speed drift lands on
    // every size about equally and cancels out of the timing ratios.
    for (int r = 0; r < repeats; ++r) {
        for (auto& inst : instances) {
            auto start = Clock::now();
            bench_sink = loss_traditional(inst.z, inst.gamma, tau).mean;
            inst.dense_times.push_back(elapsed_ms(start));

            start = Clock::now();
            bench_sink = positive_loss_sparse(inst.z, inst.gamma, tau).value
                         + proxy_loss(inst.meta, tau);
            inst.pamc_times.push_back(elapsed_ms(start));
        }
    }

    std::vector<BenchRow> rows;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        BenchRow row;
        row.n = n_list[idx];
        row.dense_ms = median(std::move(instances[idx].dense_times));
        row.pamc_ms = median(std::move(instances[idx].pamc_times));
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "n,dense_ms,pamc_ms\n";
    for (const auto& row : rows) {
        out << row.n << ',' << format_value(row.dense_ms) << ','
            << format_value(row.pamc_ms) << '\n';
    }
    if (!out.flush()) {
        throw IoError("write to '" + path + "' failed");
    }
}

} // namespace pamc
