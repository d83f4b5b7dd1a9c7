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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pamc/autoencoder.hpp"
#include "pamc/dataset.hpp"
#include "pamc/hyperparams.hpp"
#include "pamc/losses.hpp"
#include "pamc/metrics.hpp"

namespace pamc {

struct TrainRecord {
    int epoch = 0; // 1-based
    LossBreakdown loss;
    bool has_scores = false;
    ClusteringScores scores;
    int empty_clusters = 0;
    double wall_ms = 0.0;
};

struct TrainResult {
    DenseMatrix embeddings;          // final encoder output
    std::vector<int> labels;         // final hard assignments
    DenseMatrix centroids;
    AutoEncoderParams params;        // decoder rows untouched by this phase
    std::vector<TrainRecord> history;
    bool aborted = false;            // non-finite loss encountered
    std::string abort_reason;
};

// Full-batch joint optimization: every epoch re-encodes the features,
// freezes the target distribution from the current soft assignment, then
// takes one Adam step through the combined objective. Only the encoder
// half and the centroids receive updates; the decoder stays at its
// pretrained values. A non-finite loss stops the loop before the step, so
// the returned state is the last finite one.
auto run_training(const Dataset& dataset, const Hyperparams& hp,
                  const AutoEncoderParams& pretrained) -> TrainResult;

// Curve CSV, header "epoch,total,positive,proxy,kl,acc,nmi,ari,f1".
// Score columns are left empty for unlabeled runs.
void write_curve_csv(const std::vector<TrainRecord>& history, const std::string& path);

struct BenchRow {
    int n = 0;
    double dense_ms = 0.0;
    double pamc_ms = 0.0;
};

// Times one evaluation of the dense all-pairs loss against the sparse
// positive + proxy pair on synthetic inputs of fixed average degree.
// Median of `repeats` timed runs after one discarded warm-up, monotonic
// clock; repeats interleave the sizes so machine-speed drift cancels out
// of cross-size ratios. n_list must be strictly ascending, repeats >= 3.
auto benchmark_scaling(std::span<const int> n_list, int avg_degree, int c, double tau,
                       int repeats, std::uint64_t seed = 0) -> std::vector<BenchRow>;

// CSV with header "n,dense_ms,pamc_ms".
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

} // namespace pamc
