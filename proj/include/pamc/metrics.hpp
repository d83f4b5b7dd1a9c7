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

#include <vector>

#include "pamc/matrix.hpp"

namespace pamc {

// Joint label counts: counts(t, p) = |{i : y_true_i = t, y_pred_i = p}|.
struct ContingencyTable {
    DenseMatrix counts; // C_true x C_pred, integer-valued
    std::vector<long long> row_marginals;
    std::vector<long long> col_marginals;
    long long total = 0;
};

auto contingency_table(const std::vector<int>& y_true, const std::vector<int>& y_pred)
  -> ContingencyTable;

// Minimum-cost perfect assignment on a square cost matrix (Jonker-style
// potentials, O(n^3)). Returns col assigned to each row. Rectangular
// problems must be padded square by the caller. Throws DimensionError for
// non-square input and ParameterError for non-finite entries.
auto hungarian(const DenseMatrix& cost) -> std::vector<int>;

// Best-match accuracy: maximum fraction of agreeing labels over all
// one-to-one mappings between predicted clusters and true classes.
auto clustering_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred)
  -> double;

// Mutual information normalized by the arithmetic mean of the two label
// entropies, natural logs. Degenerate single-cluster conventions:
//   both partitions single-cluster -> 1.0 (identical), else zero MI -> 0.0.
auto nmi(const std::vector<int>& y_true, const std::vector<int>& y_pred) -> double;

// Adjusted Rand index from pair counts; 1.0 when the pair-count maximum
// equals its expectation (both partitions trivial).
auto ari(const std::vector<int>& y_true, const std::vector<int>& y_pred) -> double;

// Unweighted mean of per-class F1 after mapping predicted clusters onto
// true classes with the same assignment that maximizes accuracy. Classes
// with no true positives score 0.
auto macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred) -> double;

struct ClusteringScores {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double f1 = 0.0;
};

auto score_clustering(const std::vector<int>& y_true, const std::vector<int>& y_pred)
  -> ClusteringScores;

} // namespace pamc
