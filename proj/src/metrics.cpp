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

#include "pamc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pamc {

namespace {

void check_label_vectors(const std::vector<int>& y_true, const std::vector<int>& y_pred)
{
    if (y_true.empty()) {
        throw ParameterError("metrics: empty label vectors");
    }
    if (y_true.size() != y_pred.size()) {
        throw DimensionError("metrics: " + std::to_string(y_true.size())
                             + " true labels vs " + std::to_string(y_pred.size())
                             + " predictions");
    }
    for (const int l : y_true) {
        if (l < 0) {
            throw ParameterError("metrics: negative true label");
        }
    }
    for (const int l : y_pred) {
        if (l < 0) {
            throw ParameterError("metrics: negative predicted label");
        }
    }
}

// Accuracy-maximizing map from true class t to predicted cluster column,
// computed on the square zero-padded negated contingency table.
auto best_match_assignment(const ContingencyTable& table) -> std::vector<int>
{
    const int k = std::max(table.counts.rows(), table.counts.cols());
    DenseMatrix cost(k, k);
    for (int t = 0; t < table.counts.rows(); ++t) {
        for (int p = 0; p < table.counts.cols(); ++p) {
            cost(t, p) = -table.counts(t, p);
        }
    }
    return hungarian(cost);
}

auto pairs(const long long n) -> double
{
    return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}

auto entropy(const std::vector<long long>& marginals, const long long total) -> double
{
    double h = 0.0;
    for (const long long m : marginals) {
        if (m > 0) {
            const double p = static_cast<double>(m) / static_cast<double>(total);
            h -= p * std::log(p);
        }
    }
    return h;
}

} // namespace

auto contingency_table(const std::vector<int>& y_true, const std::vector<int>& y_pred)
  -> ContingencyTable
{
    check_label_vectors(y_true, y_pred);
    const int c_true = *std::max_element(y_true.begin(), y_true.end()) + 1;
    const int c_pred = *std::max_element(y_pred.begin(), y_pred.end()) + 1;

    ContingencyTable table;
    table.counts = DenseMatrix(c_true, c_pred);
    table.row_marginals.assign(static_cast<std::size_t>(c_true), 0);
    table.col_marginals.assign(static_cast<std::size_t>(c_pred), 0);
    table.total = static_cast<long long>(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        table.counts(y_true[i], y_pred[i]) += 1.0;
        ++table.row_marginals[static_cast<std::size_t>(y_true[i])];
        ++table.col_marginals[static_cast<std::size_t>(y_pred[i])];
    }
    return table;
}

auto hungarian(const DenseMatrix& cost) -> std::vector<int>
{
    if (cost.rows() != cost.cols()) {
        throw DimensionError("hungarian: cost matrix must be square, got "
                             + cost.shape_str() + " (pad rectangular inputs)");
    }
    if (!cost.all_finite()) {
        throw ParameterError("hungarian: cost matrix has non-finite entries");
    }
    const int n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();

    // Potentials-based shortest augmenting path, 1-based scratch arrays.
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0); // col -> row
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)]
                                   - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1]
          = j - 1;
    }
    return assignment;
}

auto clustering_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred)
  -> double
{
    const ContingencyTable table = contingency_table(y_true, y_pred);
    const auto assignment = best_match_assignment(table);
    double matched = 0.0;
    for (int t = 0; t < table.counts.rows(); ++t) {
        const int p = assignment[static_cast<std::size_t>(t)];
        if (p < table.counts.cols()) {
            matched += table.counts(t, p);
        }
    }
    return matched / static_cast<double>(table.total);
}

auto nmi(const std::vector<int>& y_true, const std::vector<int>& y_pred) -> double
{
    const ContingencyTable table = contingency_table(y_true, y_pred);
    const double h_true = entropy(table.row_marginals, table.total);
    const double h_pred = entropy(table.col_marginals, table.total);
    if (h_true == 0.0 && h_pred == 0.0) {
        return 1.0; // both single-cluster: identical partitions
    }
    const auto n = static_cast<double>(table.total);
    double mi = 0.0;
    for (int t = 0; t < table.counts.rows(); ++t) {
        for (int p = 0; p < table.counts.cols(); ++p) {
            const double joint = table.counts(t, p);
            if (joint == 0.0) {
                continue;
            }
            const auto rm = static_cast<double>(
              table.row_marginals[static_cast<std::size_t>(t)]);
            const auto cm = static_cast<double>(
              table.col_marginals[static_cast<std::size_t>(p)]);
            mi += (joint / n) * std::log(n * joint / (rm * cm));
        }
    }
    const double value = mi / (0.5 * (h_true + h_pred));
    return std::clamp(value, 0.0, 1.0);
}

auto ari(const std::vector<int>& y_true, const std::vector<int>& y_pred) -> double
{
    const ContingencyTable table = contingency_table(y_true, y_pred);
    double index = 0.0;
    for (int t = 0; t < table.counts.rows(); ++t) {
        for (int p = 0; p < table.counts.cols(); ++p) {
            index += pairs(static_cast<long long>(table.counts(t, p)));
        }
    }
    double sum_true = 0.0;
    for (const long long m : table.row_marginals) {
        sum_true += pairs(m);
    }
    double sum_pred = 0.0;
    for (const long long m : table.col_marginals) {
        sum_pred += pairs(m);
    }
    const double expected = sum_true * sum_pred / pairs(table.total);
    const double maximum = 0.5 * (sum_true + sum_pred);
    if (maximum == expected) {
        return 1.0; // both partitions trivial (all-singleton or single-cluster)
    }
    return (index - expected) / (maximum - expected);
}

auto macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred) -> double
{
    const ContingencyTable table = contingency_table(y_true, y_pred);
    const auto assignment = best_match_assignment(table);
    const int c_true = table.counts.rows();

    double f1_sum = 0.0;
    for (int t = 0; t < c_true; ++t) {
        const int p = assignment[static_cast<std::size_t>(t)];
        const double tp = p < table.counts.cols() ? table.counts(t, p) : 0.0;
        const auto predicted = p < table.counts.cols()
                                 ? static_cast<double>(
                                     table.col_marginals[static_cast<std::size_t>(p)])
                                 : 0.0;
        const auto actual = static_cast<double>(
          table.row_marginals[static_cast<std::size_t>(t)]);
        const double precision = predicted > 0.0 ? tp / predicted : 0.0;
        const double recall = actual > 0.0 ? tp / actual : 0.0;
        if (precision + recall > 0.0) {
            f1_sum += 2.0 * precision * recall / (precision + recall);
        }
    }
    return f1_sum / static_cast<double>(c_true);
}

auto score_clustering(const std::vector<int>& y_true, const std::vector<int>& y_pred)
  -> ClusteringScores
{
    return ClusteringScores {
        clustering_accuracy(y_true, y_pred),
        nmi(y_true, y_pred),
        ari(y_true, y_pred),
        macro_f1(y_true, y_pred),
    };
}

} // namespace pamc
