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

#include <span>
#include <utility>
#include <vector>

#include "pamc/matrix.hpp"

namespace pamc {

// Undirected graph, structural view. Each edge is stored once in canonical
// (lower id, higher id) form; duplicates and reversed duplicates collapse
// silently. Self-loops are rejected. Immutable after construction.
//
// Optional per-edge weights must be positive and are shared by both
// directions of an edge. Row-asymmetric weight structures (normalized
// adjacency, influence weights) do not fit here and live in SparseMatrix.
class SparseGraph {
  public:
    using Edge = std::pair<int, int>;

    SparseGraph(int num_nodes, std::vector<Edge> edges);
    SparseGraph(int num_nodes, std::vector<Edge> edges, std::vector<double> weights);

    [[nodiscard]] auto num_nodes() const -> int { return num_nodes_; }
    [[nodiscard]] auto num_edges() const -> std::size_t { return edges_.size(); }
    [[nodiscard]] auto edges() const -> const std::vector<Edge>& { return edges_; }

    [[nodiscard]] auto has_weights() const -> bool { return !weights_.empty(); }
    [[nodiscard]] auto weights() const -> const std::vector<double>& { return weights_; }

    [[nodiscard]] auto degree(int node) const -> int;
    [[nodiscard]] auto neighbors(int node) const -> std::span<const int>;

  private:
    void build(std::vector<Edge> edges, std::vector<double> weights);

    int num_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> weights_;
    std::vector<std::vector<int>> adjacency_;
};

// Row-compressed sparse matrix of doubles. Holds the row-stochastic weight
// structures derived from a graph: rows are independently normalized, so
// values are generally asymmetric even when the pattern is symmetric.
// No explicit zeros are stored.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    // rows_data[i] must be sorted by column id with no duplicates.
    static auto from_rows(int rows, int cols,
                          const std::vector<std::vector<std::pair<int, double>>>& rows_data)
      -> SparseMatrix;

    [[nodiscard]] auto rows() const -> int { return rows_; }
    [[nodiscard]] auto cols() const -> int { return cols_; }
    [[nodiscard]] auto nnz() const -> std::size_t { return values_.size(); }

    [[nodiscard]] auto row_cols(int r) const -> std::span<const int>;
    [[nodiscard]] auto row_values(int r) const -> std::span<const double>;
    [[nodiscard]] auto row_sum(int r) const -> double;

    [[nodiscard]] auto to_dense() const -> DenseMatrix;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::size_t> row_ptr_ { 0 };
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

auto multiply(const SparseMatrix& a, const SparseMatrix& b) -> SparseMatrix;
auto add(const SparseMatrix& a, const SparseMatrix& b) -> SparseMatrix;

// Exact k-nearest-neighbour graph on Euclidean distance over raw feature
// rows, symmetrized by union. Distance ties break toward the lower node id.
// Throws ParameterError when k < 1, k >= N, or features are non-finite.
auto build_knn_graph(const DenseMatrix& features, int k) -> SparseGraph;

// Self-loop-augmented row normalization (D+I)^-1 (A+I). Row i is uniform
// over {i} and its neighbors, so every row sums to exactly 1.
auto normalize_adjacency(const SparseGraph& g) -> SparseMatrix;

// Positive-pair weights: average the first order_k powers of the
// normalized adjacency, drop the diagonal, then re-normalize each row.
// Rows of isolated nodes come out empty (they have no positive pairs);
// all other rows sum to 1 and every stored weight lies in (0, 1].
auto influence_weights(const SparseGraph& g, int order_k) -> SparseMatrix;

} // namespace pamc
