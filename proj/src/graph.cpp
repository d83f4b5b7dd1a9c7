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

#include "pamc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pamc {

SparseGraph::SparseGraph(const int num_nodes, std::vector<Edge> edges)
  : num_nodes_ { num_nodes }
{
    build(std::move(edges), {});
}

SparseGraph::SparseGraph(const int num_nodes, std::vector<Edge> edges,
                         std::vector<double> weights)
  : num_nodes_ { num_nodes }
{
    build(std::move(edges), std::move(weights));
}

void SparseGraph::build(std::vector<Edge> edges, std::vector<double> weights)
{
    if (num_nodes_ < 0) {
        throw ParameterError("SparseGraph: negative node count");
    }
    if (!weights.empty() && weights.size() != edges.size()) {
        throw DimensionError("SparseGraph: " + std::to_string(weights.size())
                             + " weights for " + std::to_string(edges.size()) + " edges");
    }

    // Canonicalize to (low, high), keeping the weight alongside; the first
    // occurrence of a duplicated edge wins.
    std::vector<std::pair<Edge, double>> tagged;
    tagged.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [u, v] = edges[e];
        if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) {
            throw ParameterError("SparseGraph: edge (" + std::to_string(u) + ", "
                                 + std::to_string(v) + ") outside [0, "
                                 + std::to_string(num_nodes_) + ")");
        }
        if (u == v) {
            throw ParameterError("SparseGraph: self-loop at node " + std::to_string(u));
        }
        const double w = weights.empty() ? 1.0 : weights[e];
        if (w <= 0.0 || !std::isfinite(w)) {
            throw ParameterError("SparseGraph: edge weight must be positive and finite");
        }
        tagged.emplace_back(Edge { std::min(u, v), std::max(u, v) }, w);
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    tagged.erase(std::unique(tagged.begin(), tagged.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 tagged.end());

    edges_.reserve(tagged.size());
    if (!weights.empty()) {
        weights_.reserve(tagged.size());
    }
    adjacency_.assign(static_cast<std::size_t>(num_nodes_), {});
    for (const auto& [edge, w] : tagged) {
        edges_.push_back(edge);
        if (!weights.empty()) {
            weights_.push_back(w);
        }
        adjacency_[static_cast<std::size_t>(edge.first)].push_back(edge.second);
        adjacency_[static_cast<std::size_t>(edge.second)].push_back(edge.first);
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end());
    }
}

auto SparseGraph::degree(const int node) const -> int
{
    return static_cast<int>(neighbors(node).size());
}

auto SparseGraph::neighbors(const int node) const -> std::span<const int>
{
    if (node < 0 || node >= num_nodes_) {
        throw ParameterError("SparseGraph: node " + std::to_string(node)
                             + " outside [0, " + std::to_string(num_nodes_) + ")");
    }
    return adjacency_[static_cast<std::size_t>(node)];
}

SparseMatrix::SparseMatrix(const int rows, const int cols)
  : rows_ { rows }, cols_ { cols }
{
    row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
}

auto SparseMatrix::from_rows(const int rows, const int cols,
                             const std::vector<std::vector<std::pair<int, double>>>& rows_data)
  -> SparseMatrix
{
    if (rows_data.size() != static_cast<std::size_t>(rows)) {
        throw DimensionError("SparseMatrix: " + std::to_string(rows_data.size())
                             + " row lists for " + std::to_string(rows) + " rows");
    }
    SparseMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        int last_col = -1;
        for (const auto& [c, v] : rows_data[static_cast<std::size_t>(r)]) {
            if (c < 0 || c >= cols) {
                throw ParameterError("SparseMatrix: column " + std::to_string(c)
                                     + " outside [0, " + std::to_string(cols) + ")");
            }
            if (c <= last_col) {
                throw ParameterError("SparseMatrix: row entries must be sorted and unique");
            }
            last_col = c;
            if (v == 0.0) {
                continue;
            }
            m.col_idx_.push_back(c);
            m.values_.push_back(v);
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = m.values_.size();
    }
    return m;
}

auto SparseMatrix::row_cols(const int r) const -> std::span<const int>
{
    const auto begin = row_ptr_[static_cast<std::size_t>(r)];
    const auto end = row_ptr_[static_cast<std::size_t>(r) + 1];
    return { col_idx_.data() + begin, end - begin };
}

auto SparseMatrix::row_values(const int r) const -> std::span<const double>
{
    const auto begin = row_ptr_[static_cast<std::size_t>(r)];
    const auto end = row_ptr_[static_cast<std::size_t>(r) + 1];
    return { values_.data() + begin, end - begin };
}

auto SparseMatrix::row_sum(const int r) const -> double
{
    const auto vals = row_values(r);
    return std::accumulate(vals.begin(), vals.end(), 0.0);
}

auto SparseMatrix::to_dense() const -> DenseMatrix
{
    DenseMatrix d(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
        const auto cols = row_cols(r);
        const auto vals = row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            d(r, cols[k]) = vals[k];
        }
    }
    return d;
}

auto multiply(const SparseMatrix& a, const SparseMatrix& b) -> SparseMatrix
{
    if (a.cols() != b.rows()) {
        throw DimensionError("sparse multiply: inner dimensions differ: "
                             + std::to_string(a.rows()) + "x" + std::to_string(a.cols())
                             + " times " + std::to_string(b.rows()) + "x"
                             + std::to_string(b.cols()));
    }
    // Row-wise accumulation into a dense scratch; deterministic because
    // both input row orders are fixed.
    std::vector<double> scratch(static_cast<std::size_t>(b.cols()), 0.0);
    std::vector<int> touched;
    std::vector<std::vector<std::pair<int, double>>> out(
      static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) {
        touched.clear();
        const auto a_cols = a.row_cols(i);
        const auto a_vals = a.row_values(i);
        for (std::size_t k = 0; k < a_cols.size(); ++k) {
            const int j = a_cols[k];
            const double av = a_vals[k];
            const auto b_cols = b.row_cols(j);
            const auto b_vals = b.row_values(j);
            for (std::size_t l = 0; l < b_cols.size(); ++l) {
                const auto c = static_cast<std::size_t>(b_cols[l]);
                if (scratch[c] == 0.0) {
                    touched.push_back(b_cols[l]);
                }
                scratch[c] += av * b_vals[l];
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = out[static_cast<std::size_t>(i)];
        row.reserve(touched.size());
        for (const int c : touched) {
            const auto ci = static_cast<std::size_t>(c);
            if (scratch[ci] != 0.0) {
                row.emplace_back(c, scratch[ci]);
            }
            scratch[ci] = 0.0;
        }
    }
    return SparseMatrix::from_rows(a.rows(), b.cols(), out);
}

auto add(const SparseMatrix& a, const SparseMatrix& b) -> SparseMatrix
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("sparse add: shapes differ: " + std::to_string(a.rows())
                             + "x" + std::to_string(a.cols()) + " vs "
                             + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    std::vector<std::vector<std::pair<int, double>>> out(
      static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) {
        const auto ac = a.row_cols(i);
        const auto av = a.row_values(i);
        const auto bc = b.row_cols(i);
        const auto bv = b.row_values(i);
        auto& row = out[static_cast<std::size_t>(i)];
        std::size_t p = 0;
        std::size_t q = 0;
        while (p < ac.size() || q < bc.size()) {
            if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
                row.emplace_back(ac[p], av[p]);
                ++p;
            } else if (p == ac.size() || bc[q] < ac[p]) {
                row.emplace_back(bc[q], bv[q]);
                ++q;
            } else {
                row.emplace_back(ac[p], av[p] + bv[q]);
                ++p;
                ++q;
            }
        }
    }
    return SparseMatrix::from_rows(a.rows(), a.cols(), out);
}

auto build_knn_graph(const DenseMatrix& features, const int k) -> SparseGraph
{
    const int n = features.rows();
    if (k < 1) {
        throw ParameterError("build_knn_graph: k must be >= 1, got " + std::to_string(k));
    }
    if (k >= n) {
        throw ParameterError("build_knn_graph: k = " + std::to_string(k)
                             + " must be below the node count " + std::to_string(n));
    }
    if (!features.all_finite()) {
        throw ParameterError("build_knn_graph: features contain non-finite values");
    }

    std::vector<SparseGraph::Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    std::vector<std::pair<double, int>> candidates;
    candidates.reserve(static_cast<std::size_t>(n) - 1);
    for (int i = 0; i < n; ++i) {
        candidates.clear();
        const auto xi = features.row(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const auto xj = features.row(j);
            double dist = 0.0;
            for (std::size_t d = 0; d < xi.size(); ++d) {
                const double diff = xi[d] - xj[d];
                dist += diff * diff;
            }
            candidates.emplace_back(dist, j);
        }
        // Lexicographic order on (distance, id) makes ties deterministic.
        std::partial_sort(candidates.begin(),
                          candidates.begin() + k,
                          candidates.end());
        for (int t = 0; t < k; ++t) {
            edges.emplace_back(i, candidates[static_cast<std::size_t>(t)].second);
        }
    }
    return SparseGraph(n, std::move(edges));
}

auto normalize_adjacency(const SparseGraph& g) -> SparseMatrix
{
    const int n = g.num_nodes();
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto nbrs = g.neighbors(i);
        const double w = 1.0 / (static_cast<double>(nbrs.size()) + 1.0);
        auto& row = rows[static_cast<std::size_t>(i)];
        row.reserve(nbrs.size() + 1);
        bool self_placed = false;
        for (const int j : nbrs) {
            if (!self_placed && i < j) {
                row.emplace_back(i, w);
                self_placed = true;
            }
            row.emplace_back(j, w);
        }
        if (!self_placed) {
            row.emplace_back(i, w);
        }
    }
    return SparseMatrix::from_rows(n, n, rows);
}

auto influence_weights(const SparseGraph& g, const int order_k) -> SparseMatrix
{
    if (order_k < 1) {
        throw ParameterError("influence_weights: order_k must be >= 1, got "
                             + std::to_string(order_k));
    }
    const SparseMatrix ahat = normalize_adjacency(g);
    SparseMatrix accum = ahat;
    SparseMatrix power = ahat;
    for (int r = 2; r <= order_k; ++r) {
        power = multiply(power, ahat);
        accum = add(accum, power);
    }

    const int n = g.num_nodes();
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto cols = accum.row_cols(i);
        const auto vals = accum.row_values(i);
        double sum = 0.0;
        for (std::size_t t = 0; t < cols.size(); ++t) {
            if (cols[t] != i) {
                sum += vals[t];
            }
        }
        if (sum <= 0.0) {
            continue; // isolated node: no positive pairs
        }
        auto& row = rows[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < cols.size(); ++t) {
            if (cols[t] != i) {
                row.emplace_back(cols[t], vals[t] / sum);
            }
        }
    }
    return SparseMatrix::from_rows(n, n, rows);
}

} // namespace pamc
