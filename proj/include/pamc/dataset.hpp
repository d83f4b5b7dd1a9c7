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
#include <optional>
#include <string>
#include <vector>

#include "pamc/graph.hpp"
#include "pamc/matrix.hpp"

namespace pamc {

// A clustering problem instance: features, an optional graph over the same
// nodes, and optional ground-truth labels (evaluation only). When labels
// are present they must use every class id in [0, num_classes).
struct Dataset {
    DenseMatrix features;
    std::optional<SparseGraph> graph;
    std::vector<int> labels; // empty when absent
    std::string name;

    [[nodiscard]] auto num_nodes() const -> int { return features.rows(); }
    [[nodiscard]] auto has_labels() const -> bool { return !labels.empty(); }
    [[nodiscard]] auto num_classes() const -> int;
};

// File formats (all plain UTF-8 text):
//   features: CSV, comma separator, '.' decimal, no header
//   labels:   one non-negative integer per line
//   edges:    two tab-separated 0-based node ids per line; duplicate and
//             reversed-duplicate edges collapse silently
// Parse failures throw IoError naming the file and 1-based line number.
auto load_features_csv(const std::string& path) -> DenseMatrix;
auto load_labels(const std::string& path) -> std::vector<int>;
auto load_edges(const std::string& path, int num_nodes) -> std::vector<SparseGraph::Edge>;

// Writers use 17 significant digits so a write-then-read round-trip
// reproduces every double bit-exactly.
void save_features_csv(const std::string& path, const DenseMatrix& features);
void save_labels(const std::string& path, const std::vector<int>& labels);
void save_edges(const std::string& path, const std::vector<SparseGraph::Edge>& edges);

// Exactly one of edges_path / knn_k must be provided; the graph comes from
// the edge file or from build_knn_graph on the loaded features.
auto load_dataset(const std::string& features_path,
                  const std::optional<std::string>& edges_path,
                  const std::optional<std::string>& labels_path,
                  std::optional<int> knn_k) -> Dataset;

// Stochastic block model with Gaussian feature centers. Nodes split into c
// near-equal blocks (n mod c extra nodes go to the lowest-index blocks);
// intra-block edge probability p_in, inter-block p_out. Block feature
// centers sit at (separation/sqrt(2)) * e_block, so every pair of centers
// is exactly `center_separation` apart; requires feature_dim >= c.
auto generate_sbm(int n, int c, double p_in, double p_out, int feature_dim,
                  double center_separation, double noise_sigma, std::uint64_t seed)
  -> Dataset;

} // namespace pamc
