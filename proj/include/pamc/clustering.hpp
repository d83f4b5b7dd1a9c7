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
#include <vector>

#include "pamc/matrix.hpp"
#include "pamc/tape.hpp"

namespace pamc {

// Mutable cluster state owned by the training loop. q and p rows are
// stochastic; meta holds the per-cluster embedding means (or the fallback
// centroid row when a cluster is empty).
struct ClusterState {
    DenseMatrix centroids; // C x d_z, learnable
    DenseMatrix q;         // N x C soft assignments
    DenseMatrix p;         // N x C sharpened targets
    DenseMatrix meta;      // C x d_z cluster meta-nodes
    double eta = 1.0;
    int empty_cluster_events = 0;
};

// Lloyd's algorithm with k-means++ seeding. An empty cluster is re-seeded
// at the point farthest from that cluster's stale centroid. Stops when
// assignments stabilize or after max_iter rounds. Deterministic per seed.
auto kmeans_init(const DenseMatrix& z, int c, std::uint64_t seed, int max_iter = 100)
  -> DenseMatrix;

// Best of n_init independent k-means runs by within-cluster sum of squares
// (Lloyd is seed-sensitive; restarts are the standard remedy). Restart
// seeds derive deterministically from `seed`.
auto kmeans_restarts(const DenseMatrix& z, int c, std::uint64_t seed, int n_init = 10,
                     int max_iter = 100) -> DenseMatrix;

// Sum over rows of the squared distance to the nearest centroid.
auto kmeans_inertia(const DenseMatrix& z, const DenseMatrix& centroids) -> double;

// Student-t kernel: q_iu proportional to (1 + ||z_i - mu_u||^2 / eta)
// raised to -(eta+1)/2, normalized per row.
auto soft_assign(const DenseMatrix& z, const DenseMatrix& centroids, double eta)
  -> DenseMatrix;

// Sharpened target: p_iu proportional to q_iu^2 / f_u with f_u the column
// sum of Q. A fully drained cluster (f_u = 0) throws NumericError rather
// than silently producing zeros.
auto target_distribution(const DenseMatrix& q) -> DenseMatrix;

// Per-row argmax; ties go to the lower cluster index.
auto hard_labels(const DenseMatrix& q) -> std::vector<int>;

struct MetaNodeResult {
    DenseMatrix values; // c x d_z
    int empty_clusters = 0;
};

// Per-cluster mean of the member embedding rows. Empty clusters copy the
// matching row of `fallback` (must then be non-null) and are counted.
auto meta_nodes(const DenseMatrix& z, const std::vector<int>& labels, int c,
                const DenseMatrix* fallback = nullptr) -> MetaNodeResult;

// Differentiable versions. Gradients flow into z (and centroids for the
// soft assignment); fallback rows of the meta-node output are constants.
auto soft_assign_node(Tape& tape, Var z, Var centroids, double eta) -> Var;
auto meta_nodes_node(Tape& tape, Var z, const std::vector<int>& labels, int c,
                     Var fallback, int* empty_counter = nullptr) -> Var;

} // namespace pamc
