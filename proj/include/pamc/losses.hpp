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
#include <vector>

#include "pamc/clustering.hpp"
#include "pamc/graph.hpp"
#include "pamc/hyperparams.hpp"
#include "pamc/matrix.hpp"
#include "pamc/tape.hpp"

namespace pamc {

// Similarity scale convention throughout: tau MULTIPLIES the cosine value
// (exp(sim * tau)), it does not divide it.

struct LossBreakdown {
    double positive_term = 0.0;
    double proxy_term = 0.0;
    double kl_term = 0.0;
    double total = 0.0;
    double tau = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    int isolated_nodes = 0; // excluded from the positive mean
};

// Cosine similarity with the self-pair pinned to 0. Norms are floored at
// 1e-12 instead of erroring on zero vectors.
auto cosine_sim(std::span<const double> z_i, std::span<const double> z_j,
                bool same_index) -> double;

// Dense O(N^2) reference: per-node -log of (positive mass / total mass),
// both restricted to k != i. Nodes without positive weights carry NaN in
// per_node and are left out of the mean.
struct TraditionalLoss {
    std::vector<double> per_node;
    double mean = 0.0;
    int excluded = 0;
};
auto loss_traditional(const DenseMatrix& z, const SparseMatrix& gamma, double tau)
  -> TraditionalLoss;

// Sparse positive term: -(1/M) sum_i log sum_j gamma_ij exp(sim * tau),
// touching only stored entries; M counts nodes with at least one positive.
// gamma may carry any positive weights (binary or row-normalized).
struct PositiveLoss {
    double value = 0.0;
    int isolated = 0;
};
auto positive_loss_sparse(const DenseMatrix& z, const SparseMatrix& gamma, double tau)
  -> PositiveLoss;

// Proxy negative term over cluster meta-nodes: log of the summed
// exponentials over all ordered pairs a != b. Needs at least two rows.
auto proxy_loss(const DenseMatrix& meta, double tau) -> double;

// positive + proxy; with include_proxy = false (single-cluster runs) the
// proxy term is skipped entirely.
auto pcontrast_loss(const DenseMatrix& z, const SparseMatrix& gamma,
                    const DenseMatrix& meta, double tau, bool include_proxy = true)
  -> double;

// Node-level and cluster-level log-sum terms whose extremal values the
// bound checker compares: the diagonal contributes exp(0) = 1 in both.
auto loss_nn(const DenseMatrix& z, double tau) -> double;
auto loss_cc(const DenseMatrix& meta, double tau) -> double;

// KL(P || Q) summed over all entries, 0 log 0 = 0, Q floored at 1e-12.
auto kl_cluster_loss(const DenseMatrix& p, const DenseMatrix& q) -> double;

// Joint objective evaluated with training semantics: member labels come
// from state.q (frozen), the KL compares state.p (frozen) against a fresh
// soft assignment of z to state.centroids, and meta-nodes are rebuilt from
// z. total = alpha * (positive + proxy) + beta * kl.
auto total_loss(const DenseMatrix& z, const SparseMatrix& gamma,
                const ClusterState& state, const Hyperparams& hp) -> LossBreakdown;

// Differentiable versions used by the training loop. Labels, targets and
// gamma are constants; gradients flow through z, meta and q.
auto positive_loss_node(Tape& tape, Var z, const SparseMatrix& gamma, double tau,
                        int* isolated = nullptr) -> Var;
auto proxy_loss_node(Tape& tape, Var meta, double tau) -> Var;
auto kl_loss_node(Tape& tape, const DenseMatrix& p, Var q) -> Var;

// Full objective on the tape; returns each term so the trainer can record
// the breakdown without re-evaluating.
struct LossNodes {
    Var total;
    Var positive;
    Var proxy;
    Var kl;
};
auto total_loss_node(Tape& tape, Var z, const SparseMatrix& gamma,
                     const std::vector<int>& labels, Var centroids,
                     const DenseMatrix& p, const Hyperparams& hp,
                     int* empty_counter = nullptr, int* isolated = nullptr)
  -> LossNodes;

} // namespace pamc
