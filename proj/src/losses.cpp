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

#include "pamc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace pamc {

namespace {

constexpr double norm_floor = 1e-12;

auto effective_norm(std::span<const double> row) -> double
{
    return std::max(std::sqrt(squared_norm(row)), norm_floor);
}

auto cosine_rows(const DenseMatrix& z, const int i, const int j) -> double
{
    if (i == j) {
        return 0.0;
    }
    return dot(z.row(i), z.row(j)) / (effective_norm(z.row(i)) * effective_norm(z.row(j)));
}

// Accumulate coeff * d sim(z_i, z_j) / d z into the gradient rows i and j.
// The norm floor is flat, so the self-norm term drops for clamped rows.
void add_cosine_grad(DenseMatrix& gz, const DenseMatrix& z, const int i, const int j,
                     const double coeff)
{
    const auto zi = z.row(i);
    const auto zj = z.row(j);
    const double raw_ni = std::sqrt(squared_norm(zi));
    const double raw_nj = std::sqrt(squared_norm(zj));
    const double ni = std::max(raw_ni, norm_floor);
    const double nj = std::max(raw_nj, norm_floor);
    const double inv_ninj = 1.0 / (ni * nj);
    const double sim = dot(zi, zj) * inv_ninj;
    const double si = raw_ni > norm_floor ? sim / (ni * ni) : 0.0;
    const double sj = raw_nj > norm_floor ? sim / (nj * nj) : 0.0;
    for (std::size_t d = 0; d < zi.size(); ++d) {
        gz(i, static_cast<int>(d)) += coeff * (zj[d] * inv_ninj - si * zi[d]);
        gz(j, static_cast<int>(d)) += coeff * (zi[d] * inv_ninj - sj * zj[d]);
    }
}

void check_gamma_shape(const DenseMatrix& z, const SparseMatrix& gamma)
{
    if (gamma.rows() != z.rows() || gamma.cols() != z.rows()) {
        throw DimensionError("positive weights are " + std::to_string(gamma.rows()) + "x"
                             + std::to_string(gamma.cols()) + " for "
                             + std::to_string(z.rows()) + " embeddings");
    }
}

} // namespace

auto cosine_sim(std::span<const double> z_i, std::span<const double> z_j,
                const bool same_index) -> double
{
    if (same_index) {
        return 0.0;
    }
    if (z_i.size() != z_j.size()) {
        throw DimensionError("cosine_sim: vectors of length "
                             + std::to_string(z_i.size()) + " and "
                             + std::to_string(z_j.size()));
    }
    return dot(z_i, z_j) / (effective_norm(z_i) * effective_norm(z_j));
}

auto loss_traditional(const DenseMatrix& z, const SparseMatrix& gamma, const double tau)
  -> TraditionalLoss
{
    check_gamma_shape(z, gamma);
    const int n = z.rows();
    TraditionalLoss result;
    result.per_node.assign(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    int counted = 0;
    std::vector<double> scaled(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto cols = gamma.row_cols(i);
        const auto vals = gamma.row_values(i);
        if (cols.empty()) {
            ++result.excluded;
            continue;
        }
        double shift = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            const double s = cosine_rows(z, i, k) * tau;
            scaled[static_cast<std::size_t>(k)] = s;
            if (k != i) {
                shift = std::max(shift, s);
            }
        }
        double denominator = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k != i) {
                denominator += std::exp(scaled[static_cast<std::size_t>(k)] - shift);
            }
        }
        double numerator = 0.0;
        for (std::size_t t = 0; t < cols.size(); ++t) {
            numerator += vals[t] * std::exp(scaled[static_cast<std::size_t>(cols[t])] - shift);
        }
        const double value = std::log(denominator) - std::log(numerator);
        result.per_node[static_cast<std::size_t>(i)] = value;
        sum += value;
        ++counted;
    }
    result.mean = counted > 0 ? sum / counted : 0.0;
    return result;
}

auto positive_loss_sparse(const DenseMatrix& z, const SparseMatrix& gamma,
                          const double tau) -> PositiveLoss
{
    check_gamma_shape(z, gamma);
    PositiveLoss result;
    double sum = 0.0;
    int counted = 0;
    for (int i = 0; i < z.rows(); ++i) {
        const auto cols = gamma.row_cols(i);
        const auto vals = gamma.row_values(i);
        if (cols.empty()) {
            ++result.isolated;
            continue;
        }
        double shift = -std::numeric_limits<double>::infinity();
        for (const int j : cols) {
            shift = std::max(shift, cosine_rows(z, i, j) * tau);
        }
        double mass = 0.0;
        for (std::size_t t = 0; t < cols.size(); ++t) {
            mass += vals[t] * std::exp(cosine_rows(z, i, cols[t]) * tau - shift);
        }
        sum += shift + std::log(mass);
        ++counted;
    }
    result.value = counted > 0 ? -sum / counted : 0.0;
    return result;
}

auto proxy_loss(const DenseMatrix& meta, const double tau) -> double
{
    const int c = meta.rows();
    if (c < 2) {
        throw ParameterError("proxy_loss: need at least 2 meta-nodes, got "
                             + std::to_string(c));
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < c; ++a) {
        for (int b = a + 1; b < c; ++b) {
            shift = std::max(shift, cosine_rows(meta, a, b) * tau);
        }
    }
    double mass = 0.0;
    for (int a = 0; a < c; ++a) {
        for (int b = a + 1; b < c; ++b) {
            mass += std::exp(cosine_rows(meta, a, b) * tau - shift);
        }
    }
    // Ordered pairs double the unordered mass.
    return shift + std::log(2.0 * mass);
}

auto pcontrast_loss(const DenseMatrix& z, const SparseMatrix& gamma,
                    const DenseMatrix& meta, const double tau, const bool include_proxy)
  -> double
{
    const double positive = positive_loss_sparse(z, gamma, tau).value;
    return include_proxy ? positive + proxy_loss(meta, tau) : positive;
}

auto loss_nn(const DenseMatrix& z, const double tau) -> double
{
    const int n = z.rows();
    if (n < 2) {
        throw ParameterError("loss_nn: need at least 2 embeddings, got "
                             + std::to_string(n));
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double shift = 0.0; // the diagonal contributes exp(0)
        for (int j = 0; j < n; ++j) {
            if (j != i) {
                shift = std::max(shift, cosine_rows(z, i, j) * tau);
            }
        }
        double mass = std::exp(-shift);
        for (int j = 0; j < n; ++j) {
            if (j != i) {
                mass += std::exp(cosine_rows(z, i, j) * tau - shift);
            }
        }
        sum += shift + std::log(mass);
    }
    return sum / n;
}

auto loss_cc(const DenseMatrix& meta, const double tau) -> double
{
    if (meta.rows() < 2) {
        throw ParameterError("loss_cc: need at least 2 meta-nodes, got "
                             + std::to_string(meta.rows()));
    }
    return loss_nn(meta, tau);
}

auto kl_cluster_loss(const DenseMatrix& p, const DenseMatrix& q) -> double
{
    require_same_shape(p, q, "kl_cluster_loss");
    double sum = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        const double pv = p.data()[t];
        if (pv > 0.0) {
            sum += pv * std::log(pv / std::max(q.data()[t], norm_floor));
        }
    }
    return sum;
}

auto total_loss(const DenseMatrix& z, const SparseMatrix& gamma,
                const ClusterState& state, const Hyperparams& hp) -> LossBreakdown
{
    hp.validate();
    const int c = state.centroids.rows();
    const auto labels = hard_labels(state.q);
    const auto meta = meta_nodes(z, labels, c, &state.centroids);

    LossBreakdown breakdown;
    breakdown.tau = hp.tau;
    breakdown.alpha = hp.alpha;
    breakdown.beta = hp.beta;
    const PositiveLoss positive = positive_loss_sparse(z, gamma, hp.tau);
    breakdown.positive_term = positive.value;
    breakdown.isolated_nodes = positive.isolated;
    breakdown.proxy_term = proxy_loss(meta.values, hp.tau);
    breakdown.kl_term = kl_cluster_loss(state.p, soft_assign(z, state.centroids, hp.eta));
    breakdown.total = hp.alpha * (breakdown.positive_term + breakdown.proxy_term)
                      + hp.beta * breakdown.kl_term;
    return breakdown;
}

auto positive_loss_node(Tape& tape, const Var z, const SparseMatrix& gamma,
                        const double tau, int* isolated) -> Var
{
    const PositiveLoss forward = positive_loss_sparse(tape.value(z), gamma, tau);
    if (isolated != nullptr) {
        *isolated = forward.isolated;
    }
    const int counted = tape.value(z).rows() - forward.isolated;
    return tape.make_node(
      DenseMatrix(1, 1, { forward.value }), { z },
      [z, gamma, tau, counted](Tape& t, const Var self) {
          if (counted == 0) {
              return;
          }
          const double g = t.grad_scalar(self);
          const DenseMatrix& zv = t.value(z);
          DenseMatrix gz(zv.rows(), zv.cols());
          std::vector<double> scaled;
          for (int i = 0; i < zv.rows(); ++i) {
              const auto cols = gamma.row_cols(i);
              const auto vals = gamma.row_values(i);
              if (cols.empty()) {
                  continue;
              }
              scaled.assign(cols.size(), 0.0);
              double shift = -std::numeric_limits<double>::infinity();
              for (std::size_t k = 0; k < cols.size(); ++k) {
                  scaled[k] = cosine_rows(zv, i, cols[k]) * tau;
                  shift = std::max(shift, scaled[k]);
              }
              double mass = 0.0;
              for (std::size_t k = 0; k < cols.size(); ++k) {
                  mass += vals[k] * std::exp(scaled[k] - shift);
              }
              // d loss / d sim_ij = -(tau / M) * softmax weight of edge ij.
              for (std::size_t k = 0; k < cols.size(); ++k) {
                  const double weight = vals[k] * std::exp(scaled[k] - shift) / mass;
                  add_cosine_grad(gz, zv, i, cols[k], -g * tau * weight / counted);
              }
          }
          t.add_to_grad(z, gz);
      });
}

auto proxy_loss_node(Tape& tape, const Var meta, const double tau) -> Var
{
    const double forward = proxy_loss(tape.value(meta), tau);
    return tape.make_node(
      DenseMatrix(1, 1, { forward }), { meta }, [meta, tau](Tape& t, const Var self) {
          const double g = t.grad_scalar(self);
          const DenseMatrix& mv = t.value(meta);
          const int c = mv.rows();
          double shift = -std::numeric_limits<double>::infinity();
          for (int a = 0; a < c; ++a) {
              for (int b = a + 1; b < c; ++b) {
                  shift = std::max(shift, cosine_rows(mv, a, b) * tau);
              }
          }
          double mass = 0.0;
          for (int a = 0; a < c; ++a) {
              for (int b = a + 1; b < c; ++b) {
                  mass += std::exp(cosine_rows(mv, a, b) * tau - shift);
              }
          }
          DenseMatrix gm(c, mv.cols());
          for (int a = 0; a < c; ++a) {
              for (int b = a + 1; b < c; ++b) {
                  // Both ordered pairs share one sim value, hence the 2.
                  const double weight = std::exp(cosine_rows(mv, a, b) * tau - shift)
                                        / (2.0 * mass);
                  add_cosine_grad(gm, mv, a, b, g * tau * 2.0 * weight);
              }
          }
          t.add_to_grad(meta, gm);
      });
}

auto kl_loss_node(Tape& tape, const DenseMatrix& p, const Var q) -> Var
{
    const double forward = kl_cluster_loss(p, tape.value(q));
    return tape.make_node(
      DenseMatrix(1, 1, { forward }), { q }, [q, p](Tape& t, const Var self) {
          const double g = t.grad_scalar(self);
          const DenseMatrix& qv = t.value(q);
          DenseMatrix gq(qv.rows(), qv.cols());
          for (std::size_t i = 0; i < qv.size(); ++i) {
              const double pv = p.data()[i];
              // The floor is flat: no gradient once q is clamped.
              if (pv > 0.0 && qv.data()[i] > norm_floor) {
                  gq.data()[i] = -g * pv / qv.data()[i];
              }
          }
          t.add_to_grad(q, gq);
      });
}

auto total_loss_node(Tape& tape, const Var z, const SparseMatrix& gamma,
                     const std::vector<int>& labels, const Var centroids,
                     const DenseMatrix& p, const Hyperparams& hp, int* empty_counter,
                     int* isolated) -> LossNodes
{
    hp.validate();
    const int c = tape.value(centroids).rows();
    const Var meta = meta_nodes_node(tape, z, labels, c, centroids, empty_counter);
    const Var positive = positive_loss_node(tape, z, gamma, hp.tau, isolated);
    const Var proxy = proxy_loss_node(tape, meta, hp.tau);
    const Var q = soft_assign_node(tape, z, centroids, hp.eta);
    const Var kl = kl_loss_node(tape, p, q);
    const Var contrast = tape.add(positive, proxy);
    const Var total = tape.add(tape.scale(contrast, hp.alpha), tape.scale(kl, hp.beta));
    return LossNodes { total, positive, proxy, kl };
}

} // namespace pamc
