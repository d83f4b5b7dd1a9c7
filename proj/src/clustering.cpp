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

#include "pamc/clustering.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pamc/rng.hpp"

namespace pamc {

namespace {

auto row_distance_sq(const DenseMatrix& a, const int i, const DenseMatrix& b, const int j)
  -> double
{
    const auto ra = a.row(i);
    const auto rb = b.row(j);
    double acc = 0.0;
    for (std::size_t d = 0; d < ra.size(); ++d) {
        const double diff = ra[d] - rb[d];
        acc += diff * diff;
    }
    return acc;
}

auto nearest_centroid(const DenseMatrix& z, const int i, const DenseMatrix& centroids)
  -> int
{
    int best = 0;
    double best_dist = row_distance_sq(z, i, centroids, 0);
    for (int u = 1; u < centroids.rows(); ++u) {
        const double dist = row_distance_sq(z, i, centroids, u);
        if (dist < best_dist) {
            best_dist = dist;
            best = u;
        }
    }
    return best;
}

// Unnormalized Student-t weights and their row sums.
struct StudentT {
    DenseMatrix w;             // N x C
    std::vector<double> row_sum; // N
};

auto student_t_weights(const DenseMatrix& z, const DenseMatrix& centroids,
                       const double eta) -> StudentT
{
    if (eta <= 0.0) {
        throw ParameterError("soft_assign: eta must be positive");
    }
    if (z.cols() != centroids.cols()) {
        throw DimensionError("soft_assign: embedding dim " + std::to_string(z.cols())
                             + " vs centroid dim " + std::to_string(centroids.cols()));
    }
    const int n = z.rows();
    const int c = centroids.rows();
    const double exponent = -(eta + 1.0) / 2.0;
    StudentT st { DenseMatrix(n, c), std::vector<double>(static_cast<std::size_t>(n)) };
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int u = 0; u < c; ++u) {
            const double t = 1.0 + row_distance_sq(z, i, centroids, u) / eta;
            const double w = std::pow(t, exponent);
            st.w(i, u) = w;
            sum += w;
        }
        st.row_sum[static_cast<std::size_t>(i)] = sum;
    }
    return st;
}

} // namespace

auto kmeans_init(const DenseMatrix& z, const int c, const std::uint64_t seed,
                 const int max_iter) -> DenseMatrix
{
    const int n = z.rows();
    if (c < 2) {
        throw ParameterError("kmeans_init: need c >= 2, got " + std::to_string(c));
    }
    if (c > n) {
        throw ParameterError("kmeans_init: c = " + std::to_string(c) + " exceeds "
                             + std::to_string(n) + " points");
    }
    Rng rng(seed);

    // k-means++ seeding: first center uniform, the rest sampled with
    // probability proportional to squared distance from the chosen set.
    DenseMatrix centroids(c, z.cols());
    const int first = rng.uniform_int(n);
    for (int d = 0; d < z.cols(); ++d) {
        centroids(0, d) = z(first, d);
    }
    std::vector<double> dist_sq(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dist_sq[static_cast<std::size_t>(i)] = row_distance_sq(z, i, centroids, 0);
    }
    for (int t = 1; t < c; ++t) {
        double total = 0.0;
        for (const double d : dist_sq) {
            total += d;
        }
        int chosen = -1;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double cum = 0.0;
            for (int i = 0; i < n; ++i) {
                cum += dist_sq[static_cast<std::size_t>(i)];
                if (r < cum) {
                    chosen = i;
                    break;
                }
            }
            if (chosen < 0) {
                chosen = n - 1; // r landed on the float boundary
            }
        } else {
            // Every point already coincides with a center; any pick is a
            // duplicate position and Lloyd's empty-cluster re-seed applies.
            chosen = 0;
        }
        for (int d = 0; d < z.cols(); ++d) {
            centroids(t, d) = z(chosen, d);
        }
        for (int i = 0; i < n; ++i) {
            dist_sq[static_cast<std::size_t>(i)] = std::min(
              dist_sq[static_cast<std::size_t>(i)], row_distance_sq(z, i, centroids, t));
        }
    }

    // Lloyd iterations.
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const int u = nearest_centroid(z, i, centroids);
            if (u != assignment[static_cast<std::size_t>(i)]) {
                assignment[static_cast<std::size_t>(i)] = u;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
        DenseMatrix sums(c, z.cols());
        std::vector<int> counts(static_cast<std::size_t>(c), 0);
        for (int i = 0; i < n; ++i) {
            const int u = assignment[static_cast<std::size_t>(i)];
            ++counts[static_cast<std::size_t>(u)];
            for (int d = 0; d < z.cols(); ++d) {
                sums(u, d) += z(i, d);
            }
        }
        for (int u = 0; u < c; ++u) {
            const int count = counts[static_cast<std::size_t>(u)];
            if (count > 0) {
                for (int d = 0; d < z.cols(); ++d) {
                    centroids(u, d) = sums(u, d) / count;
                }
            } else {
                // Re-seed at the point farthest from the stale centroid.
                int far = 0;
                double far_dist = row_distance_sq(z, 0, centroids, u);
                for (int i = 1; i < n; ++i) {
                    const double dist = row_distance_sq(z, i, centroids, u);
                    if (dist > far_dist) {
                        far_dist = dist;
                        far = i;
                    }
                }
                for (int d = 0; d < z.cols(); ++d) {
                    centroids(u, d) = z(far, d);
                }
            }
        }
    }
    return centroids;
}

auto kmeans_inertia(const DenseMatrix& z, const DenseMatrix& centroids) -> double
{
    double total = 0.0;
    for (int i = 0; i < z.rows(); ++i) {
        total += row_distance_sq(z, i, centroids, nearest_centroid(z, i, centroids));
    }
    return total;
}

auto kmeans_restarts(const DenseMatrix& z, const int c, const std::uint64_t seed,
                     const int n_init, const int max_iter) -> DenseMatrix
{
    if (n_init < 1) {
        throw ParameterError("kmeans_restarts: n_init must be >= 1, got "
                             + std::to_string(n_init));
    }
    DenseMatrix best;
    double best_inertia = 0.0;
    for (int run = 0; run < n_init; ++run) {
        DenseMatrix centroids
          = kmeans_init(z, c, mix_seed(seed, static_cast<std::uint64_t>(run)), max_iter);
        const double inertia = kmeans_inertia(z, centroids);
        if (run == 0 || inertia < best_inertia) {
            best_inertia = inertia;
            best = std::move(centroids);
        }
    }
    return best;
}

auto soft_assign(const DenseMatrix& z, const DenseMatrix& centroids, const double eta)
  -> DenseMatrix
{
    const StudentT st = student_t_weights(z, centroids, eta);
    DenseMatrix q = st.w;
    for (int i = 0; i < q.rows(); ++i) {
        const double sum = st.row_sum[static_cast<std::size_t>(i)];
        for (int u = 0; u < q.cols(); ++u) {
            q(i, u) /= sum;
        }
    }
    return q;
}

auto target_distribution(const DenseMatrix& q) -> DenseMatrix
{
    for (int i = 0; i < q.rows(); ++i) {
        double sum = 0.0;
        for (int u = 0; u < q.cols(); ++u) {
            if (q(i, u) < 0.0) {
                throw ParameterError("target_distribution: negative assignment");
            }
            sum += q(i, u);
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ParameterError("target_distribution: row " + std::to_string(i)
                                 + " sums to " + std::to_string(sum) + ", not 1");
        }
    }
    const DenseMatrix f = col_sums(q);
    for (int u = 0; u < q.cols(); ++u) {
        if (f(0, u) <= 0.0) {
            throw NumericError("target_distribution: cluster " + std::to_string(u)
                               + " has zero total assignment (degenerate)");
        }
    }
    DenseMatrix p(q.rows(), q.cols());
    for (int i = 0; i < q.rows(); ++i) {
        double sum = 0.0;
        for (int u = 0; u < q.cols(); ++u) {
            const double w = q(i, u) * q(i, u) / f(0, u);
            p(i, u) = w;
            sum += w;
        }
        for (int u = 0; u < q.cols(); ++u) {
            p(i, u) /= sum;
        }
    }
    return p;
}

auto hard_labels(const DenseMatrix& q) -> std::vector<int>
{
    std::vector<int> labels(static_cast<std::size_t>(q.rows()));
    for (int i = 0; i < q.rows(); ++i) {
        int best = 0;
        for (int u = 1; u < q.cols(); ++u) {
            if (q(i, u) > q(i, best)) {
                best = u;
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

auto meta_nodes(const DenseMatrix& z, const std::vector<int>& labels, const int c,
                const DenseMatrix* fallback) -> MetaNodeResult
{
    if (labels.size() != static_cast<std::size_t>(z.rows())) {
        throw DimensionError("meta_nodes: " + std::to_string(labels.size())
                             + " labels for " + std::to_string(z.rows()) + " rows");
    }
    MetaNodeResult result { DenseMatrix(c, z.cols()), 0 };
    std::vector<int> counts(static_cast<std::size_t>(c), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int a = labels[i];
        if (a < 0 || a >= c) {
            throw ParameterError("meta_nodes: label " + std::to_string(a)
                                 + " outside [0, " + std::to_string(c) + ")");
        }
        ++counts[static_cast<std::size_t>(a)];
        for (int d = 0; d < z.cols(); ++d) {
            result.values(a, d) += z(static_cast<int>(i), d);
        }
    }
    for (int a = 0; a < c; ++a) {
        const int count = counts[static_cast<std::size_t>(a)];
        if (count > 0) {
            for (int d = 0; d < z.cols(); ++d) {
                result.values(a, d) /= count;
            }
            continue;
        }
        ++result.empty_clusters;
        if (fallback == nullptr) {
            throw ParameterError("meta_nodes: cluster " + std::to_string(a)
                                 + " is empty and no fallback centroids were given");
        }
        if (fallback->rows() != c || fallback->cols() != z.cols()) {
            throw DimensionError("meta_nodes: fallback shape " + fallback->shape_str()
                                 + " does not match " + std::to_string(c) + "x"
                                 + std::to_string(z.cols()));
        }
        for (int d = 0; d < z.cols(); ++d) {
            result.values(a, d) = (*fallback)(a, d);
        }
    }
    return result;
}

auto soft_assign_node(Tape& tape, const Var z, const Var centroids, const double eta)
  -> Var
{
    const DenseMatrix& zv = tape.value(z);
    const DenseMatrix& mu = tape.value(centroids);
    StudentT st = student_t_weights(zv, mu, eta);

    const int n = zv.rows();
    const int c = mu.rows();
    DenseMatrix q = st.w;
    for (int i = 0; i < n; ++i) {
        const double sum = st.row_sum[static_cast<std::size_t>(i)];
        for (int u = 0; u < c; ++u) {
            q(i, u) /= sum;
        }
    }

    // Chain: g -> w (softmax-style normalization) -> squared distance -> z, mu.
    return tape.make_node(
      std::move(q), { z, centroids },
      [z, centroids, st = std::move(st), eta](Tape& t, const Var self) {
          const DenseMatrix& g = t.grad(self);
          const DenseMatrix& q = t.value(self);
          const DenseMatrix& zv = t.value(z);
          const DenseMatrix& mu = t.value(centroids);
          const int n = zv.rows();
          const int c = mu.rows();
          const int dz = zv.cols();
          const double factor = -(eta + 1.0) / (2.0 * eta);

          DenseMatrix gz(n, dz);
          DenseMatrix gmu(c, dz);
          for (int i = 0; i < n; ++i) {
              double dot_gq = 0.0;
              for (int u = 0; u < c; ++u) {
                  dot_gq += g(i, u) * q(i, u);
              }
              const double inv_sum = 1.0 / st.row_sum[static_cast<std::size_t>(i)];
              for (int u = 0; u < c; ++u) {
                  const double dl_dw = (g(i, u) - dot_gq) * inv_sum;
                  const double t_iu = 1.0
                                      + row_distance_sq(zv, i, mu, u) / eta;
                  const double dl_ddist = dl_dw * factor * st.w(i, u) / t_iu;
                  for (int d = 0; d < dz; ++d) {
                      const double diff = 2.0 * (zv(i, d) - mu(u, d));
                      gz(i, d) += dl_ddist * diff;
                      gmu(u, d) -= dl_ddist * diff;
                  }
              }
          }
          if (t.requires_grad(z)) {
              t.add_to_grad(z, gz);
          }
          if (t.requires_grad(centroids)) {
              t.add_to_grad(centroids, gmu);
          }
      });
}

auto meta_nodes_node(Tape& tape, const Var z, const std::vector<int>& labels,
                     const int c, const Var fallback, int* empty_counter) -> Var
{
    const DenseMatrix& fb = tape.value(fallback);
    MetaNodeResult result = meta_nodes(tape.value(z), labels, c, &fb);
    if (empty_counter != nullptr) {
        *empty_counter += result.empty_clusters;
    }

    std::vector<int> counts(static_cast<std::size_t>(c), 0);
    for (const int a : labels) {
        ++counts[static_cast<std::size_t>(a)];
    }

    // Fallback rows are constants by policy, so the fallback is not a
    // parent; gradient reaches only the member embedding rows.
    return tape.make_node(
      std::move(result.values), { z },
      [z, labels, counts = std::move(counts)](Tape& t, const Var self) {
          const DenseMatrix& g = t.grad(self);
          const DenseMatrix& zv = t.value(z);
          DenseMatrix gz(zv.rows(), zv.cols());
          for (std::size_t i = 0; i < labels.size(); ++i) {
              const int a = labels[i];
              const double inv = 1.0 / counts[static_cast<std::size_t>(a)];
              for (int d = 0; d < zv.cols(); ++d) {
                  gz(static_cast<int>(i), d) += g(a, d) * inv;
              }
          }
          t.add_to_grad(z, gz);
      });
}

} // namespace pamc
