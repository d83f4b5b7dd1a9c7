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

#include <cmath>
#include <string>
#include <vector>

#include "pamc/errors.hpp"
#include "pamc/matrix.hpp"

namespace pamc {

// Adam with bias correction. Moment buffers are sized lazily on the first
// step and must keep the same tensor count and shapes afterwards.
class Adam {
  public:
    explicit Adam(const double lr, const double beta1 = 0.9, const double beta2 = 0.999,
                  const double eps = 1e-8)
      : lr_(lr)
      , beta1_(beta1)
      , beta2_(beta2)
      , eps_(eps)
    {
        if (!(lr > 0.0)) {
            throw ParameterError("adam: lr must be positive, got " + std::to_string(lr));
        }
    }

    void step(const std::vector<DenseMatrix*>& params,
              const std::vector<const DenseMatrix*>& grads)
    {
        if (params.size() != grads.size()) {
            throw DimensionError("adam: " + std::to_string(params.size())
                                 + " parameters but " + std::to_string(grads.size())
                                 + " gradients");
        }
        if (m_.empty()) {
            for (const DenseMatrix* p : params) {
                m_.emplace_back(p->rows(), p->cols());
                v_.emplace_back(p->rows(), p->cols());
            }
        }
        if (params.size() != m_.size()) {
            throw DimensionError("adam: tensor count changed between steps");
        }
        ++t_;
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t k = 0; k < params.size(); ++k) {
            DenseMatrix& p = *params[k];
            const DenseMatrix& g = *grads[k];
            require_same_shape(p, g, "adam step");
            require_same_shape(p, m_[k], "adam moment");
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double gi = g.data()[i];
                double& mi = m_[k].data()[i];
                double& vi = v_[k].data()[i];
                mi = beta1_ * mi + (1.0 - beta1_) * gi;
                vi = beta2_ * vi + (1.0 - beta2_) * gi * gi;
                p.data()[i] -= lr_ * (mi / c1) / (std::sqrt(vi / c2) + eps_);
            }
        }
    }

    [[nodiscard]] auto steps() const -> long { return t_; }

  private:
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    long t_ = 0;
    std::vector<DenseMatrix> m_;
    std::vector<DenseMatrix> v_;
};

} // namespace pamc
