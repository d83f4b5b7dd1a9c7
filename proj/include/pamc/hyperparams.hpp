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

#include "pamc/errors.hpp"

namespace pamc {

// Knobs for the joint objective alpha * (positive + proxy) + beta * kl and
// the training loop around it.
struct Hyperparams {
    double alpha = 1.0;      // weight of the contrastive pair
    double beta = 1.0;       // weight of the cluster self-supervision term
    int influence_k = 1;     // hops accumulated into the positive weights
    double tau = 0.5;        // similarity scale (multiplies cosine values)
    double eta = 1.0;        // Student-t degrees of freedom
    double lr = 1e-3;
    int epochs = 200;
    std::uint64_t seed = 0;
    int clusters_c = 2;

    void validate() const
    {
        if (alpha < 0.0 || beta < 0.0) {
            throw ParameterError("hyperparams: alpha and beta must be non-negative");
        }
        if (influence_k < 1) {
            throw ParameterError("hyperparams: influence_k must be >= 1");
        }
        if (tau <= 0.0) {
            throw ParameterError("hyperparams: tau must be positive");
        }
        if (eta <= 0.0) {
            throw ParameterError("hyperparams: eta must be positive");
        }
        if (lr <= 0.0) {
            throw ParameterError("hyperparams: lr must be positive");
        }
        if (epochs < 1) {
            throw ParameterError("hyperparams: epochs must be >= 1");
        }
        if (clusters_c < 2) {
            throw ParameterError("hyperparams: clusters_c must be >= 2");
        }
    }
};

} // namespace pamc
