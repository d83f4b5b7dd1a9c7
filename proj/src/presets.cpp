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

#include "pamc/presets.hpp"

namespace pamc {

namespace {

auto make(const std::string& name, const int n, const int classes, const int dim,
          const double alpha, const double beta, const int k, const double tau,
          const double lr, const double pretrain_lr) -> DatasetPreset
{
    DatasetPreset preset;
    preset.name = name;
    preset.n = n;
    preset.classes = classes;
    preset.feature_dim = dim;
    preset.hp.alpha = alpha;
    preset.hp.beta = beta;
    preset.hp.influence_k = k;
    preset.hp.tau = tau;
    preset.hp.lr = lr;
    preset.hp.clusters_c = classes;
    preset.pretrain_lr = pretrain_lr;
    return preset;
}

} // namespace

auto all_presets() -> std::vector<DatasetPreset>
{
    // Synthetic blocks for self-contained end-to-end checks; the encoder is
    // sized for its 16 features instead of the wide published stack.
    auto sbm = make("sbm-accept", 300, 3, 16, 1.0, 1.0, 1, 0.5, 1e-3, 1e-3);
    sbm.encoder_dims = {128, 64, 10};
    return {
        make("usps", 9298, 10, 256, 2.0, 2.0, 4, 0.5, 1e-3, 1e-3),
        make("hhar", 10299, 6, 561, 0.5, 12.5, 2, 1.5, 1e-3, 1e-3),
        make("reut", 10000, 4, 2000, 1.0, 0.2, 1, 0.25, 1e-4, 1e-4),
        make("acm", 3025, 3, 1870, 0.5, 0.5, 1, 0.5, 1e-3, 1e-3),
        make("cite", 3327, 6, 3703, 2.0, 2.0, 1, 1.0, 1e-3, 1e-4),
        make("dblp", 4057, 4, 334, 2.0, 2.5, 3, 0.5, 1e-3, 1e-3),
        std::move(sbm),
    };
}

auto dataset_preset(const std::string& name) -> DatasetPreset
{
    for (auto& preset : all_presets()) {
        if (preset.name == name) {
            return preset;
        }
    }
    std::string known;
    for (const auto& preset : all_presets()) {
        if (!known.empty()) {
            known += ", ";
        }
        known += preset.name;
    }
    throw ParameterError("unknown preset '" + name + "' (known: " + known + ")");
}

} // namespace pamc
