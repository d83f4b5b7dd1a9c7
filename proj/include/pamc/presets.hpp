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

#include <string>
#include <vector>

#include "pamc/autoencoder.hpp"
#include "pamc/hyperparams.hpp"

namespace pamc {

// Published per-dataset configuration: the benchmark shape plus the tuned
// weights, influence depth, similarity scale and learning rates.
struct DatasetPreset {
    std::string name;
    int n = 0;
    int classes = 0;
    int feature_dim = 0;
    Hyperparams hp;           // clusters_c mirrors `classes`
    int pretrain_epochs = 30;
    double pretrain_lr = 1e-3;
    int batch_size = 256;
    // The wide published stack suits the 256..3703-dimensional corpora; the
    // synthetic preset swaps in an encoder sized for its 16 features.
    std::vector<int> encoder_dims{default_encoder_dims.begin(), default_encoder_dims.end()};
};

// Known names: usps, hhar, reut, acm, cite, dblp, plus the synthetic
// sbm-accept configuration used by the acceptance suite. Unknown names
// throw ParameterError listing the options.
auto dataset_preset(const std::string& name) -> DatasetPreset;

auto all_presets() -> std::vector<DatasetPreset>;

} // namespace pamc
