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
#include <string>

#include "pamc/hyperparams.hpp"

namespace pamc {

// Flat key=value run configuration shared by the subcommands. Path fields
// default to empty (absent); numeric knobs default to the common published
// settings so a config file only needs to state deviations.
struct Config {
    std::string features;
    std::string edges;
    std::string labels;
    int knn_k = 0; // 0 = no knn graph
    int clusters = 2;
    double alpha = 1.0;
    double beta = 1.0;
    int influence_k = 1;
    double tau = 0.5;
    double eta = 1.0;
    double lr = 1e-3;
    int epochs = 200;
    int pretrain_epochs = 30;
    double pretrain_lr = 1e-3;
    int batch_size = 256;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    // Training-loop view of the shared fields (clusters -> clusters_c).
    [[nodiscard]] auto hyperparams() const -> Hyperparams;
};

// Applies one key=value pair. Unknown keys throw ParameterError naming the
// key; values that fail to parse throw ParameterError naming key and value.
void apply_config_value(Config& config, const std::string& key, const std::string& value);

// key=value lines layered over `base`. Blank lines and lines starting with
// '#' are skipped; errors carry the file name and 1-based line number.
auto load_config_file(const std::string& path, const Config& base = {}) -> Config;

// Every key in declaration order, one "key = value" line each. Doubles use
// the shortest round-tripping form, so the output is itself a valid config
// file reproducing the same Config.
auto describe_config(const Config& config) -> std::string;

} // namespace pamc
