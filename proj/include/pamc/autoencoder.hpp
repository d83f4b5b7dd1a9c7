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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pamc/matrix.hpp"
#include "pamc/tape.hpp"

namespace pamc {

// Production layer widths; tests shrink these to keep finite-difference
// sweeps affordable.
inline constexpr std::array<int, 4> default_encoder_dims { 500, 500, 2000, 10 };

// Fully connected autoencoder. weights/biases hold the encoder layers
// followed by the mirrored decoder layers. ReLU on hidden layers, identity
// on the embedding and reconstruction layers.
struct AutoEncoderParams {
    int input_dim = 0;
    std::vector<int> dims;            // input_dim, hidden..., embedding
    std::vector<DenseMatrix> weights; // 2 * (dims.size() - 1) tensors
    std::vector<DenseMatrix> biases;  // 1 x fan_out each

    [[nodiscard]] auto encoder_layers() const -> int
    {
        return static_cast<int>(dims.size()) - 1;
    }
    [[nodiscard]] auto embedding_dim() const -> int { return dims.back(); }

    // Checks the shape chain, the decoder mirror and bias shapes.
    void validate() const;
};

// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))), zero biases.
// Deterministic under seed.
auto init_autoencoder(int input_dim, std::uint64_t seed,
                      std::span<const int> encoder_dims = default_encoder_dims)
  -> AutoEncoderParams;

auto encode(const AutoEncoderParams& params, const DenseMatrix& features) -> DenseMatrix;
auto reconstruct(const AutoEncoderParams& params, const DenseMatrix& features)
  -> DenseMatrix;

// Mean squared reconstruction error ||X - X_hat||_F^2 / N.
auto reconstruction_loss(const AutoEncoderParams& params, const DenseMatrix& features)
  -> double;

struct PretrainResult {
    AutoEncoderParams params;
    std::vector<double> epoch_loss; // mean per-row loss over each epoch
};

// Shuffled mini-batch Adam on the reconstruction error. Aborts with a
// NumericError naming the epoch and batch if the loss turns non-finite.
auto pretrain(const AutoEncoderParams& params, const DenseMatrix& features,
              int epochs = 30, double lr = 1e-3, int batch_size = 256,
              std::uint64_t seed = 0) -> PretrainResult;

// Tape integration. Parameters become differentiable leaves; the trainer
// decides which of them to actually update.
struct AutoEncoderVars {
    std::vector<Var> weights;
    std::vector<Var> biases;
    int encoder_layers = 0;
};

auto insert_params(Tape& tape, const AutoEncoderParams& params) -> AutoEncoderVars;
auto encoder_forward(Tape& tape, const AutoEncoderVars& vars, Var x) -> Var;
auto decoder_forward(Tape& tape, const AutoEncoderVars& vars, Var z) -> Var;
auto reconstruction_loss_node(Tape& tape, Var x, Var x_hat) -> Var;

// Textual checkpoint, one line per tensor: name, rows, cols, then the
// row-major values at 17 significant digits. Round-trips exactly.
void save_checkpoint(const AutoEncoderParams& params, const std::string& path);
auto load_checkpoint(const std::string& path) -> AutoEncoderParams;

} // namespace pamc
