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

#include "pamc/autoencoder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "pamc/adam.hpp"
#include "pamc/rng.hpp"

namespace pamc {

namespace {

// (fan_in, fan_out) of stacked layer k; the decoder walks dims backwards.
auto layer_shape(const std::vector<int>& dims, const int k) -> std::pair<int, int>
{
    const int layers = static_cast<int>(dims.size()) - 1;
    if (k < layers) {
        return { dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k + 1)] };
    }
    const int l = k - layers;
    return { dims[static_cast<std::size_t>(layers - l)],
             dims[static_cast<std::size_t>(layers - l - 1)] };
}

void apply_layer(DenseMatrix& h, const DenseMatrix& w, const DenseMatrix& b,
                 const bool hidden)
{
    h = matmul(h, w);
    for (int i = 0; i < h.rows(); ++i) {
        for (int j = 0; j < h.cols(); ++j) {
            h(i, j) += b(0, j);
            if (hidden && h(i, j) < 0.0) {
                h(i, j) = 0.0;
            }
        }
    }
}

void check_input(const AutoEncoderParams& params, const DenseMatrix& features,
                 const char* what)
{
    if (features.cols() != params.input_dim) {
        throw DimensionError(std::string(what) + ": features have "
                             + std::to_string(features.cols()) + " columns, model expects "
                             + std::to_string(params.input_dim));
    }
}

auto rows_subset(const DenseMatrix& features, std::span<const int> ids) -> DenseMatrix
{
    DenseMatrix out(static_cast<int>(ids.size()), features.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto src = features.row(ids[r]);
        std::copy(src.begin(), src.end(), out.row(static_cast<int>(r)).begin());
    }
    return out;
}

void append_value(std::string& line, const double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += ' ';
    line += buf;
}

} // namespace

void AutoEncoderParams::validate() const
{
    if (dims.size() < 2) {
        throw DimensionError("autoencoder: needs at least one layer");
    }
    const std::size_t total = 2 * (dims.size() - 1);
    if (weights.size() != total || biases.size() != total) {
        throw DimensionError("autoencoder: expected " + std::to_string(total)
                             + " weight/bias pairs, got " + std::to_string(weights.size())
                             + "/" + std::to_string(biases.size()));
    }
    if (dims.front() != input_dim) {
        throw DimensionError("autoencoder: dims chain does not start at the input size");
    }
    for (std::size_t k = 0; k < total; ++k) {
        const auto [fan_in, fan_out] = layer_shape(dims, static_cast<int>(k));
        if (weights[k].rows() != fan_in || weights[k].cols() != fan_out) {
            throw DimensionError("autoencoder: layer " + std::to_string(k) + " is "
                                 + weights[k].shape_str() + ", expected "
                                 + std::to_string(fan_in) + "x" + std::to_string(fan_out));
        }
        if (biases[k].rows() != 1 || biases[k].cols() != fan_out) {
            throw DimensionError("autoencoder: bias " + std::to_string(k) + " is "
                                 + biases[k].shape_str() + ", expected 1x"
                                 + std::to_string(fan_out));
        }
    }
}

auto init_autoencoder(const int input_dim, const std::uint64_t seed,
                      std::span<const int> encoder_dims) -> AutoEncoderParams
{
    if (input_dim < 1) {
        throw ParameterError("init_autoencoder: input_dim must be >= 1, got "
                             + std::to_string(input_dim));
    }
    if (encoder_dims.empty()) {
        throw ParameterError("init_autoencoder: empty layer list");
    }
    for (const int d : encoder_dims) {
        if (d < 1) {
            throw ParameterError("init_autoencoder: layer width must be >= 1, got "
                                 + std::to_string(d));
        }
    }
    AutoEncoderParams params;
    params.input_dim = input_dim;
    params.dims.push_back(input_dim);
    params.dims.insert(params.dims.end(), encoder_dims.begin(), encoder_dims.end());

    Rng rng(seed);
    const int total = 2 * (static_cast<int>(params.dims.size()) - 1);
    for (int k = 0; k < total; ++k) {
        const auto [fan_in, fan_out] = layer_shape(params.dims, k);
        const double r = std::sqrt(6.0 / (fan_in + fan_out));
        DenseMatrix w(fan_in, fan_out);
        for (std::size_t i = 0; i < w.size(); ++i) {
            w.data()[i] = rng.uniform(-r, r);
        }
        params.weights.push_back(std::move(w));
        params.biases.emplace_back(1, fan_out);
    }
    return params;
}

auto encode(const AutoEncoderParams& params, const DenseMatrix& features) -> DenseMatrix
{
    params.validate();
    check_input(params, features, "encode");
    const int layers = params.encoder_layers();
    DenseMatrix h = features;
    for (int l = 0; l < layers; ++l) {
        apply_layer(h, params.weights[static_cast<std::size_t>(l)],
                    params.biases[static_cast<std::size_t>(l)], l < layers - 1);
    }
    return h;
}

auto reconstruct(const AutoEncoderParams& params, const DenseMatrix& features)
  -> DenseMatrix
{
    const int layers = params.encoder_layers();
    DenseMatrix h = encode(params, features);
    for (int l = 0; l < layers; ++l) {
        const auto k = static_cast<std::size_t>(layers + l);
        apply_layer(h, params.weights[k], params.biases[k], l < layers - 1);
    }
    return h;
}

auto reconstruction_loss(const AutoEncoderParams& params, const DenseMatrix& features)
  -> double
{
    const DenseMatrix diff = features - reconstruct(params, features);
    double sum = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        sum += diff.data()[i] * diff.data()[i];
    }
    return sum / features.rows();
}

auto insert_params(Tape& tape, const AutoEncoderParams& params) -> AutoEncoderVars
{
    params.validate();
    AutoEncoderVars vars;
    vars.encoder_layers = params.encoder_layers();
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        vars.weights.push_back(tape.input(params.weights[k]));
        vars.biases.push_back(tape.input(params.biases[k]));
    }
    return vars;
}

auto encoder_forward(Tape& tape, const AutoEncoderVars& vars, const Var x) -> Var
{
    Var h = x;
    for (int l = 0; l < vars.encoder_layers; ++l) {
        const auto k = static_cast<std::size_t>(l);
        h = tape.add_row(tape.matmul(h, vars.weights[k]), vars.biases[k]);
        if (l < vars.encoder_layers - 1) {
            h = tape.relu(h);
        }
    }
    return h;
}

auto decoder_forward(Tape& tape, const AutoEncoderVars& vars, const Var z) -> Var
{
    Var h = z;
    for (int l = 0; l < vars.encoder_layers; ++l) {
        const auto k = static_cast<std::size_t>(vars.encoder_layers + l);
        h = tape.add_row(tape.matmul(h, vars.weights[k]), vars.biases[k]);
        if (l < vars.encoder_layers - 1) {
            h = tape.relu(h);
        }
    }
    return h;
}

auto reconstruction_loss_node(Tape& tape, const Var x, const Var x_hat) -> Var
{
    require_same_shape(tape.value(x), tape.value(x_hat), "reconstruction_loss");
    const int n = tape.value(x).rows();
    return tape.scale(tape.sum_squares(tape.sub(x, x_hat)), 1.0 / n);
}

auto pretrain(const AutoEncoderParams& params, const DenseMatrix& features,
              const int epochs, const double lr, const int batch_size,
              const std::uint64_t seed) -> PretrainResult
{
    params.validate();
    check_input(params, features, "pretrain");
    if (epochs < 1) {
        throw ParameterError("pretrain: epochs must be >= 1, got "
                             + std::to_string(epochs));
    }
    if (batch_size < 1) {
        throw ParameterError("pretrain: batch_size must be >= 1, got "
                             + std::to_string(batch_size));
    }
    if (features.rows() < 1) {
        throw ParameterError("pretrain: no feature rows");
    }

    PretrainResult result;
    result.params = params;
    Adam opt(lr);
    Rng rng(seed);
    const int n = features.rows();

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const auto order = rng.permutation(n);
        double epoch_sum = 0.0;
        int batch_index = 0;
        for (int start = 0; start < n; start += batch_size, ++batch_index) {
            const int count = std::min(batch_size, n - start);
            const std::span<const int> ids(order.data() + start,
                                           static_cast<std::size_t>(count));
            const DenseMatrix batch = rows_subset(features, ids);

            Tape tape;
            const AutoEncoderVars vars = insert_params(tape, result.params);
            const Var x = tape.constant(batch);
            const Var x_hat = decoder_forward(tape, vars, encoder_forward(tape, vars, x));
            const Var loss = reconstruction_loss_node(tape, x, x_hat);
            const double value = tape.scalar(loss);
            if (!std::isfinite(value)) {
                throw NumericError("pretrain: non-finite loss at epoch "
                                   + std::to_string(epoch) + ", batch "
                                   + std::to_string(batch_index));
            }
            epoch_sum += value * count;
            tape.backward(loss);

            std::vector<DenseMatrix*> tensors;
            std::vector<const DenseMatrix*> grads;
            for (std::size_t k = 0; k < result.params.weights.size(); ++k) {
                tensors.push_back(&result.params.weights[k]);
                grads.push_back(&tape.grad(vars.weights[k]));
                tensors.push_back(&result.params.biases[k]);
                grads.push_back(&tape.grad(vars.biases[k]));
            }
            opt.step(tensors, grads);
        }
        result.epoch_loss.push_back(epoch_sum / n);
    }
    return result;
}

void save_checkpoint(const AutoEncoderParams& params, const std::string& path)
{
    params.validate();
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        for (const bool is_weight : { true, false }) {
            const DenseMatrix& t = is_weight ? params.weights[k] : params.biases[k];
            std::string line = (is_weight ? "w" : "b") + std::to_string(k);
            line += ' ';
            line += std::to_string(t.rows());
            line += ' ';
            line += std::to_string(t.cols());
            for (std::size_t i = 0; i < t.size(); ++i) {
                append_value(line, t.data()[i]);
            }
            out << line << '\n';
        }
    }
    if (!out.flush()) {
        throw IoError("write to '" + path + "' failed");
    }
}

namespace {

struct TokenStream {
    const std::string& line;
    const std::string& path;
    int line_no;
    std::size_t pos = 0;

    auto next() -> std::string_view
    {
        while (pos < line.size() && line[pos] == ' ') {
            ++pos;
        }
        if (pos >= line.size()) {
            throw IoError(path + ": line " + std::to_string(line_no)
                          + ": unexpected end of line");
        }
        const std::size_t begin = pos;
        while (pos < line.size() && line[pos] != ' ') {
            ++pos;
        }
        return { line.data() + begin, pos - begin };
    }

    [[nodiscard]] auto exhausted() -> bool
    {
        while (pos < line.size() && line[pos] == ' ') {
            ++pos;
        }
        return pos >= line.size();
    }
};

template <typename T>
auto parse_number(std::string_view token, const std::string& path, const int line_no) -> T
{
    T value {};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc {} || ptr != token.data() + token.size()) {
        throw IoError(path + ": line " + std::to_string(line_no) + ": bad number '"
                      + std::string(token) + "'");
    }
    return value;
}

} // namespace

auto load_checkpoint(const std::string& path) -> AutoEncoderParams
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<DenseMatrix> tensors;
    std::vector<std::string> names;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        TokenStream tokens { line, path, line_no };
        names.emplace_back(tokens.next());
        const int rows = parse_number<int>(tokens.next(), path, line_no);
        const int cols = parse_number<int>(tokens.next(), path, line_no);
        if (rows < 1 || cols < 1) {
            throw IoError(path + ": line " + std::to_string(line_no)
                          + ": invalid tensor shape");
        }
        DenseMatrix t(rows, cols);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t.data()[i] = parse_number<double>(tokens.next(), path, line_no);
        }
        if (!tokens.exhausted()) {
            throw IoError(path + ": line " + std::to_string(line_no)
                          + ": trailing values for a " + t.shape_str() + " tensor");
        }
        tensors.push_back(std::move(t));
    }
    if (tensors.empty() || tensors.size() % 4 != 0) {
        throw IoError(path + ": expected an even number of weight/bias pairs, got "
                      + std::to_string(tensors.size()) + " tensors");
    }

    AutoEncoderParams params;
    const std::size_t pairs = tensors.size() / 2;
    for (std::size_t k = 0; k < pairs; ++k) {
        const std::string expected_w = "w" + std::to_string(k);
        const std::string expected_b = "b" + std::to_string(k);
        if (names[2 * k] != expected_w || names[2 * k + 1] != expected_b) {
            throw IoError(path + ": tensor names '" + names[2 * k] + "', '"
                          + names[2 * k + 1] + "' do not match expected '" + expected_w
                          + "', '" + expected_b + "'");
        }
        params.weights.push_back(std::move(tensors[2 * k]));
        params.biases.push_back(std::move(tensors[2 * k + 1]));
    }
    params.input_dim = params.weights.front().rows();
    params.dims.push_back(params.input_dim);
    for (std::size_t l = 0; l < pairs / 2; ++l) {
        params.dims.push_back(params.weights[l].cols());
    }
    params.validate();
    return params;
}

} // namespace pamc
