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

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pamc/errors.hpp"

namespace pamc {

// Row-major dense matrix of 64-bit floats. Everything in this project that
// carries embeddings, weights or centroids is one of these. The only heavy
// kernel (matmul) is delegated to Eigen; the rest is plain loops.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols);
    DenseMatrix(int rows, int cols, std::vector<double> values);

    static auto identity(int n) -> DenseMatrix;
    static auto from_rows(std::initializer_list<std::initializer_list<double>> rows)
      -> DenseMatrix;

    [[nodiscard]] auto rows() const -> int { return rows_; }
    [[nodiscard]] auto cols() const -> int { return cols_; }
    [[nodiscard]] auto size() const -> std::size_t { return data_.size(); }
    [[nodiscard]] auto empty() const -> bool { return data_.empty(); }

    auto operator()(int r, int c) -> double& { return data_[index(r, c)]; }
    auto operator()(int r, int c) const -> double { return data_[index(r, c)]; }

    auto data() -> double* { return data_.data(); }
    [[nodiscard]] auto data() const -> const double* { return data_.data(); }

    auto row(int r) -> std::span<double>;
    [[nodiscard]] auto row(int r) const -> std::span<const double>;

    [[nodiscard]] auto same_shape(const DenseMatrix& other) const -> bool;
    [[nodiscard]] auto all_finite() const -> bool;
    [[nodiscard]] auto shape_str() const -> std::string;

    auto operator==(const DenseMatrix&) const -> bool = default;

  private:
    [[nodiscard]] auto index(int r, int c) const -> std::size_t
    {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_)
               + static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Throws DimensionError with both shapes in the message unless a.cols == b.rows.
auto matmul(const DenseMatrix& a, const DenseMatrix& b) -> DenseMatrix;

auto transpose(const DenseMatrix& a) -> DenseMatrix;

auto operator+(const DenseMatrix& a, const DenseMatrix& b) -> DenseMatrix;
auto operator-(const DenseMatrix& a, const DenseMatrix& b) -> DenseMatrix;
auto operator*(double s, const DenseMatrix& a) -> DenseMatrix;

// Column sums as a 1 x cols matrix (bias gradients, cluster frequencies).
auto col_sums(const DenseMatrix& a) -> DenseMatrix;

auto dot(std::span<const double> a, std::span<const double> b) -> double;
auto squared_norm(std::span<const double> a) -> double;

// Throws DimensionError naming `what` unless shapes match.
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what);

} // namespace pamc
