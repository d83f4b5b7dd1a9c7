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

#include "pamc/matrix.hpp"

#include <Eigen/Core>

#include <cmath>

namespace pamc {

namespace {

using EigenRowMajor =
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using Map = Eigen::Map<EigenRowMajor>;

} // namespace

DenseMatrix::DenseMatrix(const int rows, const int cols)
  : rows_ { rows }, cols_ { cols }
{
    if (rows < 0 || cols < 0) {
        throw DimensionError("DenseMatrix: negative dimensions " + shape_str());
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

DenseMatrix::DenseMatrix(const int rows, const int cols, std::vector<double> values)
  : rows_ { rows }, cols_ { cols }, data_ { std::move(values) }
{
    if (rows < 0 || cols < 0
        || data_.size()
             != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw DimensionError("DenseMatrix: value count " + std::to_string(data_.size())
                             + " does not match shape " + shape_str());
    }
}

auto DenseMatrix::identity(const int n) -> DenseMatrix
{
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

auto DenseMatrix::from_rows(
  const std::initializer_list<std::initializer_list<double>> rows) -> DenseMatrix
{
    const int n_rows = static_cast<int>(rows.size());
    const int n_cols = n_rows > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    DenseMatrix m(n_rows, n_cols);
    int r = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_cols) {
            throw DimensionError("from_rows: ragged row " + std::to_string(r));
        }
        int c = 0;
        for (const double v : row) {
            m(r, c++) = v;
        }
        ++r;
    }
    return m;
}

auto DenseMatrix::row(const int r) -> std::span<double>
{
    return { data_.data() + index(r, 0), static_cast<std::size_t>(cols_) };
}

auto DenseMatrix::row(const int r) const -> std::span<const double>
{
    return { data_.data() + index(r, 0), static_cast<std::size_t>(cols_) };
}

auto DenseMatrix::same_shape(const DenseMatrix& other) const -> bool
{
    return rows_ == other.rows_ && cols_ == other.cols_;
}

auto DenseMatrix::all_finite() const -> bool
{
    for (const double v : data_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

auto DenseMatrix::shape_str() const -> std::string
{
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

auto matmul(const DenseMatrix& a, const DenseMatrix& b) -> DenseMatrix
{
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions differ: " + a.shape_str()
                             + " times " + b.shape_str());
    }
    DenseMatrix out(a.rows(), b.cols());
    if (out.size() == 0 || a.cols() == 0) {
        return out;
    }
    Map(out.data(), out.rows(), out.cols()).noalias() =
      ConstMap(a.data(), a.rows(), a.cols()) * ConstMap(b.data(), b.rows(), b.cols());
    return out;
}

auto transpose(const DenseMatrix& a) -> DenseMatrix
{
    DenseMatrix out(a.cols(), a.rows());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            out(c, r) = a(r, c);
        }
    }
    return out;
}

auto operator+(const DenseMatrix& a, const DenseMatrix& b) -> DenseMatrix
{
    require_same_shape(a, b, "operator+");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] += b.data()[i];
    }
    return out;
}

auto operator-(const DenseMatrix& a, const DenseMatrix& b) -> DenseMatrix
{
    require_same_shape(a, b, "operator-");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] -= b.data()[i];
    }
    return out;
}

auto operator*(const double s, const DenseMatrix& a) -> DenseMatrix
{
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] *= s;
    }
    return out;
}

auto col_sums(const DenseMatrix& a) -> DenseMatrix
{
    DenseMatrix out(1, a.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            out(0, c) += a(r, c);
        }
    }
    return out;
}

auto dot(const std::span<const double> a, const std::span<const double> b) -> double
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

auto squared_norm(const std::span<const double> a) -> double
{
    return dot(a, a);
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what)
{
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_str()
                             + " vs " + b.shape_str());
    }
}

} // namespace pamc
