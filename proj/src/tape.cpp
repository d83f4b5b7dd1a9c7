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

#include "pamc/tape.hpp"

#include <utility>

namespace pamc {

auto Tape::at(const Var v) -> Node&
{
    if (!v.valid() || static_cast<std::size_t>(v.idx) >= nodes_.size()) {
        throw ParameterError("Tape: invalid Var handle");
    }
    return nodes_[static_cast<std::size_t>(v.idx)];
}

auto Tape::at(const Var v) const -> const Node&
{
    if (!v.valid() || static_cast<std::size_t>(v.idx) >= nodes_.size()) {
        throw ParameterError("Tape: invalid Var handle");
    }
    return nodes_[static_cast<std::size_t>(v.idx)];
}

auto Tape::input(DenseMatrix value) -> Var
{
    Node node;
    node.value = std::move(value);
    node.requires_grad = true;
    nodes_.push_back(std::move(node));
    return Var { static_cast<int>(nodes_.size()) - 1 };
}

auto Tape::constant(DenseMatrix value) -> Var
{
    Node node;
    node.value = std::move(value);
    node.requires_grad = false;
    nodes_.push_back(std::move(node));
    return Var { static_cast<int>(nodes_.size()) - 1 };
}

auto Tape::make_node(DenseMatrix value, std::vector<Var> parents, BackwardFn fn) -> Var
{
    bool any_grad = false;
    for (const Var p : parents) {
        any_grad = any_grad || at(p).requires_grad;
    }
    Node node;
    node.value = std::move(value);
    node.requires_grad = any_grad;
    if (any_grad) {
        node.backward = std::move(fn);
    }
    nodes_.push_back(std::move(node));
    return Var { static_cast<int>(nodes_.size()) - 1 };
}

auto Tape::matmul(const Var a, const Var b) -> Var
{
    DenseMatrix out = pamc::matmul(value(a), value(b));
    return make_node(std::move(out), { a, b }, [a, b](Tape& t, const Var self) {
        const DenseMatrix& g = t.grad(self);
        if (t.requires_grad(a)) {
            t.add_to_grad(a, pamc::matmul(g, transpose(t.value(b))));
        }
        if (t.requires_grad(b)) {
            t.add_to_grad(b, pamc::matmul(transpose(t.value(a)), g));
        }
    });
}

auto Tape::add(const Var a, const Var b) -> Var
{
    DenseMatrix out = value(a) + value(b);
    return make_node(std::move(out), { a, b }, [a, b](Tape& t, const Var self) {
        const DenseMatrix& g = t.grad(self);
        t.add_to_grad(a, g);
        t.add_to_grad(b, g);
    });
}

auto Tape::sub(const Var a, const Var b) -> Var
{
    DenseMatrix out = value(a) - value(b);
    return make_node(std::move(out), { a, b }, [a, b](Tape& t, const Var self) {
        const DenseMatrix& g = t.grad(self);
        t.add_to_grad(a, g);
        t.add_scaled_to_grad(b, -1.0, g);
    });
}

auto Tape::add_row(const Var a, const Var row) -> Var
{
    const DenseMatrix& m = value(a);
    const DenseMatrix& r = value(row);
    if (r.rows() != 1 || r.cols() != m.cols()) {
        throw DimensionError("add_row: expected 1x" + std::to_string(m.cols())
                             + " row, got " + r.shape_str());
    }
    DenseMatrix out = m;
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            out(i, j) += r(0, j);
        }
    }
    return make_node(std::move(out), { a, row }, [a, row](Tape& t, const Var self) {
        const DenseMatrix& g = t.grad(self);
        t.add_to_grad(a, g);
        if (t.requires_grad(row)) {
            t.add_to_grad(row, col_sums(g));
        }
    });
}

auto Tape::scale(const Var a, const double s) -> Var
{
    DenseMatrix out = s * value(a);
    return make_node(std::move(out), { a }, [a, s](Tape& t, const Var self) {
        t.add_scaled_to_grad(a, s, t.grad(self));
    });
}

auto Tape::relu(const Var a) -> Var
{
    DenseMatrix out = value(a);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.data()[i] < 0.0) {
            out.data()[i] = 0.0;
        }
    }
    return make_node(std::move(out), { a }, [a](Tape& t, const Var self) {
        const DenseMatrix& g = t.grad(self);
        const DenseMatrix& x = t.value(a);
        DenseMatrix gx(g.rows(), g.cols());
        for (std::size_t i = 0; i < gx.size(); ++i) {
            gx.data()[i] = x.data()[i] > 0.0 ? g.data()[i] : 0.0;
        }
        t.add_to_grad(a, gx);
    });
}

auto Tape::sum(const Var a) -> Var
{
    const DenseMatrix& x = value(a);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x.data()[i];
    }
    DenseMatrix out(1, 1, { acc });
    return make_node(std::move(out), { a }, [a](Tape& t, const Var self) {
        const double g = t.grad_scalar(self);
        const DenseMatrix& x = t.value(a);
        DenseMatrix ones(x.rows(), x.cols());
        for (std::size_t i = 0; i < ones.size(); ++i) {
            ones.data()[i] = 1.0;
        }
        t.add_scaled_to_grad(a, g, ones);
    });
}

auto Tape::sum_squares(const Var a) -> Var
{
    const DenseMatrix& x = value(a);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x.data()[i] * x.data()[i];
    }
    DenseMatrix out(1, 1, { acc });
    return make_node(std::move(out), { a }, [a](Tape& t, const Var self) {
        const double g = t.grad_scalar(self);
        t.add_scaled_to_grad(a, 2.0 * g, t.value(a));
    });
}

void Tape::backward(const Var loss)
{
    if (backward_done_) {
        throw ParameterError("Tape::backward called twice on the same tape");
    }
    const Node& loss_node = at(loss);
    if (loss_node.value.rows() != 1 || loss_node.value.cols() != 1) {
        throw ParameterError("Tape::backward: loss must be 1x1, got "
                             + loss_node.value.shape_str());
    }
    backward_done_ = true;
    at(loss).grad = DenseMatrix(1, 1, { 1.0 });
    for (int i = loss.idx; i >= 0; --i) {
        Node& node = nodes_[static_cast<std::size_t>(i)];
        if (node.backward && !node.grad.empty()) {
            node.backward(*this, Var { i });
        }
    }
}

auto Tape::value(const Var v) const -> const DenseMatrix&
{
    return at(v).value;
}

auto Tape::scalar(const Var v) const -> double
{
    const DenseMatrix& m = at(v).value;
    if (m.rows() != 1 || m.cols() != 1) {
        throw ParameterError("Tape::scalar: node is " + m.shape_str() + ", not 1x1");
    }
    return m(0, 0);
}

auto Tape::grad(const Var v) -> const DenseMatrix&
{
    Node& node = at(v);
    if (node.grad.empty()) {
        node.grad = DenseMatrix(node.value.rows(), node.value.cols());
    }
    return node.grad;
}

auto Tape::requires_grad(const Var v) const -> bool
{
    return at(v).requires_grad;
}

void Tape::add_to_grad(const Var v, const DenseMatrix& g)
{
    add_scaled_to_grad(v, 1.0, g);
}

void Tape::add_scaled_to_grad(const Var v, const double s, const DenseMatrix& g)
{
    Node& node = at(v);
    if (!node.requires_grad) {
        return;
    }
    require_same_shape(node.value, g, "add_to_grad");
    if (node.grad.empty()) {
        node.grad = DenseMatrix(node.value.rows(), node.value.cols());
    }
    for (std::size_t i = 0; i < node.grad.size(); ++i) {
        node.grad.data()[i] += s * g.data()[i];
    }
}

auto Tape::grad_scalar(const Var v) -> double
{
    const DenseMatrix& g = grad(v);
    if (g.rows() != 1 || g.cols() != 1) {
        throw ParameterError("grad_scalar: node is " + g.shape_str() + ", not 1x1");
    }
    return g(0, 0);
}

} // namespace pamc
