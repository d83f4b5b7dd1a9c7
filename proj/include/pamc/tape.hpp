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

#include <functional>
#include <vector>

#include "pamc/matrix.hpp"

namespace pamc {

class Tape;

// Handle into a Tape; only meaningful together with the tape that created it.
struct Var {
    int idx = -1;
    [[nodiscard]] auto valid() const -> bool { return idx >= 0; }
};

// Reverse-mode tape over whole matrices. Nodes are appended in forward
// order, so walking the node vector backwards is a valid reverse
// topological order. Domain-specific fused operations (losses, soft
// assignments, meta-nodes) are built on make_node() from their own
// modules; the tape itself only knows generic dense ops.
//
// backward() may be called once per tape; calling it again throws
// (gradients do not silently accumulate across sweeps).
class Tape {
  public:
    // Receives the tape and the node's own handle; reads grad(self) and
    // accumulates into the parents via add_to_grad()/add_scaled_to_grad().
    using BackwardFn = std::function<void(Tape&, Var)>;

    // Differentiable leaf.
    auto input(DenseMatrix value) -> Var;
    // Non-differentiable leaf.
    auto constant(DenseMatrix value) -> Var;

    auto matmul(Var a, Var b) -> Var;
    auto add(Var a, Var b) -> Var;
    auto sub(Var a, Var b) -> Var;
    // Broadcast a 1 x cols row over every row of a (bias addition).
    auto add_row(Var a, Var row) -> Var;
    auto scale(Var a, double s) -> Var;
    auto relu(Var a) -> Var;
    // Sum of all entries as a 1x1 node.
    auto sum(Var a) -> Var;
    // Sum of squared entries as a 1x1 node.
    auto sum_squares(Var a) -> Var;

    auto make_node(DenseMatrix value, std::vector<Var> parents, BackwardFn fn) -> Var;

    // Reverse sweep from a scalar (1x1) loss. Throws ParameterError for a
    // non-scalar loss and if called a second time on the same tape.
    void backward(Var loss);

    [[nodiscard]] auto value(Var v) const -> const DenseMatrix&;
    [[nodiscard]] auto scalar(Var v) const -> double;

    // Gradient of the backward() loss w.r.t. v; zeros if v never received
    // any contribution (e.g. the loss does not depend on it).
    auto grad(Var v) -> const DenseMatrix&;
    [[nodiscard]] auto requires_grad(Var v) const -> bool;

    void add_to_grad(Var v, const DenseMatrix& g);
    void add_scaled_to_grad(Var v, double s, const DenseMatrix& g);
    // Upstream gradient of a 1x1 node as a plain double.
    auto grad_scalar(Var v) -> double;

    [[nodiscard]] auto num_nodes() const -> std::size_t { return nodes_.size(); }

  private:
    struct Node {
        DenseMatrix value;
        DenseMatrix grad; // empty until first accumulation
        bool requires_grad = false;
        BackwardFn backward;
    };

    auto at(Var v) -> Node&;
    [[nodiscard]] auto at(Var v) const -> const Node&;

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

} // namespace pamc
