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

#include "pamc/matrix.hpp"
#include "pamc/tape.hpp"

namespace pamc {

// Builds a scalar (1x1) loss on the given tape out of the variable bound
// to the matrix under test. The same builder is used for the reverse-mode
// sweep and for the value-only finite-difference evaluations.
using ScalarFn = std::function<Var(Tape&, Var)>;

// Central finite differences against one reverse-mode sweep:
// (f(x+eps*e_i) - f(x-eps*e_i)) / (2*eps) compared entrywise with the tape
// gradient. Returns the max over entries of
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
//
// Throws ParameterError if eps <= 0 or f is not scalar, NumericError if f
// evaluates to a non-finite value at any perturbed point.
auto grad_check(const ScalarFn& f, const DenseMatrix& x, double eps = 1e-5) -> double;

} // namespace pamc
