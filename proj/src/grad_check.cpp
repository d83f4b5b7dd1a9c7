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

#include "pamc/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace pamc {

auto grad_check(const ScalarFn& f, const DenseMatrix& x, const double eps) -> double
{
    if (eps <= 0.0) {
        throw ParameterError("grad_check: eps must be positive");
    }

    Tape tape;
    const Var vx = tape.input(x);
    const Var loss = f(tape, vx);
    if (tape.value(loss).rows() != 1 || tape.value(loss).cols() != 1) {
        throw ParameterError("grad_check: f must produce a 1x1 loss, got "
                             + tape.value(loss).shape_str());
    }
    tape.backward(loss);
    const DenseMatrix analytic = tape.grad(vx);

    const auto evaluate = [&f](const DenseMatrix& point) -> double {
        Tape t;
        const Var v = t.input(point);
        const double val = t.scalar(f(t, v));
        if (!std::isfinite(val)) {
            throw NumericError("grad_check: non-finite value at perturbed point");
        }
        return val;
    };

    DenseMatrix probe = x;
    double max_rel_error = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double original = probe.data()[i];
        probe.data()[i] = original + eps;
        const double f_plus = evaluate(probe);
        probe.data()[i] = original - eps;
        const double f_minus = evaluate(probe);
        probe.data()[i] = original;

        const double numeric = (f_plus - f_minus) / (2.0 * eps);
        const double a = analytic.data()[i];
        const double denom = std::max({ std::abs(a), std::abs(numeric), 1e-8 });
        max_rel_error = std::max(max_rel_error, std::abs(a - numeric) / denom);
    }
    return max_rel_error;
}

} // namespace pamc
