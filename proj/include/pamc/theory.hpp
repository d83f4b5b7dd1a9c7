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
#include <span>
#include <string>
#include <vector>

namespace pamc {

// Closed-form extremes of the two log-sum terms. For embeddings with
// non-negative entries the cosine lies in [0, 1], so the node-level term
// is at least log(n) and the cluster-level term at most
// log(1 + (c-1) e^tau). The separation condition n > 1 + (c-1) e^tau makes
// the node-level floor exceed the cluster-level ceiling.
struct BoundReport {
    int n = 0;
    int c = 0;
    double tau = 0.0;
    double loss_nn_min = 0.0;      // log(n)
    double loss_cc_max = 0.0;      // log(1 + (c-1) e^tau)
    double ratio_lower_bound = 0.0; // loss_nn_min / loss_cc_max
    bool condition_holds = false;  // n > 1 + (c-1) e^tau, strict
};

auto bound_report(int n, int c, double tau) -> BoundReport;

struct SurfaceCell {
    int n = 0;
    int c = 0;
    double tau = 0.0;
    double ratio = 0.0;
};

// Dense grid of ratio_lower_bound over the cartesian product of the three
// axes, n varying slowest. Cells with ratio > 1 are exactly the cells
// where the separation condition holds (up to the boundary itself).
auto boundary_surface(std::span<const int> n_range, std::span<const int> c_range,
                      std::span<const double> tau_list) -> std::vector<SurfaceCell>;

// CSV with header "n,c,tau,ratio".
void write_surface_csv(const std::vector<SurfaceCell>& cells, const std::string& path);

struct BoundAudit {
    int trials = 0;
    int failures = 0;
    double worst_nn_margin = 0.0;  // min over trials of loss_nn - log(n)
    double worst_cc_margin = 0.0;  // min over trials of loss_cc_max - loss_cc
    double worst_gap_margin = 0.0; // min of loss_nn - loss_cc; +inf if never gated in
    bool condition_holds = false;
    bool passed = false;
};

// Randomized audit of the bounds: each trial draws entrywise |normal|
// embeddings and shuffled balanced labels, then checks both extremes plus
// the ordering loss_nn > loss_cc (the latter only when the separation
// condition holds). Margins below -1e-9 count as counterexamples; the
// slack covers 64-bit rounding only.
auto empirical_bound_audit(int trials, int n, int c, int d_z, double tau,
                           std::uint64_t seed) -> BoundAudit;

} // namespace pamc
