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

#include "pamc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pamc/clustering.hpp"
#include "pamc/errors.hpp"
#include "pamc/losses.hpp"
#include "pamc/rng.hpp"

namespace pamc {

auto bound_report(const int n, const int c, const double tau) -> BoundReport
{
    if (n < 2 || c < 2) {
        throw ParameterError("bound_report: need n >= 2 and c >= 2, got n="
                             + std::to_string(n) + ", c=" + std::to_string(c));
    }
    BoundReport report;
    report.n = n;
    report.c = c;
    report.tau = tau;
    report.loss_nn_min = std::log(static_cast<double>(n));
    const double threshold = 1.0 + (c - 1) * std::exp(tau);
    report.loss_cc_max = std::log(threshold);
    report.ratio_lower_bound = report.loss_nn_min / report.loss_cc_max;
    report.condition_holds = static_cast<double>(n) > threshold;
    return report;
}

auto boundary_surface(std::span<const int> n_range, std::span<const int> c_range,
                      std::span<const double> tau_list) -> std::vector<SurfaceCell>
{
    if (n_range.empty() || c_range.empty() || tau_list.empty()) {
        throw ParameterError("boundary_surface: all three axes must be nonempty");
    }
    std::vector<SurfaceCell> cells;
    cells.reserve(n_range.size() * c_range.size() * tau_list.size());
    for (const int n : n_range) {
        for (const int c : c_range) {
            for (const double tau : tau_list) {
                const auto report = bound_report(n, c, tau);
                cells.push_back({ n, c, tau, report.ratio_lower_bound });
            }
        }
    }
    return cells;
}

void write_surface_csv(const std::vector<SurfaceCell>& cells, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "n,c,tau,ratio\n";
    char buf[64];
    for (const auto& cell : cells) {
        out << cell.n << ',' << cell.c << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", cell.tau);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", cell.ratio);
        out << buf << '\n';
    }
    if (!out.flush()) {
        throw IoError("write to '" + path + "' failed");
    }
}

auto empirical_bound_audit(const int trials, const int n, const int c, const int d_z,
                           const double tau, const std::uint64_t seed) -> BoundAudit
{
    if (trials < 1) {
        throw ParameterError("empirical_bound_audit: trials must be >= 1");
    }
    if (d_z < 1) {
        throw ParameterError("empirical_bound_audit: d_z must be >= 1");
    }
    if (c > n) {
        throw ParameterError("empirical_bound_audit: balanced labels need c <= n");
    }
    const auto report = bound_report(n, c, tau);

    BoundAudit audit;
    audit.trials = trials;
    audit.condition_holds = report.condition_holds;
    audit.worst_nn_margin = std::numeric_limits<double>::infinity();
    audit.worst_cc_margin = std::numeric_limits<double>::infinity();
    audit.worst_gap_margin = std::numeric_limits<double>::infinity();

    const Rng master(seed);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = i % c;
    }

    constexpr double rounding_slack = 1e-9;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = master.fork(static_cast<std::uint64_t>(trial));
        DenseMatrix z(n, d_z);
        for (std::size_t i = 0; i < z.size(); ++i) {
            z.data()[i] = std::abs(rng.normal());
        }
        auto shuffled = labels;
        rng.shuffle(shuffled);

        const double nn = loss_nn(z, tau);
        const double cc = loss_cc(meta_nodes(z, shuffled, c).values, tau);

        const double nn_margin = nn - report.loss_nn_min;
        const double cc_margin = report.loss_cc_max - cc;
        audit.worst_nn_margin = std::min(audit.worst_nn_margin, nn_margin);
        audit.worst_cc_margin = std::min(audit.worst_cc_margin, cc_margin);
        bool failed = nn_margin < -rounding_slack || cc_margin < -rounding_slack;
        if (report.condition_holds) {
            const double gap = nn - cc;
            audit.worst_gap_margin = std::min(audit.worst_gap_margin, gap);
            failed = failed || gap < -rounding_slack;
        }
        if (failed) {
            ++audit.failures;
        }
    }
    audit.passed = audit.failures == 0;
    return audit;
}

} // namespace pamc
