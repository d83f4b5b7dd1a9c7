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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pamc/errors.hpp"
#include "pamc/theory.hpp"

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path()
               / ("pamc_theory_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    [[nodiscard]] auto file(const std::string& name) const -> std::string
    {
        return (path / name).string();
    }
};

} // namespace

TEST_CASE("bound report closed-form values")
{
    const auto cite = pamc::bound_report(3327, 6, 1.0);
    CHECK(cite.loss_nn_min == doctest::Approx(std::log(3327.0)).epsilon(1e-15));
    CHECK(cite.loss_cc_max
          == doctest::Approx(std::log(1.0 + 5.0 * std::exp(1.0))).epsilon(1e-15));
    CHECK(cite.condition_holds);
    CHECK(cite.ratio_lower_bound > 1.0);

    const auto cap = pamc::bound_report(100, 4, 0.5);
    CHECK(cap.loss_cc_max == doctest::Approx(1.7828).epsilon(1e-4));
}

TEST_CASE("the separation condition is strict at the boundary")
{
    // c=2, tau=0 puts the threshold exactly at 2.
    CHECK_FALSE(pamc::bound_report(2, 2, 0.0).condition_holds);
    CHECK(pamc::bound_report(3, 2, 0.0).condition_holds);
    CHECK(pamc::bound_report(2, 2, 0.0).ratio_lower_bound
          == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("the six published dataset shapes all satisfy the condition")
{
    const std::vector<std::tuple<int, int, double>> rows {
        { 9298, 10, 0.5 },  // USPS
        { 10299, 6, 1.5 },  // HHAR
        { 10000, 4, 0.25 }, // REUT
        { 3025, 3, 0.5 },   // ACM
        { 3327, 6, 1.0 },   // CITE
        { 4057, 4, 0.5 },   // DBLP
    };
    for (const auto& [n, c, tau] : rows) {
        const auto report = pamc::bound_report(n, c, tau);
        CHECK(report.condition_holds);
        CHECK(report.ratio_lower_bound > 1.0);
    }
}

TEST_CASE("bound report rejects degenerate sizes")
{
    CHECK_THROWS_AS((void)pamc::bound_report(1, 2, 0.5), pamc::ParameterError);
    CHECK_THROWS_AS((void)pamc::bound_report(10, 1, 0.5), pamc::ParameterError);
}

TEST_CASE("boundary surface covers the grid and tracks the condition")
{
    const std::vector<int> ns { 2, 3, 20, 3327 };
    const std::vector<int> cs { 2, 3, 6 };
    const std::vector<double> taus { 0.0, 0.5, 1.0 };
    const auto cells = pamc::boundary_surface(ns, cs, taus);
    REQUIRE(cells.size() == ns.size() * cs.size() * taus.size());

    bool saw_cite = false;
    for (const auto& cell : cells) {
        const double threshold = 1.0 + (cell.c - 1) * std::exp(cell.tau);
        if (static_cast<double>(cell.n) <= threshold) {
            CHECK(cell.ratio <= 1.0 + 1e-12);
        } else {
            CHECK(cell.ratio > 1.0);
        }
        if (cell.n == 3327 && cell.c == 6 && cell.tau == 1.0) {
            saw_cite = true;
            CHECK(cell.ratio > 1.0);
        }
    }
    CHECK(saw_cite);
}

TEST_CASE("ratio decreases along c and tau for fixed n")
{
    const std::vector<int> ns { 500 };
    const std::vector<int> cs { 2, 3, 4, 8 };
    const std::vector<double> taus { 0.1, 0.5, 1.0, 2.0 };
    const auto cells = pamc::boundary_surface(ns, cs, taus);
    // Cells are laid out with tau fastest, then c.
    const auto at = [&](const std::size_t ci, const std::size_t ti) {
        return cells[ci * taus.size() + ti].ratio;
    };
    for (std::size_t ci = 0; ci + 1 < cs.size(); ++ci) {
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            CHECK(at(ci + 1, ti) < at(ci, ti));
        }
    }
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        for (std::size_t ti = 0; ti + 1 < taus.size(); ++ti) {
            CHECK(at(ci, ti + 1) < at(ci, ti));
        }
    }
}

TEST_CASE("boundary surface rejects empty axes")
{
    const std::vector<int> some { 2 };
    const std::vector<double> tau { 0.5 };
    CHECK_THROWS_AS((void)pamc::boundary_surface({}, some, tau), pamc::ParameterError);
    CHECK_THROWS_AS((void)pamc::boundary_surface(some, {}, tau), pamc::ParameterError);
    CHECK_THROWS_AS((void)pamc::boundary_surface(some, some, {}), pamc::ParameterError);
}

TEST_CASE("surface csv uses the pinned header and one line per cell")
{
    TempDir dir;
    const std::vector<int> ns { 10, 20 };
    const std::vector<int> cs { 2 };
    const std::vector<double> taus { 0.5 };
    const auto cells = pamc::boundary_surface(ns, cs, taus);
    const auto path = dir.file("surface.csv");
    pamc::write_surface_csv(cells, path);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "n,c,tau,ratio");
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        ++rows;
        std::stringstream ss(line);
        std::string field;
        int fields = 0;
        while (std::getline(ss, field, ',')) {
            ++fields;
        }
        CHECK(fields == 4);
    }
    CHECK(rows == static_cast<int>(cells.size()));

    std::ifstream reread(path);
    std::getline(reread, line); // header
    std::getline(reread, line);
    CHECK(line.rfind("10,2,0.5,", 0) == 0);
}

TEST_CASE("empirical audit passes with comfortable margins")
{
    const auto audit = pamc::empirical_bound_audit(1000, 64, 4, 8, 0.5, 2026);
    CHECK(audit.trials == 1000);
    CHECK(audit.failures == 0);
    CHECK(audit.passed);
    CHECK(audit.condition_holds);
    CHECK(audit.worst_nn_margin >= 0.0);
    CHECK(audit.worst_cc_margin >= 0.0);
    CHECK(audit.worst_gap_margin > 0.0);
}

TEST_CASE("empirical audit skips the gap check when the condition fails")
{
    // n=2, c=2, tau=2: threshold is 1+e^2 > 2.
    const auto audit = pamc::empirical_bound_audit(50, 2, 2, 4, 2.0, 7);
    CHECK_FALSE(audit.condition_holds);
    CHECK(audit.passed);
    CHECK(std::isinf(audit.worst_gap_margin));
}

TEST_CASE("empirical audit is deterministic per seed")
{
    const auto a = pamc::empirical_bound_audit(50, 16, 3, 4, 0.8, 11);
    const auto b = pamc::empirical_bound_audit(50, 16, 3, 4, 0.8, 11);
    CHECK(a.worst_nn_margin == b.worst_nn_margin);
    CHECK(a.worst_cc_margin == b.worst_cc_margin);
    CHECK(a.worst_gap_margin == b.worst_gap_margin);
    const auto c = pamc::empirical_bound_audit(50, 16, 3, 4, 0.8, 12);
    CHECK(a.worst_nn_margin != c.worst_nn_margin);
}

TEST_CASE("empirical audit validates its arguments")
{
    CHECK_THROWS_AS((void)pamc::empirical_bound_audit(0, 16, 3, 4, 0.5, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS((void)pamc::empirical_bound_audit(1, 16, 3, 0, 0.5, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS((void)pamc::empirical_bound_audit(1, 4, 6, 4, 0.5, 1),
                    pamc::ParameterError);
}
