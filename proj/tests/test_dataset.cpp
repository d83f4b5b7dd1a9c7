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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "pamc/dataset.hpp"
#include "pamc/rng.hpp"

using pamc::Dataset;
using pamc::DenseMatrix;

namespace {

// Scratch directory, fresh per test binary run.
struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path()
               / ("pamc_dataset_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    [[nodiscard]] auto file(const std::string& name) const -> std::string
    {
        return (path / name).string();
    }
};

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    out << content;
}

} // namespace

TEST_CASE("features CSV parses into a row-major matrix")
{
    TempDir dir;
    const auto path = dir.file("f.csv");
    write_file(path, "1,2\n3,4\n5,6\n");
    const DenseMatrix m = pamc::load_features_csv(path);
    CHECK(m == DenseMatrix::from_rows({ { 1.0, 2.0 }, { 3.0, 4.0 }, { 5.0, 6.0 } }));
}

TEST_CASE("ragged CSV rows report the offending line")
{
    TempDir dir;
    const auto path = dir.file("ragged.csv");
    write_file(path, "1,2\n3,4,5\n");
    try {
        pamc::load_features_csv(path);
        FAIL("expected IoError");
    } catch (const pamc::IoError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("malformed numbers report the offending line")
{
    TempDir dir;
    const auto path = dir.file("bad.csv");
    write_file(path, "1,2\n3,oops\n");
    try {
        pamc::load_features_csv(path);
        FAIL("expected IoError");
    } catch (const pamc::IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }
}

TEST_CASE("missing file names the path")
{
    try {
        pamc::load_features_csv("/nonexistent/feat.csv");
        FAIL("expected IoError");
    } catch (const pamc::IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/feat.csv") != std::string::npos);
    }
}

TEST_CASE("features round-trip bit-exactly through the CSV writer")
{
    TempDir dir;
    pamc::Rng rng(41);
    DenseMatrix m(7, 5);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.normal() * std::pow(10.0, rng.uniform(-8.0, 8.0));
    }
    const auto path = dir.file("roundtrip.csv");
    pamc::save_features_csv(path, m);
    CHECK(pamc::load_features_csv(path) == m);
}

TEST_CASE("labels load and reject negatives")
{
    TempDir dir;
    const auto path = dir.file("labels.txt");
    write_file(path, "0\n1\n1\n0\n");
    CHECK(pamc::load_labels(path) == std::vector<int> { 0, 1, 1, 0 });
    write_file(path, "0\n-2\n");
    CHECK_THROWS_AS(pamc::load_labels(path), pamc::IoError);
}

TEST_CASE("edge file parses tab-separated pairs and validates range")
{
    TempDir dir;
    const auto path = dir.file("edges.tsv");
    write_file(path, "0\t1\n1\t2\n");
    const auto edges = pamc::load_edges(path, 3);
    CHECK(edges.size() == 2);
    CHECK(edges[0] == pamc::SparseGraph::Edge { 0, 1 });

    write_file(path, "0\t9\n");
    try {
        pamc::load_edges(path, 3);
        FAIL("expected ParameterError");
    } catch (const pamc::ParameterError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }

    write_file(path, "0 1\n");
    CHECK_THROWS_AS(pamc::load_edges(path, 3), pamc::IoError);
}

TEST_CASE("load_dataset wires features, edges and labels together")
{
    TempDir dir;
    write_file(dir.file("f.csv"), "0,0\n0,1\n5,5\n5,6\n");
    write_file(dir.file("e.tsv"), "0\t1\n2\t3\n1\t0\n");
    write_file(dir.file("l.txt"), "0\n0\n1\n1\n");
    const Dataset ds = pamc::load_dataset(dir.file("f.csv"), dir.file("e.tsv"),
                                          dir.file("l.txt"), std::nullopt);
    CHECK(ds.num_nodes() == 4);
    CHECK(ds.graph->num_edges() == 2); // reversed duplicate collapsed
    CHECK(ds.num_classes() == 2);
}

TEST_CASE("load_dataset builds a KNN graph when asked")
{
    TempDir dir;
    write_file(dir.file("f.csv"), "0\n1\n3\n");
    const Dataset ds = pamc::load_dataset(dir.file("f.csv"), std::nullopt,
                                          std::nullopt, 1);
    CHECK(ds.graph->num_edges() == 2);
    CHECK(!ds.has_labels());
}

TEST_CASE("load_dataset demands exactly one graph source")
{
    TempDir dir;
    write_file(dir.file("f.csv"), "0\n1\n");
    write_file(dir.file("e.tsv"), "0\t1\n");
    CHECK_THROWS_AS(pamc::load_dataset(dir.file("f.csv"), dir.file("e.tsv"),
                                       std::nullopt, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS(pamc::load_dataset(dir.file("f.csv"), std::nullopt,
                                       std::nullopt, std::nullopt),
                    pamc::ParameterError);
}

TEST_CASE("load_dataset validates label count and contiguity")
{
    TempDir dir;
    write_file(dir.file("f.csv"), "0\n1\n2\n");
    write_file(dir.file("e.tsv"), "0\t1\n");
    write_file(dir.file("short.txt"), "0\n1\n");
    CHECK_THROWS_AS(pamc::load_dataset(dir.file("f.csv"), dir.file("e.tsv"),
                                       dir.file("short.txt"), std::nullopt),
                    pamc::ParameterError);
    write_file(dir.file("gap.txt"), "0\n2\n0\n");
    CHECK_THROWS_AS(pamc::load_dataset(dir.file("f.csv"), dir.file("e.tsv"),
                                       dir.file("gap.txt"), std::nullopt),
                    pamc::ParameterError);
}

TEST_CASE("sbm with p_in=1, p_out=0 gives disjoint cliques")
{
    const Dataset ds = pamc::generate_sbm(4, 2, 1.0, 0.0, 4, 1.0, 0.1, 7);
    CHECK(ds.labels == std::vector<int> { 0, 0, 1, 1 });
    CHECK(ds.graph->num_edges() == 2);
    CHECK(ds.graph->edges()[0] == pamc::SparseGraph::Edge { 0, 1 });
    CHECK(ds.graph->edges()[1] == pamc::SparseGraph::Edge { 2, 3 });
}

TEST_CASE("sbm with zero noise gives identical within-block features")
{
    const Dataset ds = pamc::generate_sbm(6, 3, 0.5, 0.1, 5, 4.0, 0.0, 11);
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            if (ds.labels[static_cast<std::size_t>(i)]
                == ds.labels[static_cast<std::size_t>(j)]) {
                CHECK(ds.features.row(i)[0] == ds.features.row(j)[0]);
                CHECK(ds.features.row(i)[4] == ds.features.row(j)[4]);
            }
        }
    }
}

TEST_CASE("sbm centers are pairwise separated by exactly the requested distance")
{
    const double sep = 6.0;
    const Dataset ds = pamc::generate_sbm(3, 3, 0.0, 0.0, 3, sep, 0.0, 1);
    // One node per block, zero noise: features are the centers themselves.
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            double dist_sq = 0.0;
            for (int d = 0; d < 3; ++d) {
                const double diff = ds.features(a, d) - ds.features(b, d);
                dist_sq += diff * diff;
            }
            CHECK(std::sqrt(dist_sq) == doctest::Approx(sep).epsilon(1e-12));
        }
    }
}

TEST_CASE("sbm block sizes are near-equal with extras on low blocks")
{
    const Dataset ds = pamc::generate_sbm(8, 3, 0.2, 0.0, 3, 1.0, 0.0, 2);
    std::vector<int> counts(3, 0);
    for (const int l : ds.labels) {
        ++counts[static_cast<std::size_t>(l)];
    }
    CHECK(counts == std::vector<int> { 3, 3, 2 });
}

TEST_CASE("sbm is deterministic under a fixed seed")
{
    const Dataset a = pamc::generate_sbm(40, 4, 0.3, 0.05, 6, 5.0, 1.0, 99);
    const Dataset b = pamc::generate_sbm(40, 4, 0.3, 0.05, 6, 5.0, 1.0, 99);
    CHECK(a.features == b.features);
    CHECK(a.graph->edges() == b.graph->edges());
    CHECK(a.labels == b.labels);
    const Dataset c = pamc::generate_sbm(40, 4, 0.3, 0.05, 6, 5.0, 1.0, 100);
    CHECK(a.features != c.features);
}

TEST_CASE("sbm parameter validation")
{
    CHECK_THROWS_AS(pamc::generate_sbm(10, 1, 0.5, 0.1, 4, 1.0, 1.0, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS(pamc::generate_sbm(2, 3, 0.5, 0.1, 4, 1.0, 1.0, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS(pamc::generate_sbm(10, 2, 0.1, 0.5, 4, 1.0, 1.0, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS(pamc::generate_sbm(10, 2, 1.5, 0.1, 4, 1.0, 1.0, 1),
                    pamc::ParameterError);
    CHECK_THROWS_AS(pamc::generate_sbm(10, 4, 0.5, 0.1, 3, 1.0, 1.0, 1),
                    pamc::ParameterError);
}

TEST_CASE("labels and edges round-trip through their writers")
{
    TempDir dir;
    const std::vector<int> labels { 2, 0, 1, 1, 0 };
    pamc::save_labels(dir.file("l.txt"), labels);
    CHECK(pamc::load_labels(dir.file("l.txt")) == labels);

    const std::vector<pamc::SparseGraph::Edge> edges { { 0, 1 }, { 1, 4 }, { 2, 3 } };
    pamc::save_edges(dir.file("e.tsv"), edges);
    CHECK(pamc::load_edges(dir.file("e.tsv"), 5) == edges);
}
