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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

// End-to-end subprocess tests against the installed binary (path injected
// by the build). Each workspace lives under the system temp directory.

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

auto read_file(const fs::path& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

auto run_cli(const std::string& args) -> CliResult
{
    static int counter = 0;
    const auto dir = fs::temp_directory_path() / "pamc_cli_io";
    fs::create_directories(dir);
    const auto out_path = dir / ("out" + std::to_string(++counter) + ".txt");
    const auto err_path = dir / ("err" + std::to_string(counter) + ".txt");
    const std::string cmd = std::string(PAMC_BIN) + " " + args + " >" + out_path.string()
                            + " 2>" + err_path.string();
    const int raw = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

auto workdir(const std::string& name) -> fs::path
{
    const auto dir = fs::temp_directory_path() / ("pamc_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

auto count_lines(const fs::path& path) -> int
{
    std::ifstream in(path);
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lines;
    }
    return lines;
}

// Shared small dataset + checkpoint, built once: 60 nodes, 3 blocks,
// 16 features, 2 pretraining epochs.
auto fixture_dir() -> fs::path
{
    static std::once_flag once;
    static fs::path dir;
    std::call_once(once, [] {
        dir = workdir("fixture");
        auto gen = run_cli("gen-data --n 60 --c 3 --out_dir " + (dir / "data").string());
        REQUIRE(gen.exit_code == 0);
        auto pre = run_cli("pretrain --features " + (dir / "data/features.csv").string()
                           + " --pretrain_epochs 2 --batch_size 32 --out_dir "
                           + (dir / "pre").string());
        REQUIRE(pre.exit_code == 0);
    });
    return dir;
}

auto fixture_train_args() -> std::string
{
    const auto fix = fixture_dir();
    return "train --features " + (fix / "data/features.csv").string() + " --edges "
           + (fix / "data/edges.csv").string() + " --labels "
           + (fix / "data/labels.csv").string() + " --clusters 3 --checkpoint "
           + (fix / "pre/ae.ckpt").string();
}

} // namespace

TEST_CASE("gen-data writes the four artifacts with the preset shape")
{
    const auto dir = workdir("gen_default");
    const auto result = run_cli("gen-data --out_dir " + dir.string());
    CHECK(result.exit_code == 0);
    CHECK(count_lines(dir / "features.csv") == 300);
    CHECK(count_lines(dir / "labels.csv") == 300);
    CHECK(count_lines(dir / "edges.csv") > 0);

    // 16 feature columns -> 15 commas per row.
    std::ifstream feat(dir / "features.csv");
    std::string first;
    std::getline(feat, first);
    CHECK(std::count(first.begin(), first.end(), ',') == 15);

    const auto manifest = read_file(dir / "manifest.txt");
    CHECK(manifest.find("n = 300\n") != std::string::npos);
    CHECK(manifest.find("c = 3\n") != std::string::npos);
    CHECK(manifest.find("p_in = 0.2\n") != std::string::npos);
    CHECK(manifest.find("seed = 0\n") != std::string::npos);

    std::ifstream labels(dir / "labels.csv");
    std::vector<int> seen(3, 0);
    int label = 0;
    while (labels >> label) {
        REQUIRE(label >= 0);
        REQUIRE(label < 3);
        ++seen[label];
    }
    CHECK(seen[0] == 100);
    CHECK(seen[1] == 100);
    CHECK(seen[2] == 100);
}

TEST_CASE("gen-data with p_in=1 p_out=0 emits only intra-block edges")
{
    const auto dir = workdir("gen_blocks");
    const auto result =
      run_cli("gen-data --n 30 --c 3 --p_in 1 --p_out 0 --out_dir " + dir.string());
    CHECK(result.exit_code == 0);

    std::vector<int> labels;
    {
        std::ifstream in(dir / "labels.csv");
        int value = 0;
        while (in >> value) {
            labels.push_back(value);
        }
    }
    REQUIRE(labels.size() == 30);

    std::ifstream edges(dir / "edges.csv");
    int a = 0;
    int b = 0;
    int edge_count = 0;
    while (edges >> a >> b) {
        ++edge_count;
        REQUIRE(labels[a] == labels[b]);
    }
    CHECK(edge_count == 3 * (10 * 9) / 2); // three complete blocks of ten
}

TEST_CASE("gen-data manifest round-trips to identical files")
{
    const auto dir = workdir("gen_manifest");
    const auto first = run_cli("gen-data --n 40 --c 2 --p_in 0.5 --p_out 0.05 --seed 7 "
                               "--out_dir "
                               + (dir / "a").string());
    REQUIRE(first.exit_code == 0);
    const auto second = run_cli("gen-data --manifest " + (dir / "a/manifest.txt").string()
                                + " --out_dir " + (dir / "b").string());
    REQUIRE(second.exit_code == 0);
    for (const auto* name : {"features.csv", "edges.csv", "labels.csv", "manifest.txt"}) {
        CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));
    }
    CHECK_FALSE(read_file(dir / "a/features.csv").empty());
}

TEST_CASE("gen-data rejects unknown presets and unwritable out_dir")
{
    const auto dir = workdir("gen_bad");
    const auto preset = run_cli("gen-data --preset mnist --out_dir " + dir.string());
    CHECK(preset.exit_code == 2);
    CHECK(preset.err.find("mnist") != std::string::npos);

    std::ofstream blocker(dir / "file.txt");
    blocker << "x";
    blocker.close();
    const auto unwritable =
      run_cli("gen-data --n 10 --c 2 --out_dir " + (dir / "file.txt" / "sub").string());
    CHECK(unwritable.exit_code == 2);
}

TEST_CASE("pretrain writes a checkpoint and loss curve, deterministically")
{
    const auto fix = fixture_dir();
    const auto dir = workdir("pretrain_det");
    const std::string base = "pretrain --features " + (fix / "data/features.csv").string()
                             + " --pretrain_epochs 2 --batch_size 32 --out_dir ";
    const auto rerun = run_cli(base + dir.string());
    CHECK(rerun.exit_code == 0);

    const auto curve = read_file(dir / "pretrain_loss.csv");
    CHECK(curve.rfind("epoch,loss\n", 0) == 0);
    CHECK(count_lines(dir / "pretrain_loss.csv") == 3);

    // Same seed, fresh directory: byte-identical checkpoint.
    const auto fixture_ckpt = read_file(fix / "pre/ae.ckpt");
    CHECK(read_file(dir / "ae.ckpt") == fixture_ckpt);
    CHECK_FALSE(fixture_ckpt.empty());
}

TEST_CASE("pretrain exits 2 when features are missing")
{
    const auto no_flag = run_cli("pretrain");
    CHECK(no_flag.exit_code == 2);
    CHECK(no_flag.err.find("--features is required") != std::string::npos);

    const auto no_file = run_cli("pretrain --features /nonexistent/f.csv");
    CHECK(no_file.exit_code == 2);
    CHECK(no_file.err.find("/nonexistent/f.csv") != std::string::npos);
}

TEST_CASE("train emits metrics JSON and the full artifact set")
{
    const auto dir = workdir("train_full");
    const auto result = run_cli(fixture_train_args() + " --epochs 12 --out_dir " + dir.string());
    REQUIRE(result.exit_code == 0);

    const auto summary = nlohmann::json::parse(result.out);
    for (const auto* key : {"acc", "nmi", "ari", "f1", "epochs", "seconds"}) {
        REQUIRE(summary.contains(key));
    }
    CHECK(summary["acc"].get<double>() >= 0.8);
    CHECK(summary["nmi"].get<double>() > 0.0);
    CHECK(summary["epochs"].get<int>() == 12);
    CHECK(summary["seconds"].get<double>() > 0.0);

    CHECK(count_lines(dir / "curve.csv") == 13); // header + one row per epoch
    CHECK(count_lines(dir / "embeddings.csv") == 60);
    CHECK(count_lines(dir / "pred_labels.csv") == 60);
    CHECK_FALSE(read_file(dir / "model.ckpt").empty());
    CHECK(read_file(dir / "curve.csv").rfind("epoch,total,positive,proxy,kl,acc,nmi,ari,f1\n", 0)
          == 0);
}

TEST_CASE("train without labels reports null metrics and still completes")
{
    const auto fix = fixture_dir();
    const auto dir = workdir("train_unlabeled");
    const auto result = run_cli(
      "train --features " + (fix / "data/features.csv").string() + " --edges "
      + (fix / "data/edges.csv").string() + " --clusters 3 --epochs 5 --pretrain_epochs 1 "
      + "--batch_size 32 --out_dir " + dir.string());
    REQUIRE(result.exit_code == 0);

    const auto summary = nlohmann::json::parse(result.out);
    CHECK(summary["acc"].is_null());
    CHECK(summary["nmi"].is_null());
    CHECK(summary["ari"].is_null());
    CHECK(summary["f1"].is_null());
    CHECK(summary["epochs"].get<int>() == 5);

    // Score columns are empty in the unlabeled curve.
    std::ifstream curve(dir / "curve.csv");
    std::string line;
    std::getline(curve, line); // header
    std::getline(curve, line);
    CHECK(line.substr(line.size() - 4) == ",,,,");
}

TEST_CASE("train reruns with the same seed are byte-identical")
{
    const auto dir = workdir("train_det");
    const auto first =
      run_cli(fixture_train_args() + " --epochs 8 --out_dir " + (dir / "a").string());
    const auto second =
      run_cli(fixture_train_args() + " --epochs 8 --out_dir " + (dir / "b").string());
    REQUIRE(first.exit_code == 0);
    REQUIRE(second.exit_code == 0);
    CHECK(read_file(dir / "a/curve.csv") == read_file(dir / "b/curve.csv"));
    CHECK(read_file(dir / "a/embeddings.csv") == read_file(dir / "b/embeddings.csv"));
    CHECK(read_file(dir / "a/pred_labels.csv") == read_file(dir / "b/pred_labels.csv"));
    CHECK_FALSE(read_file(dir / "a/curve.csv").empty());
}

TEST_CASE("train rejects a checkpoint with mismatched input dimension")
{
    const auto fix = fixture_dir();
    const auto dir = workdir("train_dim");
    const auto gen =
      run_cli("gen-data --n 20 --c 2 --feature_dim 8 --out_dir " + (dir / "data").string());
    REQUIRE(gen.exit_code == 0);
    const auto result = run_cli("train --features " + (dir / "data/features.csv").string()
                                + " --edges " + (dir / "data/edges.csv").string()
                                + " --clusters 2 --checkpoint " + (fix / "pre/ae.ckpt").string()
                                + " --out_dir " + dir.string());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("input dim") != std::string::npos);
}

TEST_CASE("config file fills in values and explicit flags override them")
{
    const auto dir = workdir("config_merge");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "alpha = 2.5\ntau = 0.7\nepochs = 3\n";
    }
    const auto result = run_cli(fixture_train_args() + " --config " + (dir / "run.cfg").string()
                                + " --alpha 3 --out_dir " + dir.string());
    REQUIRE(result.exit_code == 0);

    // Effective config echo: flag wins for alpha, file value kept for tau.
    CHECK(result.err.find("alpha = 3\n") != std::string::npos);
    CHECK(result.err.find("tau = 0.7\n") != std::string::npos);
    CHECK(result.err.find("epochs = 3\n") != std::string::npos);
    const auto summary = nlohmann::json::parse(result.out);
    CHECK(summary["epochs"].get<int>() == 3);
}

TEST_CASE("unknown config keys exit 2 naming the key and line")
{
    const auto dir = workdir("config_bad");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "alpha = 1\nbogus = 9\n";
    }
    const auto result = run_cli("pretrain --config " + (dir / "run.cfg").string());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("line 2") != std::string::npos);
    CHECK(result.err.find("bogus") != std::string::npos);
}

TEST_CASE("eval scores label files and validates their sizes")
{
    const auto dir = workdir("eval");
    {
        std::ofstream truth(dir / "true.csv");
        truth << "0\n0\n1\n1\n2\n2\n";
        std::ofstream pred(dir / "pred.csv");
        pred << "1\n1\n2\n2\n0\n0\n"; // same partition, permuted ids
        std::ofstream shorter(dir / "short.csv");
        shorter << "0\n1\n";
    }
    const auto perfect = run_cli("eval --true_labels " + (dir / "true.csv").string()
                                 + " --pred_labels " + (dir / "pred.csv").string());
    REQUIRE(perfect.exit_code == 0);
    const auto summary = nlohmann::json::parse(perfect.out);
    CHECK(summary["acc"].get<double>() == doctest::Approx(1.0));
    CHECK(summary["nmi"].get<double>() == doctest::Approx(1.0));
    CHECK(summary["ari"].get<double>() == doctest::Approx(1.0));
    CHECK(summary["f1"].get<double>() == doctest::Approx(1.0));

    const auto mismatched = run_cli("eval --true_labels " + (dir / "true.csv").string()
                                    + " --pred_labels " + (dir / "short.csv").string());
    CHECK(mismatched.exit_code == 2);
}

TEST_CASE("theory-surface default grid covers the published corpora")
{
    const auto dir = workdir("surface");
    const auto result = run_cli("theory-surface --out_dir " + dir.string());
    REQUIRE(result.exit_code == 0);

    const auto csv = read_file(dir / "surface.csv");
    CHECK(csv.rfind("n,c,tau,ratio\n", 0) == 0);
    CHECK(count_lines(dir / "surface.csv") == 9 * 5 * 4 + 1);

    // Every evaluated corpus (n, c, tau) triple appears with ratio > 1.
    for (const auto* prefix : {"\n3025,3,0.5,", "\n3327,6,1,", "\n4057,4,0.5,",
                               "\n9298,10,0.5,", "\n10000,4,0.25,", "\n10299,6,1.5,"}) {
        const auto at = csv.find(prefix);
        REQUIRE(at != std::string::npos);
        const auto value_at = at + std::string(prefix).size();
        const double ratio = std::stod(csv.substr(value_at));
        CHECK(ratio > 1.0);
    }

    const auto rerun = run_cli("theory-surface --out_dir " + (dir / "again").string());
    REQUIRE(rerun.exit_code == 0);
    CHECK(read_file(dir / "again/surface.csv") == csv);
}

TEST_CASE("bench writes one row per size with sane timings")
{
    const auto dir = workdir("bench");
    const auto result = run_cli("bench --n_list 200,400 --avg_degree 10 --repeats 5 --out_dir "
                                + dir.string());
    REQUIRE(result.exit_code == 0);

    std::ifstream csv(dir / "bench.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,dense_ms,pamc_ms");
    int rows = 0;
    std::string line;
    double dense400 = 0.0;
    while (std::getline(csv, line)) {
        ++rows;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        int n = 0;
        double dense = 0.0;
        double pamc = 0.0;
        fields >> n >> dense >> pamc;
        CHECK(dense > 0.0);
        CHECK(pamc > 0.0);
        if (n == 400) {
            dense400 = dense;
        }
    }
    CHECK(rows == 2);

    // The dense median is stable enough to land within 2x across runs.
    const auto rerun = run_cli("bench --n_list 400 --avg_degree 10 --repeats 5 --out_dir "
                               + (dir / "again").string());
    REQUIRE(rerun.exit_code == 0);
    std::ifstream again(dir / "again/bench.csv");
    std::getline(again, header);
    std::getline(again, line);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    int n = 0;
    double dense_rerun = 0.0;
    fields >> n >> dense_rerun;
    REQUIRE(dense400 > 0.0);
    CHECK(dense_rerun / dense400 < 2.0);
    CHECK(dense_rerun / dense400 > 0.5);

    const auto unsorted = run_cli("bench --n_list 400,200 --out_dir " + dir.string());
    CHECK(unsorted.exit_code == 2);
}

TEST_CASE("usage errors exit 2 and help exits 0")
{
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("bench --frobnicate 1").exit_code == 2);

    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("gen-data") != std::string::npos);
    CHECK(help.out.find("theory-surface") != std::string::npos);
}
