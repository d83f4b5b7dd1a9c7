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

#include "pamc/config.hpp"
#include "pamc/errors.hpp"

namespace {

auto temp_path(const std::string& name) -> std::string
{
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
}

auto configs_equal(const pamc::Config& a, const pamc::Config& b) -> bool
{
    return pamc::describe_config(a) == pamc::describe_config(b);
}

} // namespace

TEST_CASE("defaults follow the published training settings")
{
    const pamc::Config config;
    CHECK(config.epochs == 200);
    CHECK(config.pretrain_epochs == 30);
    CHECK(config.batch_size == 256);
    CHECK(config.lr == doctest::Approx(1e-3));
    CHECK(config.pretrain_lr == doctest::Approx(1e-3));
    CHECK(config.eta == doctest::Approx(1.0));
    CHECK(config.knn_k == 0);
    CHECK(config.out_dir == ".");
    CHECK(config.features.empty());
}

TEST_CASE("apply_config_value sets every key")
{
    pamc::Config config;
    pamc::apply_config_value(config, "features", "a.csv");
    pamc::apply_config_value(config, "edges", "e.tsv");
    pamc::apply_config_value(config, "labels", "l.txt");
    pamc::apply_config_value(config, "knn_k", "7");
    pamc::apply_config_value(config, "clusters", "5");
    pamc::apply_config_value(config, "alpha", "2.5");
    pamc::apply_config_value(config, "beta", "12.5");
    pamc::apply_config_value(config, "influence_k", "4");
    pamc::apply_config_value(config, "tau", "1.5");
    pamc::apply_config_value(config, "eta", "2");
    pamc::apply_config_value(config, "lr", "1e-4");
    pamc::apply_config_value(config, "epochs", "50");
    pamc::apply_config_value(config, "pretrain_epochs", "3");
    pamc::apply_config_value(config, "pretrain_lr", "5e-4");
    pamc::apply_config_value(config, "batch_size", "64");
    pamc::apply_config_value(config, "seed", "18446744073709551615");
    pamc::apply_config_value(config, "out_dir", "runs/x");

    CHECK(config.features == "a.csv");
    CHECK(config.edges == "e.tsv");
    CHECK(config.labels == "l.txt");
    CHECK(config.knn_k == 7);
    CHECK(config.clusters == 5);
    CHECK(config.alpha == doctest::Approx(2.5));
    CHECK(config.beta == doctest::Approx(12.5));
    CHECK(config.influence_k == 4);
    CHECK(config.tau == doctest::Approx(1.5));
    CHECK(config.eta == doctest::Approx(2.0));
    CHECK(config.lr == doctest::Approx(1e-4));
    CHECK(config.epochs == 50);
    CHECK(config.pretrain_epochs == 3);
    CHECK(config.pretrain_lr == doctest::Approx(5e-4));
    CHECK(config.batch_size == 64);
    CHECK(config.seed == 18446744073709551615ULL);
    CHECK(config.out_dir == "runs/x");
}

TEST_CASE("unknown keys and bad values are rejected by name")
{
    pamc::Config config;
    CHECK_THROWS_WITH_AS(pamc::apply_config_value(config, "momentum", "0.9"),
                         "config: unknown key 'momentum'", pamc::ParameterError);
    CHECK_THROWS_WITH_AS(pamc::apply_config_value(config, "epochs", "ten"),
                         "config: bad value 'ten' for key 'epochs'", pamc::ParameterError);
    CHECK_THROWS_AS(pamc::apply_config_value(config, "seed", "-1"), pamc::ParameterError);
    CHECK_THROWS_AS(pamc::apply_config_value(config, "alpha", "1.5x"), pamc::ParameterError);
    CHECK_THROWS_AS(pamc::apply_config_value(config, "alpha", ""), pamc::ParameterError);
}

TEST_CASE("config files layer over the base and tolerate comments")
{
    const auto path = temp_path("pamc_config_basic.txt");
    write_file(path,
               "# training run\n"
               "\n"
               "  alpha = 2.5 \n"
               "tau=0.7\n"
               "features = data/f.csv\n");
    const auto config = pamc::load_config_file(path);
    CHECK(config.alpha == doctest::Approx(2.5));
    CHECK(config.tau == doctest::Approx(0.7));
    CHECK(config.features == "data/f.csv");
    CHECK(config.epochs == 200); // untouched default

    pamc::Config base;
    base.epochs = 17;
    const auto layered = pamc::load_config_file(path, base);
    CHECK(layered.epochs == 17);
    CHECK(layered.alpha == doctest::Approx(2.5));
    std::remove(path.c_str());
}

TEST_CASE("file errors carry the file name and line number")
{
    CHECK_THROWS_AS(pamc::load_config_file(temp_path("pamc_config_missing.txt")),
                    pamc::IoError);

    const auto path = temp_path("pamc_config_bad.txt");
    write_file(path, "alpha = 1\nmomentum = 0.9\n");
    CHECK_THROWS_WITH_AS(pamc::load_config_file(path),
                         (path + ": line 2: config: unknown key 'momentum'").c_str(),
                         pamc::ParameterError);

    write_file(path, "alpha\n");
    CHECK_THROWS_WITH_AS(pamc::load_config_file(path),
                         (path + ": line 1: expected key=value").c_str(), pamc::IoError);
    std::remove(path.c_str());
}

TEST_CASE("describe_config output parses back to the same config")
{
    pamc::Config config;
    config.features = "f.csv";
    config.alpha = 0.1; // no short exact binary form; round-trip must still hold
    config.tau = 1.5;
    config.lr = 1e-4;
    config.seed = 12345678901234567ULL;
    config.clusters = 6;

    const auto text = pamc::describe_config(config);
    CHECK(text.find("alpha = 0.1\n") != std::string::npos);
    CHECK(text.find("features = f.csv\n") != std::string::npos);

    const auto path = temp_path("pamc_config_echo.txt");
    write_file(path, text);
    const auto reloaded = pamc::load_config_file(path);
    CHECK(configs_equal(config, reloaded));
    std::remove(path.c_str());
}

TEST_CASE("hyperparams view maps the shared fields")
{
    pamc::Config config;
    config.alpha = 2.0;
    config.beta = 0.2;
    config.influence_k = 3;
    config.tau = 0.25;
    config.eta = 2.0;
    config.lr = 1e-4;
    config.epochs = 99;
    config.seed = 42;
    config.clusters = 4;

    const auto hp = config.hyperparams();
    CHECK(hp.alpha == doctest::Approx(2.0));
    CHECK(hp.beta == doctest::Approx(0.2));
    CHECK(hp.influence_k == 3);
    CHECK(hp.tau == doctest::Approx(0.25));
    CHECK(hp.eta == doctest::Approx(2.0));
    CHECK(hp.lr == doctest::Approx(1e-4));
    CHECK(hp.epochs == 99);
    CHECK(hp.seed == 42);
    CHECK(hp.clusters_c == 4);
    CHECK_NOTHROW(hp.validate());
}
