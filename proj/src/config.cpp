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

#include "pamc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "pamc/errors.hpp"

namespace pamc {
namespace {

auto trim(std::string_view text) -> std::string_view
{
    const auto* ws = " \t\r";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

template <typename T>
auto parse_number(const std::string& key, const std::string& value) -> T
{
    T out{};
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ParameterError("config: bad value '" + value + "' for key '" + key + "'");
    }
    return out;
}

// Shortest decimal form that parses back to the same double.
auto format_double(double value) -> std::string
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return {buf, ptr};
}

} // namespace

auto Config::hyperparams() const -> Hyperparams
{
    Hyperparams hp;
    hp.alpha = alpha;
    hp.beta = beta;
    hp.influence_k = influence_k;
    hp.tau = tau;
    hp.eta = eta;
    hp.lr = lr;
    hp.epochs = epochs;
    hp.seed = seed;
    hp.clusters_c = clusters;
    return hp;
}

void apply_config_value(Config& config, const std::string& key, const std::string& value)
{
    if (key == "features") {
        config.features = value;
    } else if (key == "edges") {
        config.edges = value;
    } else if (key == "labels") {
        config.labels = value;
    } else if (key == "knn_k") {
        config.knn_k = parse_number<int>(key, value);
    } else if (key == "clusters") {
        config.clusters = parse_number<int>(key, value);
    } else if (key == "alpha") {
        config.alpha = parse_number<double>(key, value);
    } else if (key == "beta") {
        config.beta = parse_number<double>(key, value);
    } else if (key == "influence_k") {
        config.influence_k = parse_number<int>(key, value);
    } else if (key == "tau") {
        config.tau = parse_number<double>(key, value);
    } else if (key == "eta") {
        config.eta = parse_number<double>(key, value);
    } else if (key == "lr") {
        config.lr = parse_number<double>(key, value);
    } else if (key == "epochs") {
        config.epochs = parse_number<int>(key, value);
    } else if (key == "pretrain_epochs") {
        config.pretrain_epochs = parse_number<int>(key, value);
    } else if (key == "pretrain_lr") {
        config.pretrain_lr = parse_number<double>(key, value);
    } else if (key == "batch_size") {
        config.batch_size = parse_number<int>(key, value);
    } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "out_dir") {
        config.out_dir = value;
    } else {
        throw ParameterError("config: unknown key '" + key + "'");
    }
}

auto load_config_file(const std::string& path, const Config& base) -> Config
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("config: cannot open '" + path + "'");
    }
    Config config = base;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        const auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw IoError(path + ": line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key{trim(stripped.substr(0, eq))};
        const std::string value{trim(stripped.substr(eq + 1))};
        try {
            apply_config_value(config, key, value);
        } catch (const ParameterError& e) {
            throw ParameterError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

auto describe_config(const Config& config) -> std::string
{
    std::ostringstream out;
    out << "features = " << config.features << '\n';
    out << "edges = " << config.edges << '\n';
    out << "labels = " << config.labels << '\n';
    out << "knn_k = " << config.knn_k << '\n';
    out << "clusters = " << config.clusters << '\n';
    out << "alpha = " << format_double(config.alpha) << '\n';
    out << "beta = " << format_double(config.beta) << '\n';
    out << "influence_k = " << config.influence_k << '\n';
    out << "tau = " << format_double(config.tau) << '\n';
    out << "eta = " << format_double(config.eta) << '\n';
    out << "lr = " << format_double(config.lr) << '\n';
    out << "epochs = " << config.epochs << '\n';
    out << "pretrain_epochs = " << config.pretrain_epochs << '\n';
    out << "pretrain_lr = " << format_double(config.pretrain_lr) << '\n';
    out << "batch_size = " << config.batch_size << '\n';
    out << "seed = " << config.seed << '\n';
    out << "out_dir = " << config.out_dir << '\n';
    return out.str();
}

} // namespace pamc
