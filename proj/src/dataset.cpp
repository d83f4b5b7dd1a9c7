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

#include "pamc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pamc/rng.hpp"

namespace pamc {

namespace {

auto parse_double(const std::string& field, const std::string& path, const int line)
  -> double
{
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc {} || ptr != end) {
        throw IoError(path + ": line " + std::to_string(line)
                      + ": cannot parse '" + field + "' as a number");
    }
    return value;
}

auto parse_int(const std::string& field, const std::string& path, const int line) -> int
{
    int value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc {} || ptr != end) {
        throw IoError(path + ": line " + std::to_string(line)
                      + ": cannot parse '" + field + "' as an integer");
    }
    return value;
}

auto open_for_read(const std::string& path) -> std::ifstream
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return in;
}

auto open_for_write(const std::string& path) -> std::ofstream
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

auto format_double(const double v) -> std::string
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

// Labels must use every class id in [0, max+1); anything else means a
// mislabeled file rather than a legitimately empty class.
void validate_labels(const std::vector<int>& labels, const std::string& origin)
{
    int max_label = -1;
    for (const int l : labels) {
        max_label = std::max(max_label, l);
    }
    std::vector<bool> seen(static_cast<std::size_t>(max_label) + 1, false);
    for (const int l : labels) {
        seen[static_cast<std::size_t>(l)] = true;
    }
    for (int c = 0; c <= max_label; ++c) {
        if (!seen[static_cast<std::size_t>(c)]) {
            throw ParameterError(origin + ": class " + std::to_string(c)
                                 + " has no members (labels must be contiguous)");
        }
    }
}

} // namespace

auto Dataset::num_classes() const -> int
{
    int max_label = -1;
    for (const int l : labels) {
        max_label = std::max(max_label, l);
    }
    return max_label + 1;
}

auto load_features_csv(const std::string& path) -> DenseMatrix
{
    auto in = open_for_read(path);
    std::vector<double> values;
    int rows = 0;
    int cols = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        int fields = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string field = line.substr(
              start, comma == std::string::npos ? std::string::npos : comma - start);
            values.push_back(parse_double(field, path, line_no));
            ++fields;
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (cols == -1) {
            cols = fields;
        } else if (fields != cols) {
            throw IoError(path + ": line " + std::to_string(line_no) + ": expected "
                          + std::to_string(cols) + " fields, got "
                          + std::to_string(fields));
        }
        ++rows;
    }
    if (rows == 0) {
        throw IoError(path + ": no feature rows found");
    }
    return DenseMatrix(rows, cols, std::move(values));
}

auto load_labels(const std::string& path) -> std::vector<int>
{
    auto in = open_for_read(path);
    std::vector<int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const int label = parse_int(line, path, line_no);
        if (label < 0) {
            throw IoError(path + ": line " + std::to_string(line_no)
                          + ": negative label " + std::to_string(label));
        }
        labels.push_back(label);
    }
    if (labels.empty()) {
        throw IoError(path + ": no labels found");
    }
    return labels;
}

auto load_edges(const std::string& path, const int num_nodes)
  -> std::vector<SparseGraph::Edge>
{
    auto in = open_for_read(path);
    std::vector<SparseGraph::Edge> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw IoError(path + ": line " + std::to_string(line_no)
                          + ": expected two tab-separated node ids");
        }
        const int u = parse_int(line.substr(0, tab), path, line_no);
        const int v = parse_int(line.substr(tab + 1), path, line_no);
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
            throw ParameterError(path + ": line " + std::to_string(line_no) + ": edge ("
                                 + std::to_string(u) + ", " + std::to_string(v)
                                 + ") references a node outside [0, "
                                 + std::to_string(num_nodes) + ")");
        }
        edges.emplace_back(u, v);
    }
    return edges;
}

void save_features_csv(const std::string& path, const DenseMatrix& features)
{
    auto out = open_for_write(path);
    for (int i = 0; i < features.rows(); ++i) {
        for (int j = 0; j < features.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(features(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

void save_labels(const std::string& path, const std::vector<int>& labels)
{
    auto out = open_for_write(path);
    for (const int l : labels) {
        out << l << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

void save_edges(const std::string& path, const std::vector<SparseGraph::Edge>& edges)
{
    auto out = open_for_write(path);
    for (const auto& [u, v] : edges) {
        out << u << '\t' << v << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

auto load_dataset(const std::string& features_path,
                  const std::optional<std::string>& edges_path,
                  const std::optional<std::string>& labels_path,
                  const std::optional<int> knn_k) -> Dataset
{
    if (edges_path.has_value() == knn_k.has_value()) {
        throw ParameterError("load_dataset: provide exactly one of an edge file or knn_k");
    }

    Dataset ds;
    ds.features = load_features_csv(features_path);
    ds.name = features_path;

    if (edges_path) {
        auto edges = load_edges(*edges_path, ds.features.rows());
        ds.graph.emplace(ds.features.rows(), std::move(edges));
    } else {
        ds.graph.emplace(build_knn_graph(ds.features, *knn_k));
    }

    if (labels_path) {
        ds.labels = load_labels(*labels_path);
        if (ds.labels.size() != static_cast<std::size_t>(ds.features.rows())) {
            throw ParameterError(*labels_path + ": " + std::to_string(ds.labels.size())
                                 + " labels for " + std::to_string(ds.features.rows())
                                 + " feature rows");
        }
        validate_labels(ds.labels, *labels_path);
    }
    return ds;
}

auto generate_sbm(const int n, const int c, const double p_in, const double p_out,
                  const int feature_dim, const double center_separation,
                  const double noise_sigma, const std::uint64_t seed) -> Dataset
{
    if (c < 2) {
        throw ParameterError("generate_sbm: need c >= 2, got " + std::to_string(c));
    }
    if (n < c) {
        throw ParameterError("generate_sbm: need n >= c, got n = " + std::to_string(n)
                             + ", c = " + std::to_string(c));
    }
    if (p_out < 0.0 || p_in > 1.0 || p_in < p_out) {
        throw ParameterError("generate_sbm: need 0 <= p_out <= p_in <= 1, got p_in = "
                             + format_double(p_in) + ", p_out = " + format_double(p_out));
    }
    if (feature_dim < c) {
        throw ParameterError("generate_sbm: feature_dim must be >= c so block centers "
                             "can sit on distinct axes, got "
                             + std::to_string(feature_dim));
    }
    if (noise_sigma < 0.0 || center_separation < 0.0) {
        throw ParameterError("generate_sbm: noise_sigma and center_separation must be "
                             "non-negative");
    }

    // Blocks of size floor(n/c), with the first n mod c blocks one larger.
    std::vector<int> labels(static_cast<std::size_t>(n));
    const int base = n / c;
    const int extra = n % c;
    int node = 0;
    for (int b = 0; b < c; ++b) {
        const int size = base + (b < extra ? 1 : 0);
        for (int t = 0; t < size; ++t) {
            labels[static_cast<std::size_t>(node++)] = b;
        }
    }

    Rng master(seed);
    Rng edge_rng = master.fork(0);
    Rng feature_rng = master.fork(1);

    std::vector<SparseGraph::Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = labels[static_cast<std::size_t>(i)]
                                 == labels[static_cast<std::size_t>(j)]
                               ? p_in
                               : p_out;
            if (edge_rng.uniform() < p) {
                edges.emplace_back(i, j);
            }
        }
    }

    // Center of block b is (separation/sqrt(2)) * e_b: every pair of
    // centers is then exactly `center_separation` apart.
    const double radius = center_separation / std::sqrt(2.0);
    DenseMatrix features(n, feature_dim);
    for (int i = 0; i < n; ++i) {
        const int b = labels[static_cast<std::size_t>(i)];
        for (int d = 0; d < feature_dim; ++d) {
            const double center = d == b ? radius : 0.0;
            features(i, d) = center + noise_sigma * feature_rng.normal();
        }
    }

    Dataset ds;
    ds.features = std::move(features);
    ds.graph.emplace(n, std::move(edges));
    ds.labels = std::move(labels);
    ds.name = "sbm";
    return ds;
}

} // namespace pamc
