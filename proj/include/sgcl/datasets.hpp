#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sgcl/dense.hpp"
#include "sgcl/errors.hpp"
#include "sgcl/graph.hpp"
#include "sgcl/rng.hpp"

namespace sgcl {

struct SplitSpec {
    std::vector<node_id> train;
    std::vector<node_id> val;
    std::vector<node_id> test;
};

template <typename T>
struct Dataset {
    Graph graph;
    DenseMatrix<T> features;            // N × F
    std::optional<std::vector<std::int32_t>> labels;
    std::size_t num_classes = 0;        // 0 when unlabelled
    std::optional<SplitSpec> splits;

    std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
};

// ---------------------------------------------------------------------------
// Text formats
//
//   graph:    "N E" then E lines "u v" (0-based, each undirected edge once)
//   features: "N F" then N lines of F decimal floats
//   labels:   N lines, one integer each
//
// Tokens are whitespace separated; a trailing CR on any line is stripped.
// ---------------------------------------------------------------------------

namespace detail {

class LineReader {
public:
    LineReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw io_error("cannot open '" + path + "'");
    }

    // Next non-empty line, CR stripped. Returns false at EOF.
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw invalid_input(path_ + ":" + std::to_string(line_no_) + ": " + what);
    }

    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename Num>
bool parse_number(std::string_view tok, Num& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

template <typename Num>
std::string format_number(Num v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::pair<std::size_t, std::size_t> read_header(LineReader& r, std::string_view what) {
    std::string line;
    if (!r.next(line)) r.fail(std::string("missing ") + std::string(what) + " header");
    auto tok = split_ws(line);
    std::size_t a = 0, b = 0;
    if (tok.size() != 2 || !parse_number(tok[0], a) || !parse_number(tok[1], b))
        r.fail(std::string("malformed ") + std::string(what) + " header, expected two integers");
    return {a, b};
}

} // namespace detail

inline Graph load_graph(const std::string& path) {
    detail::LineReader r(path);
    auto [n, e] = detail::read_header(r, "graph");
    std::vector<Edge> edges;
    edges.reserve(e);
    std::string line;
    for (std::size_t i = 0; i < e; ++i) {
        if (!r.next(line)) r.fail("expected " + std::to_string(e) + " edges, found " + std::to_string(i));
        auto tok = detail::split_ws(line);
        node_id u = 0, v = 0;
        if (tok.size() != 2 || !detail::parse_number(tok[0], u) || !detail::parse_number(tok[1], v))
            r.fail("malformed edge line");
        if (u >= n || v >= n) r.fail("node id out of range (N = " + std::to_string(n) + ")");
        edges.emplace_back(u, v);
    }
    if (r.next(line)) r.fail("trailing content after " + std::to_string(e) + " edges");
    if (n == 0) r.fail("graph has zero nodes");
    return build_graph(edges, n);
}

template <typename T>
DenseMatrix<T> load_features(const std::string& path) {
    detail::LineReader r(path);
    auto [n, f] = detail::read_header(r, "features");
    DenseMatrix<T> x(n, f);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        if (!r.next(line)) r.fail("expected " + std::to_string(n) + " feature rows, found " + std::to_string(i));
        auto tok = detail::split_ws(line);
        if (tok.size() != f) r.fail("expected " + std::to_string(f) + " values, found " + std::to_string(tok.size()));
        for (std::size_t j = 0; j < f; ++j) {
            T v{};
            if (!detail::parse_number(tok[j], v) || !std::isfinite(v)) r.fail("malformed value '" + std::string(tok[j]) + "'");
            x(i, j) = v;
        }
    }
    if (r.next(line)) r.fail("trailing content after feature rows");
    return x;
}

inline std::vector<std::int32_t> load_labels(const std::string& path) {
    detail::LineReader r(path);
    std::vector<std::int32_t> labels;
    std::string line;
    while (r.next(line)) {
        auto tok = detail::split_ws(line);
        std::int32_t v = 0;
        if (tok.size() != 1 || !detail::parse_number(tok[0], v)) r.fail("malformed label line");
        if (v < 0) r.fail("negative class id");
        labels.push_back(v);
    }
    return labels;
}

// Largest class id + 1, after checking ids are contiguous from 0.
inline std::size_t validate_labels(const std::vector<std::int32_t>& labels) {
    if (labels.empty()) return 0;
    const auto c = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
    std::vector<char> seen(c, 0);
    for (auto l : labels) seen[static_cast<std::size_t>(l)] = 1;
    detail::require(std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; }),
                    "labels: class ids must be contiguous from 0");
    return c;
}

template <typename T>
Dataset<T> load_dataset(const std::string& graph_path, const std::string& features_path,
                        const std::string& labels_path = {}) {
    Dataset<T> ds;
    ds.graph = load_graph(graph_path);
    ds.features = load_features<T>(features_path);
    if (ds.features.rows() != ds.graph.num_nodes())
        throw invalid_input("dimension mismatch: '" + features_path + "' has " + std::to_string(ds.features.rows()) +
                            " rows but '" + graph_path + "' has " + std::to_string(ds.graph.num_nodes()) + " nodes");
    if (!labels_path.empty()) {
        auto labels = load_labels(labels_path);
        if (labels.size() != ds.graph.num_nodes())
            throw invalid_input("dimension mismatch: '" + labels_path + "' has " + std::to_string(labels.size()) +
                                " labels but the graph has " + std::to_string(ds.graph.num_nodes()) + " nodes");
        ds.num_classes = validate_labels(labels);
        ds.labels = std::move(labels);
    }
    return ds;
}

inline void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << g.num_nodes() << ' ' << g.num_edges() << '\n';
    for (auto [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

// Shortest round-trip representation, so save → load is bit-identical.
template <typename T>
void save_features(const DenseMatrix<T>& x, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << x.rows() << ' ' << x.cols() << '\n';
    std::string line;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (j) line += ' ';
            line += detail::format_number(x(i, j));
        }
        line += '\n';
        out << line;
    }
}

inline void save_labels(const std::vector<std::int32_t>& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (auto l : labels) out << l << '\n';
}

template <typename T>
void save_dataset(const Dataset<T>& ds, const std::string& graph_path, const std::string& features_path,
                  const std::string& labels_path) {
    save_graph(ds.graph, graph_path);
    save_features(ds.features, features_path);
    if (ds.labels) save_labels(*ds.labels, labels_path);
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

struct SplitRatios {
    double train = 0.1;
    double val = 0.1;
    double test = 0.8;
};

// Floor allocation for train and val, remainder to test.
inline SplitSpec make_splits(std::size_t n, SplitRatios ratios, std::uint64_t seed) {
    detail::require(ratios.train >= 0 && ratios.val >= 0 && ratios.test >= 0, "make_splits: negative ratio");
    detail::require(std::abs(ratios.train + ratios.val + ratios.test - 1.0) < 1e-9, "make_splits: ratios must sum to 1");
    detail::require(ratios.train > 0 && ratios.test > 0, "make_splits: train and test ratios must be positive");
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.train + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.val + 1e-9));
    detail::require(n_train >= 1 && n_train + n_val < n, "make_splits: degenerate split for this node count");

    std::vector<node_id> perm(n);
    std::iota(perm.begin(), perm.end(), node_id{0});
    Rng rng(derive_seed(seed, "splits"));
    std::shuffle(perm.begin(), perm.end(), rng);

    SplitSpec s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                 perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
    for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
    return s;
}

// ---------------------------------------------------------------------------
// Synthetic graphs
// ---------------------------------------------------------------------------

// 4-neighbour lattice; node (r, c) has id r·cols + c.
inline Graph gen_grid(std::size_t rows, std::size_t cols) {
    detail::require(rows >= 1 && cols >= 1, "gen_grid: dimensions must be positive");
    std::vector<Edge> edges;
    edges.reserve(2 * rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const auto u = static_cast<node_id>(r * cols + c);
            if (c + 1 < cols) edges.emplace_back(u, u + 1);
            if (r + 1 < rows) edges.emplace_back(u, static_cast<node_id>(u + cols));
        }
    return build_graph(edges, rows * cols);
}

struct KarimiSpec {
    std::size_t n = 5000;
    std::size_t m = 2;               // edges added per arriving node
    double h = 0.5;                  // homophily
    double minority_fraction = 0.5;  // probability an arriving node gets label 1
    std::uint64_t seed = 1;
    std::size_t feature_dim = 16;
    double class_offset = 0.5;       // δ: mean shift along the class's own axis
};

// Homophilic preferential attachment. Nodes 0..m form a clique with
// alternating labels; each later node of label ℓ attaches to up to m distinct
// earlier nodes v with probability ∝ s(ℓ, label(v)) · degree(v), where
// s = h for equal labels and 1 − h otherwise. Features are i.i.d. N(0, 1)
// plus δ on coordinate `label`.
template <typename T>
Dataset<T> gen_karimi(const KarimiSpec& spec) {
    detail::require(spec.h >= 0.0 && spec.h <= 1.0, "gen_karimi: h must lie in [0, 1]");
    detail::require(spec.m >= 1, "gen_karimi: m must be at least 1");
    detail::require(spec.minority_fraction > 0.0 && spec.minority_fraction < 1.0,
                    "gen_karimi: minority_fraction must lie in (0, 1)");
    detail::require(spec.n >= spec.m + 1, "gen_karimi: n must exceed m");
    detail::require(spec.feature_dim >= 2, "gen_karimi: feature_dim must be at least 2");

    Rng rng(derive_seed(spec.seed, "karimi/graph"));
    const std::size_t n = spec.n;
    std::vector<std::int32_t> label(n, 0);
    std::vector<double> degree(n, 0.0);
    std::vector<Edge> edges;
    edges.reserve(n * spec.m);

    const std::size_t clique = spec.m + 1;
    for (std::size_t u = 0; u < clique; ++u) {
        label[u] = static_cast<std::int32_t>(u % 2);
        for (std::size_t v = u + 1; v < clique; ++v) {
            edges.emplace_back(static_cast<node_id>(u), static_cast<node_id>(v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }

    std::vector<double> weight(n, 0.0);
    std::vector<node_id> targets;
    for (std::size_t t = clique; t < n; ++t) {
        label[t] = bernoulli(rng, spec.minority_fraction) ? 1 : 0;
        double total = 0.0;
        for (std::size_t v = 0; v < t; ++v) {
            const double s = label[v] == label[t] ? spec.h : 1.0 - spec.h;
            weight[v] = s * degree[v];
            total += weight[v];
        }
        targets.clear();
        for (std::size_t k = 0; k < spec.m && total > 0.0; ++k) {
            double x = uniform01(rng) * total;
            std::size_t pick = t; // sentinel
            for (std::size_t v = 0; v < t; ++v) {
                if (weight[v] <= 0.0) continue;
                pick = v;
                if (x < weight[v]) break;
                x -= weight[v];
            }
            if (pick == t) break;
            targets.push_back(static_cast<node_id>(pick));
            total -= weight[pick];
            weight[pick] = 0.0;
            if (total < 1e-12) total = 0.0;
        }
        for (node_id v : targets) {
            edges.emplace_back(static_cast<node_id>(t), v);
            degree[t] += 1;
            degree[v] += 1;
        }
    }

    Dataset<T> ds;
    ds.graph = build_graph(edges, n);
    ds.features = DenseMatrix<T>(n, spec.feature_dim);
    Rng frng(derive_seed(spec.seed, "karimi/features"));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < spec.feature_dim; ++j) {
            double v = normal(frng);
            if (static_cast<std::size_t>(label[i]) == j) v += spec.class_offset;
            ds.features(i, j) = static_cast<T>(v);
        }
    ds.num_classes = validate_labels(label);
    ds.labels = std::move(label);
    return ds;
}

// Fraction of edges whose endpoints share a label.
inline double edge_homophily(const Graph& g, const std::vector<std::int32_t>& labels) {
    std::size_t same = 0, total = 0;
    for (auto [u, v] : g.edge_list()) {
        ++total;
        if (labels[u] == labels[v]) ++same;
    }
    return total == 0 ? 0.0 : static_cast<double>(same) / static_cast<double>(total);
}

// Restricts a dataset to `nodes` (sorted, unique). Splits are dropped.
template <typename T>
Dataset<T> restrict_dataset(const Dataset<T>& ds, std::span<const node_id> nodes) {
    auto sub = induced_subgraph(ds.graph, nodes);
    Dataset<T> out;
    out.graph = std::move(sub.graph);
    out.features = DenseMatrix<T>(nodes.size(), ds.features.cols());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto src = ds.features.row(nodes[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
    }
    if (ds.labels) {
        std::vector<std::int32_t> l(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) l[i] = (*ds.labels)[nodes[i]];
        out.labels = std::move(l);
        out.num_classes = ds.num_classes;
    }
    return out;
}

// k nodes uniformly without replacement; induced subgraph.
template <typename T>
Dataset<T> subsample_nodes(const Dataset<T>& ds, std::size_t k, std::uint64_t seed) {
    detail::require(k >= 1, "subsample_nodes: k must be at least 1");
    detail::require(k <= ds.num_nodes(), "subsample_nodes: k exceeds node count");
    std::vector<node_id> perm(ds.num_nodes());
    std::iota(perm.begin(), perm.end(), node_id{0});
    Rng rng(derive_seed(seed, "subsample"));
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, perm.size() - 1);
        std::swap(perm[i], perm[pick(rng)]);
    }
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return restrict_dataset(ds, std::span<const node_id>(perm));
}

} // namespace sgcl
