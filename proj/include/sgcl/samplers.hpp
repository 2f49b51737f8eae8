#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sgcl/datasets.hpp"
#include "sgcl/graph.hpp"
#include "sgcl/rng.hpp"

namespace sgcl {

// A sampled node set and its induced subgraph, before features are attached.
struct Subgraph {
    Graph graph;
    std::vector<node_id> global_ids; // local → global, sorted
    bool budget_met = true;          // false when a random-walk batch stopped at the round cap
};

template <typename T>
struct Batch {
    Graph subgraph;
    std::vector<node_id> global_ids;
    DenseMatrix<T> features;
    std::vector<std::int32_t> labels; // empty for unlabelled datasets
    bool budget_met = true;

    std::size_t num_nodes() const noexcept { return subgraph.num_nodes(); }
};

enum class SamplerKind { node, edge, random_walk, ego };
enum class EdgeWeighting { uniform, degree };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::random_walk;
    std::size_t budget = 2000;       // nodes (node/random-walk) or expected edges (edge)
    std::size_t walk_length = 4;
    std::size_t num_roots = 3;
    std::uint32_t ego_hops = 2;
    EdgeWeighting edge_weighting = EdgeWeighting::uniform;
    std::vector<double> node_probabilities; // empty means uniform
};

inline constexpr std::size_t random_walk_round_cap = 50;
inline constexpr int edge_sampler_retries = 10;

namespace detail {

inline Subgraph make_subgraph(const Graph& g, std::vector<node_id> nodes, bool budget_met = true) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    auto sub = induced_subgraph(g, std::span<const node_id>(nodes));
    return {std::move(sub.graph), std::move(sub.global_ids), budget_met};
}

} // namespace detail

// `budget` distinct nodes without replacement, each draw ∝ P(v) among the
// remaining nodes. Empty P means uniform.
inline Subgraph sample_node(const Graph& g, std::span<const double> probabilities, std::size_t budget, Rng& rng) {
    const std::size_t n = g.num_nodes();
    detail::require(budget >= 1, "sample_node: budget must be at least 1");
    detail::require(budget <= n, "sample_node: budget exceeds node count");
    std::vector<node_id> chosen;
    chosen.reserve(budget);
    if (probabilities.empty()) {
        std::vector<node_id> perm(n);
        std::iota(perm.begin(), perm.end(), node_id{0});
        for (std::size_t i = 0; i < budget; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(perm[i], perm[pick(rng)]);
            chosen.push_back(perm[i]);
        }
    } else {
        detail::require(probabilities.size() == n, "sample_node: probability vector size mismatch");
        double sum = 0.0;
        for (double p : probabilities) {
            detail::require(p >= 0.0 && std::isfinite(p), "sample_node: probabilities must be nonnegative");
            sum += p;
        }
        detail::require(std::abs(sum - 1.0) < 1e-6, "sample_node: probabilities must sum to 1");
        std::vector<double> w(probabilities.begin(), probabilities.end());
        double total = sum;
        for (std::size_t k = 0; k < budget; ++k) {
            detail::require(total > 0.0, "sample_node: not enough nodes with positive probability");
            double x = uniform01(rng) * total;
            std::size_t pick = n;
            for (std::size_t v = 0; v < n; ++v) {
                if (w[v] <= 0.0) continue;
                pick = v;
                if (x < w[v]) break;
                x -= w[v];
            }
            chosen.push_back(static_cast<node_id>(pick));
            total -= w[pick];
            w[pick] = 0.0;
        }
    }
    return detail::make_subgraph(g, std::move(chosen));
}

// Per-edge keep probabilities scaled so that Σ P(e) = m (each capped at 1).
inline std::vector<double> edge_keep_probabilities(const Graph& g, double m, EdgeWeighting weighting) {
    auto edges = g.edge_list();
    std::vector<double> p(edges.size(), 1.0);
    if (weighting == EdgeWeighting::degree)
        for (std::size_t i = 0; i < edges.size(); ++i)
            p[i] = 1.0 / static_cast<double>(g.degree(edges[i].first)) +
                   1.0 / static_cast<double>(g.degree(edges[i].second));
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x = std::min(1.0, x * m / sum);
    return p;
}

// Each undirected edge kept independently with probability P(e); the batch is
// the induced subgraph on the endpoints of kept edges. Empty draws are
// retried a fixed number of times.
inline Subgraph sample_edge(const Graph& g, std::size_t m, Rng& rng, EdgeWeighting weighting = EdgeWeighting::uniform) {
    detail::require(m >= 1, "sample_edge: budget m must be at least 1");
    detail::require(m <= g.num_edges(), "sample_edge: budget exceeds edge count");
    auto edges = g.edge_list();
    auto p = edge_keep_probabilities(g, static_cast<double>(m), weighting);
    for (int attempt = 0; attempt < edge_sampler_retries; ++attempt) {
        std::vector<node_id> nodes;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (bernoulli(rng, p[i])) {
                nodes.push_back(edges[i].first);
                nodes.push_back(edges[i].second);
            }
        if (!nodes.empty()) return detail::make_subgraph(g, std::move(nodes));
    }
    throw invalid_input("sample_edge: every draw was empty after " + std::to_string(edge_sampler_retries) + " attempts");
}

// Rounds of `num_roots` uniform random walks of `walk_length` steps until
// `budget` distinct nodes are visited or the round cap is hit. A walk stuck
// on an isolated node stays there.
inline Subgraph sample_random_walk(const Graph& g, std::size_t num_roots, std::size_t walk_length, std::size_t budget,
                                   Rng& rng) {
    const std::size_t n = g.num_nodes();
    detail::require(n >= 1, "sample_random_walk: graph is empty");
    detail::require(num_roots >= 1, "sample_random_walk: num_roots must be at least 1");
    detail::require(budget >= 1, "sample_random_walk: budget must be at least 1");
    std::vector<char> seen(n, 0);
    std::vector<node_id> nodes;
    std::uniform_int_distribution<node_id> root_dist(0, static_cast<node_id>(n - 1));
    std::size_t rounds = 0;
    while (nodes.size() < budget && rounds < random_walk_round_cap) {
        ++rounds;
        for (std::size_t r = 0; r < num_roots; ++r) {
            node_id u = root_dist(rng);
            if (!seen[u]) seen[u] = 1, nodes.push_back(u);
            for (std::size_t step = 0; step < walk_length; ++step) {
                auto nb = g.neighbors(u);
                if (nb.empty()) break;
                std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
                u = nb[pick(rng)];
                if (!seen[u]) seen[u] = 1, nodes.push_back(u);
            }
        }
    }
    const bool met = nodes.size() >= budget;
    return detail::make_subgraph(g, std::move(nodes), met);
}

// All nodes within k hops of `center`.
inline Subgraph sample_ego(const Graph& g, node_id center, std::uint32_t k) {
    detail::require(center < g.num_nodes(), "sample_ego: center out of range");
    std::vector<node_id> nodes;
    for (auto [v, d] : ball(g, center, k)) nodes.push_back(v);
    return detail::make_subgraph(g, std::move(nodes));
}

template <typename T>
Batch<T> make_batch(const Dataset<T>& ds, Subgraph sub) {
    Batch<T> b;
    b.features = DenseMatrix<T>(sub.global_ids.size(), ds.features.cols());
    for (std::size_t i = 0; i < sub.global_ids.size(); ++i) {
        auto src = ds.features.row(sub.global_ids[i]);
        std::copy(src.begin(), src.end(), b.features.row(i).begin());
    }
    if (ds.labels) {
        b.labels.resize(sub.global_ids.size());
        for (std::size_t i = 0; i < sub.global_ids.size(); ++i) b.labels[i] = (*ds.labels)[sub.global_ids[i]];
    }
    b.subgraph = std::move(sub.graph);
    b.global_ids = std::move(sub.global_ids);
    b.budget_met = sub.budget_met;
    return b;
}

inline Subgraph draw_subgraph(const Graph& g, const SamplerSpec& spec, Rng& rng) {
    switch (spec.kind) {
    case SamplerKind::node:
        return sample_node(g, spec.node_probabilities, std::min(spec.budget, g.num_nodes()), rng);
    case SamplerKind::edge:
        return sample_edge(g, std::min(spec.budget, g.num_edges()), rng, spec.edge_weighting);
    case SamplerKind::random_walk:
        return sample_random_walk(g, spec.num_roots, spec.walk_length, spec.budget, rng);
    case SamplerKind::ego: {
        std::uniform_int_distribution<node_id> pick(0, static_cast<node_id>(g.num_nodes() - 1));
        return sample_ego(g, pick(rng), spec.ego_hops);
    }
    }
    throw invalid_input("draw_subgraph: unknown sampler kind");
}

// Independent draws (not a partition); batch b uses its own derived seed.
template <typename T>
std::vector<Batch<T>> batch_stream(const Dataset<T>& ds, const SamplerSpec& spec, std::size_t num_batches,
                                   std::uint64_t seed) {
    std::vector<Batch<T>> out;
    out.reserve(num_batches);
    for (std::size_t b = 0; b < num_batches; ++b) {
        Rng rng(derive_seed(seed, "batch", b));
        out.push_back(make_batch(ds, draw_subgraph(ds.graph, spec, rng)));
    }
    return out;
}

inline const char* to_string(SamplerKind k) {
    switch (k) {
    case SamplerKind::node: return "node";
    case SamplerKind::edge: return "edge";
    case SamplerKind::random_walk: return "random_walk";
    case SamplerKind::ego: return "ego";
    }
    return "?";
}

inline SamplerKind parse_sampler_kind(const std::string& s) {
    if (s == "node") return SamplerKind::node;
    if (s == "edge") return SamplerKind::edge;
    if (s == "random_walk") return SamplerKind::random_walk;
    if (s == "ego") return SamplerKind::ego;
    throw invalid_input("unknown sampler kind '" + s + "' (expected node, edge, random_walk, ego)");
}

} // namespace sgcl
