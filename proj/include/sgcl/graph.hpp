#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgcl/dense.hpp"
#include "sgcl/errors.hpp"

namespace sgcl {

using node_id = std::uint32_t;
using Edge = std::pair<node_id, node_id>;

inline constexpr std::uint32_t unreachable = std::numeric_limits<std::uint32_t>::max();

// Immutable undirected simple graph in CSR form. Every undirected edge {u,v}
// is stored twice (u→v and v→u); rows are sorted, no self-loops, no
// duplicates.
class Graph {
public:
    Graph() = default;

    std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

    std::size_t degree(node_id u) const noexcept { return offsets_[u + 1] - offsets_[u]; }

    std::span<const node_id> neighbors(node_id u) const noexcept {
        return {neighbors_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
    }

    bool has_edge(node_id u, node_id v) const noexcept {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::span<const node_id> adjacency() const noexcept { return neighbors_; }

    // Each undirected edge once, as (u, v) with u < v, in row-major order.
    std::vector<Edge> edge_list() const {
        std::vector<Edge> out;
        out.reserve(num_edges());
        for (node_id u = 0; u < num_nodes(); ++u)
            for (node_id v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_;
    }

    friend Graph build_graph(std::span<const Edge> edges, std::size_t n);

private:
    Graph(std::vector<std::size_t> offsets, std::vector<node_id> neighbors)
        : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

    std::vector<std::size_t> offsets_;
    std::vector<node_id> neighbors_;
};

// Symmetrizes, deduplicates and drops self-loops.
inline Graph build_graph(std::span<const Edge> edges, std::size_t n) {
    detail::require(n > 0, "build_graph: graph must have at least one node");
    detail::require(n <= std::numeric_limits<node_id>::max(), "build_graph: too many nodes");
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw invalid_input("build_graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") references a node id >= " + std::to_string(n));
        if (u == v) continue;
        ++degree[u];
        ++degree[v];
    }
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) offsets[u + 1] = offsets[u] + degree[u];
    std::vector<node_id> nbrs(offsets[n]);
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (auto [u, v] : edges) {
        if (u == v) continue;
        nbrs[cursor[u]++] = v;
        nbrs[cursor[v]++] = u;
    }
    // sort + unique each row, then compact
    std::vector<std::size_t> packed(n + 1, 0);
    std::size_t write = 0;
    for (std::size_t u = 0; u < n; ++u) {
        auto first = nbrs.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
        auto last = nbrs.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
        std::sort(first, last);
        last = std::unique(first, last);
        for (auto it = first; it != last; ++it) nbrs[write++] = *it;
        packed[u + 1] = write;
    }
    nbrs.resize(write);
    nbrs.shrink_to_fit();
    return Graph(std::move(packed), std::move(nbrs));
}

inline Graph build_graph(const std::vector<Edge>& edges, std::size_t n) {
    return build_graph(std::span<const Edge>(edges), n);
}

// Hop distances from `source`; nodes farther than `cutoff` (or unreachable)
// get `unreachable`.
inline std::vector<std::uint32_t> bfs_distances(const Graph& g, node_id source,
                                                std::optional<std::uint32_t> cutoff = std::nullopt) {
    detail::require(source < g.num_nodes(), "bfs_distances: source out of range");
    std::vector<std::uint32_t> dist(g.num_nodes(), unreachable);
    std::vector<node_id> frontier{source}, next;
    dist[source] = 0;
    std::uint32_t level = 0;
    while (!frontier.empty() && (!cutoff || level < *cutoff)) {
        ++level;
        next.clear();
        for (node_id u : frontier)
            for (node_id v : g.neighbors(u))
                if (dist[v] == unreachable) {
                    dist[v] = level;
                    next.push_back(v);
                }
        frontier.swap(next);
    }
    return dist;
}

// Nodes within `radius` hops of `source`, paired with their distance, in BFS
// order (source first).
inline std::vector<std::pair<node_id, std::uint32_t>> ball(const Graph& g, node_id source, std::uint32_t radius) {
    detail::require(source < g.num_nodes(), "ball: source out of range");
    std::vector<std::pair<node_id, std::uint32_t>> out{{source, 0}};
    std::vector<char> seen(g.num_nodes(), 0);
    seen[source] = 1;
    for (std::size_t head = 0; head < out.size(); ++head) {
        auto [u, d] = out[head];
        if (d == radius) continue;
        for (node_id v : g.neighbors(u))
            if (!seen[v]) {
                seen[v] = 1;
                out.emplace_back(v, d + 1);
            }
    }
    return out;
}

// L·M with L = D⁻¹A − I. Row u of the result is the neighbour mean of M's rows
// minus row u; isolated nodes produce a zero row.
template <typename T>
DenseMatrix<T> rw_laplacian_apply(const Graph& g, const DenseMatrix<T>& m) {
    detail::require(m.rows() == g.num_nodes(), "rw_laplacian_apply: row count does not match node count");
    DenseMatrix<T> out(m.rows(), m.cols());
    const std::size_t cols = m.cols();
    for (node_id u = 0; u < g.num_nodes(); ++u) {
        auto nb = g.neighbors(u);
        if (nb.empty()) continue;
        T* o = out.row(u).data();
        for (node_id v : nb) {
            const T* mv = m.row(v).data();
            for (std::size_t c = 0; c < cols; ++c) o[c] += mv[c];
        }
        const T inv = T(1) / static_cast<T>(nb.size());
        const T* mu = m.row(u).data();
        for (std::size_t c = 0; c < cols; ++c) o[c] = o[c] * inv - mu[c];
    }
    return out;
}

// A·M (plain adjacency product).
template <typename T>
DenseMatrix<T> adjacency_apply(const Graph& g, const DenseMatrix<T>& m) {
    detail::require(m.rows() == g.num_nodes(), "adjacency_apply: row count does not match node count");
    DenseMatrix<T> out(m.rows(), m.cols());
    const std::size_t cols = m.cols();
    for (node_id u = 0; u < g.num_nodes(); ++u) {
        T* o = out.row(u).data();
        for (node_id v : g.neighbors(u)) {
            const T* mv = m.row(v).data();
            for (std::size_t c = 0; c < cols; ++c) o[c] += mv[c];
        }
    }
    return out;
}

// D̃^{-1/2} Ã D̃^{-1/2} M with Ã = A + I. The operator is symmetric, so the
// same call serves as its own adjoint in backpropagation.
template <typename T>
DenseMatrix<T> sym_norm_propagate(const Graph& g, const DenseMatrix<T>& m) {
    detail::require(m.rows() == g.num_nodes(), "sym_norm_propagate: row count does not match node count");
    const std::size_t n = g.num_nodes();
    const std::size_t cols = m.cols();
    std::vector<T> inv_sqrt(n);
    for (node_id u = 0; u < n; ++u) inv_sqrt[u] = T(1) / std::sqrt(static_cast<T>(g.degree(u) + 1));
    DenseMatrix<T> out(n, cols);
    for (node_id u = 0; u < n; ++u) {
        T* o = out.row(u).data();
        const T du = inv_sqrt[u];
        // self-loop first, then neighbours in sorted order
        {
            const T w = du * du;
            const T* mu = m.row(u).data();
            for (std::size_t c = 0; c < cols; ++c) o[c] += w * mu[c];
        }
        for (node_id v : g.neighbors(u)) {
            const T w = du * inv_sqrt[v];
            const T* mv = m.row(v).data();
            for (std::size_t c = 0; c < cols; ++c) o[c] += w * mv[c];
        }
    }
    return out;
}

struct InducedSubgraph {
    Graph graph;
    std::vector<node_id> global_ids; // local → global
};

// `nodes` must be sorted and unique.
inline InducedSubgraph induced_subgraph(const Graph& g, std::span<const node_id> nodes) {
    detail::require(!nodes.empty(), "induced_subgraph: node set is empty");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        detail::require(nodes[i] < g.num_nodes(), "induced_subgraph: node id out of range");
        detail::require(i == 0 || nodes[i - 1] < nodes[i], "induced_subgraph: node ids must be sorted and unique");
    }
    std::vector<node_id> local(g.num_nodes(), unreachable);
    for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<node_id>(i);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (node_id v : g.neighbors(nodes[i]))
            if (local[v] != unreachable && local[v] > i) edges.emplace_back(static_cast<node_id>(i), local[v]);
    return {build_graph(edges, nodes.size()), std::vector<node_id>(nodes.begin(), nodes.end())};
}

inline InducedSubgraph induced_subgraph(const Graph& g, const std::vector<node_id>& nodes) {
    return induced_subgraph(g, std::span<const node_id>(nodes));
}

struct Components {
    std::vector<std::uint32_t> label; // per node, 0-based in order of first appearance
    std::size_t count = 0;
};

inline Components connected_components(const Graph& g) {
    Components cc;
    cc.label.assign(g.num_nodes(), unreachable);
    std::vector<node_id> stack;
    for (node_id s = 0; s < g.num_nodes(); ++s) {
        if (cc.label[s] != unreachable) continue;
        const auto id = static_cast<std::uint32_t>(cc.count++);
        cc.label[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            node_id u = stack.back();
            stack.pop_back();
            for (node_id v : g.neighbors(u))
                if (cc.label[v] == unreachable) {
                    cc.label[v] = id;
                    stack.push_back(v);
                }
        }
    }
    return cc;
}

// Applies a node relabelling: node u of `g` becomes perm[u].
inline Graph permute(const Graph& g, std::span<const node_id> perm) {
    detail::require(perm.size() == g.num_nodes(), "permute: permutation size mismatch");
    std::vector<Edge> edges;
    for (auto [u, v] : g.edge_list()) edges.emplace_back(perm[u], perm[v]);
    return build_graph(edges, g.num_nodes());
}

} // namespace sgcl
