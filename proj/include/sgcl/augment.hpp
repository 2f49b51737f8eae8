#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgcl/dense.hpp"
#include "sgcl/graph.hpp"
#include "sgcl/rng.hpp"
#include "sgcl/samplers.hpp"

namespace sgcl {

enum class FeatureMaskMode { element, dimension };
enum class EdgeMode { drop_only, flip };

struct AugmentSpec {
    double edge_drop_prob = 0.5;
    double feature_mask_prob = 0.5;
    FeatureMaskMode feature_mask_mode = FeatureMaskMode::element;
    EdgeMode edge_mode = EdgeMode::drop_only;

    void validate() const {
        detail::require(edge_drop_prob >= 0.0 && edge_drop_prob < 1.0, "augment: edge_drop_prob must lie in [0, 1)");
        detail::require(feature_mask_prob >= 0.0 && feature_mask_prob < 1.0,
                        "augment: feature_mask_prob must lie in [0, 1)");
    }
};

// A view keeps the batch's node order, so cross-view positives are the
// identity pattern.
template <typename T>
struct View {
    Graph graph;
    DenseMatrix<T> features;
    const Batch<T>* origin = nullptr;
};

// drop_only: each edge removed independently with probability p.
// flip: additionally each non-edge is added with probability p.
inline Graph drop_edges(const Graph& g, double p, Rng& rng, EdgeMode mode = EdgeMode::drop_only) {
    detail::require(p >= 0.0 && p < 1.0, "drop_edges: probability must lie in [0, 1)");
    std::vector<Edge> kept;
    if (mode == EdgeMode::drop_only) {
        for (auto e : g.edge_list())
            if (!bernoulli(rng, p)) kept.push_back(e);
    } else {
        const auto n = static_cast<node_id>(g.num_nodes());
        for (node_id u = 0; u < n; ++u)
            for (node_id v = u + 1; v < n; ++v) {
                const bool flip = bernoulli(rng, p);
                if (g.has_edge(u, v) != flip) kept.emplace_back(u, v);
            }
    }
    return build_graph(kept, g.num_nodes());
}

// Bernoulli feature masking; unmasked entries are copied unchanged.
template <typename T>
DenseMatrix<T> mask_features(const DenseMatrix<T>& x, double p, FeatureMaskMode mode, Rng& rng) {
    detail::require(p >= 0.0 && p < 1.0, "mask_features: probability must lie in [0, 1)");
    DenseMatrix<T> out = x;
    if (p == 0.0) return out;
    if (mode == FeatureMaskMode::element) {
        for (auto& v : out.values())
            if (bernoulli(rng, p)) v = T(0);
    } else {
        std::vector<char> drop(x.cols());
        for (auto& d : drop) d = bernoulli(rng, p) ? 1 : 0;
        for (std::size_t r = 0; r < out.rows(); ++r)
            for (std::size_t c = 0; c < out.cols(); ++c)
                if (drop[c]) out(r, c) = T(0);
    }
    return out;
}

template <typename T>
View<T> make_view(const Batch<T>& batch, const AugmentSpec& spec, Rng& rng) {
    spec.validate();
    View<T> v;
    v.graph = drop_edges(batch.subgraph, spec.edge_drop_prob, rng, spec.edge_mode);
    v.features = mask_features(batch.features, spec.feature_mask_prob, spec.feature_mask_mode, rng);
    v.origin = &batch;
    return v;
}

// Two independent draws; view j consumes its own derived stream.
template <typename T>
std::pair<View<T>, View<T>> make_views(const Batch<T>& batch, const AugmentSpec& spec_i, const AugmentSpec& spec_j,
                                       std::uint64_t seed) {
    Rng ri(derive_seed(seed, "view/i"));
    Rng rj(derive_seed(seed, "view/j"));
    return {make_view(batch, spec_i, ri), make_view(batch, spec_j, rj)};
}

inline FeatureMaskMode parse_feature_mask_mode(const std::string& s) {
    if (s == "element") return FeatureMaskMode::element;
    if (s == "dimension") return FeatureMaskMode::dimension;
    throw invalid_input("unknown feature mask mode '" + s + "' (expected element, dimension)");
}

inline EdgeMode parse_edge_mode(const std::string& s) {
    if (s == "drop_only") return EdgeMode::drop_only;
    if (s == "flip") return EdgeMode::flip;
    throw invalid_input("unknown edge mode '" + s + "' (expected drop_only, flip)");
}

} // namespace sgcl
