#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "sgcl/dense.hpp"
#include "sgcl/errors.hpp"
#include "sgcl/graph.hpp"

namespace sgcl {

// Pair matrices have rows indexed by nodes of view i and columns by nodes of
// view j (same node order). Smoothers left-apply a graph filter built from the
// view-i geometry, so with the identity as input the smoothed positives are the
// filter kernel itself: entry (t, q) scores the proximity of t and q in view i.

enum class PairRole { binary_pos, smoothed_pos, smoothed_neg };

template <typename T>
struct PairMatrix {
    DenseMatrix<T> values;
    PairRole role = PairRole::binary_pos;

    std::size_t size() const noexcept { return values.rows(); }
    T operator()(std::size_t t, std::size_t q) const noexcept { return values(t, q); }
};

enum class SmootherKind { identity, taubin, bilateral, diffusion };
enum class BilateralExponent { squared, linear };

struct SmootherSpec {
    SmootherKind kind = SmootherKind::taubin;
    double mu = -0.4;
    double tau = 0.3;
    std::size_t iterations = 2;     // K for Taubin and diffusion
    double sigma_spa = 0.1;
    double sigma_int = 2.0;
    std::uint32_t radius = 2;       // bilateral hop cutoff
    BilateralExponent exponent = BilateralExponent::squared;
    double eta = 0.03;

    void validate() const {
        switch (kind) {
        case SmootherKind::identity: break;
        case SmootherKind::taubin:
            detail::require(tau > 0.0, "taubin: tau must be positive");
            detail::require(mu < -tau, "taubin: mu must satisfy mu < -tau");
            break;
        case SmootherKind::bilateral:
            detail::require(sigma_spa > 0.0 && sigma_int > 0.0, "bilateral: sigmas must be positive");
            break;
        case SmootherKind::diffusion:
            detail::require(eta > 0.0, "diffusion: eta must be positive");
            break;
        }
    }
};

template <typename T>
PairMatrix<T> identity_pairs(std::size_t n) {
    detail::require(n >= 1, "identity_pairs: n must be at least 1");
    return {DenseMatrix<T>::identity(n), PairRole::binary_pos};
}

// Entries that were exactly 1 in the initial matrix are restored to 1; all
// other entries are clamped to [0, 1].
template <typename T>
DenseMatrix<T> apply_mask_and_clamp(const DenseMatrix<T>& smoothed, const DenseMatrix<T>& initial) {
    detail::require(smoothed.same_shape(initial), "apply_mask_and_clamp: shape mismatch");
    DenseMatrix<T> out(smoothed.rows(), smoothed.cols());
    auto s = smoothed.values();
    auto p = initial.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = p[i] == T(1) ? T(1) : std::clamp(s[i], T(0), T(1));
    return out;
}

template <typename T>
PairMatrix<T> negatives(const PairMatrix<T>& pos) {
    DenseMatrix<T> out(pos.values.rows(), pos.values.cols());
    auto s = pos.values.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = T(1) - s[i];
    return {std::move(out), PairRole::smoothed_neg};
}

namespace detail {

template <typename T>
void require_pair_shape(const DenseMatrix<T>& p, const Graph& g, const char* who) {
    require(p.rows() == g.num_nodes(), std::string(who) + ": pair matrix rows must match view node count");
}

} // namespace detail

// Unmasked filter passes; exposed so the raw (pre-clamp) output can be tested.

// K rounds of P ← (I + μL)((I + τL)P), L = D⁻¹A − I.
template <typename T>
DenseMatrix<T> taubin_filter(const DenseMatrix<T>& p, const Graph& g, double mu, double tau, std::size_t k) {
    detail::require_pair_shape(p, g, "smooth_taubin");
    DenseMatrix<T> v = p;
    const T t = static_cast<T>(tau), m = static_cast<T>(mu);
    for (std::size_t it = 0; it < k; ++it) {
        for (const T coeff : {t, m}) {
            auto lv = rw_laplacian_apply(g, v);
            auto dst = v.values();
            auto src = lv.values();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += coeff * src[i];
        }
    }
    return v;
}

// K steps of row_i ← row_i + η Σ_{j∈N(i)} row_j.
template <typename T>
DenseMatrix<T> diffusion_filter(const DenseMatrix<T>& p, const Graph& g, double eta, std::size_t k) {
    detail::require_pair_shape(p, g, "smooth_diffusion");
    DenseMatrix<T> v = p;
    const T e = static_cast<T>(eta);
    for (std::size_t it = 0; it < k; ++it) {
        auto av = adjacency_apply(g, v);
        auto dst = v.values();
        auto src = av.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += e * src[i];
    }
    return v;
}

// Bilateral weight between rows at hop distance `hops` and intensity distance
// `intensity` (L1 between rows; Hamming for binary rows).
inline double bilateral_weight(double hops, double intensity, double sigma_spa, double sigma_int,
                               BilateralExponent exponent) {
    const double ds = exponent == BilateralExponent::squared ? hops * hops : hops;
    const double di = exponent == BilateralExponent::squared ? intensity * intensity : intensity;
    return std::exp(-ds / (2.0 * sigma_spa * sigma_spa) - di / (2.0 * sigma_int * sigma_int));
}

// row_i ← Σ_j w(i,j) row_j / Σ_j w(i,j) over j within `radius` hops.
template <typename T>
DenseMatrix<T> bilateral_filter(const DenseMatrix<T>& p, const Graph& g, double sigma_spa, double sigma_int,
                                std::uint32_t radius, BilateralExponent exponent = BilateralExponent::squared) {
    detail::require_pair_shape(p, g, "smooth_bilateral");
    const std::size_t cols = p.cols();
    DenseMatrix<T> out(p.rows(), cols);
    for (node_id i = 0; i < g.num_nodes(); ++i) {
        const T* pi = p.row(i).data();
        T* oi = out.row(i).data();
        double wsum = 0.0;
        for (auto [j, d] : ball(g, i, radius)) {
            const T* pj = p.row(j).data();
            double hamming = 0.0;
            for (std::size_t c = 0; c < cols; ++c) hamming += std::abs(static_cast<double>(pi[c]) - pj[c]);
            const double w = bilateral_weight(d, hamming, sigma_spa, sigma_int, exponent);
            wsum += w;
            const T wt = static_cast<T>(w);
            for (std::size_t c = 0; c < cols; ++c) oi[c] += wt * pj[c];
        }
        const T inv = static_cast<T>(1.0 / wsum);
        for (std::size_t c = 0; c < cols; ++c) oi[c] *= inv;
    }
    return out;
}

template <typename T>
DenseMatrix<T> smooth_taubin(const DenseMatrix<T>& p, const Graph& g, double mu, double tau, std::size_t k) {
    detail::require(tau > 0.0 && mu < -tau, "smooth_taubin: requires mu < -tau < 0");
    return apply_mask_and_clamp(taubin_filter(p, g, mu, tau, k), p);
}

template <typename T>
DenseMatrix<T> smooth_bilateral(const DenseMatrix<T>& p, const Graph& g, double sigma_spa, double sigma_int,
                                std::uint32_t radius, BilateralExponent exponent = BilateralExponent::squared) {
    detail::require(sigma_spa > 0.0 && sigma_int > 0.0, "smooth_bilateral: sigmas must be positive");
    return apply_mask_and_clamp(bilateral_filter(p, g, sigma_spa, sigma_int, radius, exponent), p);
}

template <typename T>
DenseMatrix<T> smooth_diffusion(const DenseMatrix<T>& p, const Graph& g, double eta, std::size_t k) {
    detail::require(eta > 0.0, "smooth_diffusion: eta must be positive");
    return apply_mask_and_clamp(diffusion_filter(p, g, eta, k), p);
}

// Smoothed positives for one view direction, using that view's graph.
template <typename T>
PairMatrix<T> smooth_pairs(const PairMatrix<T>& initial, const Graph& g_view, const SmootherSpec& spec) {
    spec.validate();
    const auto& p = initial.values;
    switch (spec.kind) {
    case SmootherKind::identity:
        detail::require_pair_shape(p, g_view, "smooth_pairs");
        return {p, PairRole::smoothed_pos};
    case SmootherKind::taubin:
        return {smooth_taubin(p, g_view, spec.mu, spec.tau, spec.iterations), PairRole::smoothed_pos};
    case SmootherKind::bilateral:
        return {smooth_bilateral(p, g_view, spec.sigma_spa, spec.sigma_int, spec.radius, spec.exponent),
                PairRole::smoothed_pos};
    case SmootherKind::diffusion:
        return {smooth_diffusion(p, g_view, spec.eta, spec.iterations), PairRole::smoothed_pos};
    }
    throw invalid_input("smooth_pairs: unknown smoother kind");
}

inline SmootherKind parse_smoother_kind(const std::string& s) {
    if (s == "identity" || s == "binary" || s == "none") return SmootherKind::identity;
    if (s == "taubin") return SmootherKind::taubin;
    if (s == "bilateral") return SmootherKind::bilateral;
    if (s == "diffusion") return SmootherKind::diffusion;
    throw invalid_input("unknown smoother '" + s + "' (expected identity, taubin, bilateral, diffusion)");
}

inline const char* to_string(SmootherKind k) {
    switch (k) {
    case SmootherKind::identity: return "identity";
    case SmootherKind::taubin: return "taubin";
    case SmootherKind::bilateral: return "bilateral";
    case SmootherKind::diffusion: return "diffusion";
    }
    return "?";
}

} // namespace sgcl
