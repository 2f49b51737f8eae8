#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sgcl/augment.hpp"
#include "sgcl/dense.hpp"
#include "sgcl/encoder.hpp"
#include "sgcl/errors.hpp"
#include "sgcl/smoothing.hpp"

namespace sgcl {

enum class LossKind { sgcl, binary, infonce };

struct LossConfig {
    std::optional<double> lambda;   // unset: 1 / (2 N_b)
    LossKind kind = LossKind::sgcl;
    double temperature = 0.5;       // InfoNCE only

    double lambda_for(std::size_t batch_nodes) const {
        const double l = lambda ? *lambda : 1.0 / (2.0 * static_cast<double>(batch_nodes));
        detail::require(l >= 0.0, "loss: lambda must be nonnegative");
        return l;
    }
};

inline LossKind parse_loss_kind(const std::string& s) {
    if (s == "sgcl") return LossKind::sgcl;
    if (s == "binary") return LossKind::binary;
    if (s == "infonce") return LossKind::infonce;
    throw invalid_input("unknown loss baseline '" + s + "' (expected sgcl, binary, infonce)");
}

inline const char* to_string(LossKind k) {
    switch (k) {
    case LossKind::sgcl: return "sgcl";
    case LossKind::binary: return "binary";
    case LossKind::infonce: return "infonce";
    }
    return "?";
}

// Dot products of unit rows: entry (t, q) = ⟨ĥ_t^(i), ĥ_q^(j)⟩.
template <typename T>
DenseMatrix<T> cosine_matrix(const DenseMatrix<T>& hi, const DenseMatrix<T>& hj) {
    detail::require(hi.cols() == hj.cols(), "cosine_matrix: embedding widths differ");
    return matmul_nt(hi, hj);
}

template <typename T>
struct SimilarityMatrix {
    DenseMatrix<T> raw;
    DenseMatrix<T> normalized;
    T min = T(0);
    T max = T(0);
    std::size_t argmin = 0; // flat row-major index, first occurrence
    std::size_t argmax = 0;
    bool degenerate = false; // max == min; normalized is all 0.5
};

// C = (M − min) / (max − min) over the whole matrix.
template <typename T>
SimilarityMatrix<T> minmax_normalize(DenseMatrix<T> m) {
    detail::require(!m.empty(), "minmax_normalize: empty matrix");
    SimilarityMatrix<T> s;
    auto v = m.values();
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[s.argmin]) s.argmin = i;
        if (v[i] > v[s.argmax]) s.argmax = i;
    }
    s.min = v[s.argmin];
    s.max = v[s.argmax];
    s.normalized = DenseMatrix<T>(m.rows(), m.cols());
    auto c = s.normalized.values();
    const T range = s.max - s.min;
    if (!(range > T(0))) {
        s.degenerate = true;
        std::fill(c.begin(), c.end(), T(0.5));
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) c[i] = (v[i] - s.min) / range;
        c[s.argmin] = T(0);
        c[s.argmax] = T(1);
    }
    s.raw = std::move(m);
    return s;
}

// Chain rule through min-max, including the contributions of the extreme
// entries (whose values define the normalization). Degenerate input has zero
// gradient.
template <typename T>
DenseMatrix<T> minmax_normalize_backward(const SimilarityMatrix<T>& s, const DenseMatrix<T>& d_normalized) {
    detail::require(d_normalized.same_shape(s.normalized), "minmax_normalize_backward: shape mismatch");
    DenseMatrix<T> dm(s.raw.rows(), s.raw.cols());
    if (s.degenerate) return dm;
    const T range = s.max - s.min;
    auto g = d_normalized.values();
    auto c = s.normalized.values();
    auto out = dm.values();
    T to_min = T(0), to_max = T(0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = g[i] / range;
        to_min += g[i] * (c[i] - T(1));
        to_max -= g[i] * c[i];
    }
    out[s.argmin] += to_min / range;
    out[s.argmax] += to_max / range;
    return dm;
}

// ‖Π̃pos ⊙ (1 − C)‖²_F + λ‖Π̃neg ⊙ C‖²_F
template <typename T>
double sgcl_loss(const DenseMatrix<T>& c, const PairMatrix<T>& pos, const PairMatrix<T>& neg, double lambda) {
    detail::require(c.same_shape(pos.values) && c.same_shape(neg.values), "sgcl_loss: shape mismatch");
    detail::require(lambda >= 0.0, "sgcl_loss: lambda must be nonnegative");
    auto cv = c.values();
    auto pv = pos.values.values();
    auto nv = neg.values.values();
    double attract = 0.0, repel = 0.0;
    for (std::size_t i = 0; i < cv.size(); ++i) {
        const double a = static_cast<double>(pv[i]) * (1.0 - cv[i]);
        const double r = static_cast<double>(nv[i]) * cv[i];
        attract += a * a;
        repel += r * r;
    }
    return attract + lambda * repel;
}

// ∂/∂C = −2 Π̃pos² ⊙ (1 − C) + 2λ Π̃neg² ⊙ C
template <typename T>
DenseMatrix<T> sgcl_loss_grad(const DenseMatrix<T>& c, const PairMatrix<T>& pos, const PairMatrix<T>& neg,
                              double lambda) {
    detail::require(c.same_shape(pos.values) && c.same_shape(neg.values), "sgcl_loss_grad: shape mismatch");
    detail::require(lambda >= 0.0, "sgcl_loss_grad: lambda must be nonnegative");
    DenseMatrix<T> d(c.rows(), c.cols());
    auto cv = c.values();
    auto pv = pos.values.values();
    auto nv = neg.values.values();
    auto dv = d.values();
    const T two_lambda = static_cast<T>(2.0 * lambda);
    for (std::size_t i = 0; i < cv.size(); ++i)
        dv[i] = T(-2) * pv[i] * pv[i] * (T(1) - cv[i]) + two_lambda * nv[i] * nv[i] * cv[i];
    return d;
}

namespace detail {

// Mean over rows t of −log softmax(S[t, :] / τ)[t]; optionally writes dS.
template <typename T>
double infonce_rows(const DenseMatrix<T>& s, double tau, DenseMatrix<T>* grad) {
    const std::size_t n = s.rows();
    double total = 0.0;
    std::vector<double> e(s.cols());
    for (std::size_t t = 0; t < n; ++t) {
        auto row = s.row(t);
        double mx = -std::numeric_limits<double>::infinity();
        for (T v : row) mx = std::max(mx, static_cast<double>(v) / tau);
        double z = 0.0;
        for (std::size_t q = 0; q < row.size(); ++q) z += (e[q] = std::exp(static_cast<double>(row[q]) / tau - mx));
        total += -(static_cast<double>(row[t]) / tau - mx - std::log(z));
        if (grad) {
            auto g = grad->row(t);
            for (std::size_t q = 0; q < row.size(); ++q)
                g[q] += static_cast<T>((e[q] / z - (q == t ? 1.0 : 0.0)) / (tau * static_cast<double>(n)));
        }
    }
    const double loss = total / static_cast<double>(n);
    if (!std::isfinite(loss)) throw divergence_error("infonce_loss: non-finite value");
    return loss;
}

} // namespace detail

// InfoNCE reference loss with cosine similarities; anchors in view i,
// candidates in view j.
template <typename T>
double infonce_loss(const DenseMatrix<T>& hi, const DenseMatrix<T>& hj, double tau) {
    detail::require(tau > 0.0, "infonce_loss: temperature must be positive");
    detail::require(hi.same_shape(hj), "infonce_loss: embedding shapes differ");
    auto s = cosine_matrix(l2_normalize_rows(hi).normalized, l2_normalize_rows(hj).normalized);
    return detail::infonce_rows(s, tau, static_cast<DenseMatrix<T>*>(nullptr));
}

template <typename T>
struct ObjectiveResult {
    double value = 0.0;      // J = ½ (L^(i,j) + L^(j,i))
    double loss_ij = 0.0;
    double loss_ji = 0.0;
    bool degenerate_similarity = false;
    ModelParams<T> grads;    // ∂J/∂θ
};

// Smoothed positives for both view directions of one batch.
template <typename T>
struct ViewPairs {
    PairMatrix<T> pos_ij, neg_ij;
    PairMatrix<T> pos_ji, neg_ji;
};

template <typename T>
ViewPairs<T> build_view_pairs(const View<T>& vi, const View<T>& vj, const SmootherSpec& smoother) {
    const std::size_t n = vi.graph.num_nodes();
    detail::require(vj.graph.num_nodes() == n, "build_view_pairs: views must share the node set");
    auto init = identity_pairs<T>(n);
    ViewPairs<T> p;
    p.pos_ij = smooth_pairs(init, vi.graph, smoother);
    p.neg_ij = negatives(p.pos_ij);
    p.pos_ji = smooth_pairs(init, vj.graph, smoother);
    p.neg_ji = negatives(p.pos_ji);
    return p;
}

// J_SGCL for one batch, with gradients w.r.t. the encoder parameters.
// LossKind::binary forces the identity smoother (conventional binary pairs).
template <typename T>
ObjectiveResult<T> symmetric_objective(const View<T>& vi, const View<T>& vj, const ModelParams<T>& model,
                                       const SmootherSpec& smoother, const LossConfig& loss,
                                       bool compute_grads = true) {
    const std::size_t n = vi.graph.num_nodes();
    detail::require(vj.graph.num_nodes() == n, "symmetric_objective: views must share the node set");

    ForwardCache<T> ci, cj;
    auto hi = gcn_forward(vi.graph, vi.features, model.for_view(0), &ci);
    auto hj = gcn_forward(vj.graph, vj.features, model.for_view(1), &cj);
    auto ni = l2_normalize_rows(hi);
    auto nj = l2_normalize_rows(hj);

    ObjectiveResult<T> res;
    DenseMatrix<T> d_raw; // ∂J/∂S, S = Ĥi Ĥjᵀ

    if (loss.kind == LossKind::infonce) {
        auto s = cosine_matrix(ni.normalized, nj.normalized);
        auto st = s.transposed();
        DenseMatrix<T> g_ij(n, n), g_ji(n, n);
        res.loss_ij = detail::infonce_rows(s, loss.temperature, compute_grads ? &g_ij : nullptr);
        res.loss_ji = detail::infonce_rows(st, loss.temperature, compute_grads ? &g_ji : nullptr);
        res.value = 0.5 * (res.loss_ij + res.loss_ji);
        if (compute_grads) {
            d_raw = DenseMatrix<T>(n, n);
            for (std::size_t t = 0; t < n; ++t)
                for (std::size_t q = 0; q < n; ++q) d_raw(t, q) = T(0.5) * (g_ij(t, q) + g_ji(q, t));
        }
    } else {
        SmootherSpec spec = smoother;
        if (loss.kind == LossKind::binary) spec.kind = SmootherKind::identity;
        auto pairs = build_view_pairs(vi, vj, spec);
        const double lambda = loss.lambda_for(n);

        auto sim = minmax_normalize(cosine_matrix(ni.normalized, nj.normalized));
        res.degenerate_similarity = sim.degenerate;
        // C^(j,i) = (C^(i,j))ᵀ since min-max is taken over the whole matrix.
        auto ct = sim.normalized.transposed();
        res.loss_ij = sgcl_loss(sim.normalized, pairs.pos_ij, pairs.neg_ij, lambda);
        res.loss_ji = sgcl_loss(ct, pairs.pos_ji, pairs.neg_ji, lambda);
        res.value = 0.5 * (res.loss_ij + res.loss_ji);
        if (compute_grads) {
            auto g_ij = sgcl_loss_grad(sim.normalized, pairs.pos_ij, pairs.neg_ij, lambda);
            auto g_ji = sgcl_loss_grad(ct, pairs.pos_ji, pairs.neg_ji, lambda);
            DenseMatrix<T> dc(n, n);
            for (std::size_t t = 0; t < n; ++t)
                for (std::size_t q = 0; q < n; ++q) dc(t, q) = T(0.5) * (g_ij(t, q) + g_ji(q, t));
            d_raw = minmax_normalize_backward(sim, dc);
        }
    }
    if (!std::isfinite(res.value)) throw divergence_error("symmetric_objective: non-finite loss");

    res.grads = model.zeros_like();
    if (!compute_grads) return res;

    // S = Ĥi Ĥjᵀ ⇒ dĤi = dS Ĥj, dĤj = dSᵀ Ĥi
    auto d_ni = matmul(d_raw, nj.normalized);
    auto d_nj = matmul_tn(d_raw, ni.normalized);
    gcn_backward(ci, l2_normalize_rows_backward(ni, d_ni), res.grads.for_view(0));
    gcn_backward(cj, l2_normalize_rows_backward(nj, d_nj), res.grads.for_view(1));
    return res;
}

} // namespace sgcl
