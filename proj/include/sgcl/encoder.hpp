#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "sgcl/dense.hpp"
#include "sgcl/errors.hpp"
#include "sgcl/graph.hpp"
#include "sgcl/rng.hpp"

namespace sgcl {

template <typename T>
struct EncoderParams {
    DenseMatrix<T> w1; // F × F_h
    DenseMatrix<T> w2; // F_h × F′

    std::size_t in_dim() const noexcept { return w1.rows(); }
    std::size_t hidden_dim() const noexcept { return w1.cols(); }
    std::size_t out_dim() const noexcept { return w2.cols(); }

    friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

// One encoder when weights are shared across views, two otherwise
// (encoders[0] for view i, encoders[1] for view j).
template <typename T>
struct ModelParams {
    std::vector<EncoderParams<T>> encoders;

    bool shared() const noexcept { return encoders.size() == 1; }
    const EncoderParams<T>& for_view(std::size_t v) const { return encoders[shared() ? 0 : v]; }
    EncoderParams<T>& for_view(std::size_t v) { return encoders[shared() ? 0 : v]; }

    std::vector<DenseMatrix<T>*> tensors() {
        std::vector<DenseMatrix<T>*> out;
        for (auto& e : encoders) out.insert(out.end(), {&e.w1, &e.w2});
        return out;
    }
    std::vector<const DenseMatrix<T>*> tensors() const {
        std::vector<const DenseMatrix<T>*> out;
        for (auto& e : encoders) out.insert(out.end(), {&e.w1, &e.w2});
        return out;
    }

    ModelParams zeros_like() const {
        ModelParams z;
        for (auto& e : encoders)
            z.encoders.push_back({DenseMatrix<T>(e.w1.rows(), e.w1.cols()), DenseMatrix<T>(e.w2.rows(), e.w2.cols())});
        return z;
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Glorot-uniform: entries in ±√(6 / (fan_in + fan_out)).
template <typename T>
DenseMatrix<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-a, a);
    DenseMatrix<T> w(fan_in, fan_out);
    for (auto& v : w.values()) v = static_cast<T>(u(rng));
    return w;
}

template <typename T>
EncoderParams<T> init_params(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, std::uint64_t seed) {
    detail::require(in_dim >= 1 && hidden_dim >= 1 && out_dim >= 1, "init_params: dimensions must be positive");
    Rng rng(derive_seed(seed, "encoder/init"));
    EncoderParams<T> p;
    p.w1 = glorot_uniform<T>(in_dim, hidden_dim, rng);
    p.w2 = glorot_uniform<T>(hidden_dim, out_dim, rng);
    return p;
}

template <typename T>
ModelParams<T> init_model(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, bool shared,
                          std::uint64_t seed) {
    ModelParams<T> m;
    m.encoders.push_back(init_params<T>(in_dim, hidden_dim, out_dim, seed));
    if (!shared) m.encoders.push_back(init_params<T>(in_dim, hidden_dim, out_dim, derive_seed(seed, "encoder/view_j")));
    return m;
}

// Everything gcn_backward needs. Borrows the graph, the input features and the
// parameters of the forward call; they must outlive the cache.
template <typename T>
struct ForwardCache {
    const Graph* graph = nullptr;
    const DenseMatrix<T>* input = nullptr;
    const EncoderParams<T>* params = nullptr;
    DenseMatrix<T> pre_activation;   // Z1 = Â X W1
    DenseMatrix<T> hidden;           // relu(Z1)
};

// H = Â · relu(Â · X · W1) · W2, Â = D̃^{-1/2}(A + I)D̃^{-1/2}. Output layer is
// linear.
template <typename T>
DenseMatrix<T> gcn_forward(const Graph& g, const DenseMatrix<T>& x, const EncoderParams<T>& params,
                           ForwardCache<T>* cache = nullptr) {
    detail::require(x.rows() == g.num_nodes(), "gcn_forward: feature rows must match node count");
    detail::require(x.cols() == params.in_dim(), "gcn_forward: feature width does not match W1");
    detail::require(params.w2.rows() == params.hidden_dim(), "gcn_forward: W1/W2 shapes are inconsistent");
    auto z1 = sym_norm_propagate(g, matmul(x, params.w1));
    DenseMatrix<T> a1 = z1;
    for (auto& v : a1.values()) v = v > T(0) ? v : T(0);
    auto h = sym_norm_propagate(g, matmul(a1, params.w2));
    if (!h.all_finite()) throw divergence_error("gcn_forward: non-finite embeddings");
    if (cache) {
        cache->graph = &g;
        cache->input = &x;
        cache->params = &params;
        cache->pre_activation = std::move(z1);
        cache->hidden = std::move(a1);
    }
    return h;
}

// Exact adjoint of the recorded forward pass. Gradients are accumulated into
// `grads` (which must have the parameter shapes). relu'(0) = 0.
template <typename T>
void gcn_backward(const ForwardCache<T>& cache, const DenseMatrix<T>& d_out, EncoderParams<T>& grads) {
    detail::require(cache.graph && cache.input && cache.params, "gcn_backward: empty cache");
    const Graph& g = *cache.graph;
    const auto& p = *cache.params;
    detail::require(d_out.rows() == g.num_nodes() && d_out.cols() == p.out_dim(),
                    "gcn_backward: output gradient shape does not match the cached forward pass");
    detail::require(cache.hidden.rows() == g.num_nodes() && cache.hidden.cols() == p.hidden_dim(),
                    "gcn_backward: stale cache");
    detail::require(grads.w1.same_shape(p.w1) && grads.w2.same_shape(p.w2), "gcn_backward: gradient shape mismatch");

    auto g2 = sym_norm_propagate(g, d_out);            // Âᵀ dH (Â symmetric)
    grads.w2 += matmul_tn(cache.hidden, g2);
    auto d_hidden = matmul_nt(g2, p.w2);
    auto z = cache.pre_activation.values();
    auto dh = d_hidden.values();
    for (std::size_t i = 0; i < dh.size(); ++i)
        if (!(z[i] > T(0))) dh[i] = T(0);
    auto g1 = sym_norm_propagate(g, d_hidden);
    grads.w1 += matmul_tn(*cache.input, g1);
}

inline constexpr double norm_epsilon = 1e-12;

template <typename T>
struct RowNormalization {
    DenseMatrix<T> normalized;
    std::vector<T> scale; // max(‖row‖, ε) per row
};

template <typename T>
RowNormalization<T> l2_normalize_rows(const DenseMatrix<T>& h) {
    RowNormalization<T> out{DenseMatrix<T>(h.rows(), h.cols()), std::vector<T>(h.rows())};
    for (std::size_t r = 0; r < h.rows(); ++r) {
        auto src = h.row(r);
        T sq = T(0);
        for (T v : src) sq += v * v;
        const T s = std::max(std::sqrt(sq), static_cast<T>(norm_epsilon));
        out.scale[r] = s;
        auto dst = out.normalized.row(r);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] / s;
    }
    return out;
}

// dH = (dĤ − Ĥ ⟨Ĥ, dĤ⟩) / ‖h‖ for rows above the ε-guard; dĤ / ε otherwise.
template <typename T>
DenseMatrix<T> l2_normalize_rows_backward(const RowNormalization<T>& fwd, const DenseMatrix<T>& d_normalized) {
    detail::require(d_normalized.same_shape(fwd.normalized), "l2_normalize_rows_backward: shape mismatch");
    DenseMatrix<T> dh(d_normalized.rows(), d_normalized.cols());
    for (std::size_t r = 0; r < dh.rows(); ++r) {
        auto y = fwd.normalized.row(r);
        auto dy = d_normalized.row(r);
        auto out = dh.row(r);
        const T s = fwd.scale[r];
        if (s > static_cast<T>(norm_epsilon)) {
            T dot = T(0);
            for (std::size_t c = 0; c < y.size(); ++c) dot += y[c] * dy[c];
            for (std::size_t c = 0; c < y.size(); ++c) out[c] = (dy[c] - y[c] * dot) / s;
        } else {
            for (std::size_t c = 0; c < y.size(); ++c) out[c] = dy[c] / s;
        }
    }
    return dh;
}

// ---------------------------------------------------------------------------
// Checkpoint file (little-endian):
//   char[8]  "SGCLCKPT"
//   u32      version (1)
//   u32      bytes per weight (4 = f32, 8 = f64)
//   u32      encoder count (1 = shared, 2 = per-view)
//   per encoder, for W1 then W2:
//     u64 rows, u64 cols, rows·cols weights row-major
// ---------------------------------------------------------------------------

inline constexpr char checkpoint_magic[8] = {'S', 'G', 'C', 'L', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t checkpoint_version = 1;

namespace detail {

template <typename U>
void write_pod(std::ostream& out, U v) {
    static_assert(std::is_trivially_copyable_v<U>);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename U>
U read_pod(std::istream& in, const std::string& path) {
    U v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw io_error("checkpoint '" + path + "' is truncated");
    return v;
}

} // namespace detail

template <typename Stored, typename T>
void save_checkpoint_as(const ModelParams<T>& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write checkpoint '" + path + "'");
    out.write(checkpoint_magic, sizeof checkpoint_magic);
    detail::write_pod<std::uint32_t>(out, checkpoint_version);
    detail::write_pod<std::uint32_t>(out, sizeof(Stored));
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.encoders.size()));
    for (const auto* w : model.tensors()) {
        detail::write_pod<std::uint64_t>(out, w->rows());
        detail::write_pod<std::uint64_t>(out, w->cols());
        for (T v : w->values()) detail::write_pod<Stored>(out, static_cast<Stored>(v));
    }
    if (!out) throw io_error("failed writing checkpoint '" + path + "'");
}

// Weights are stored in the model's own precision.
template <typename T>
void save_checkpoint(const ModelParams<T>& model, const std::string& path) {
    save_checkpoint_as<T>(model, path);
}

template <typename T>
ModelParams<T> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, checkpoint_magic, sizeof magic) != 0)
        throw invalid_input("'" + path + "' is not a checkpoint file");
    const auto version = detail::read_pod<std::uint32_t>(in, path);
    if (version != checkpoint_version)
        throw invalid_input("checkpoint '" + path + "' has unsupported version " + std::to_string(version));
    const auto width = detail::read_pod<std::uint32_t>(in, path);
    if (width != 4 && width != 8) throw invalid_input("checkpoint '" + path + "' has invalid weight width");
    const auto count = detail::read_pod<std::uint32_t>(in, path);
    if (count != 1 && count != 2) throw invalid_input("checkpoint '" + path + "' has invalid encoder count");
    ModelParams<T> model;
    model.encoders.resize(count);
    for (auto* w : model.tensors()) {
        const auto rows = detail::read_pod<std::uint64_t>(in, path);
        const auto cols = detail::read_pod<std::uint64_t>(in, path);
        *w = DenseMatrix<T>(rows, cols);
        for (auto& v : w->values())
            v = width == 4 ? static_cast<T>(detail::read_pod<float>(in, path))
                           : static_cast<T>(detail::read_pod<double>(in, path));
    }
    for (const auto& e : model.encoders)
        if (e.w2.rows() != e.w1.cols()) throw invalid_input("checkpoint '" + path + "' has inconsistent shapes");
    return model;
}

} // namespace sgcl
