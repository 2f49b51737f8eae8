#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgcl/augment.hpp"
#include "sgcl/datasets.hpp"
#include "sgcl/encoder.hpp"
#include "sgcl/objective.hpp"
#include "sgcl/samplers.hpp"
#include "sgcl/smoothing.hpp"

namespace sgcl {

template <typename T>
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    std::vector<DenseMatrix<T>> first;  // one per parameter tensor
    std::vector<DenseMatrix<T>> second;
};

// p ← p − lr · m̂ / (√v̂ + ε), bias-corrected moments. Moments are allocated
// on the first call.
template <typename T>
void adam_step(std::span<DenseMatrix<T>* const> params, std::span<const DenseMatrix<T>* const> grads,
               AdamState<T>& state) {
    detail::require(params.size() == grads.size(), "adam_step: parameter/gradient count mismatch");
    if (state.first.empty()) {
        for (auto* p : params) {
            state.first.emplace_back(p->rows(), p->cols());
            state.second.emplace_back(p->rows(), p->cols());
        }
    }
    detail::require(state.first.size() == params.size(), "adam_step: state does not match parameters");
    for (std::size_t k = 0; k < params.size(); ++k) {
        detail::require(params[k]->same_shape(*grads[k]) && params[k]->same_shape(state.first[k]),
                        "adam_step: shape mismatch");
        if (!grads[k]->all_finite()) throw divergence_error("adam_step: non-finite gradient");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto p = params[k]->values();
        auto g = grads[k]->values();
        auto m = state.first[k].values();
        auto v = state.second[k].values();
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (T(1) - b1) * g[i];
            v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] = static_cast<T>(p[i] - state.lr * mhat / (std::sqrt(vhat) + state.eps));
        }
    }
}

template <typename T>
void adam_step(ModelParams<T>& model, const ModelParams<T>& grads, AdamState<T>& state) {
    auto p = model.tensors();
    auto g = grads.tensors();
    adam_step<T>(std::span<DenseMatrix<T>* const>(p), std::span<const DenseMatrix<T>* const>(g), state);
}

enum class StepMode { epoch, batch };

struct TrainConfig {
    std::size_t epochs = 200;
    double lr = 1e-3;
    SamplerSpec sampler;
    std::size_t num_batches = 0;    // 0: ceil(N / budget)
    AugmentSpec augment_i;
    AugmentSpec augment_j;
    SmootherSpec smoother;
    LossConfig loss;
    std::size_t hidden_dim = 256;
    std::size_t out_dim = 128;
    bool shared_encoder = true;
    StepMode step_mode = StepMode::epoch;
    std::uint64_t seed = 1;

    std::size_t batches_for(std::size_t n) const {
        if (num_batches) return num_batches;
        const std::size_t b = sampler.budget;
        return std::max<std::size_t>(1, (n + b - 1) / b);
    }
};

struct EpochRecord {
    std::size_t epoch = 0;   // 1-based
    double loss = 0.0;       // J averaged over the epoch's batches
    double wall_ms = 0.0;
    std::size_t mean_batch_nodes = 0;
};

template <typename T>
struct TrainResult {
    ModelParams<T> model;
    std::vector<EpochRecord> trace;
    std::uint64_t optimizer_steps = 0;
};

// Views of batch b in epoch e draw from derive_seed(seed_e, "views", b) where
// seed_e = derive_seed(seed, "epoch", e); batches from seed_e via batch_stream.
template <typename T>
TrainResult<T> train(const Dataset<T>& ds, const TrainConfig& cfg,
                     const std::function<void(const EpochRecord&)>& on_epoch = {}) {
    detail::require(cfg.epochs >= 1, "train: epochs must be at least 1");
    cfg.smoother.validate();
    cfg.augment_i.validate();
    cfg.augment_j.validate();

    TrainResult<T> out;
    out.model = init_model<T>(ds.features.cols(), cfg.hidden_dim, cfg.out_dim, cfg.shared_encoder,
                              derive_seed(cfg.seed, "model"));
    AdamState<T> adam;
    adam.lr = cfg.lr;
    const std::size_t nb = cfg.batches_for(ds.num_nodes());
    const T inv_b = T(1) / static_cast<T>(nb);

    for (std::size_t e = 1; e <= cfg.epochs; ++e) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t epoch_seed = derive_seed(cfg.seed, "epoch", e);
        auto batches = batch_stream(ds, cfg.sampler, nb, epoch_seed);
        ModelParams<T> acc = out.model.zeros_like();
        double j_sum = 0.0;
        std::size_t node_sum = 0;
        for (std::size_t b = 0; b < nb; ++b) {
            auto [vi, vj] = make_views(batches[b], cfg.augment_i, cfg.augment_j, derive_seed(epoch_seed, "views", b));
            auto res = symmetric_objective(vi, vj, out.model, cfg.smoother, cfg.loss);
            if (!std::isfinite(res.value))
                throw divergence_error("train: non-finite loss at epoch " + std::to_string(e));
            j_sum += res.value;
            node_sum += batches[b].num_nodes();
            if (cfg.step_mode == StepMode::batch) {
                adam_step(out.model, res.grads, adam);
            } else {
                auto dst = acc.tensors();
                auto src = res.grads.tensors();
                for (std::size_t k = 0; k < dst.size(); ++k) {
                    auto d = dst[k]->values();
                    auto s = src[k]->values();
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] += inv_b * s[i];
                }
            }
        }
        if (cfg.step_mode == StepMode::epoch) {
            try {
                adam_step(out.model, acc, adam);
            } catch (const divergence_error&) {
                throw divergence_error("train: non-finite gradient at epoch " + std::to_string(e));
            }
        }
        EpochRecord rec;
        rec.epoch = e;
        rec.loss = j_sum / static_cast<double>(nb);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rec.mean_batch_nodes = node_sum / nb;
        out.trace.push_back(rec);
        if (on_epoch) on_epoch(rec);
    }
    out.optimizer_steps = adam.step;
    return out;
}

// Embeddings of the clean full graph (no augmentation) from the view-i encoder.
template <typename T>
DenseMatrix<T> embed_full(const Dataset<T>& ds, const ModelParams<T>& model) {
    detail::require(!model.encoders.empty(), "embed_full: empty model");
    return gcn_forward(ds.graph, ds.features, model.for_view(0));
}

} // namespace sgcl
