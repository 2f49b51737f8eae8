#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "sgcl/datasets.hpp"
#include "sgcl/graph.hpp"
#include "sgcl/objective.hpp"
#include "sgcl/training.hpp"

namespace sgcl {

// ---------------------------------------------------------------------------
// Linear probe: multinomial logistic regression on frozen embeddings.
// ---------------------------------------------------------------------------

enum class ProbeOptimizer { adam, gd };

struct ProbeConfig {
    double l2_reg = 1e-4;
    std::size_t steps = 5000;
    double lr = 0.01;
    std::size_t repeats = 5;
    ProbeOptimizer optimizer = ProbeOptimizer::adam;
    std::size_t eval_every = 10;   // validation check interval for model selection
    SplitRatios ratios;
    std::uint64_t seed = 1;

    void validate() const {
        detail::require(steps >= 1, "probe: steps must be at least 1");
        detail::require(l2_reg >= 0.0, "probe: l2_reg must be nonnegative");
        detail::require(repeats >= 1, "probe: repeats must be at least 1");
        detail::require(eval_every >= 1, "probe: eval_every must be at least 1");
    }
};

struct SoftmaxModel {
    DenseMatrix<double> weights; // F × C
    std::vector<double> bias;    // C
};

struct ProbeObjective {
    double loss = 0.0;
    SoftmaxModel grad;
};

// Mean cross-entropy over `rows` plus (l2/2)‖W‖², with gradients.
inline ProbeObjective probe_objective(const SoftmaxModel& m, const DenseMatrix<double>& x,
                                      const std::vector<std::int32_t>& labels, std::span<const node_id> rows,
                                      double l2) {
    const std::size_t f = m.weights.rows(), c = m.weights.cols();
    ProbeObjective out{0.0, {DenseMatrix<double>(f, c), std::vector<double>(c, 0.0)}};
    std::vector<double> logits(c);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (node_id r : rows) {
        auto xr = x.row(r);
        for (std::size_t k = 0; k < c; ++k) logits[k] = m.bias[k];
        for (std::size_t j = 0; j < f; ++j) {
            const double xv = xr[j];
            if (xv == 0.0) continue;
            auto wj = m.weights.row(j);
            for (std::size_t k = 0; k < c; ++k) logits[k] += xv * wj[k];
        }
        const double mx = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (auto& l : logits) z += (l = std::exp(l - mx));
        const auto y = static_cast<std::size_t>(labels[r]);
        out.loss -= std::log(logits[y] / z) * inv_n;
        for (std::size_t k = 0; k < c; ++k) {
            const double g = (logits[k] / z - (k == y ? 1.0 : 0.0)) * inv_n;
            out.grad.bias[k] += g;
            if (g == 0.0) continue;
            for (std::size_t j = 0; j < f; ++j) out.grad.weights(j, k) += g * xr[j];
        }
    }
    auto w = m.weights.values();
    auto gw = out.grad.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
        out.loss += 0.5 * l2 * w[i] * w[i];
        gw[i] += l2 * w[i];
    }
    return out;
}

inline double probe_accuracy(const SoftmaxModel& m, const DenseMatrix<double>& x,
                             const std::vector<std::int32_t>& labels, std::span<const node_id> rows) {
    if (rows.empty()) return 0.0;
    const std::size_t f = m.weights.rows(), c = m.weights.cols();
    std::size_t correct = 0;
    std::vector<double> logits(c);
    for (node_id r : rows) {
        auto xr = x.row(r);
        for (std::size_t k = 0; k < c; ++k) logits[k] = m.bias[k];
        for (std::size_t j = 0; j < f; ++j)
            for (std::size_t k = 0; k < c; ++k) logits[k] += xr[j] * m.weights(j, k);
        const auto pred = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (pred == static_cast<std::size_t>(labels[r])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

struct ProbeRun {
    double test_accuracy = 0.0;
    double val_accuracy = 0.0;
    std::size_t best_step = 0;
    std::vector<double> loss_trace; // training objective, one entry per step
};

// Trains on splits.train; reports test accuracy at the step with the best
// validation accuracy (final step when there is no validation set).
template <typename T>
ProbeRun probe_once(const DenseMatrix<T>& embeddings, const std::vector<std::int32_t>& labels,
                    std::size_t num_classes, const SplitSpec& splits, const ProbeConfig& cfg) {
    cfg.validate();
    detail::require(labels.size() == embeddings.rows(), "linear_probe: label count does not match embeddings");
    detail::require(!splits.train.empty(), "linear_probe: empty training split");
    {
        auto first = labels[splits.train.front()];
        bool multi = std::any_of(splits.train.begin(), splits.train.end(), [&](node_id r) { return labels[r] != first; });
        detail::require(multi, "linear_probe: training split contains a single class");
    }
    const auto x = embeddings.template cast<double>();
    const std::size_t f = x.cols();
    const std::size_t c = std::max<std::size_t>(num_classes, 2);
    SoftmaxModel m{DenseMatrix<double>(f, c), std::vector<double>(c, 0.0)};

    // Adam moments over [W, b]
    std::vector<double> m1(f * c + c, 0.0), m2(f * c + c, 0.0);
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    ProbeRun run;
    run.loss_trace.reserve(cfg.steps);
    double best_val = -1.0;
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        auto obj = probe_objective(m, x, labels, splits.train, cfg.l2_reg);
        run.loss_trace.push_back(obj.loss);
        auto w = m.weights.values();
        auto gw = obj.grad.weights.values();
        auto update = [&](double& p, double g, std::size_t k) {
            if (cfg.optimizer == ProbeOptimizer::gd) {
                p -= cfg.lr * g;
                return;
            }
            m1[k] = b1 * m1[k] + (1 - b1) * g;
            m2[k] = b2 * m2[k] + (1 - b2) * g * g;
            const double mh = m1[k] / (1 - std::pow(b1, static_cast<double>(step)));
            const double vh = m2[k] / (1 - std::pow(b2, static_cast<double>(step)));
            p -= cfg.lr * mh / (std::sqrt(vh) + eps);
        };
        for (std::size_t i = 0; i < w.size(); ++i) update(w[i], gw[i], i);
        for (std::size_t k = 0; k < c; ++k) update(m.bias[k], obj.grad.bias[k], w.size() + k);

        if (step % cfg.eval_every == 0 || step == cfg.steps) {
            const double val = splits.val.empty() ? 0.0 : probe_accuracy(m, x, labels, splits.val);
            if (splits.val.empty() ? step == cfg.steps : val > best_val) {
                best_val = val;
                run.val_accuracy = val;
                run.best_step = step;
                run.test_accuracy = probe_accuracy(m, x, labels, splits.test);
            }
        }
    }
    return run;
}

struct ProbeResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> accuracies;
};

// Mean ± population std of test accuracy over `repeats` reshuffled splits.
template <typename T>
ProbeResult linear_probe(const DenseMatrix<T>& embeddings, const std::vector<std::int32_t>& labels,
                         std::size_t num_classes, const ProbeConfig& cfg) {
    cfg.validate();
    ProbeResult res;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        auto splits = make_splits(embeddings.rows(), cfg.ratios, derive_seed(cfg.seed, "probe/split", r));
        res.accuracies.push_back(probe_once(embeddings, labels, num_classes, splits, cfg).test_accuracy);
    }
    const double n = static_cast<double>(res.accuracies.size());
    res.mean = std::accumulate(res.accuracies.begin(), res.accuracies.end(), 0.0) / n;
    double var = 0.0;
    for (double a : res.accuracies) var += (a - res.mean) * (a - res.mean);
    res.stddev = std::sqrt(var / n);
    return res;
}

// ---------------------------------------------------------------------------
// Geodesic proximity of predicted positives
// ---------------------------------------------------------------------------

// Argmax, first occurrence on ties.
template <typename T>
std::size_t predicted_positive(std::span<const T> row) {
    detail::require(!row.empty(), "predicted_positive: empty row");
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

struct GeodesicResult {
    double mean = 0.0;
    std::size_t counted = 0;
    std::size_t excluded = 0; // predicted node in a different component
};

// Mean hop distance on `g` between each anchor t and argmax_q C[t, q].
template <typename T>
GeodesicResult mean_geodesic(const Graph& g, const DenseMatrix<T>& c) {
    detail::require(c.rows() == g.num_nodes() && c.cols() == g.num_nodes(),
                    "mean_geodesic: similarity matrix must be square over the graph's nodes");
    GeodesicResult res;
    double total = 0.0;
    for (node_id t = 0; t < g.num_nodes(); ++t) {
        const auto q = static_cast<node_id>(predicted_positive(c.row(t)));
        if (q == t) {
            ++res.counted;
            continue;
        }
        const auto d = bfs_distances(g, t)[q];
        if (d == unreachable) {
            ++res.excluded;
            continue;
        }
        total += d;
        ++res.counted;
    }
    if (res.counted == 0) throw invalid_input("mean_geodesic: every predicted pair is disconnected");
    res.mean = total / static_cast<double>(res.counted);
    return res;
}

struct GeodesicVariant {
    std::string name;
    LossKind loss = LossKind::sgcl;
    SmootherKind smoother = SmootherKind::taubin;
};

inline GeodesicVariant parse_geodesic_variant(const std::string& name) {
    if (name == "binary") return {name, LossKind::binary, SmootherKind::identity};
    if (name == "infonce") return {name, LossKind::infonce, SmootherKind::identity};
    return {name, LossKind::sgcl, parse_smoother_kind(name)};
}

struct GeodesicSweepConfig {
    std::vector<double> h_values{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::string> variants{"binary", "taubin"};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    KarimiSpec karimi;                // n, m, features; h and seed are swept
    std::size_t subsample = 500;
    TrainConfig train;                // loss kind and smoother kind are set per variant
    unsigned threads = 1;
};

struct GeodesicRow {
    double h = 0.0;
    std::string variant;
    std::uint64_t seed = 0;
    double mean_geodesic = 0.0;
    std::size_t excluded_pairs = 0;
};

struct GeodesicReport {
    std::vector<GeodesicRow> rows;

    // Seed-averaged mean geodesic distance for (h, variant).
    double seed_mean(double h, const std::string& variant) const {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& r : rows)
            if (r.variant == variant && std::abs(r.h - h) < 1e-9) s += r.mean_geodesic, ++n;
        return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    }
};

// Similarity matrix between two augmented views of the whole graph, computed
// with the trained model. The view draw depends only on `view_seed`, so every
// variant is scored on the same pair of views.
template <typename T>
DenseMatrix<T> evaluation_similarity(const Dataset<T>& ds, const ModelParams<T>& model, const TrainConfig& cfg,
                                     std::uint64_t view_seed) {
    Batch<T> whole;
    whole.subgraph = ds.graph;
    whole.global_ids.resize(ds.num_nodes());
    std::iota(whole.global_ids.begin(), whole.global_ids.end(), node_id{0});
    whole.features = ds.features;
    auto [vi, vj] = make_views(whole, cfg.augment_i, cfg.augment_j, view_seed);
    auto hi = l2_normalize_rows(gcn_forward(vi.graph, vi.features, model.for_view(0))).normalized;
    auto hj = l2_normalize_rows(gcn_forward(vj.graph, vj.features, model.for_view(1))).normalized;
    return minmax_normalize(cosine_matrix(hi, hj)).normalized;
}

// One (h, seed) cell for every variant.
template <typename T>
std::vector<GeodesicRow> geodesic_cell(const GeodesicSweepConfig& cfg, double h, std::uint64_t seed) {
    KarimiSpec ks = cfg.karimi;
    ks.h = h;
    ks.seed = derive_seed(seed, "geodesic/karimi", static_cast<std::uint64_t>(std::llround(h * 1000)));
    auto full = gen_karimi<T>(ks);
    auto ds = cfg.subsample && cfg.subsample < full.num_nodes()
                  ? subsample_nodes(full, cfg.subsample, derive_seed(ks.seed, "geodesic/subsample"))
                  : full;
    std::vector<GeodesicRow> out;
    for (const auto& name : cfg.variants) {
        auto v = parse_geodesic_variant(name);
        TrainConfig tc = cfg.train;
        tc.loss.kind = v.loss;
        tc.smoother.kind = v.smoother;
        tc.seed = derive_seed(ks.seed, "geodesic/train");
        auto trained = train(ds, tc);
        auto c = evaluation_similarity(ds, trained.model, tc, derive_seed(ks.seed, "geodesic/views"));
        auto g = mean_geodesic(ds.graph, c);
        out.push_back({h, name, seed, g.mean, g.excluded});
    }
    return out;
}

template <typename T>
GeodesicReport geodesic_sweep(const GeodesicSweepConfig& cfg) {
    detail::require(!cfg.h_values.empty() && !cfg.variants.empty() && !cfg.seeds.empty(),
                    "geodesic_sweep: empty h, variant or seed list");
    for (double h : cfg.h_values) detail::require(h >= 0.0 && h <= 0.9 + 1e-12, "geodesic_sweep: h must lie in [0, 0.9]");
    struct Cell {
        double h;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double h : cfg.h_values)
        for (auto s : cfg.seeds) cells.push_back({h, s});
    std::vector<std::vector<GeodesicRow>> results(cells.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cells.size())));
    std::size_t next = 0;
    std::mutex mu;
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= cells.size() || failure) return;
                i = next++;
            }
            try {
                results[i] = geodesic_cell<T>(cfg, cells[i].h, cells[i].seed);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    GeodesicReport rep;
    // row order: h, then variant, then seed
    for (double h : cfg.h_values)
        for (const auto& name : cfg.variants)
            for (auto s : cfg.seeds)
                for (std::size_t i = 0; i < cells.size(); ++i)
                    if (cells[i].h == h && cells[i].seed == s)
                        for (const auto& row : results[i])
                            if (row.variant == name) rep.rows.push_back(row);
    return rep;
}

} // namespace sgcl
