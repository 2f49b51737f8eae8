#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace sgcl;

namespace {

std::vector<node_id> all_rows(std::size_t n) {
    std::vector<node_id> r(n);
    std::iota(r.begin(), r.end(), node_id{0});
    return r;
}

// Two Gaussian blobs along the first axis, well apart.
void separable(std::size_t n, DenseMatrix<double>& x, std::vector<std::int32_t>& y, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    x = DenseMatrix<double>(n, 4);
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<std::int32_t>(i % 2);
        for (std::size_t c = 0; c < 4; ++c) x(i, c) = noise(rng);
        x(i, 0) += y[i] ? 3.0 : -3.0;
    }
}

GeodesicSweepConfig tiny_sweep() {
    GeodesicSweepConfig cfg;
    cfg.h_values = {0.2, 0.8};
    cfg.seeds = {1, 2};
    cfg.karimi.n = 300;
    cfg.karimi.m = 3;
    cfg.subsample = 120;
    cfg.train.epochs = 3;
    cfg.train.hidden_dim = 16;
    cfg.train.out_dim = 8;
    return cfg;
}

} // namespace

TEST(Probe, DefaultsAndValidation) {
    ProbeConfig cfg;
    EXPECT_EQ(cfg.l2_reg, 1e-4);
    EXPECT_EQ(cfg.steps, 5000u);
    cfg.steps = 0;
    EXPECT_THROW(cfg.validate(), invalid_input);
}

TEST(Probe, SeparableDataIsPerfect) {
    DenseMatrix<double> x;
    std::vector<std::int32_t> y;
    separable(600, x, y, 1);
    ProbeConfig cfg;
    cfg.steps = 300;
    cfg.repeats = 3;
    auto res = linear_probe(x, y, 2, cfg);
    EXPECT_EQ(res.mean, 1.0);
    EXPECT_EQ(res.stddev, 0.0);
    EXPECT_EQ(res.accuracies.size(), 3u);
}

TEST(Probe, ShuffledLabelsAreChance) {
    auto x = oracle::random_matrix(3000, 8, 2);
    std::mt19937_64 rng(3);
    std::vector<std::int32_t> y(3000);
    for (auto& v : y) v = static_cast<std::int32_t>(rng() & 1u);
    ProbeConfig cfg;
    cfg.steps = 300;
    cfg.repeats = 2;
    EXPECT_NEAR(linear_probe(x, y, 2, cfg).mean, 0.5, 0.05);
}

TEST(Probe, ObjectiveGradientFiniteDifference) {
    auto x = oracle::random_matrix(10, 3, 4);
    std::vector<std::int32_t> y{0, 1, 2, 0, 1, 2, 0, 1, 2, 2};
    auto rows = all_rows(10);
    SoftmaxModel m{oracle::random_matrix(3, 3, 5), {0.1, -0.2, 0.05}};
    auto obj = probe_objective(m, x, y, rows, 0.3);
    std::vector<double> theta(m.weights.values().begin(), m.weights.values().end());
    theta.insert(theta.end(), m.bias.begin(), m.bias.end());
    auto f = [&](const std::vector<double>& t) {
        SoftmaxModel p{DenseMatrix<double>(3, 3, std::vector<double>(t.begin(), t.begin() + 9)),
                       std::vector<double>(t.begin() + 9, t.end())};
        return probe_objective(p, x, y, rows, 0.3).loss;
    };
    auto fd = oracle::central_diff(f, theta, 1e-6);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(obj.grad.weights.values()[i], fd[i], 1e-8);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(obj.grad.bias[k], fd[9 + k], 1e-8);
}

TEST(Probe, GradientDescentDecreasesMonotonically) {
    DenseMatrix<double> x;
    std::vector<std::int32_t> y;
    separable(200, x, y, 6);
    ProbeConfig cfg;
    cfg.optimizer = ProbeOptimizer::gd;
    cfg.lr = 0.05;
    cfg.steps = 200;
    auto run = probe_once(x, y, 2, make_splits(200, {}, 1), cfg);
    ASSERT_EQ(run.loss_trace.size(), 200u);
    for (std::size_t i = 1; i < run.loss_trace.size(); ++i) EXPECT_LE(run.loss_trace[i], run.loss_trace[i - 1]);
    EXPECT_GE(run.best_step, 1u);
}

TEST(Probe, SingleClassTrainingSplitRejected) {
    auto x = oracle::random_matrix(20, 3, 7);
    std::vector<std::int32_t> y(20, 1);
    y[19] = 0;
    SplitSpec s{{0, 1, 2}, {3}, {19}};
    EXPECT_THROW(probe_once(x, y, 2, s, ProbeConfig{}), invalid_input);
    SplitSpec empty{{}, {3}, {19}};
    EXPECT_THROW(probe_once(x, y, 2, empty, ProbeConfig{}), invalid_input);
}

TEST(PredictedPositive, ArgmaxFirstOnTies) {
    std::vector<double> onehot{0, 0, 1, 0};
    EXPECT_EQ(predicted_positive<double>(onehot), 2u);
    std::vector<double> flat(5, 0.3);
    EXPECT_EQ(predicted_positive<double>(flat), 0u);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> row(7);
        for (auto& v : row) v = static_cast<double>(rng() % 4);
        std::size_t best = 0;
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] > row[best]) best = i;
        EXPECT_EQ(predicted_positive<double>(row), best);
    }
}

TEST(MeanGeodesic, IdentityIsZero) {
    auto g = gen_grid(5, 5);
    auto r = mean_geodesic(g, DenseMatrix<double>::identity(25));
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.counted, 25u);
}

TEST(MeanGeodesic, PathToEndpoint) {
    // every anchor predicts node 0
    const std::size_t n = 9;
    std::vector<Edge> e;
    for (node_id v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
    auto g = build_graph(e, n);
    DenseMatrix<double> c(n, n);
    for (std::size_t t = 0; t < n; ++t) c(t, 0) = 1.0;
    EXPECT_DOUBLE_EQ(mean_geodesic(g, c).mean, (n - 1) / 2.0);
}

TEST(MeanGeodesic, DisconnectedPairsExcluded) {
    auto g = build_graph({{0, 1}, {2, 3}}, 4);
    DenseMatrix<double> c(4, 4);
    c(0, 1) = c(1, 2) = c(2, 3) = c(3, 3) = 1.0;
    auto r = mean_geodesic(g, c);
    EXPECT_EQ(r.excluded, 1u);
    EXPECT_EQ(r.counted, 3u);
    EXPECT_DOUBLE_EQ(r.mean, 2.0 / 3.0);
    DenseMatrix<double> bad(4, 4);
    bad(0, 2) = bad(1, 2) = bad(2, 0) = bad(3, 0) = 1.0;
    EXPECT_THROW(mean_geodesic(g, bad), invalid_input);
}

TEST(MeanGeodesic, MatchesFloydWarshall) {
    auto g = oracle::random_graph(40, 0.08, 9);
    auto c = oracle::random_matrix(40, 40, 10);
    auto d = oracle::floyd_warshall(g);
    double total = 0;
    std::size_t counted = 0;
    for (std::size_t t = 0; t < 40; ++t) {
        std::size_t q = 0;
        for (std::size_t j = 1; j < 40; ++j)
            if (c(t, j) > c(t, q)) q = j;
        if (d[t][q] == oracle::inf) continue;
        total += d[t][q];
        ++counted;
    }
    auto r = mean_geodesic(g, c);
    EXPECT_EQ(r.counted, counted);
    EXPECT_NEAR(r.mean, total / static_cast<double>(counted), 1e-12);
}

TEST(Variants, Parse) {
    EXPECT_EQ(parse_geodesic_variant("binary").loss, LossKind::binary);
    EXPECT_EQ(parse_geodesic_variant("infonce").loss, LossKind::infonce);
    auto t = parse_geodesic_variant("diffusion");
    EXPECT_EQ(t.loss, LossKind::sgcl);
    EXPECT_EQ(t.smoother, SmootherKind::diffusion);
    EXPECT_THROW(parse_geodesic_variant("laplace"), invalid_input);
}

TEST(Sweep, RowsOrderedAndDeterministic) {
    auto cfg = tiny_sweep();
    auto a = geodesic_sweep<double>(cfg);
    ASSERT_EQ(a.rows.size(), 2u * 2u * 2u);
    EXPECT_EQ(a.rows[0].h, 0.2);
    EXPECT_EQ(a.rows[0].variant, "binary");
    EXPECT_EQ(a.rows[0].seed, 1u);
    EXPECT_EQ(a.rows[1].seed, 2u);
    EXPECT_EQ(a.rows[2].variant, "taubin");
    EXPECT_EQ(a.rows[4].h, 0.8);
    cfg.threads = 2;
    auto b = geodesic_sweep<double>(cfg);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].mean_geodesic, b.rows[i].mean_geodesic);
        EXPECT_GE(a.rows[i].mean_geodesic, 0.0);
    }
    EXPECT_NEAR(a.seed_mean(0.2, "binary"), 0.5 * (a.rows[0].mean_geodesic + a.rows[1].mean_geodesic), 1e-12);
    cfg.h_values = {0.95};
    EXPECT_THROW(geodesic_sweep<double>(cfg), invalid_input);
}

TEST(Metrics, GeodesicCsvFormat) {
    GeodesicReport rep;
    rep.rows.push_back({0.1, "taubin", 3, 1.25, 4});
    std::ostringstream out;
    write_geodesic_csv(out, rep);
    EXPECT_EQ(out.str(), "h,variant,seed,mean_geodesic,excluded_pairs\n0.1,taubin,3,1.250000,4\n");
}

TEST(Metrics, JsonLineAndLossTrace) {
    MetricRecord r{"probe", "cora", "taubin", 1, "accuracy", 0.5};
    EXPECT_EQ(to_json_line(r),
              R"({"task":"probe","dataset":"cora","variant":"taubin","seed":1,"metric":"accuracy","value":0.5})");
    std::ostringstream out;
    write_loss_trace(out, {{1, 0.25, 3.0, 10}});
    EXPECT_EQ(out.str(), "epoch,J,wall_ms\n1,0.25,3.000\n");
}
