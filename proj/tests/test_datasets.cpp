#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace sgcl;

namespace {

std::string tmp_path(const std::string& name) {
    auto dir = std::filesystem::path(::testing::TempDir()) / "sgcl_datasets";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

} // namespace

TEST(Loaders, ToyFiles) {
    const auto g = tmp_path("toy_graph.txt"), f = tmp_path("toy_features.txt"), l = tmp_path("toy_labels.txt");
    write_file(g, "3 2\n0 1\n1 2\n");
    write_file(f, "3 2\n0.5 1\n-2 3.25\n0 0\n");
    write_file(l, "0\n1\n0\n");
    auto ds = load_dataset<double>(g, f, l);
    EXPECT_EQ(ds.num_nodes(), 3u);
    EXPECT_EQ(ds.features.cols(), 2u);
    EXPECT_EQ(ds.graph.num_edges(), 2u);
    EXPECT_DOUBLE_EQ(ds.features(1, 1), 3.25);
    EXPECT_EQ(ds.num_classes, 2u);
}

TEST(Loaders, CarriageReturnsStripped) {
    const auto g = tmp_path("crlf_graph.txt");
    write_file(g, "3 1\r\n0 2\r\n");
    EXPECT_TRUE(load_graph(g).has_edge(0, 2));
}

TEST(Loaders, DimensionMismatch) {
    const auto g = tmp_path("mm_graph.txt"), f = tmp_path("mm_features.txt");
    write_file(g, "3 1\n0 1\n");
    write_file(f, "4 1\n1\n2\n3\n4\n");
    try {
        load_dataset<double>(g, f);
        FAIL() << "expected a dimension mismatch";
    } catch (const invalid_input& e) {
        EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos);
    }
}

TEST(Loaders, ErrorsNameThePath) {
    const auto missing = tmp_path("does_not_exist.txt");
    try {
        load_graph(missing);
        FAIL();
    } catch (const io_error& e) {
        EXPECT_NE(std::string(e.what()).find(missing), std::string::npos);
    }
    const auto bad = tmp_path("bad_graph.txt");
    write_file(bad, "3 1\n0 7\n");
    EXPECT_THROW(load_graph(bad), invalid_input);
    write_file(bad, "3 2\n0 1\n");
    EXPECT_THROW(load_graph(bad), invalid_input);
    const auto labels = tmp_path("gap_labels.txt");
    write_file(labels, "0\n2\n");
    EXPECT_THROW(validate_labels(load_labels(labels)), invalid_input);
}

TEST(Loaders, RoundTripIsBitIdentical) {
    auto ds = gen_karimi<double>({.n = 300, .m = 2, .h = 0.7, .seed = 4});
    const auto g = tmp_path("rt_graph.txt"), f = tmp_path("rt_features.txt"), l = tmp_path("rt_labels.txt");
    save_dataset(ds, g, f, l);
    auto back = load_dataset<double>(g, f, l);
    EXPECT_EQ(back.graph, ds.graph);
    EXPECT_EQ(back.features, ds.features);
    EXPECT_EQ(back.labels, ds.labels);
    // saving again gives the same bytes
    const auto g2 = tmp_path("rt2_graph.txt"), f2 = tmp_path("rt2_features.txt"), l2 = tmp_path("rt2_labels.txt");
    save_dataset(back, g2, f2, l2);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    EXPECT_EQ(slurp(f), slurp(f2));
    EXPECT_EQ(slurp(g), slurp(g2));
}

TEST(Splits, Sizes) {
    auto s10 = make_splits(10, {}, 1);
    EXPECT_EQ(s10.train.size(), 1u);
    EXPECT_EQ(s10.val.size(), 1u);
    EXPECT_EQ(s10.test.size(), 8u);
    auto s = make_splits(2485, {}, 1);
    EXPECT_EQ(s.train.size(), 248u);
    EXPECT_EQ(s.val.size(), 248u);
    EXPECT_EQ(s.test.size(), 1989u);
}

TEST(Splits, DisjointCoveringDeterministic) {
    auto a = make_splits(1000, {0.3, 0.2, 0.5}, 9);
    auto b = make_splits(1000, {0.3, 0.2, 0.5}, 9);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::vector<int> seen(1000, 0);
    for (auto* part : {&a.train, &a.val, &a.test})
        for (auto v : *part) ++seen[v];
    for (int c : seen) EXPECT_EQ(c, 1);
    EXPECT_NE(make_splits(1000, {0.3, 0.2, 0.5}, 10).train, a.train);
}

TEST(Grid, SmallCases) {
    EXPECT_EQ(gen_grid(1, 1).num_edges(), 0u);
    EXPECT_EQ(gen_grid(2, 2).num_edges(), 4u);
    EXPECT_EQ(gen_grid(20, 20).num_edges(), 760u);
    EXPECT_EQ(gen_grid(3, 5).num_edges(), 3u * 4 + 5u * 2);
}

TEST(Karimi, ExtremeHomophily) {
    for (double h : {0.0, 1.0}) {
        KarimiSpec ks{.n = 800, .m = 2, .h = h, .seed = 3};
        auto ds = gen_karimi<double>(ks);
        const auto& lab = *ds.labels;
        for (auto [u, v] : ds.graph.edge_list()) {
            if (std::max(u, v) <= ks.m) continue; // seed clique
            if (h == 1.0) EXPECT_EQ(lab[u], lab[v]);
            else EXPECT_NE(lab[u], lab[v]);
        }
    }
}

TEST(Karimi, HalfHomophilyMeasured) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto ds = gen_karimi<double>({.n = 5000, .m = 2, .h = 0.5, .seed = s});
        EXPECT_NEAR(edge_homophily(ds.graph, *ds.labels), 0.5, 0.03) << "seed " << s;
    }
}

TEST(Karimi, HomophilyMonotone) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto lo = gen_karimi<double>({.n = 2000, .h = 0.1, .seed = s});
        auto hi = gen_karimi<double>({.n = 2000, .h = 0.9, .seed = s});
        EXPECT_GT(edge_homophily(hi.graph, *hi.labels), edge_homophily(lo.graph, *lo.labels));
    }
}

TEST(Karimi, HeavyTailedDegrees) {
    auto ds = gen_karimi<double>({.n = 2000, .m = 2, .h = 0.5, .seed = 8});
    std::size_t max_deg = 0;
    for (node_id v = 0; v < ds.num_nodes(); ++v) max_deg = std::max(max_deg, ds.graph.degree(v));
    const double mean = 2.0 * static_cast<double>(ds.graph.num_edges()) / static_cast<double>(ds.num_nodes());
    EXPECT_GT(static_cast<double>(max_deg), 3.0 * mean);
}

TEST(Karimi, FeaturesCarryClassOffset) {
    auto ds = gen_karimi<double>({.n = 4000, .h = 0.5, .seed = 2, .feature_dim = 4, .class_offset = 2.0});
    double mean0 = 0, mean1 = 0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t v = 0; v < ds.num_nodes(); ++v) {
        if ((*ds.labels)[v] == 0) mean0 += ds.features(v, 0), ++n0;
        else mean1 += ds.features(v, 0), ++n1;
    }
    EXPECT_NEAR(mean0 / static_cast<double>(n0), 2.0, 0.15);
    EXPECT_NEAR(mean1 / static_cast<double>(n1), 0.0, 0.15);
}

TEST(Karimi, Deterministic) {
    KarimiSpec ks{.n = 500, .h = 0.8, .seed = 1};
    auto a = gen_karimi<double>(ks), b = gen_karimi<double>(ks);
    EXPECT_EQ(a.graph, b.graph);
    EXPECT_EQ(a.features, b.features);
    EXPECT_THROW(gen_karimi<double>({.h = 1.5}), invalid_input);
}

TEST(Subsample, Cases) {
    auto ds = gen_karimi<double>({.n = 5000, .seed = 6});
    auto same = subsample_nodes(ds, ds.num_nodes(), 1);
    EXPECT_EQ(same.graph, ds.graph);
    EXPECT_EQ(same.features, ds.features);
    auto one = subsample_nodes(ds, 1, 1);
    EXPECT_EQ(one.num_nodes(), 1u);
    EXPECT_EQ(one.graph.num_edges(), 0u);
    auto k = subsample_nodes(ds, 500, 1);
    EXPECT_EQ(k.num_nodes(), 500u);
    EXPECT_EQ(k.labels->size(), 500u);
    EXPECT_EQ(k.features.rows(), 500u);
}
