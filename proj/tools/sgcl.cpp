// sgcl command-line driver.
//
//   sgcl [--seed N] [--out DIR] [--threads N] [--precision f32|f64] <command> ...
//
// Commands taking a config also accept `--section.key value` overrides.
// Exit codes: 0 success, 1 usage or config error, 2 runtime failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgcl.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    unsigned threads = 1;
    std::string precision = "f32";
};

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw sgcl::io_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sgcl::io_error("cannot write '" + path + "'");
    return f;
}

// `--a.b value` and `--a.b=value` pairs left over after CLI11 parsing.
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& rest) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        const auto& a = rest[i];
        if (a.rfind("--", 0) != 0 || a.find('.') == std::string::npos)
            throw usage_error("unexpected argument '" + a + "'");
        auto key = a.substr(2);
        std::string value;
        if (auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= rest.size()) throw usage_error("missing value for '" + a + "'");
            value = rest[++i];
        }
        out.emplace_back(key, value);
    }
    return out;
}

sgcl::RunConfig resolve_config(const std::string& path, const std::vector<std::string>& rest, const Globals& g) {
    sgcl::RunConfig cfg = path.empty() ? sgcl::RunConfig{} : sgcl::load_config(path);
    for (const auto& [k, v] : parse_overrides(rest)) sgcl::set_config_value(cfg, k, v);
    if (g.seed) cfg.train.seed = *g.seed;
    cfg.geodesic.threads = g.threads;
    return cfg;
}

void echo_config(const sgcl::RunConfig& cfg, const std::string& dir) {
    ensure_dir(dir);
    open_out(dir + "/config.ini") << sgcl::render_config(cfg);
}

template <typename T>
sgcl::Dataset<T> load_from(const sgcl::DataConfig& d) {
    if (d.graph_path().empty() || d.features_path().empty())
        throw sgcl::config_error("config: data.dir or data.graph and data.features must be set");
    return sgcl::load_dataset<T>(d.graph_path(), d.features_path(), d.labels_path());
}

// --- gen --------------------------------------------------------------------

struct GenArgs {
    std::size_t rows = 20, cols = 20;
    sgcl::KarimiSpec karimi;
};

int cmd_gen_grid(const GenArgs& a, const Globals& g) {
    auto graph = sgcl::gen_grid(a.rows, a.cols);
    sgcl::Dataset<double> ds;
    ds.graph = graph;
    // features: (row, col) coordinates; labels: quadrant index
    ds.features = sgcl::DenseMatrix<double>(graph.num_nodes(), 2);
    std::vector<std::int32_t> labels(graph.num_nodes());
    for (std::size_t r = 0; r < a.rows; ++r)
        for (std::size_t c = 0; c < a.cols; ++c) {
            const auto v = r * a.cols + c;
            ds.features(v, 0) = static_cast<double>(r);
            ds.features(v, 1) = static_cast<double>(c);
            labels[v] = static_cast<std::int32_t>((2 * r >= a.rows ? 2 : 0) + (2 * c >= a.cols ? 1 : 0));
        }
    ds.labels = std::move(labels);
    ensure_dir(g.out);
    sgcl::save_dataset(ds, g.out + "/graph.txt", g.out + "/features.txt", g.out + "/labels.txt");
    std::cout << "grid " << a.rows << "x" << a.cols << ": " << graph.num_nodes() << " nodes, " << graph.num_edges()
              << " edges -> " << g.out << "\n";
    return 0;
}

int cmd_gen_karimi(GenArgs a, const Globals& g) {
    if (g.seed) a.karimi.seed = *g.seed;
    auto ds = sgcl::gen_karimi<double>(a.karimi);
    ensure_dir(g.out);
    sgcl::save_dataset(ds, g.out + "/graph.txt", g.out + "/features.txt", g.out + "/labels.txt");
    std::cout << "karimi n=" << a.karimi.n << " m=" << a.karimi.m << " h=" << a.karimi.h << ": "
              << ds.graph.num_edges() << " edges, edge homophily " << sgcl::edge_homophily(ds.graph, *ds.labels) << " -> " << g.out
              << "\n";
    return 0;
}

// --- train ------------------------------------------------------------------

template <typename T>
int cmd_train(const sgcl::RunConfig& cfg, const Globals& g) {
    echo_config(cfg, g.out);
    auto ds = load_from<T>(cfg.data);
    const auto t0 = std::chrono::steady_clock::now();
    auto res = sgcl::train(ds, cfg.train, [](const sgcl::EpochRecord& e) {
        if (e.epoch == 1 || e.epoch % 10 == 0) std::cerr << "epoch " << e.epoch << "  J=" << e.loss << "\n";
    });
    const double total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    sgcl::save_checkpoint(res.model, g.out + "/checkpoint.bin");
    {
        auto f = open_out(g.out + "/loss.csv");
        sgcl::write_loss_trace(f, res.trace);
    }
    auto f = open_out(g.out + "/metrics.jsonl");
    const std::string variant = cfg.train.loss.kind == sgcl::LossKind::sgcl ? to_string(cfg.train.smoother.kind)
                                                                            : to_string(cfg.train.loss.kind);
    auto rec = [&](const std::string& metric, double v) {
        sgcl::write_metric(f, {"train", cfg.data.name, variant, cfg.train.seed, metric, v});
    };
    rec("initial_loss", res.trace.front().loss);
    rec("final_loss", res.trace.back().loss);
    rec("optimizer_steps", static_cast<double>(res.optimizer_steps));
    rec("wall_ms", total_ms);
    std::cout << "trained " << cfg.train.epochs << " epochs, final J=" << res.trace.back().loss << " -> " << g.out
              << "/checkpoint.bin\n";
    return 0;
}

// --- probe ------------------------------------------------------------------

template <typename T>
int cmd_probe(const sgcl::RunConfig& cfg, const std::string& checkpoint, const Globals& g) {
    echo_config(cfg, g.out);
    auto ds = load_from<T>(cfg.data);
    if (!ds.labels) throw sgcl::config_error("probe: dataset has no labels (set data.labels)");
    auto model = sgcl::load_checkpoint<T>(checkpoint);
    auto emb = sgcl::embed_full(ds, model);
    sgcl::ProbeConfig pc = cfg.probe;
    pc.seed = cfg.train.seed;
    auto res = sgcl::linear_probe(emb, *ds.labels, ds.num_classes, pc);
    auto f = open_out(g.out + "/probe.jsonl");
    for (std::size_t r = 0; r < res.accuracies.size(); ++r)
        sgcl::write_metric(f, {"probe", cfg.data.name, "repeat" + std::to_string(r), pc.seed, "test_accuracy",
                               res.accuracies[r]});
    sgcl::write_metric(f, {"probe", cfg.data.name, "mean", pc.seed, "test_accuracy", res.mean});
    sgcl::write_metric(f, {"probe", cfg.data.name, "std", pc.seed, "test_accuracy", res.stddev});
    std::cout << "test accuracy " << res.mean << " +- " << res.stddev << " over " << res.accuracies.size()
              << " splits\n";
    return 0;
}

// --- smooth-demo --------------------------------------------------------------

int cmd_smooth_demo(const sgcl::RunConfig& cfg, std::size_t rows, std::size_t cols, std::optional<std::size_t> node,
                    const Globals& g) {
    echo_config(cfg, g.out);
    auto graph = sgcl::gen_grid(rows, cols);
    std::size_t center;
    if (node) {
        center = *node;
        if (center >= graph.num_nodes()) throw usage_error("--node is outside the grid");
    } else {
        auto rng = sgcl::Rng(sgcl::derive_seed(cfg.train.seed, "smooth-demo"));
        center = std::uniform_int_distribution<std::size_t>(0, graph.num_nodes() - 1)(rng);
    }
    sgcl::DenseMatrix<double> delta(graph.num_nodes(), 1);
    delta(center, 0) = 1.0;
    auto out = sgcl::smooth_pairs(sgcl::PairMatrix<double>{delta, sgcl::PairRole::binary_pos}, graph, cfg.train.smoother);
    auto f = open_out(g.out + "/smooth.csv");
    f << "row,col,value\n";
    char buf[48];
    for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
        std::snprintf(buf, sizeof buf, "%.17g", out.values(v, 0));
        f << v / cols << ',' << v % cols << ',' << buf << '\n';
    }
    std::cout << "delta at (" << center / cols << ", " << center % cols << "), smoother "
              << to_string(cfg.train.smoother.kind) << " -> " << g.out << "/smooth.csv\n";
    return 0;
}

// --- geodesic -----------------------------------------------------------------

template <typename T>
int cmd_geodesic(const sgcl::RunConfig& cfg, const Globals& g) {
    echo_config(cfg, g.out);
    sgcl::GeodesicSweepConfig sc = cfg.geodesic;
    sc.train = cfg.train;
    if (g.seed) {
        // --seed offsets the seed list so distinct roots give distinct sweeps
        for (auto& s : sc.seeds) s = sgcl::derive_seed(*g.seed, "geodesic/seed", s);
    }
    auto rep = sgcl::geodesic_sweep<T>(sc);
    {
        auto f = open_out(g.out + "/geodesic.csv");
        sgcl::write_geodesic_csv(f, rep);
    }
    {
        auto f = open_out(g.out + "/metrics.jsonl");
        for (const auto& r : rep.rows) {
            char name[32];
            std::snprintf(name, sizeof name, "karimi-h%.1f", r.h);
            sgcl::write_metric(f, {"geodesic", name, r.variant, r.seed, "mean_geodesic", r.mean_geodesic});
            sgcl::write_metric(f, {"geodesic", name, r.variant, r.seed, "excluded_pairs",
                                   static_cast<double>(r.excluded_pairs)});
        }
    }
    nlohmann::ordered_json meta;
    meta["karimi_n"] = sc.karimi.n;
    meta["karimi_m"] = sc.karimi.m;
    meta["feature_dim"] = sc.karimi.feature_dim;
    meta["class_offset"] = sc.karimi.class_offset;
    meta["subsample"] = sc.subsample;
    meta["seeds"] = sc.seeds;
    meta["disconnected_pairs"] = "excluded from the mean, counted in excluded_pairs";
    meta["similarity"] = "min-max normalized cosine between two augmented views of the subsampled graph";
    open_out(g.out + "/geodesic_meta.json") << meta.dump(2) << "\n";
    std::cout << "h";
    for (const auto& v : sc.variants) std::cout << "  " << v;
    std::cout << "\n";
    for (double h : sc.h_values) {
        std::cout << h;
        for (const auto& v : sc.variants) std::cout << "  " << rep.seed_mean(h, v);
        std::cout << "\n";
    }
    return 0;
}

// --- sample-stats ---------------------------------------------------------------

int cmd_sample_stats(const sgcl::RunConfig& cfg, std::size_t trials, const Globals& g) {
    echo_config(cfg, g.out);
    auto ds = load_from<float>(cfg.data);
    const auto n = ds.num_nodes();
    std::vector<std::size_t> hits(n, 0);
    double sum_nodes = 0, sum_nodes2 = 0, sum_edges = 0;
    std::size_t met = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = sgcl::Rng(sgcl::derive_seed(cfg.train.seed, "sample-stats", t));
        auto sub = sgcl::draw_subgraph(ds.graph, cfg.train.sampler, rng);
        for (auto v : sub.global_ids) ++hits[v];
        const double k = static_cast<double>(sub.graph.num_nodes());
        sum_nodes += k;
        sum_nodes2 += k * k;
        sum_edges += static_cast<double>(sub.graph.num_edges());
        met += sub.budget_met;
    }
    const double tt = static_cast<double>(trials);
    const double mean = sum_nodes / tt;
    nlohmann::ordered_json j;
    j["sampler"] = to_string(cfg.train.sampler.kind);
    j["trials"] = trials;
    j["nodes"] = n;
    j["mean_nodes"] = mean;
    j["std_nodes"] = std::sqrt(std::max(0.0, sum_nodes2 / tt - mean * mean));
    j["mean_edges"] = sum_edges / tt;
    j["budget_met_fraction"] = static_cast<double>(met) / tt;
    j["node_coverage"] =
        static_cast<double>(std::count_if(hits.begin(), hits.end(), [](std::size_t h) { return h > 0; })) /
        static_cast<double>(n);
    j["min_node_frequency"] = static_cast<double>(*std::min_element(hits.begin(), hits.end())) / tt;
    j["max_node_frequency"] = static_cast<double>(*std::max_element(hits.begin(), hits.end())) / tt;
    const auto text = j.dump(2);
    open_out(g.out + "/sample_stats.json") << text << "\n";
    std::cout << text << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothed graph contrastive learning"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "root seed (overrides train.seed)");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--precision", g.precision, "tensor precision")->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();
    app.fallthrough();
    app.allow_extras();

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset");
    gen_cmd->require_subcommand(1);
    auto* grid_cmd = gen_cmd->add_subcommand("grid", "rows x cols 4-neighbour grid");
    grid_cmd->add_option("--rows", gen.rows)->check(CLI::PositiveNumber)->capture_default_str();
    grid_cmd->add_option("--cols", gen.cols)->check(CLI::PositiveNumber)->capture_default_str();
    auto* kar_cmd = gen_cmd->add_subcommand("karimi", "homophilic preferential attachment graph");
    kar_cmd->set_help_flag("--help", "print this help message and exit");
    kar_cmd->add_option("--n", gen.karimi.n)->capture_default_str();
    kar_cmd->add_option("--m", gen.karimi.m)->capture_default_str();
    kar_cmd->add_option("--h", gen.karimi.h, "homophily in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    kar_cmd->add_option("--minority-fraction", gen.karimi.minority_fraction)->capture_default_str();
    kar_cmd->add_option("--feature-dim", gen.karimi.feature_dim)->capture_default_str();
    kar_cmd->add_option("--class-offset", gen.karimi.class_offset)->capture_default_str();

    std::string config_path, checkpoint;
    auto with_config = [&](CLI::App* c) {
        c->add_option("--config", config_path, "INI config file");
        c->allow_extras();
        return c;
    };
    auto* train_cmd = with_config(app.add_subcommand("train", "train an encoder"));
    auto* probe_cmd = with_config(app.add_subcommand("probe", "linear probe on frozen embeddings"));
    probe_cmd->add_option("--checkpoint", checkpoint)->required();
    std::size_t demo_rows = 20, demo_cols = 20;
    std::optional<std::size_t> demo_node;
    auto* demo_cmd = with_config(app.add_subcommand("smooth-demo", "smooth a delta on a grid"));
    demo_cmd->add_option("--rows", demo_rows)->check(CLI::PositiveNumber)->capture_default_str();
    demo_cmd->add_option("--cols", demo_cols)->check(CLI::PositiveNumber)->capture_default_str();
    demo_cmd->add_option("--node", demo_node, "delta position (default: random from seed)");
    std::string demo_smoother;
    demo_cmd->add_option("--smoother", demo_smoother, "shorthand for --smoothing.kind");
    auto* geo_cmd = with_config(app.add_subcommand("geodesic", "geodesic proximity sweep on Karimi graphs"));
    std::size_t trials = 1000;
    auto* stats_cmd = with_config(app.add_subcommand("sample-stats", "sampler diagnostics"));
    stats_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const bool f64 = g.precision == "f64";
        const auto extras = app.remaining(true);
        if (gen_cmd->parsed()) {
            if (!extras.empty()) throw usage_error("unexpected argument '" + extras.front() + "'");
            return grid_cmd->parsed() ? cmd_gen_grid(gen, g) : cmd_gen_karimi(gen, g);
        }
        auto* active = app.get_subcommands().front();
        auto cfg = resolve_config(config_path, extras, g);
        if (active == train_cmd) return f64 ? cmd_train<double>(cfg, g) : cmd_train<float>(cfg, g);
        if (active == probe_cmd) return f64 ? cmd_probe<double>(cfg, checkpoint, g) : cmd_probe<float>(cfg, checkpoint, g);
        if (active == demo_cmd) {
            if (!demo_smoother.empty()) sgcl::set_config_value(cfg, "smoothing.kind", demo_smoother);
            return cmd_smooth_demo(cfg, demo_rows, demo_cols, demo_node, g);
        }
        if (active == geo_cmd) return f64 ? cmd_geodesic<double>(cfg, g) : cmd_geodesic<float>(cfg, g);
        if (active == stats_cmd) return cmd_sample_stats(cfg, trials, g);
        return 1;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sgcl::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
