#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sgcl/evaluation.hpp"
#include "sgcl/training.hpp"

namespace sgcl {

// Flat INI: `[section]` headers, `key = value` lines, `#` or `;` comments.
// Keys are addressed as "section.key".

struct DataConfig {
    std::string dir;       // when set, graph/features/labels default to dir/{graph,features,labels}.txt
    std::string graph;
    std::string features;
    std::string labels;
    std::string name = "dataset";

    std::string graph_path() const { return !graph.empty() || dir.empty() ? graph : dir + "/graph.txt"; }
    std::string features_path() const { return !features.empty() || dir.empty() ? features : dir + "/features.txt"; }
    std::string labels_path() const { return !labels.empty() || dir.empty() ? labels : dir + "/labels.txt"; }
};

struct RunConfig {
    DataConfig data;
    TrainConfig train;
    ProbeConfig probe;
    GeodesicSweepConfig geodesic; // its `train` member is replaced by `train` above when run
};

class config_error : public invalid_input {
public:
    using invalid_input::invalid_input;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

template <typename Num>
Num parse_value(const std::string& key, const std::string& v) {
    Num out{};
    const auto* first = v.data();
    const auto* last = v.data() + v.size();
    auto [p, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || p != last) throw config_error("config: bad value '" + v + "' for " + key);
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("config: bad boolean '" + v + "' for " + key);
}

template <typename Num>
std::string show(Num v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline std::string show_bool(bool b) { return b ? "true" : "false"; }

template <typename Num>
std::string show_list(const std::vector<Num>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + show(xs[i]);
    return out;
}

inline std::string show_list(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
    return out;
}

template <typename Num>
std::vector<Num> parse_list(const std::string& key, const std::string& v) {
    std::vector<Num> out;
    for (const auto& item : split_list(v)) out.push_back(parse_value<Num>(key, item));
    return out;
}

inline const char* show(FeatureMaskMode m) { return m == FeatureMaskMode::element ? "element" : "dimension"; }
inline const char* show(EdgeMode m) { return m == EdgeMode::drop_only ? "drop_only" : "flip"; }
inline const char* show(EdgeWeighting w) { return w == EdgeWeighting::uniform ? "uniform" : "degree"; }
inline const char* show(BilateralExponent e) { return e == BilateralExponent::squared ? "squared" : "linear"; }
inline const char* show(StepMode m) { return m == StepMode::epoch ? "epoch" : "batch"; }
inline const char* show(ProbeOptimizer o) { return o == ProbeOptimizer::adam ? "adam" : "gd"; }

} // namespace detail

struct ConfigKey {
    std::string name; // section.key
    std::string doc;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys() {
    using namespace detail;
    using R = RunConfig;
    using S = const std::string&;
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        auto add = [&](std::string name, std::string doc, std::function<void(R&, S)> set,
                       std::function<std::string(const R&)> get) {
            k.push_back({std::move(name), std::move(doc), std::move(set), std::move(get)});
        };
        // [data]
        add("data.dir", "directory holding graph.txt, features.txt, labels.txt",
            [](R& c, S v) { c.data.dir = v; }, [](const R& c) { return c.data.dir; });
        add("data.graph", "edge list path (overrides data.dir)",
            [](R& c, S v) { c.data.graph = v; }, [](const R& c) { return c.data.graph; });
        add("data.features", "feature matrix path (overrides data.dir)",
            [](R& c, S v) { c.data.features = v; }, [](const R& c) { return c.data.features; });
        add("data.labels", "label path, optional (overrides data.dir)",
            [](R& c, S v) { c.data.labels = v; }, [](const R& c) { return c.data.labels; });
        add("data.name", "dataset name used in metric records",
            [](R& c, S v) { c.data.name = v; }, [](const R& c) { return c.data.name; });

        // [sampler]
        add("sampler.kind", "node | edge | random_walk | ego",
            [](R& c, S v) { c.train.sampler.kind = parse_sampler_kind(v); },
            [](const R& c) { return std::string(to_string(c.train.sampler.kind)); });
        add("sampler.budget", "nodes per batch (edges for the edge sampler)",
            [](R& c, S v) { c.train.sampler.budget = parse_value<std::size_t>("sampler.budget", v); },
            [](const R& c) { return show(c.train.sampler.budget); });
        add("sampler.walk_length", "random-walk length",
            [](R& c, S v) { c.train.sampler.walk_length = parse_value<std::size_t>("sampler.walk_length", v); },
            [](const R& c) { return show(c.train.sampler.walk_length); });
        add("sampler.num_roots", "random-walk roots per round",
            [](R& c, S v) { c.train.sampler.num_roots = parse_value<std::size_t>("sampler.num_roots", v); },
            [](const R& c) { return show(c.train.sampler.num_roots); });
        add("sampler.ego_hops", "ego-network radius",
            [](R& c, S v) { c.train.sampler.ego_hops = parse_value<std::uint32_t>("sampler.ego_hops", v); },
            [](const R& c) { return show(c.train.sampler.ego_hops); });
        add("sampler.edge_weighting", "uniform | degree",
            [](R& c, S v) {
                if (v == "uniform") c.train.sampler.edge_weighting = EdgeWeighting::uniform;
                else if (v == "degree") c.train.sampler.edge_weighting = EdgeWeighting::degree;
                else throw config_error("config: bad value '" + v + "' for sampler.edge_weighting");
            },
            [](const R& c) { return std::string(show(c.train.sampler.edge_weighting)); });
        add("sampler.num_batches", "batches per epoch; auto = ceil(N / budget)",
            [](R& c, S v) {
                c.train.num_batches = v == "auto" ? 0 : parse_value<std::size_t>("sampler.num_batches", v);
            },
            [](const R& c) { return c.train.num_batches ? show(c.train.num_batches) : std::string("auto"); });

        // [augment], applied to both views with independent draws
        add("augment.edge_drop_prob", "edge drop probability",
            [](R& c, S v) {
                c.train.augment_i.edge_drop_prob = c.train.augment_j.edge_drop_prob =
                    parse_value<double>("augment.edge_drop_prob", v);
            },
            [](const R& c) { return show(c.train.augment_i.edge_drop_prob); });
        add("augment.feature_mask_prob", "feature mask probability",
            [](R& c, S v) {
                c.train.augment_i.feature_mask_prob = c.train.augment_j.feature_mask_prob =
                    parse_value<double>("augment.feature_mask_prob", v);
            },
            [](const R& c) { return show(c.train.augment_i.feature_mask_prob); });
        add("augment.mode", "feature masking: element | dimension",
            [](R& c, S v) { c.train.augment_i.feature_mask_mode = c.train.augment_j.feature_mask_mode = parse_feature_mask_mode(v); },
            [](const R& c) { return std::string(show(c.train.augment_i.feature_mask_mode)); });
        add("augment.edge_mode", "drop_only | flip",
            [](R& c, S v) { c.train.augment_i.edge_mode = c.train.augment_j.edge_mode = parse_edge_mode(v); },
            [](const R& c) { return std::string(show(c.train.augment_i.edge_mode)); });

        // [smoothing]
        add("smoothing.kind", "identity | taubin | bilateral | diffusion",
            [](R& c, S v) { c.train.smoother.kind = parse_smoother_kind(v); },
            [](const R& c) { return std::string(to_string(c.train.smoother.kind)); });
        add("smoothing.mu", "Taubin inflation coefficient (mu < -tau)",
            [](R& c, S v) { c.train.smoother.mu = parse_value<double>("smoothing.mu", v); },
            [](const R& c) { return show(c.train.smoother.mu); });
        add("smoothing.tau", "Taubin shrink coefficient (> 0)",
            [](R& c, S v) { c.train.smoother.tau = parse_value<double>("smoothing.tau", v); },
            [](const R& c) { return show(c.train.smoother.tau); });
        add("smoothing.K", "iterations for Taubin and diffusion",
            [](R& c, S v) { c.train.smoother.iterations = parse_value<std::size_t>("smoothing.K", v); },
            [](const R& c) { return show(c.train.smoother.iterations); });
        add("smoothing.sigma_spa", "bilateral spatial bandwidth",
            [](R& c, S v) { c.train.smoother.sigma_spa = parse_value<double>("smoothing.sigma_spa", v); },
            [](const R& c) { return show(c.train.smoother.sigma_spa); });
        add("smoothing.sigma_int", "bilateral intensity bandwidth",
            [](R& c, S v) { c.train.smoother.sigma_int = parse_value<double>("smoothing.sigma_int", v); },
            [](const R& c) { return show(c.train.smoother.sigma_int); });
        add("smoothing.radius", "bilateral hop cutoff",
            [](R& c, S v) { c.train.smoother.radius = parse_value<std::uint32_t>("smoothing.radius", v); },
            [](const R& c) { return show(c.train.smoother.radius); });
        add("smoothing.exponent", "bilateral distance form: squared | linear",
            [](R& c, S v) {
                if (v == "squared") c.train.smoother.exponent = BilateralExponent::squared;
                else if (v == "linear") c.train.smoother.exponent = BilateralExponent::linear;
                else throw config_error("config: bad value '" + v + "' for smoothing.exponent");
            },
            [](const R& c) { return std::string(show(c.train.smoother.exponent)); });
        add("smoothing.eta", "diffusion step",
            [](R& c, S v) { c.train.smoother.eta = parse_value<double>("smoothing.eta", v); },
            [](const R& c) { return show(c.train.smoother.eta); });

        // [encoder]
        add("encoder.hidden_dim", "hidden width F_h",
            [](R& c, S v) { c.train.hidden_dim = parse_value<std::size_t>("encoder.hidden_dim", v); },
            [](const R& c) { return show(c.train.hidden_dim); });
        add("encoder.out_dim", "embedding width F'",
            [](R& c, S v) { c.train.out_dim = parse_value<std::size_t>("encoder.out_dim", v); },
            [](const R& c) { return show(c.train.out_dim); });
        add("encoder.shared", "one encoder for both views",
            [](R& c, S v) { c.train.shared_encoder = parse_bool("encoder.shared", v); },
            [](const R& c) { return show_bool(c.train.shared_encoder); });

        // [loss]
        add("loss.lambda", "negative weight; auto = 1 / (2 N_b)",
            [](R& c, S v) {
                if (v == "auto") c.train.loss.lambda.reset();
                else c.train.loss.lambda = parse_value<double>("loss.lambda", v);
            },
            [](const R& c) { return c.train.loss.lambda ? show(*c.train.loss.lambda) : std::string("auto"); });
        add("loss.baseline", "none (smoothed objective) | binary | infonce",
            [](R& c, S v) { c.train.loss.kind = v == "none" ? LossKind::sgcl : parse_loss_kind(v); },
            [](const R& c) {
                return c.train.loss.kind == LossKind::sgcl ? std::string("none") : std::string(to_string(c.train.loss.kind));
            });
        add("loss.temperature", "InfoNCE temperature",
            [](R& c, S v) { c.train.loss.temperature = parse_value<double>("loss.temperature", v); },
            [](const R& c) { return show(c.train.loss.temperature); });

        // [train]
        add("train.epochs", "training epochs",
            [](R& c, S v) { c.train.epochs = parse_value<std::size_t>("train.epochs", v); },
            [](const R& c) { return show(c.train.epochs); });
        add("train.lr", "Adam learning rate",
            [](R& c, S v) { c.train.lr = parse_value<double>("train.lr", v); },
            [](const R& c) { return show(c.train.lr); });
        add("train.step_mode", "epoch (one step on the batch mean) | batch (one step per batch)",
            [](R& c, S v) {
                if (v == "epoch") c.train.step_mode = StepMode::epoch;
                else if (v == "batch") c.train.step_mode = StepMode::batch;
                else throw config_error("config: bad value '" + v + "' for train.step_mode");
            },
            [](const R& c) { return std::string(show(c.train.step_mode)); });
        add("train.seed", "root seed (overridden by --seed)",
            [](R& c, S v) { c.train.seed = parse_value<std::uint64_t>("train.seed", v); },
            [](const R& c) { return show(c.train.seed); });

        // [eval]
        add("eval.l2_reg", "probe l2 strength",
            [](R& c, S v) { c.probe.l2_reg = parse_value<double>("eval.l2_reg", v); },
            [](const R& c) { return show(c.probe.l2_reg); });
        add("eval.steps", "probe optimizer steps",
            [](R& c, S v) { c.probe.steps = parse_value<std::size_t>("eval.steps", v); },
            [](const R& c) { return show(c.probe.steps); });
        add("eval.lr", "probe learning rate",
            [](R& c, S v) { c.probe.lr = parse_value<double>("eval.lr", v); },
            [](const R& c) { return show(c.probe.lr); });
        add("eval.optimizer", "probe optimizer: adam | gd",
            [](R& c, S v) {
                if (v == "adam") c.probe.optimizer = ProbeOptimizer::adam;
                else if (v == "gd") c.probe.optimizer = ProbeOptimizer::gd;
                else throw config_error("config: bad value '" + v + "' for eval.optimizer");
            },
            [](const R& c) { return std::string(show(c.probe.optimizer)); });
        add("eval.repeats", "probe repeats over reshuffled splits",
            [](R& c, S v) { c.probe.repeats = parse_value<std::size_t>("eval.repeats", v); },
            [](const R& c) { return show(c.probe.repeats); });
        add("eval.eval_every", "validation check interval (steps)",
            [](R& c, S v) { c.probe.eval_every = parse_value<std::size_t>("eval.eval_every", v); },
            [](const R& c) { return show(c.probe.eval_every); });
        add("eval.train_ratio", "train split fraction",
            [](R& c, S v) { c.probe.ratios.train = parse_value<double>("eval.train_ratio", v); },
            [](const R& c) { return show(c.probe.ratios.train); });
        add("eval.val_ratio", "validation split fraction",
            [](R& c, S v) { c.probe.ratios.val = parse_value<double>("eval.val_ratio", v); },
            [](const R& c) { return show(c.probe.ratios.val); });
        add("eval.test_ratio", "test split fraction",
            [](R& c, S v) { c.probe.ratios.test = parse_value<double>("eval.test_ratio", v); },
            [](const R& c) { return show(c.probe.ratios.test); });
        add("eval.h_values", "geodesic sweep homophily values",
            [](R& c, S v) { c.geodesic.h_values = parse_list<double>("eval.h_values", v); },
            [](const R& c) { return show_list(c.geodesic.h_values); });
        add("eval.variants", "geodesic sweep variants: binary, infonce, taubin, bilateral, diffusion",
            [](R& c, S v) {
                auto xs = split_list(v);
                for (const auto& x : xs) parse_geodesic_variant(x);
                c.geodesic.variants = xs;
            },
            [](const R& c) { return show_list(c.geodesic.variants); });
        add("eval.seeds", "geodesic sweep seeds",
            [](R& c, S v) { c.geodesic.seeds = parse_list<std::uint64_t>("eval.seeds", v); },
            [](const R& c) { return show_list(c.geodesic.seeds); });
        add("eval.karimi_n", "Karimi graph size before subsampling",
            [](R& c, S v) { c.geodesic.karimi.n = parse_value<std::size_t>("eval.karimi_n", v); },
            [](const R& c) { return show(c.geodesic.karimi.n); });
        add("eval.karimi_m", "Karimi edges per arriving node",
            [](R& c, S v) { c.geodesic.karimi.m = parse_value<std::size_t>("eval.karimi_m", v); },
            [](const R& c) { return show(c.geodesic.karimi.m); });
        add("eval.minority_fraction", "Karimi minority label probability",
            [](R& c, S v) { c.geodesic.karimi.minority_fraction = parse_value<double>("eval.minority_fraction", v); },
            [](const R& c) { return show(c.geodesic.karimi.minority_fraction); });
        add("eval.feature_dim", "Karimi feature width",
            [](R& c, S v) { c.geodesic.karimi.feature_dim = parse_value<std::size_t>("eval.feature_dim", v); },
            [](const R& c) { return show(c.geodesic.karimi.feature_dim); });
        add("eval.class_offset", "Karimi class mean offset delta",
            [](R& c, S v) { c.geodesic.karimi.class_offset = parse_value<double>("eval.class_offset", v); },
            [](const R& c) { return show(c.geodesic.karimi.class_offset); });
        add("eval.subsample", "nodes kept per Karimi graph (0 keeps all)",
            [](R& c, S v) { c.geodesic.subsample = parse_value<std::size_t>("eval.subsample", v); },
            [](const R& c) { return show(c.geodesic.subsample); });
        return k;
    }();
    return keys;
}

inline const ConfigKey* find_config_key(std::string_view name) {
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto* k = find_config_key(key);
    if (!k) throw config_error("config: unknown key '" + key + "'");
    try {
        k->set(cfg, value);
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error("config: " + key + ": " + e.what());
    }
}

// Applies every key=value in `text` on top of `cfg`. `origin` prefixes errors.
inline void apply_ini(RunConfig& cfg, std::istream& in, const std::string& origin) {
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto where = origin + ":" + std::to_string(lineno) + ": ";
        auto t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw config_error(where + "malformed section header");
            section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw config_error(where + "expected key = value");
        if (section.empty()) throw config_error(where + "key outside any section");
        const auto key = section + "." + detail::trim(std::string_view(t).substr(0, eq));
        const auto value = detail::trim(std::string_view(t).substr(eq + 1));
        try {
            set_config_value(cfg, key, value);
        } catch (const config_error& e) {
            throw config_error(where + e.what());
        }
    }
}

inline RunConfig parse_config_string(const std::string& text, RunConfig base = {}) {
    std::istringstream in(text);
    apply_ini(base, in, "<string>");
    return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    apply_ini(base, in, path);
    return base;
}

// Resolved config as INI, every key present; parsing it back yields the same config.
inline std::string render_config(const RunConfig& cfg) {
    std::string out, section;
    for (const auto& k : config_keys()) {
        const auto dot = k.name.find('.');
        const auto sec = k.name.substr(0, dot);
        if (sec != section) {
            out += (section.empty() ? "[" : "\n[") + sec + "]\n";
            section = sec;
        }
        out += k.name.substr(dot + 1) + " = " + k.get(cfg) + "\n";
    }
    return out;
}

} // namespace sgcl
