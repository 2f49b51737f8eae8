#pragma once

#include <cstdint>
#include <cstdio>
#include <vector>
#include <ostream>
#include <string>

#include <json.hpp>

#include "sgcl/evaluation.hpp"

namespace sgcl {

struct MetricRecord {
    std::string task;
    std::string dataset;
    std::string variant;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
};

inline std::string to_json_line(const MetricRecord& r) {
    nlohmann::ordered_json j;
    j["task"] = r.task;
    j["dataset"] = r.dataset;
    j["variant"] = r.variant;
    j["seed"] = r.seed;
    j["metric"] = r.metric;
    j["value"] = r.value;
    return j.dump();
}

inline void write_metric(std::ostream& out, const MetricRecord& r) { out << to_json_line(r) << '\n'; }

inline constexpr const char* geodesic_csv_header = "h,variant,seed,mean_geodesic,excluded_pairs";

inline void write_geodesic_csv(std::ostream& out, const GeodesicReport& rep) {
    out << geodesic_csv_header << '\n';
    char buf[64];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.1f", r.h);
        out << buf << ',' << r.variant << ',' << r.seed << ',';
        std::snprintf(buf, sizeof buf, "%.6f", r.mean_geodesic);
        out << buf << ',' << r.excluded_pairs << '\n';
    }
}

// epoch,J,wall_ms
inline void write_loss_trace(std::ostream& out, const std::vector<EpochRecord>& trace) {
    out << "epoch,J,wall_ms\n";
    char buf[96];
    for (const auto& e : trace) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.3f\n", e.epoch, e.loss, e.wall_ms);
        out << buf;
    }
}

} // namespace sgcl
