#pragma once

// JSON and CSV serialization of verification reports. JSON output is
// deterministic modulo the generated_at stamp (keys are sorted, numbers use
// shortest round-trip form). Files are written atomically: a sibling
// temporary is renamed into place, so readers never observe partial output.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "divfree.hpp"
#include "verify.hpp"

namespace ellcalc {

inline constexpr const char* kReportSchemaVersion = "1";

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

inline nlohmann::json to_json(const GridSpec& g) {
    return {{"n_phi", g.n_phi},
            {"n_theta", g.n_theta},
            {"phi", {g.phi_lo, g.phi_hi}},
            {"theta", {g.theta_lo, g.theta_hi}}};
}

inline nlohmann::json to_json(const ResidualReport& r) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& row : r.terms)
        terms.push_back({{"name", row.name},
                         {"max_dphi", row.max_dphi},
                         {"max_dtheta", row.max_dtheta}});
    return {{"field", r.field},
            {"a", r.a},
            {"grid", to_json(r.grid)},
            {"max_abs_dphi", r.max_abs_dphi},
            {"max_abs_dtheta", r.max_abs_dtheta},
            {"mean_abs_dphi", r.mean_abs_dphi},
            {"mean_abs_dtheta", r.mean_abs_dtheta},
            {"rel_max", r.rel_max},
            {"tolerance", r.tolerance},
            {"pass", r.pass},
            {"terms", terms},
            {"worst", {{"phi", r.worst.phi},
                       {"theta", r.worst.theta},
                       {"residual", r.worst.residual},
                       {"component", r.worst.component}}}};
}

inline nlohmann::json to_json(const ExpansionReport& r) {
    return {{"field", r.field},
            {"mu", r.mu},
            {"err_forms", r.err_forms},
            {"err_components", r.err_components},
            {"slope_forms", r.slope_forms},
            {"slope_components", r.slope_components},
            {"degenerate_forms", r.degenerate_forms},
            {"degenerate_components", r.degenerate_components},
            {"min_slope", r.min_slope},
            {"slopes_agree", r.slopes_agree},
            {"pass", r.pass}};
}

inline nlohmann::json to_json(const SeriesReport& r) {
    return {{"K", r.K},
            {"mu", r.mu},
            {"geo_max_err", r.geo_max_err},
            {"geo_bound", r.geo_bound},
            {"dgeo_max_err", r.dgeo_max_err},
            {"dgeo_bound", r.dgeo_bound},
            {"pass", r.pass}};
}

inline nlohmann::json to_json(const AdmissibilityReport& r) {
    return {{"vrho_surface_max", r.vrho_surface_max},
            {"dive_max", r.dive_max},
            {"div3_max", r.div3_max},
            {"pass", r.pass}};
}

inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline void write_json_report(const std::string& path, const std::string& command,
                              nlohmann::json results) {
    nlohmann::json doc = {{"schema_version", kReportSchemaVersion},
                          {"generated_at", utc_timestamp()},
                          {"command", command},
                          {"results", std::move(results)}};
    write_atomic(path, doc.dump(2) + "\n");
}

// 17 significant digits reproduce IEEE doubles exactly
inline std::string csv_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, p);
}

inline std::string residual_csv(const ResidualReport& r) {
    std::string out = "phi,theta,residual_dphi,residual_dtheta,rel_residual\n";
    for (const auto& row : r.points) {
        out += csv_double(row[0]);
        for (int i = 1; i < 5; ++i) {
            out += ',';
            out += csv_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace ellcalc
