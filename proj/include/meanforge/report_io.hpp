#pragma once

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

#include "meanforge/suite.hpp"

namespace meanforge {

enum class ReportFormat { json, csv };

inline ReportFormat parse_format(const std::string& text) {
    if (text == "json") return ReportFormat::json;
    if (text == "csv") return ReportFormat::csv;
    throw std::invalid_argument("format: expected 'json' or 'csv', got '" + text + "'");
}

namespace detail {

// Shortest decimal string that round-trips the double; keeps CSV output
// byte-stable across runs.
inline std::string fmt_shortest(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline nlohmann::ordered_json report_to_json(const TrialReport& report) {
    nlohmann::ordered_json doc;
    auto& config = doc["config"];
    config["master_seed"] = report.config.master_seed;
    config["trials"] = report.config.trials;
    config["dim"] = report.config.dim;
    auto nus = nlohmann::ordered_json::array();
    for (const auto& nu : report.config.nu_list) nus.push_back(nu.str());
    config["nu_list"] = std::move(nus);
    config["depth"] = report.config.depth;
    config["tol"] = report.config.tol;
    config["field"] = to_string(report.config.field);
    config["condition_cap"] = report.config.condition_cap;
    config["seed_derivation"] = seed_derivation_note;
    doc["level"] = report.level;

    auto trials = nlohmann::ordered_json::array();
    for (const auto& rec : report.trials) {
        nlohmann::ordered_json t;
        t["trial"] = rec.trial;
        t["seed"] = rec.seed;
        t["nu"] = rec.nu;
        t["digest"] = rec.digest;
        auto verdicts = nlohmann::ordered_json::array();
        for (const auto& v : rec.verdicts) {
            verdicts.push_back({{"id", v.id},
                                {"margin", v.margin},
                                {"scale", v.scale},
                                {"holds", v.holds},
                                {"equality", v.equality}});
        }
        t["verdicts"] = std::move(verdicts);
        nlohmann::ordered_json diags;
        for (const auto& d : rec.diagnostics) diags[d.id] = d.value;
        t["diagnostics"] = std::move(diags);
        trials.push_back(std::move(t));
    }
    doc["trials"] = std::move(trials);

    auto& summary = doc["summary"];
    summary["verdict_count"] = report.verdict_count();
    summary["failure_count"] = report.failure_count();
    summary["equality_count"] = report.equality_count();
    auto& per = summary["per_inequality"];
    per = nlohmann::ordered_json::object();
    for (const auto& [id, st] : report.summary) {
        per[id] = {{"count", st.count},
                   {"failures", st.failures},
                   {"equalities", st.equalities},
                   {"min_margin", st.min_margin}};
    }
    return doc;
}

inline std::string report_to_csv(const TrialReport& report) {
    std::string out = "trial,inequality_id,lhs_scale,margin,holds\n";
    for (const auto& rec : report.trials) {
        for (const auto& v : rec.verdicts) {
            out += std::to_string(rec.trial);
            out += ',';
            out += v.id;
            out += ',';
            out += detail::fmt_shortest(v.scale);
            out += ',';
            out += detail::fmt_shortest(v.margin);
            out += ',';
            out += v.holds ? "true" : "false";
            out += '\n';
        }
    }
    return out;
}

inline std::string render_report(const TrialReport& report, ReportFormat format) {
    if (format == ReportFormat::json) return report_to_json(report).dump(2) + "\n";
    return report_to_csv(report);
}

inline void emit_report(const TrialReport& report, const std::string& path,
                        ReportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open '" + path + "' for writing");
    out << render_report(report, format);
    if (!out) throw std::runtime_error("report: write to '" + path + "' failed");
}

} // namespace meanforge
