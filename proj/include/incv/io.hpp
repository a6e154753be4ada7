#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "incv/empirical.hpp"
#include "incv/errors.hpp"
#include "incv/study_runner.hpp"

namespace incv::io {

/// A labelled table held column-wise, with column order preserved.
struct Table {
    std::string label = "D";
    std::vector<int> outcome;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    Cohort to_cohort() const {
        Cohort c(outcome);
        for (std::size_t j = 0; j < names.size(); ++j) c.add_model(names[j], columns[j]);
        return c;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& v) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

inline std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

} // namespace detail

/// Reads a comma-separated table with a header row. `models` selects the
/// score columns to keep; empty means every column except the label.
/// Errors name the offending line (1-based, header is line 1).
inline Table read_table(std::istream& in, const std::string& label, std::vector<std::string> models = {}) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw InputError("CSV: empty input, a header row is required");
    std::vector<std::string> header;
    for (auto f : detail::split(line)) header.emplace_back(f);

    auto index_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        throw InputError("CSV: no column '" + name + "' (available: " + detail::join(header) + ")");
    };
    const std::size_t label_col = index_of(label);
    if (models.empty()) {
        for (const auto& h : header) {
            if (h != label) models.push_back(h);
        }
    }
    std::vector<std::size_t> cols;
    for (const auto& m : models) cols.push_back(index_of(m));

    Table t;
    t.label = label;
    t.names = models;
    t.columns.resize(models.size());
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line);
        if (fields.size() != header.size()) {
            throw InputError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        }
        const auto lab = fields[label_col];
        if (lab == "0") {
            t.outcome.push_back(0);
        } else if (lab == "1") {
            t.outcome.push_back(1);
        } else {
            throw InputError("CSV line " + std::to_string(lineno) + ": label '" + std::string(lab) +
                             "' in column '" + label + "' is not 0 or 1");
        }
        for (std::size_t k = 0; k < cols.size(); ++k) {
            double v;
            if (!detail::parse_double(fields[cols[k]], v)) {
                throw InputError("CSV line " + std::to_string(lineno) + ": column '" + models[k] + "' value '" +
                                 std::string(fields[cols[k]]) + "' is not a finite number");
            }
            t.columns[k].push_back(v);
        }
    }
    if (t.outcome.empty()) throw InputError("CSV: no data rows");
    return t;
}

inline Table read_table_file(const std::string& path, const std::string& label, std::vector<std::string> models = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "' for reading");
    return read_table(in, label, std::move(models));
}

/// Shortest representation that round-trips the double.
inline std::string format_full(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline void write_table(std::ostream& out, const Table& t) {
    out << t.label;
    for (const auto& n : t.names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < t.outcome.size(); ++i) {
        out << t.outcome[i];
        for (const auto& c : t.columns) out << ',' << format_full(c[i]);
        out << '\n';
    }
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

/// Rounds to `digits` significant digits.
inline double round_sig(double v, int digits = 6) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

/// JSON number with six significant digits; non-finite values become null.
inline nlohmann::json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_sig(v);
}

inline nlohmann::json to_json(const MetricTriple& m) {
    return {{"auc", number(m.auc)}, {"ap", number(m.ap)}, {"sbrs", number(m.sbrs)}, {"event_rate", number(m.event_rate)}};
}

inline nlohmann::json to_json(const IncVResult& r) {
    return {{"delta_auc", number(r.delta_auc)}, {"delta_ap", number(r.delta_ap)}, {"delta_sbrs", number(r.delta_sbrs)}};
}

// ---------------------------------------------------------------------------
// Scenario and grid output

inline nlohmann::json to_json(const probit::ModelMetrics& m) {
    nlohmann::json g = nlohmann::json::array();
    for (double v : m.gamma) g.push_back(number(v));
    return {{"gamma", g}, {"auc", number(m.auc)}, {"ap", number(m.ap)}, {"brier", number(m.brier)},
            {"sbrs", number(m.sbrs)}};
}

inline nlohmann::json to_json(const probit::ScenarioResult& r) {
    return {{"beta0", number(r.spec.beta0)}, {"beta1", number(r.spec.beta1)}, {"beta2", number(r.spec.beta2)},
            {"beta3", number(r.spec.beta3)}, {"pi", number(r.spec.pi)},
            {"one_marker", to_json(r.one_marker)}, {"two_marker", to_json(r.two_marker)},
            {"d_auc", number(r.d_auc)}, {"d_ap", number(r.d_ap)}, {"d_sbrs", number(r.d_sbrs)}};
}

/// One row per scenario; failed scenarios are listed as comment lines at
/// the top and have no row.
inline void write_grid_csv(std::ostream& out, const std::vector<study::GridEntry>& entries) {
    for (const auto& e : entries) {
        if (!e.result) out << "# failed: " << e.error << '\n';
    }
    out << "beta0,beta1,beta2,beta3,pi,auc1,auc2,ap1,ap2,sbrs1,sbrs2,d_auc,d_ap,d_sbrs\n";
    char buf[512];
    for (const auto& e : entries) {
        if (!e.result) continue;
        const auto& r = *e.result;
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      r.spec.beta0, r.spec.beta1, r.spec.beta2, r.spec.beta3, r.spec.pi, r.one_marker.auc,
                      r.two_marker.auc, r.one_marker.ap, r.two_marker.ap, r.one_marker.sbrs, r.two_marker.sbrs, r.d_auc,
                      r.d_ap, r.d_sbrs);
        out << buf;
    }
}

inline nlohmann::json to_json(const study::FiveNumber& f) {
    return {{"min", number(f.min)}, {"q1", number(f.q1)}, {"median", number(f.median)}, {"q3", number(f.q3)},
            {"max", number(f.max)}, {"iqr", number(f.iqr())}};
}

inline nlohmann::json to_json(const study::PairStats& p) {
    return {{"sbrs_ap", number(p.sbrs_ap)}, {"sbrs_auc", number(p.sbrs_auc)}, {"auc_ap", number(p.auc_ap)}};
}

inline nlohmann::json to_json(const study::NegativeCounts& n) {
    return {{"d_auc", n.d_auc}, {"d_ap", n.d_ap}, {"d_sbrs", n.d_sbrs}};
}

/// Summary keyed by event rate, plus grid-wide totals.
inline nlohmann::json to_json(const study::GridSummary& s) {
    nlohmann::json by_rate = nlohmann::json::object();
    for (const auto& r : s.by_rate) {
        char key[32];
        std::snprintf(key, sizeof key, "%g", r.pi);
        by_rate[key] = {{"scenarios", r.scenarios},
                        {"d_auc", to_json(r.d_auc)},
                        {"d_ap", to_json(r.d_ap)},
                        {"d_sbrs", to_json(r.d_sbrs)},
                        {"pearson", to_json(r.pearson)},
                        {"concordance", to_json(r.concordance)},
                        {"negative", to_json(r.negatives)}};
    }
    return {{"scenarios", s.scenarios}, {"failures", s.failures}, {"negative", to_json(s.negatives)},
            {"by_pi", by_rate}};
}

} // namespace incv::io
