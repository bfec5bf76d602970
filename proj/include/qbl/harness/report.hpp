/**
 *  @file qbl/harness/report.hpp
 *  @brief Experiment reports: JSON (schema qbl-report/1) and CSV.
 *
 *  JSON layout:
 *
 *      { "schema": "qbl-report/1", "version": ..., "experiment": ...,
 *        "observational": bool, "note": ..., "config": "<config text>",
 *        "records": [ {...}, ... ],
 *        "verdicts": [ {"name", "pass", "detail"}, ... ],
 *        "passed": bool, "wall_clock_seconds": ... }
 *
 *  Everything except wall_clock_seconds is reproducible from the config.
 *  Non-finite numbers are written as the strings "inf", "-inf", "nan".
 */

#ifndef QBL_HARNESS_REPORT_HPP
#define QBL_HARNESS_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbl/harness/config.hpp"

#ifndef QBL_VERSION
#define QBL_VERSION "1.0.0"
#endif

namespace qbl {

using Json = nlohmann::ordered_json;

inline constexpr const char *kReportSchema = "qbl-report/1";

inline Json json_number(double v) {
    if (std::isfinite(v))
        return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline Json json_numbers(const Vector &v) {
    Json a = Json::array();
    for (double x : v)
        a.push_back(json_number(x));
    return a;
}

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    bool observational = false;
    std::string note;
    std::string config_text;
    std::vector<Json> records;
    std::vector<Verdict> verdicts;
    double wall_clock_seconds = 0.0;

    void check(std::string name, bool pass, std::string detail = {}) {
        verdicts.push_back({std::move(name), pass, std::move(detail)});
    }

    bool passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict &v) { return v.pass; });
    }

    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict &v) { return !v.pass; }));
    }

    /// The deterministic part of the report.
    Json payload() const {
        Json j;
        j["schema"] = kReportSchema;
        j["version"] = QBL_VERSION;
        j["experiment"] = experiment;
        j["observational"] = observational;
        j["note"] = note;
        j["config"] = config_text;
        j["records"] = records;
        Json vs = Json::array();
        for (const Verdict &v : verdicts)
            vs.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
        j["verdicts"] = std::move(vs);
        j["passed"] = passed();
        return j;
    }

    Json to_json() const {
        Json j = payload();
        j["wall_clock_seconds"] = wall_clock_seconds;
        return j;
    }

    /// One row per record; columns are the union of record keys in first-seen
    /// order. Nested values are written as compact JSON.
    std::string to_csv() const {
        std::vector<std::string> cols;
        for (const Json &r : records)
            for (const auto &[k, v] : r.items())
                if (std::find(cols.begin(), cols.end(), k) == cols.end())
                    cols.push_back(k);
        auto cell = [](const Json &v) -> std::string {
            std::string s;
            if (v.is_string())
                s = v.get<std::string>();
            else if (v.is_number_float())
                s = detail::format_double(v.get<double>());
            else
                s = v.dump();
            if (s.find_first_of(",\"\n") != std::string::npos) {
                std::string q = "\"";
                for (char c : s)
                    q += c == '"' ? std::string("\"\"") : std::string(1, c);
                return q + "\"";
            }
            return s;
        };
        std::string out;
        for (std::size_t i = 0; i < cols.size(); ++i)
            out += (i ? "," : "") + cols[i];
        out += "\n";
        for (const Json &r : records) {
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (i)
                    out += ",";
                if (r.contains(cols[i]))
                    out += cell(r[cols[i]]);
            }
            out += "\n";
        }
        return out;
    }

    /// Writes JSON to `path`, or CSV when the path ends in ".csv".
    void write(const std::string &path) const {
        std::ofstream out(path);
        if (!out)
            throw ConfigError("report: cannot write '" + path + "'");
        if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
            out << to_csv();
        else
            out << to_json().dump(2) << "\n";
    }
};

} // namespace qbl

#endif // QBL_HARNESS_REPORT_HPP
