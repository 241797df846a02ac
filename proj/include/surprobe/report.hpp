#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "surprobe/error.hpp"
#include "surprobe/metrics.hpp"
#include "surprobe/record.hpp"

namespace surprobe {

// --- CSV tables ---------------------------------------------------------------

namespace detail {

// RFC-4180-style quoting: quote when a field holds a comma, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

inline std::string full_precision(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Deterministic CSV: header names the row factor, then one column per group
// key, then the mean column. full_precision switches the numeric rendering;
// the layout is identical.
inline std::string table_to_csv(const TableArtifact& table, bool full_precision = false) {
    auto render = [&](double v) {
        return full_precision ? detail::full_precision(v) : detail::fixed(v, table.precision);
    };
    std::string out = detail::csv_field(table.group_by.front());
    for (const auto& col : table.columns) out += "," + detail::csv_field(col);
    out += ",mean\n";
    for (const TableRow& row : table.rows) {
        out += detail::csv_field(row.row_key);
        for (const auto& col : table.columns) {
            auto it = std::find_if(row.cells.begin(), row.cells.end(),
                                   [&](const TableCell& c) { return c.col_key == col; });
            out += ",";
            if (it != row.cells.end()) out += render(it->value);
        }
        out += "," + render(row.mean) + "\n";
    }
    return out;
}

struct TableSpec {
    std::string metric_id;
    std::vector<std::string> group_by;
    int threshold{3};  // thresholded-* metrics only
};

inline std::vector<LabeledOutcome> outcomes_of(const std::vector<ResultRecord>& records) {
    std::vector<LabeledOutcome> outcomes;
    for (const auto& r : records)
        if (r.status == "ok") outcomes.push_back(labeled_outcome_of(r));
    return outcomes;
}

inline TableArtifact build_table(const std::vector<ResultRecord>& records, const TableSpec& spec,
                                 const std::vector<ScaleSpec>& catalog) {
    std::vector<LabeledOutcome> outcomes = outcomes_of(records);
    if (outcomes.empty())
        throw Error(errc::empty_group, "no successful records to aggregate");
    MetricInfo metric = make_metric(spec.metric_id, catalog, spec.threshold);
    return aggregate(outcomes, spec.group_by, metric.id, metric.fn, metric.precision);
}

// One CSV per spec, named <metric>__<factors>.csv; a ".full.csv" companion
// carries the unrounded values when requested.
inline std::vector<std::string> emit_tables(const std::vector<ResultRecord>& records,
                                            const std::vector<TableSpec>& specs,
                                            const std::string& out_dir,
                                            const std::vector<ScaleSpec>& catalog,
                                            bool with_full_precision = false) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (const TableSpec& spec : specs) {
        TableArtifact table = build_table(records, spec, catalog);
        std::string stem = spec.metric_id + "__";
        for (std::size_t i = 0; i < spec.group_by.size(); ++i)
            stem += (i ? "-" : "") + spec.group_by[i];
        fs::path path = fs::path(out_dir) / (stem + ".csv");
        std::ofstream out(path, std::ios::trunc);
        out << table_to_csv(table);
        written.push_back(path.string());
        if (with_full_precision) {
            fs::path full = fs::path(out_dir) / (stem + ".full.csv");
            std::ofstream fout(full, std::ios::trunc);
            fout << table_to_csv(table, true);
            written.push_back(full.string());
        }
    }
    return written;
}

// --- curve plot data -------------------------------------------------------------

struct CurveFilter {
    std::string item;      // exact id or id prefix; empty matches all
    std::string model;     // exact; empty matches all
    std::string scale;     // exact; empty matches all

    bool matches(const ResultRecord& r) const {
        if (!item.empty() && r.item_id != item &&
            r.item_id.compare(0, item.size(), item) != 0)
            return false;
        if (!model.empty() && r.cell.model_id != model) return false;
        if (!scale.empty() && r.cell.scale_id != scale) return false;
        return true;
    }
};

inline nlohmann::json curve_series_json(const ResultRecord& r) {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < r.positions.size(); ++i)
        points.push_back({r.positions[i], r.surprisals[i]});
    return nlohmann::json{{"model_id", r.cell.model_id},
                          {"factor_cell",
                           {{"context", to_string(r.cell.context)},
                            {"persona", to_string(r.cell.persona)},
                            {"delimiter", to_string(r.cell.delimiter)},
                            {"framing", r.cell.framing_id}}},
                          {"scale_id", r.cell.scale_id},
                          {"entropy", r.entropy},
                          {"argmin_position", r.argmin_position},
                          {"points", points}};
}

namespace detail {
inline std::string safe_filename(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}
}  // namespace detail

// One structured file per matched item, every matching series inside, sorted
// by (model, cell) so identical records produce identical bytes.
inline std::vector<std::string> emit_curves(const std::vector<ResultRecord>& records,
                                            const CurveFilter& filter,
                                            const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::map<std::string, std::vector<const ResultRecord*>> by_item;
    for (const auto& r : records)
        if (r.status == "ok" && filter.matches(r)) by_item[r.item_id].push_back(&r);
    if (by_item.empty())
        throw Error(errc::no_match, "no records match the curve filter");

    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (auto& [item_id, matched] : by_item) {
        std::sort(matched.begin(), matched.end(),
                  [](const ResultRecord* a, const ResultRecord* b) {
                      return std::make_pair(a->cell.model_id, a->cell.key()) <
                             std::make_pair(b->cell.model_id, b->cell.key());
                  });
        nlohmann::json series = nlohmann::json::array();
        for (const ResultRecord* r : matched) series.push_back(curve_series_json(*r));
        nlohmann::json doc{{"schema", "surprobe-curves-v1"},
                           {"item_id", item_id},
                           {"series", series}};
        fs::path path = fs::path(out_dir) / (detail::safe_filename(item_id) + ".json");
        std::ofstream out(path, std::ios::trunc);
        out << doc.dump(2) << "\n";
        written.push_back(path.string());
    }
    return written;
}

}  // namespace surprobe
