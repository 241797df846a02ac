#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "surprobe/error.hpp"
#include "surprobe/scale.hpp"
#include "surprobe/surprisal.hpp"

namespace surprobe {

// --- labeled outcomes ---------------------------------------------------------

struct ExpectedScoreGold { int value{0}; };
struct CausalLabelGold { bool causal{false}; };
struct FigurativePairGold { std::string pair_id; bool figurative{false}; };
struct ApplicabilityGold { bool applicable{false}; };

using Gold = std::variant<ExpectedScoreGold, CausalLabelGold, FigurativePairGold, ApplicabilityGold>;

// One (item x factor-cell x model) outcome joined with its ground truth.
struct LabeledOutcome {
    std::string item_id;
    std::map<std::string, std::string> attrs;  // model, context, persona, delimiter, framing, scale, dimension, ...
    std::string scale_id;
    int argmin_position{0};
    std::optional<BinaryClass> binary;
    double entropy{0.0};
    Gold gold;
};

namespace detail {

inline std::optional<bool> gold_bool(const Gold& gold) {
    if (const auto* g = std::get_if<CausalLabelGold>(&gold)) return g->causal;
    if (const auto* g = std::get_if<ApplicabilityGold>(&gold)) return g->applicable;
    if (const auto* g = std::get_if<FigurativePairGold>(&gold)) return g->figurative;
    return std::nullopt;
}

inline void require_nonempty(const std::vector<LabeledOutcome>& outcomes, const char* metric) {
    if (outcomes.empty())
        throw Error(errc::empty_group, std::string(metric) + " over an empty group");
}

inline void require_same_scale(const std::vector<LabeledOutcome>& outcomes, const char* metric) {
    for (const auto& o : outcomes)
        if (o.scale_id != outcomes.front().scale_id)
            throw Error(errc::scale_mismatch,
                        std::string(metric) + ": group mixes scales " + outcomes.front().scale_id +
                            " and " + o.scale_id);
}

}  // namespace detail

// --- core metrics ---------------------------------------------------------------

// Mean absolute error between argmin positions and expected scores.
inline double mae(const std::vector<LabeledOutcome>& outcomes) {
    detail::require_nonempty(outcomes, "mae");
    detail::require_same_scale(outcomes, "mae");
    double total = 0.0;
    for (const auto& o : outcomes) {
        const auto* g = std::get_if<ExpectedScoreGold>(&o.gold);
        if (!g) throw Error(errc::schema_violation, "mae requires expected-score gold");
        total += std::abs(o.argmin_position - g->value);
    }
    return total / static_cast<double>(outcomes.size());
}

// Percent of binary verdicts matching the gold label.
inline double binary_accuracy(const std::vector<LabeledOutcome>& outcomes) {
    detail::require_nonempty(outcomes, "binary_accuracy");
    std::size_t correct = 0;
    for (const auto& o : outcomes) {
        if (!o.binary.has_value())
            throw Error(errc::schema_violation, "binary_accuracy requires binary verdicts");
        auto gold = detail::gold_bool(o.gold);
        if (!gold.has_value())
            throw Error(errc::schema_violation, "binary_accuracy requires a boolean gold");
        bool predicted = *o.binary == BinaryClass::positive;
        if (predicted == *gold) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

// Percent of items whose argmin lands on the gold side of the scale midpoint.
// A midpoint hit counts as incorrect for either label.
inline double directional_accuracy(const std::vector<LabeledOutcome>& outcomes,
                                   const ScaleSpec& scale) {
    detail::require_nonempty(outcomes, "directional_accuracy");
    if (scale.kind == ScaleKind::binary)
        throw Error(errc::midpoint_undefined,
                    "directional accuracy needs an ordinal scale, got " + scale.id);
    std::size_t correct = 0;
    for (const auto& o : outcomes) {
        if (o.scale_id != scale.id)
            throw Error(errc::scale_mismatch,
                        "outcome scored on " + o.scale_id + ", expected " + scale.id);
        auto gold = detail::gold_bool(o.gold);
        if (!gold.has_value())
            throw Error(errc::schema_violation, "directional_accuracy requires a boolean gold");
        bool above = o.argmin_position > scale.midpoint;
        bool below = o.argmin_position < scale.midpoint;
        if ((*gold && above) || (!*gold && below)) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

// Percent of figurative/literal pairs where the figurative member's argmin
// strictly exceeds the literal member's. Ties fail the strict test.
inline double paired_discrimination(const std::vector<LabeledOutcome>& outcomes) {
    detail::require_nonempty(outcomes, "paired_discrimination");
    detail::require_same_scale(outcomes, "paired_discrimination");
    struct PairSlot {
        std::optional<int> figurative_min;
        std::optional<int> literal_min;
    };
    std::map<std::string, PairSlot> pairs;
    for (const auto& o : outcomes) {
        const auto* g = std::get_if<FigurativePairGold>(&o.gold);
        if (!g) throw Error(errc::schema_violation, "paired_discrimination requires pair gold");
        PairSlot& slot = pairs[g->pair_id];
        auto& side = g->figurative ? slot.figurative_min : slot.literal_min;
        if (side.has_value())
            throw Error(errc::incomplete_pair, "pair " + g->pair_id + " has duplicate " +
                                                   (g->figurative ? "figurative" : "literal") +
                                                   " outcomes");
        side = o.argmin_position;
    }
    std::size_t discriminated = 0;
    for (const auto& [pair_id, slot] : pairs) {
        if (!slot.figurative_min.has_value() || !slot.literal_min.has_value())
            throw Error(errc::incomplete_pair, "pair " + pair_id + " is missing one member");
        if (*slot.figurative_min > *slot.literal_min) ++discriminated;
    }
    return 100.0 * static_cast<double>(discriminated) / static_cast<double>(pairs.size());
}

struct PrfResult {
    double accuracy{0.0};
    double precision{0.0};
    double recall{0.0};
    double f1{0.0};
    std::size_t tp{0}, fp{0}, fn{0}, tn{0};
    bool degenerate_precision{false};  // no predicted positives
    bool degenerate_recall{false};     // no actual positives
};

// Confusion-matrix metrics from thresholding the argmin: predicted applicable
// iff argmin >= threshold. Undefined precision/recall report 0 with a flag.
inline PrfResult thresholded_prf(const std::vector<LabeledOutcome>& outcomes, int threshold = 3) {
    detail::require_nonempty(outcomes, "thresholded_prf");
    PrfResult r;
    for (const auto& o : outcomes) {
        auto gold = detail::gold_bool(o.gold);
        if (!gold.has_value())
            throw Error(errc::schema_violation, "thresholded_prf requires a boolean gold");
        bool predicted = o.argmin_position >= threshold;
        if (predicted && *gold) ++r.tp;
        else if (predicted && !*gold) ++r.fp;
        else if (!predicted && *gold) ++r.fn;
        else ++r.tn;
    }
    const double total = static_cast<double>(outcomes.size());
    r.accuracy = 100.0 * static_cast<double>(r.tp + r.tn) / total;
    if (r.tp + r.fp == 0) r.degenerate_precision = true;
    else r.precision = 100.0 * static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    if (r.tp + r.fn == 0) r.degenerate_recall = true;
    else r.recall = 100.0 * static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    if (r.precision + r.recall > 0.0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

// --- aggregation ----------------------------------------------------------------

using MetricFn = std::function<double(const std::vector<LabeledOutcome>&)>;

struct TableCell {
    std::string col_key;
    std::size_t n{0};
    double value{0.0};
};

struct TableRow {
    std::string row_key;
    std::vector<TableCell> cells;
    double mean{0.0};  // unweighted mean across the row's cells
};

// A paper-table-shaped aggregate: rows keyed by the first group-by factor,
// one column per combination of the remaining factors, plus a mean column.
struct TableArtifact {
    std::string metric_id;
    std::vector<std::string> group_by;
    int precision{1};  // rendered decimal places
    std::vector<std::string> columns;
    std::vector<TableRow> rows;
};

namespace detail {

inline const std::string& attr_of(const LabeledOutcome& o, const std::string& factor) {
    auto it = o.attrs.find(factor);
    if (it == o.attrs.end())
        throw Error(errc::unknown_factor, "outcome has no factor \"" + factor + "\"");
    return it->second;
}

}  // namespace detail

inline TableArtifact aggregate(const std::vector<LabeledOutcome>& outcomes,
                               const std::vector<std::string>& group_by,
                               const std::string& metric_id, const MetricFn& metric,
                               int precision = 1) {
    if (group_by.empty()) throw Error(errc::unknown_factor, "group_by must name at least one factor");
    detail::require_nonempty(outcomes, metric_id.c_str());

    std::map<std::string, std::map<std::string, std::vector<LabeledOutcome>>> grouped;
    for (const auto& o : outcomes) {
        std::string row_key = detail::attr_of(o, group_by.front());
        std::string col_key;
        for (std::size_t i = 1; i < group_by.size(); ++i) {
            if (!col_key.empty()) col_key += "/";
            col_key += detail::attr_of(o, group_by[i]);
        }
        if (col_key.empty()) col_key = "value";
        grouped[row_key][col_key].push_back(o);
    }

    TableArtifact table;
    table.metric_id = metric_id;
    table.group_by = group_by;
    table.precision = precision;

    std::vector<std::string> columns;
    for (const auto& [row_key, cols] : grouped)
        for (const auto& [col_key, _] : cols)
            if (std::find(columns.begin(), columns.end(), col_key) == columns.end())
                columns.push_back(col_key);
    std::sort(columns.begin(), columns.end());
    table.columns = columns;

    for (const auto& [row_key, cols] : grouped) {  // std::map: rows already lexicographic
        TableRow row;
        row.row_key = row_key;
        double sum = 0.0;
        std::size_t cell_count = 0;
        for (const auto& col_key : columns) {
            auto it = cols.find(col_key);
            if (it == cols.end()) continue;  // ragged grids simply omit the cell
            TableCell cell;
            cell.col_key = col_key;
            cell.n = it->second.size();
            cell.value = metric(it->second);
            sum += cell.value;
            ++cell_count;
            row.cells.push_back(std::move(cell));
        }
        row.mean = cell_count ? sum / static_cast<double>(cell_count) : 0.0;
        table.rows.push_back(std::move(row));
    }
    return table;
}

// --- metric registry for the CLI -------------------------------------------------

struct MetricInfo {
    std::string id;
    int precision{1};
    MetricFn fn;
};

inline MetricInfo make_metric(const std::string& id, const std::vector<ScaleSpec>& catalog,
                              int threshold = 3) {
    if (id == "mae")
        return {id, 2, [](const std::vector<LabeledOutcome>& g) { return mae(g); }};
    if (id == "binary-accuracy")
        return {id, 1, [](const std::vector<LabeledOutcome>& g) { return binary_accuracy(g); }};
    if (id == "directional-accuracy")
        return {id, 1, [catalog](const std::vector<LabeledOutcome>& g) {
                    detail::require_nonempty(g, "directional-accuracy");
                    detail::require_same_scale(g, "directional-accuracy");
                    return directional_accuracy(g, find_scale(catalog, g.front().scale_id));
                }};
    if (id == "paired-discrimination")
        return {id, 1,
                [](const std::vector<LabeledOutcome>& g) { return paired_discrimination(g); }};
    if (id == "thresholded-accuracy")
        return {id, 1, [threshold](const std::vector<LabeledOutcome>& g) {
                    return thresholded_prf(g, threshold).accuracy;
                }};
    if (id == "thresholded-precision")
        return {id, 1, [threshold](const std::vector<LabeledOutcome>& g) {
                    return thresholded_prf(g, threshold).precision;
                }};
    if (id == "thresholded-recall")
        return {id, 1, [threshold](const std::vector<LabeledOutcome>& g) {
                    return thresholded_prf(g, threshold).recall;
                }};
    if (id == "thresholded-f1")
        return {id, 1, [threshold](const std::vector<LabeledOutcome>& g) {
                    return thresholded_prf(g, threshold).f1;
                }};
    throw Error(errc::config_invalid, "unknown metric \"" + id + "\"");
}

}  // namespace surprobe
