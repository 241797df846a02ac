#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surprobe/curve_shape.hpp"
#include "surprobe/metrics.hpp"
#include "surprobe/prompt.hpp"
#include "surprobe/surprisal.hpp"

namespace surprobe {

inline constexpr int kRecordSchemaVersion = 1;

// One (item x factor-cell x model) evaluation outcome. Self-contained: every
// metric is recomputable from the record alone, no backend or dataset needed.
struct ResultRecord {
    std::string run_id;
    std::string item_id;
    Task task{Task::sets};
    FactorCell cell;  // model_id and scale_id live here
    std::string prompt_digest;

    std::vector<int> positions;
    std::vector<double> raw_logprobs;
    std::vector<double> surprisals;
    std::vector<std::string> resolutions;
    double entropy{0.0};
    int argmin_position{0};
    std::vector<int> argmin_ties;
    bool floor_clamped{false};

    std::optional<BinaryVerdict> binary;
    std::optional<CurveShape> shape;

    nlohmann::json gold;              // task-specific ground truth, from the dataset
    std::string dimension;            // sets only
    std::string category;             // causal only
    std::string code;                 // coding only

    std::string status{"ok"};         // "ok" | "failed"
    std::string error_code;           // set when failed
    std::string error_message;
    std::string created_at;           // ISO-8601; stripped in canonical form
};

inline nlohmann::json shape_to_json(const CurveShape& s) {
    return nlohmann::json{{"min_position", s.min_position},
                          {"monotonicity", to_string(s.monotonicity)},
                          {"local_minima", s.local_minima},
                          {"steepness", s.steepness},
                          {"asymmetry", s.asymmetry},
                          {"is_bowl", s.is_bowl},
                          {"confidence", to_string(classify_confidence(s))}};
}

inline CurveShape shape_from_json(const nlohmann::json& j) {
    CurveShape s;
    s.min_position = j.at("min_position").get<int>();
    std::string m = j.at("monotonicity").get<std::string>();
    s.monotonicity = m == "increasing"    ? Monotonicity::increasing
                     : m == "decreasing"  ? Monotonicity::decreasing
                                          : Monotonicity::non_monotonic;
    s.local_minima = j.at("local_minima").get<std::vector<int>>();
    s.steepness = j.at("steepness").get<double>();
    s.asymmetry = j.at("asymmetry").get<double>();
    s.is_bowl = j.at("is_bowl").get<bool>();
    return s;
}

// Canonical form strips timestamps so reruns with identical semantics are
// byte-identical. Key order is alphabetical either way.
inline nlohmann::json to_json(const ResultRecord& r, bool canonical = false) {
    nlohmann::json j;
    j["record_type"] = "result";
    j["run_id"] = r.run_id;
    j["item_id"] = r.item_id;
    j["task"] = to_string(r.task);
    j["factor_cell"] = {{"context", to_string(r.cell.context)},
                        {"persona", to_string(r.cell.persona)},
                        {"delimiter", to_string(r.cell.delimiter)},
                        {"framing", r.cell.framing_id}};
    j["model_id"] = r.cell.model_id;
    j["scale_id"] = r.cell.scale_id;
    j["prompt_digest"] = r.prompt_digest;
    j["status"] = r.status;
    if (r.status == "ok") {
        j["positions"] = r.positions;
        j["raw_logprobs"] = r.raw_logprobs;
        j["surprisals"] = r.surprisals;
        j["resolutions"] = r.resolutions;
        j["entropy"] = r.entropy;
        j["argmin_position"] = r.argmin_position;
        j["argmin_ties"] = r.argmin_ties;
        j["floor_clamped"] = r.floor_clamped;
        if (r.binary.has_value())
            j["binary"] = {{"class", to_string(r.binary->verdict)}, {"delta", r.binary->delta}};
        if (r.shape.has_value()) j["shape"] = shape_to_json(*r.shape);
    } else {
        j["error"] = {{"code", r.error_code}, {"message", r.error_message}};
    }
    j["gold"] = r.gold;
    if (!r.dimension.empty()) j["dimension"] = r.dimension;
    if (!r.category.empty()) j["category"] = r.category;
    if (!r.code.empty()) j["code"] = r.code;
    if (!canonical && !r.created_at.empty()) j["created_at"] = r.created_at;
    return j;
}

inline ResultRecord record_from_json(const nlohmann::json& j) {
    ResultRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.item_id = j.at("item_id").get<std::string>();
    r.task = task_from_string(j.at("task").get<std::string>());
    const auto& cell = j.at("factor_cell");
    r.cell.context = context_level_from_string(cell.at("context").get<std::string>());
    r.cell.persona = persona_from_string(cell.at("persona").get<std::string>());
    r.cell.delimiter = delimiter_from_string(cell.at("delimiter").get<std::string>());
    r.cell.framing_id = cell.at("framing").get<std::string>();
    r.cell.model_id = j.at("model_id").get<std::string>();
    r.cell.scale_id = j.at("scale_id").get<std::string>();
    r.prompt_digest = j.at("prompt_digest").get<std::string>();
    r.status = j.at("status").get<std::string>();
    if (r.status == "ok") {
        r.positions = j.at("positions").get<std::vector<int>>();
        r.raw_logprobs = j.at("raw_logprobs").get<std::vector<double>>();
        r.surprisals = j.at("surprisals").get<std::vector<double>>();
        r.resolutions = j.at("resolutions").get<std::vector<std::string>>();
        r.entropy = j.at("entropy").get<double>();
        r.argmin_position = j.at("argmin_position").get<int>();
        r.argmin_ties = j.at("argmin_ties").get<std::vector<int>>();
        r.floor_clamped = j.value("floor_clamped", false);
        if (j.contains("binary")) {
            BinaryVerdict v;
            v.verdict = j["binary"].at("class").get<std::string>() == "positive"
                            ? BinaryClass::positive
                            : BinaryClass::negative;
            v.delta = j["binary"].at("delta").get<double>();
            r.binary = v;
        }
        if (j.contains("shape")) r.shape = shape_from_json(j["shape"]);
    } else {
        r.error_code = j.at("error").at("code").get<std::string>();
        r.error_message = j.at("error").at("message").get<std::string>();
    }
    r.gold = j.value("gold", nlohmann::json());
    r.dimension = j.value("dimension", "");
    r.category = j.value("category", "");
    r.code = j.value("code", "");
    r.created_at = j.value("created_at", "");
    return r;
}

// Gold payload embedded in records, keyed by task.
inline nlohmann::json gold_of(const TaskItem& item) {
    switch (item.task) {
        case Task::sets:
            return {{"kind", "expected-score"}, {"value", item.sets().expected_score}};
        case Task::causal_binary:
        case Task::causal_ordinal:
            return {{"kind", "causal-label"}, {"causal", item.causal().gold_causal}};
        case Task::figurative:
            return {{"kind", "figurative-pair"},
                    {"pair_id", item.figurative().pair_id},
                    {"figurative", item.figurative().figurative}};
        case Task::coding:
            return {{"kind", "applicability"}, {"applicable", item.coding().gold_applicable}};
    }
    return {};
}

inline Gold gold_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "expected-score") return ExpectedScoreGold{j.at("value").get<int>()};
    if (kind == "causal-label") return CausalLabelGold{j.at("causal").get<bool>()};
    if (kind == "figurative-pair")
        return FigurativePairGold{j.at("pair_id").get<std::string>(),
                                  j.at("figurative").get<bool>()};
    if (kind == "applicability") return ApplicabilityGold{j.at("applicable").get<bool>()};
    throw Error(errc::schema_violation, "unknown gold kind: " + kind);
}

// Joins a successful record with its gold for the metrics layer.
inline LabeledOutcome labeled_outcome_of(const ResultRecord& r) {
    LabeledOutcome o;
    o.item_id = r.item_id;
    o.attrs["task"] = to_string(r.task);
    o.attrs["model"] = r.cell.model_id;
    o.attrs["context"] = to_string(r.cell.context);
    o.attrs["persona"] = to_string(r.cell.persona);
    o.attrs["delimiter"] = to_string(r.cell.delimiter);
    o.attrs["framing"] = r.cell.framing_id;
    o.attrs["scale"] = r.cell.scale_id;
    if (!r.dimension.empty()) o.attrs["dimension"] = r.dimension;
    if (!r.category.empty()) o.attrs["category"] = r.category;
    if (!r.code.empty()) o.attrs["code"] = r.code;
    o.scale_id = r.cell.scale_id;
    o.argmin_position = r.argmin_position;
    if (r.binary.has_value()) o.binary = r.binary->verdict;
    o.entropy = r.entropy;
    o.gold = gold_from_json(r.gold);
    return o;
}

}  // namespace surprobe
