#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "surprobe/error.hpp"
#include "surprobe/scale.hpp"
#include "surprobe/templates.hpp"

namespace surprobe {

// --- task items ---------------------------------------------------------------

struct SetsPayload {
    std::string entity;
    std::string context_sentence;
    std::string dimension;  // social | ecological | technological
    int expected_score{0};  // researcher-assigned gold, 1..9
};

struct CausalPayload {
    std::string statement;
    bool gold_causal{false};
    std::string category;  // explicit-causal, implicit-causal, correlational, non-causal, ambiguous
};

struct FigurativePayload {
    std::string statement;
    std::string pair_id;
    bool figurative{false};
};

struct CodingPayload {
    std::string text;
    std::string code;
    std::string definition;
    bool gold_applicable{false};
};

struct TaskItem {
    std::string item_id;
    Task task{Task::sets};
    std::variant<SetsPayload, CausalPayload, FigurativePayload, CodingPayload> payload;

    const SetsPayload& sets() const { return std::get<SetsPayload>(payload); }
    const CausalPayload& causal() const { return std::get<CausalPayload>(payload); }
    const FigurativePayload& figurative() const { return std::get<FigurativePayload>(payload); }
    const CodingPayload& coding() const { return std::get<CodingPayload>(payload); }
};

// --- factor grid ---------------------------------------------------------------

struct FactorCell {
    ContextLevel context{ContextLevel::none};
    PersonaKind persona{PersonaKind::none};
    DelimiterStyle delimiter{DelimiterStyle::none};
    std::string framing_id;
    std::string scale_id;
    std::string model_id;

    // Canonical key, used for ordering, resume bookkeeping and record output.
    std::string key() const {
        return "ctx=" + to_string(context) + "|persona=" + to_string(persona) +
               "|delim=" + to_string(delimiter) + "|framing=" + framing_id +
               "|scale=" + scale_id + "|model=" + model_id;
    }
};

struct FactorGrid {
    std::vector<ContextLevel> context_levels;
    std::vector<PersonaKind> personas;
    std::vector<DelimiterStyle> delimiters;
    std::vector<std::string> framings;
    std::vector<std::string> scales;
    std::vector<std::string> models;

    void validate() const {
        if (context_levels.empty() || personas.empty() || delimiters.empty() ||
            framings.empty() || scales.empty() || models.empty())
            throw Error(errc::config_invalid, "every factor list in the grid must be non-empty");
    }

    std::size_t cell_count() const {
        return context_levels.size() * personas.size() * delimiters.size() * framings.size() *
               scales.size() * models.size();
    }

    // Cross product in declared field order, rightmost factor fastest.
    std::vector<FactorCell> cells() const {
        validate();
        std::vector<FactorCell> out;
        out.reserve(cell_count());
        for (auto ctx : context_levels)
            for (auto persona : personas)
                for (auto delim : delimiters)
                    for (const auto& framing : framings)
                        for (const auto& scale : scales)
                            for (const auto& model : models)
                                out.push_back(FactorCell{ctx, persona, delim, framing, scale, model});
        return out;
    }
};

// --- rendered prompt ------------------------------------------------------------

struct PromptInstance {
    std::string item_id;
    FactorCell cell;
    std::string scale_id;
    std::string context_text;  // the full prompt, ending immediately before the target token
    std::string created_from;  // template id: "<task>/<framing>"
};

namespace detail {

struct DelimiterRefs {
    std::string text_open, text_close, code_open, code_close, task_open, task_close;
    std::string ref_text, ref_code;  // in-cue section references; empty => neutral cue
};

inline DelimiterRefs delimiter_refs(DelimiterStyle style) {
    switch (style) {
        case DelimiterStyle::xml:
            return {"<TEXT_TO_CODE>", "</TEXT_TO_CODE>", "<CODE_INFORMATION>",
                    "</CODE_INFORMATION>", "<TASK>", "</TASK>",
                    "<TEXT_TO_CODE>", "<CODE_INFORMATION>"};
        case DelimiterStyle::all_caps:
            return {"TEXT TO CODE:", "", "CODE INFORMATION:", "", "TASK:", "",
                    "TEXT TO CODE", "CODE INFORMATION"};
        case DelimiterStyle::none:
            return {};
    }
    return {};
}

inline void append_block(std::string& out, std::string_view block) {
    if (block.empty()) return;
    if (!out.empty()) out += "\n\n";
    out += block;
}

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// Anchor bullet block for qualitative scales ("Use the following scale:").
inline std::string scale_anchor_block(const ScaleSpec& scale, std::string_view framing_id) {
    std::string out = "Use the following scale:";
    for (std::size_t i = 0; i < scale.size(); ++i) {
        auto anchor = scale.anchor_at(scale.positions[i]);
        if (!anchor)
            throw Error(errc::unknown_template,
                        "framing \"" + std::string(framing_id) + "\" requires anchor text for every "
                        "position of scale " + scale.id);
        out += "\n- " + scale.labels[i] + " = " + *anchor;
    }
    return out;
}

inline std::map<std::string, std::string> range_values(const ScaleSpec& scale) {
    std::map<std::string, std::string> v;
    v["min"] = scale.labels.front();
    v["max"] = scale.labels.back();
    if (auto mid = templates::MidAnchor::of(scale)) v["mid"] = scale.label_at(*mid);
    return v;
}

inline std::string numeric_anchor_lines(const ScaleSpec& scale, const std::string& lo,
                                        const std::optional<std::string>& mid,
                                        const std::string& hi) {
    std::string out = scale.labels.front() + " = " + lo;
    if (mid.has_value()) {
        auto mid_pos = templates::MidAnchor::of(scale);
        if (mid_pos) out += "\n" + scale.label_at(*mid_pos) + " = " + *mid;
    }
    out += "\n" + scale.labels.back() + " = " + hi;
    return out;
}

// Framing bodies. Each returns the task-specific portion of the prompt; the
// shared persona/context assembly lives in render().
inline std::string body_sets(const SetsPayload& p, const ScaleSpec& scale) {
    std::map<std::string, std::string> v = range_values(scale);
    v["entity"] = p.entity;
    v["context_sentence"] = p.context_sentence;
    v["dimension"] = p.dimension;
    return templates::substitute(
        "Consider the following context and entity:\n\n"
        "Context: \"{context_sentence}\"\n\n"
        "Entity: \"{entity}\"\n\n"
        "On a scale from {min}-{max}, where {min} corresponds to the entity having no "
        "{dimension} characteristics and {max} corresponds to extremely high {dimension} "
        "characteristics, the entity \"{entity}\" score on the {dimension} dimension is:",
        v, "sets/sets-score");
}

inline std::string body_causal_binary(const std::string& framing_id, const CausalPayload& p) {
    if (framing_id == "tf-statement")
        return "Statement: " + quoted(p.statement) +
               "\n\nThis statement expresses a causal relationship:";
    if (framing_id == "yn-question")
        return "Does the following statement express a causal relationship?\n\n" +
               quoted(p.statement) + "\n\nAnswer (Yes or No):";
    if (framing_id == "binary-choice")
        return "Consider the following statement:\n\n" + quoted(p.statement) +
               "\n\nA = the statement expresses a causal relationship\n"
               "B = the statement does not express a causal relationship\n\n"
               "Answer (A or B):";
    throw Error(errc::unknown_template, "causal-binary framing \"" + framing_id + "\"");
}

inline std::string body_causal_ordinal(const std::string& framing_id, const CausalPayload& p,
                                       const ScaleSpec& scale) {
    const std::string stmt = quoted(p.statement);
    const std::string min_l = scale.labels.front();
    const std::string max_l = scale.labels.back();
    auto mid_pos = templates::MidAnchor::of(scale);

    if (framing_id == "bipolar-causality") {
        std::string anchors = min_l + " = Definitely non-causal";
        if (mid_pos) anchors += "\n" + scale.label_at(*mid_pos) + " = Neutral/uncertain";
        anchors += "\n" + max_l + " = Definitely causal";
        return "On a scale from " + min_l + " to " + max_l +
               ", rate the causal content of this statement:\n\n" + stmt + "\n\n" + anchors +
               "\n\nRating:";
    }
    if (framing_id == "belief-strength") {
        return "The following statement expresses a causal relationship: True or False\n\n" +
               stmt + "\n\nOn a scale from " + min_l + " to " + max_l +
               ", how strongly do you believe this answer:\n\n" + min_l +
               " = Definitely False (not causal)\n" + max_l + " = Definitely True (causal)\n\n"
               "Rating:";
    }
    if (framing_id == "probability") {
        return "What is the probability that this statement expresses causality:\n\n" + stmt +
               "\n\nRate from " + min_l + " to " + max_l + ":\n\n" + min_l +
               " = 20% probability (very unlikely to be causal)\n" + max_l +
               " = 100% probability (very likely to be causal)\n\nRating:";
    }
    if (framing_id == "causal-strength") {
        return "How strong is the causal content in this statement:\n\n" + stmt +
               "\n\nRate from " + min_l + " to " + max_l + ":\n\n" + min_l +
               " = No causal content\n" + max_l + " = Very strong causal content\n\nRating:";
    }
    if (framing_id == "dual-classification") {
        // Completions for this framing are the "A_<k>" surfaces (dual-causal-a
        // scale); the displayed range uses the underlying numerals.
        std::string lo = std::to_string(scale.min_position());
        std::string hi = std::to_string(scale.max_position());
        return "Rate this statement on both dimensions:\n\n" + stmt + "\n\nA) How causal is this "
               "statement? (" + lo + " to " + hi + ")\n" + lo + " = Not causal at all, " + hi +
               " = Highly causal\n\nB) How non-causal is this statement? (" + lo + " to " + hi +
               ")\n" + lo + " = Not non-causal at all, " + hi + " = Highly non-causal\n\n"
               "A) Rating:";
    }
    throw Error(errc::unknown_template, "causal-ordinal framing \"" + framing_id + "\"");
}

inline std::string body_figurative(const std::string& framing_id, const FigurativePayload& p,
                                   const ScaleSpec& scale) {
    const std::string stmt = quoted(p.statement);
    const std::string min_l = scale.labels.front();
    const std::string max_l = scale.labels.back();
    auto mid_pos = templates::MidAnchor::of(scale);

    if (framing_id == "metaphor-intensity") {
        std::string anchors = min_l + " = Completely literal";
        if (mid_pos) anchors += "\n" + scale.label_at(*mid_pos) + " = Somewhat metaphorical";
        anchors += "\n" + max_l + " = Highly metaphorical";
        return "On a scale from " + min_l + " to " + max_l +
               ", rate how metaphorical this statement is:\n\n" + stmt + "\n\n" + anchors +
               "\n\nRating:";
    }
    if (framing_id == "analogy-strength") {
        std::string anchors = min_l + " = No analogy present";
        if (mid_pos) anchors += "\n" + scale.label_at(*mid_pos) + " = Moderate analogical content";
        anchors += "\n" + max_l + " = Strong analogy";
        return "On a scale from " + min_l + " to " + max_l +
               ", rate the analogical content of this statement:\n\n" + stmt + "\n\n" + anchors +
               "\n\nRating:";
    }
    if (framing_id == "tf-metaphor")
        return "The following statement contains a metaphor: True or False\n\n" + stmt +
               "\n\nAnswer:";
    if (framing_id == "yn-analogy")
        return "Does the following statement contain an analogy?\n\n" + stmt +
               "\n\nAnswer (Yes or No):";
    throw Error(errc::unknown_template, "figurative framing \"" + framing_id + "\"");
}

inline std::string body_coding(const std::string& framing_id, const CodingPayload& p,
                               const ScaleSpec& scale, DelimiterStyle delim) {
    DelimiterRefs refs = delimiter_refs(delim);

    std::string sections;
    auto section = [&](const std::string& open, const std::string& close, const std::string& content) {
        std::string s;
        if (!open.empty()) s += open + "\n\n";
        s += content;
        if (!close.empty()) s += "\n\n" + close;
        append_block(sections, s);
    };
    section(refs.text_open, refs.text_close, "Survey Response: " + quoted(p.text));
    section(refs.code_open, refs.code_close, "Code: " + p.code + "\n\nDefinition: " + p.definition);
    section(refs.task_open, refs.task_close,
            "Your task is to rate how well the given code applies to the survey response text.");

    const bool sectioned = !refs.ref_code.empty();
    const std::string neutral_apply = "the score for applying this code to this text is:";
    const std::string sectioned_apply = "the score for applying the code in " + refs.ref_code +
                                        " to the text in " + refs.ref_text + " is:";

    std::string cue;
    if (framing_id == "applicability" || framing_id == "applicability-reversed") {
        // Endpoint anchor wording follows the scale length conventions.
        std::string lo = scale.size() >= 9 ? "doesn't apply" : "not applicable at all";
        std::string hi = scale.size() >= 9 ? "applies perfectly" : "highly applicable";
        if (framing_id == "applicability-reversed") std::swap(lo, hi);
        cue = "On a scale from " + scale.labels.front() + "-" + scale.labels.back() + ", where " +
              scale.labels.front() + " means \"" + lo + "\" and " + scale.labels.back() +
              " means \"" + hi + "\", " +
              (framing_id == "applicability" && sectioned ? sectioned_apply : neutral_apply);
    } else if (framing_id == "intensity") {
        cue = scale_anchor_block(scale, framing_id) +
              "\n\nUsing the scale provided above, the intensity of applicability of " +
              (sectioned ? "the code in " + refs.ref_code + " to the text in " + refs.ref_text
                         : std::string("this code to this text")) +
              " is:";
    } else if (framing_id == "evidence") {
        cue = scale_anchor_block(scale, framing_id) +
              "\n\nUsing the scale provided above, the evidence that this code applies to this "
              "text is:";
    } else if (framing_id == "false-true") {
        cue = scale_anchor_block(scale, framing_id) +
              "\n\nUsing the scale provided above, the statement 'given the context, this code "
              "should be applied to this text' is:";
    } else {
        throw Error(errc::unknown_template, "coding framing \"" + framing_id + "\"");
    }

    return sections + "\n\n" + cue;
}

}  // namespace detail

// Renders one prompt. Pure: identical inputs produce byte-identical output.
inline PromptInstance render(const TaskItem& item, const FactorCell& cell, const ScaleSpec& scale) {
    const templates::FramingDef& framing = templates::find_framing(cell.framing_id, item.task);

    std::string body;
    switch (item.task) {
        case Task::sets:
            body = detail::body_sets(item.sets(), scale);
            break;
        case Task::causal_binary:
            body = detail::body_causal_binary(cell.framing_id, item.causal());
            break;
        case Task::causal_ordinal:
            body = detail::body_causal_ordinal(cell.framing_id, item.causal(), scale);
            break;
        case Task::figurative:
            body = detail::body_figurative(cell.framing_id, item.figurative(), scale);
            break;
        case Task::coding:
            body = detail::body_coding(cell.framing_id, item.coding(), scale, cell.delimiter);
            break;
    }

    std::string text;
    if (auto persona = templates::persona_text(cell.persona)) detail::append_block(text, *persona);
    if (auto ctx = templates::context_text(item.task, cell.context)) detail::append_block(text, *ctx);
    detail::append_block(text, body);

    // Ends-before-target check: the machine-checkable suffix rule per template.
    if (text.size() < framing.suffix.size() ||
        text.compare(text.size() - framing.suffix.size(), framing.suffix.size(), framing.suffix) != 0)
        throw Error(errc::unknown_template, "render for framing \"" + cell.framing_id +
                                                "\" does not end with its cue \"" + framing.suffix +
                                                "\"");

    PromptInstance inst;
    inst.item_id = item.item_id;
    inst.cell = cell;
    inst.scale_id = scale.id;
    inst.context_text = std::move(text);
    inst.created_from = to_string(item.task) + "/" + cell.framing_id;
    return inst;
}

// --- grid enumeration ------------------------------------------------------------

// Item-major deterministic order: items sorted by id, cells in grid order.
// The instance count is items * cells, known before any rendering happens.
template <typename Fn>
inline std::size_t enumerate_grid(const FactorGrid& grid, std::vector<TaskItem> dataset,
                                  const std::vector<ScaleSpec>& catalog, Fn&& fn) {
    if (dataset.empty()) throw Error(errc::empty_dataset, "dataset has no items");
    std::sort(dataset.begin(), dataset.end(),
              [](const TaskItem& a, const TaskItem& b) { return a.item_id < b.item_id; });
    const std::vector<FactorCell> cells = grid.cells();
    for (const TaskItem& item : dataset)
        for (const FactorCell& cell : cells)
            fn(item, cell, render(item, cell, find_scale(catalog, cell.scale_id)));
    return dataset.size() * cells.size();
}

inline std::vector<PromptInstance> enumerate_grid(const FactorGrid& grid,
                                                  const std::vector<TaskItem>& dataset,
                                                  const std::vector<ScaleSpec>& catalog) {
    std::vector<PromptInstance> out;
    enumerate_grid(grid, dataset, catalog,
                   [&](const TaskItem&, const FactorCell&, PromptInstance inst) {
                       out.push_back(std::move(inst));
                   });
    return out;
}

// --- dataset loader -------------------------------------------------------------

inline TaskItem task_item_from_json(const nlohmann::json& j) {
    TaskItem item;
    item.item_id = j.at("item_id").get<std::string>();
    if (item.item_id.empty()) throw Error(errc::schema_violation, "empty item_id");
    item.task = task_from_string(j.at("task").get<std::string>());
    try {
        switch (item.task) {
            case Task::sets: {
                SetsPayload p;
                p.entity = j.at("entity").get<std::string>();
                p.context_sentence = j.at("context_sentence").get<std::string>();
                p.dimension = j.at("dimension").get<std::string>();
                p.expected_score = j.at("expected").get<int>();
                item.payload = std::move(p);
                break;
            }
            case Task::causal_binary:
            case Task::causal_ordinal: {
                CausalPayload p;
                p.statement = j.at("statement").get<std::string>();
                p.gold_causal = j.at("gold_causal").get<bool>();
                p.category = j.value("category", "");
                item.payload = std::move(p);
                break;
            }
            case Task::figurative: {
                FigurativePayload p;
                p.statement = j.at("statement").get<std::string>();
                p.pair_id = j.at("pair_id").get<std::string>();
                p.figurative = j.at("figurative").get<bool>();
                item.payload = std::move(p);
                break;
            }
            case Task::coding: {
                CodingPayload p;
                p.text = j.at("text").get<std::string>();
                p.code = j.at("code").get<std::string>();
                p.definition = j.at("definition").get<std::string>();
                p.gold_applicable = j.at("gold_applicable").get<bool>();
                item.payload = std::move(p);
                break;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::schema_violation,
                    "item " + item.item_id + ": " + std::string(e.what()));
    }
    return item;
}

inline nlohmann::json to_json(const TaskItem& item) {
    nlohmann::json j{{"item_id", item.item_id}, {"task", to_string(item.task)}};
    switch (item.task) {
        case Task::sets: {
            const auto& p = item.sets();
            j["entity"] = p.entity;
            j["context_sentence"] = p.context_sentence;
            j["dimension"] = p.dimension;
            j["expected"] = p.expected_score;
            break;
        }
        case Task::causal_binary:
        case Task::causal_ordinal: {
            const auto& p = item.causal();
            j["statement"] = p.statement;
            j["gold_causal"] = p.gold_causal;
            if (!p.category.empty()) j["category"] = p.category;
            break;
        }
        case Task::figurative: {
            const auto& p = item.figurative();
            j["statement"] = p.statement;
            j["pair_id"] = p.pair_id;
            j["figurative"] = p.figurative;
            break;
        }
        case Task::coding: {
            const auto& p = item.coding();
            j["text"] = p.text;
            j["code"] = p.code;
            j["definition"] = p.definition;
            j["gold_applicable"] = p.gold_applicable;
            break;
        }
    }
    return j;
}

// Line-delimited records, one TaskItem per line. Enforces id uniqueness and
// the figurative pairing invariant (pair_id shared by exactly two items with
// opposite flags).
inline std::vector<TaskItem> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::schema_violation, "cannot open dataset: " + path);

    std::vector<TaskItem> items;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(errc::schema_violation,
                        path + ":" + std::to_string(line_no) + ": " + std::string(e.what()));
        }
        TaskItem item = task_item_from_json(j);
        if (!seen_ids.insert(item.item_id).second)
            throw Error(errc::schema_violation, "duplicate item_id: " + item.item_id);
        items.push_back(std::move(item));
    }
    if (items.empty()) throw Error(errc::schema_violation, "dataset is empty: " + path);

    std::map<std::string, std::vector<const TaskItem*>> pairs;
    for (const TaskItem& item : items)
        if (item.task == Task::figurative) pairs[item.figurative().pair_id].push_back(&item);
    for (const auto& [pair_id, members] : pairs) {
        if (members.size() != 2)
            throw Error(errc::dangling_pair, "pair_id " + pair_id + " appears " +
                                                 std::to_string(members.size()) + " time(s)");
        if (members[0]->figurative().figurative == members[1]->figurative().figurative)
            throw Error(errc::dangling_pair,
                        "pair_id " + pair_id + " members do not have opposite figurative flags");
    }
    return items;
}

}  // namespace surprobe
