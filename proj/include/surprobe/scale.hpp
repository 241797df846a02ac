#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "surprobe/error.hpp"

namespace surprobe {

enum class ScaleKind { binary, numeric_ordinal, qualitative_ordinal };

inline std::string to_string(ScaleKind k) {
    switch (k) {
        case ScaleKind::binary: return "binary";
        case ScaleKind::numeric_ordinal: return "numeric-ordinal";
        case ScaleKind::qualitative_ordinal: return "qualitative-ordinal";
    }
    return "?";
}

inline ScaleKind scale_kind_from_string(std::string_view s) {
    if (s == "binary") return ScaleKind::binary;
    if (s == "numeric-ordinal") return ScaleKind::numeric_ordinal;
    if (s == "qualitative-ordinal") return ScaleKind::qualitative_ordinal;
    throw Error(errc::schema_violation, "unknown scale kind: " + std::string(s));
}

// Exact midpoint for directional metrics. Kept rational so comparisons with
// integer positions never hit floating-point equality.
struct Rational {
    int num{0};
    int den{1};

    double value() const { return static_cast<double>(num) / den; }
};

inline bool operator<(int position, const Rational& r) { return position * r.den < r.num; }
inline bool operator>(int position, const Rational& r) { return position * r.den > r.num; }
inline bool operator==(const Rational& a, const Rational& b) {
    return static_cast<long long>(a.num) * b.den == static_cast<long long>(b.num) * a.den;
}

// The exact byte sequence submitted to a backend for one scale position.
struct CompletionForm {
    std::string scale_id;
    int position{0};
    std::string surface;
};

// An ordered set of completion alternatives. Immutable after build_scale;
// safe to share across threads.
struct ScaleSpec {
    std::string id;
    ScaleKind kind{ScaleKind::numeric_ordinal};
    std::vector<std::string> labels;   // aligned with positions, position-ascending
    std::vector<int> positions;        // strictly increasing
    std::map<int, std::string> anchors;
    Rational midpoint;
    bool leading_space{true};

    std::size_t size() const { return labels.size(); }
    int min_position() const { return positions.front(); }
    int max_position() const { return positions.back(); }

    const std::string& label_at(int position) const {
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (positions[i] == position) return labels[i];
        throw Error(errc::unknown_position,
                    "scale " + id + " has no position " + std::to_string(position));
    }

    std::optional<std::string> anchor_at(int position) const {
        auto it = anchors.find(position);
        if (it == anchors.end()) return std::nullopt;
        return it->second;
    }
};

namespace detail {
inline bool has_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}
}  // namespace detail

// Validates and canonicalizes a scale definition. Binary label/position pairs
// may arrive positive-first ("True","False" with positions 1,0) and are
// stored position-ascending; ordinal kinds must already be increasing.
inline ScaleSpec build_scale(std::string id, ScaleKind kind, std::vector<std::string> labels,
                             std::vector<int> positions,
                             std::map<int, std::string> anchors = {},
                             std::optional<Rational> midpoint = std::nullopt,
                             bool leading_space = true) {
    if (labels.size() != positions.size())
        throw Error(errc::length_mismatch,
                    "scale " + id + ": " + std::to_string(labels.size()) + " labels vs " +
                        std::to_string(positions.size()) + " positions");
    if (labels.empty())
        throw Error(errc::length_mismatch, "scale " + id + ": no labels");
    if (kind == ScaleKind::binary && labels.size() != 2)
        throw Error(errc::length_mismatch, "binary scale " + id + " must have exactly 2 labels");

    for (const auto& label : labels) {
        if (label.empty())
            throw Error(errc::invalid_label, "scale " + id + ": empty label");
        if (detail::has_whitespace(label))
            throw Error(errc::invalid_label,
                        "scale " + id + ": label \"" + label + "\" contains whitespace");
        if (std::count(labels.begin(), labels.end(), label) != 1)
            throw Error(errc::duplicate_label, "scale " + id + ": duplicate label \"" + label + "\"");
    }

    if (kind == ScaleKind::binary) {
        if (positions[0] > positions[1]) {
            std::swap(labels[0], labels[1]);
            std::swap(positions[0], positions[1]);
        }
        if (positions[0] != 0 || positions[1] != 1)
            throw Error(errc::non_monotone_positions,
                        "binary scale " + id + ": positions must be 0 (negative) and 1 (positive)");
    }
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (positions[i] <= positions[i - 1])
            throw Error(errc::non_monotone_positions,
                        "scale " + id + ": positions not strictly increasing");

    if (!midpoint.has_value()) {
        // Arithmetic midpoint of the extremes.
        midpoint = Rational{positions.front() + positions.back(), 2};
    }
    if (midpoint->den <= 0)
        throw Error(errc::midpoint_out_of_range, "scale " + id + ": midpoint denominator must be positive");
    if (kind != ScaleKind::binary) {
        if (!(positions.front() < *midpoint && positions.back() > *midpoint))
            throw Error(errc::midpoint_out_of_range,
                        "scale " + id + ": midpoint not strictly inside [" +
                            std::to_string(positions.front()) + ", " +
                            std::to_string(positions.back()) + "]");
    }

    ScaleSpec spec;
    spec.id = std::move(id);
    spec.kind = kind;
    spec.labels = std::move(labels);
    spec.positions = std::move(positions);
    spec.anchors = std::move(anchors);
    spec.midpoint = *midpoint;
    spec.leading_space = leading_space;
    return spec;
}

inline CompletionForm completion_form(const ScaleSpec& scale, int position) {
    const std::string& label = scale.label_at(position);
    CompletionForm form;
    form.scale_id = scale.id;
    form.position = position;
    form.surface = scale.leading_space ? " " + label : label;
    return form;
}

inline std::vector<CompletionForm> completion_forms(const ScaleSpec& scale) {
    std::vector<CompletionForm> forms;
    forms.reserve(scale.size());
    for (int p : scale.positions) forms.push_back(completion_form(scale, p));
    return forms;
}

// --- single-token validation -------------------------------------------------

// Backend tokenizer capability: surface -> token count. Absent (empty
// function) or nullopt answers downgrade to the static heuristic.
using TokenizationProbe = std::function<std::optional<int>(std::string_view surface)>;

enum class TokenStatus { verified_single, probe_reject, unverified_pass, heuristic_reject };

inline std::string to_string(TokenStatus s) {
    switch (s) {
        case TokenStatus::verified_single: return "verified-single";
        case TokenStatus::probe_reject: return "probe-reject";
        case TokenStatus::unverified_pass: return "unverified-pass";
        case TokenStatus::heuristic_reject: return "heuristic-reject";
    }
    return "?";
}

struct TokenReport {
    int position{0};
    std::string surface;
    TokenStatus status{TokenStatus::unverified_pass};
    std::optional<int> token_count;
};

// Heuristic: the label (surface minus its leading space) must be short and a
// single word. Deliberately conservative; a real probe overrides it.
inline std::vector<TokenReport> validate_single_token(const ScaleSpec& scale,
                                                      const TokenizationProbe& probe = {}) {
    std::vector<TokenReport> reports;
    for (const CompletionForm& form : completion_forms(scale)) {
        TokenReport report;
        report.position = form.position;
        report.surface = form.surface;

        std::optional<int> count;
        if (probe) {
            try {
                count = probe(form.surface);
            } catch (const std::exception&) {
                count = std::nullopt;  // ProbeUnavailable: non-fatal, fall through
            }
        }
        if (count.has_value()) {
            report.token_count = count;
            report.status = (*count == 1) ? TokenStatus::verified_single : TokenStatus::probe_reject;
        } else {
            const std::string& label = scale.label_at(form.position);
            bool ok = label.size() <= 12 && !detail::has_whitespace(label);
            report.status = ok ? TokenStatus::unverified_pass : TokenStatus::heuristic_reject;
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

// --- JSON catalog ------------------------------------------------------------

inline nlohmann::json to_json(const ScaleSpec& scale) {
    nlohmann::json anchors = nlohmann::json::object();
    for (const auto& [pos, text] : scale.anchors) anchors[std::to_string(pos)] = text;
    return nlohmann::json{{"id", scale.id},
                          {"kind", to_string(scale.kind)},
                          {"labels", scale.labels},
                          {"positions", scale.positions},
                          {"anchors", anchors},
                          {"midpoint", {{"num", scale.midpoint.num}, {"den", scale.midpoint.den}}},
                          {"leading_space", scale.leading_space}};
}

inline ScaleSpec scale_from_json(const nlohmann::json& j) {
    std::map<int, std::string> anchors;
    if (j.contains("anchors"))
        for (auto it = j["anchors"].begin(); it != j["anchors"].end(); ++it)
            anchors[std::stoi(it.key())] = it.value().get<std::string>();
    std::optional<Rational> mid;
    if (j.contains("midpoint")) {
        mid = Rational{j["midpoint"].at("num").get<int>(), j["midpoint"].at("den").get<int>()};
    }
    return build_scale(j.at("id").get<std::string>(),
                       scale_kind_from_string(j.at("kind").get<std::string>()),
                       j.at("labels").get<std::vector<std::string>>(),
                       j.at("positions").get<std::vector<int>>(), std::move(anchors), mid,
                       j.value("leading_space", true));
}

// Shipped presets. Completion surfaces must match the published target lists
// byte for byte; the tests pin them.
inline std::vector<ScaleSpec> scale_catalog() {
    std::vector<ScaleSpec> scales;
    scales.push_back(build_scale("true-false", ScaleKind::binary, {"True", "False"}, {1, 0}));
    scales.push_back(build_scale("yes-no", ScaleKind::binary, {"Yes", "No"}, {1, 0}));
    scales.push_back(build_scale("false-true", ScaleKind::binary, {"false", "true"}, {0, 1},
                                 {{0, "it is false that the code should be applied to the text"},
                                  {1, "it is true that the code should be applied to the text"}}));
    // Unvalidated any-of-two preset for the "binary choice" response format.
    scales.push_back(build_scale("binary-choice", ScaleKind::binary, {"A", "B"}, {1, 0}));

    scales.push_back(build_scale("numeric-1-5", ScaleKind::numeric_ordinal,
                                 {"1", "2", "3", "4", "5"}, {1, 2, 3, 4, 5}, {}, Rational{3, 1}));
    scales.push_back(build_scale("numeric-1-9", ScaleKind::numeric_ordinal,
                                 {"1", "2", "3", "4", "5", "6", "7", "8", "9"},
                                 {1, 2, 3, 4, 5, 6, 7, 8, 9}, {}, Rational{5, 1}));

    scales.push_back(build_scale(
        "intensity", ScaleKind::qualitative_ordinal, {"none", "weak", "medium", "strong", "perfect"},
        {1, 2, 3, 4, 5},
        {{1, "the code does not describe the text at all"},
         {2, "the code slightly or minimally describes the text"},
         {3, "the code moderately describes the text"},
         {4, "the code strongly describes the text"},
         {5, "the code perfectly or completely describes the text"}},
        Rational{3, 1}));
    scales.push_back(build_scale(
        "evidence", ScaleKind::qualitative_ordinal, {"negligible", "weak", "moderate", "strong"},
        {1, 2, 3, 4},
        {{1, "there is no evidence that the code applies to the text"},
         {2, "there is weak or minimal evidence that the code applies to the text"},
         {3, "there is moderate evidence that the code applies to the text"},
         {4, "there is strong or compelling evidence that the code applies to the text"}},
        Rational{5, 2}));

    // Supports the dual-classification framing, which scores "A_<k>"
    // completions. Single-token status is model-dependent; check with
    // validate_single_token before trusting results.
    scales.push_back(build_scale("dual-causal-a", ScaleKind::qualitative_ordinal,
                                 {"A_1", "A_2", "A_3", "A_4", "A_5"}, {1, 2, 3, 4, 5}, {},
                                 Rational{3, 1}));
    return scales;
}

inline const ScaleSpec& find_scale(const std::vector<ScaleSpec>& catalog, std::string_view id) {
    for (const auto& s : catalog)
        if (s.id == id) return s;
    throw Error(errc::unknown_scale, "no scale with id \"" + std::string(id) + "\"");
}

inline nlohmann::json catalog_to_json(const std::vector<ScaleSpec>& catalog) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : catalog) arr.push_back(to_json(s));
    return nlohmann::json{{"schema", "surprobe-scales-v1"}, {"scales", arr}};
}

inline std::vector<ScaleSpec> catalog_from_json(const nlohmann::json& j) {
    std::vector<ScaleSpec> scales;
    for (const auto& item : j.at("scales")) scales.push_back(scale_from_json(item));
    return scales;
}

}  // namespace surprobe
