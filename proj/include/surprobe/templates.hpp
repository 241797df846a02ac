#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surprobe/error.hpp"
#include "surprobe/scale.hpp"

// Prompt text shipped with the harness. Wording is normative for the task
// families; treat edits as behavior changes, not copy tweaks.

namespace surprobe {

enum class Task { sets, causal_binary, causal_ordinal, figurative, coding };

inline std::string to_string(Task t) {
    switch (t) {
        case Task::sets: return "sets";
        case Task::causal_binary: return "causal-binary";
        case Task::causal_ordinal: return "causal-ordinal";
        case Task::figurative: return "figurative";
        case Task::coding: return "coding";
    }
    return "?";
}

inline Task task_from_string(std::string_view s) {
    if (s == "sets") return Task::sets;
    if (s == "causal-binary") return Task::causal_binary;
    if (s == "causal-ordinal") return Task::causal_ordinal;
    if (s == "figurative") return Task::figurative;
    if (s == "coding") return Task::coding;
    throw Error(errc::schema_violation, "unknown task: " + std::string(s));
}

enum class ContextLevel { none, minimal, full };
enum class PersonaKind { none, qualitative_researcher, domain_expert };
enum class DelimiterStyle { xml, all_caps, none };

inline std::string to_string(ContextLevel c) {
    switch (c) {
        case ContextLevel::none: return "none";
        case ContextLevel::minimal: return "minimal";
        case ContextLevel::full: return "full";
    }
    return "?";
}

inline std::string to_string(PersonaKind p) {
    switch (p) {
        case PersonaKind::none: return "none";
        case PersonaKind::qualitative_researcher: return "qualitative-researcher";
        case PersonaKind::domain_expert: return "domain-expert";
    }
    return "?";
}

inline std::string to_string(DelimiterStyle d) {
    switch (d) {
        case DelimiterStyle::xml: return "xml";
        case DelimiterStyle::all_caps: return "all-caps";
        case DelimiterStyle::none: return "none";
    }
    return "?";
}

inline ContextLevel context_level_from_string(std::string_view s) {
    if (s == "none") return ContextLevel::none;
    if (s == "minimal") return ContextLevel::minimal;
    if (s == "full") return ContextLevel::full;
    throw Error(errc::schema_violation, "unknown context level: " + std::string(s));
}

inline PersonaKind persona_from_string(std::string_view s) {
    if (s == "none") return PersonaKind::none;
    if (s == "qualitative-researcher") return PersonaKind::qualitative_researcher;
    if (s == "domain-expert") return PersonaKind::domain_expert;
    throw Error(errc::schema_violation, "unknown persona: " + std::string(s));
}

inline DelimiterStyle delimiter_from_string(std::string_view s) {
    if (s == "xml") return DelimiterStyle::xml;
    if (s == "all-caps") return DelimiterStyle::all_caps;
    if (s == "none") return DelimiterStyle::none;
    throw Error(errc::schema_violation, "unknown delimiter style: " + std::string(s));
}

namespace templates {

// --- personas ---------------------------------------------------------------

inline std::optional<std::string> persona_text(PersonaKind p) {
    switch (p) {
        case PersonaKind::none:
            return std::nullopt;
        case PersonaKind::qualitative_researcher:
            return "You are an experienced qualitative researcher skilled in systematic coding "
                   "and analysis of textual data.";
        case PersonaKind::domain_expert:
            return "You are a domain expert with extensive knowledge of the subject matter "
                   "being analyzed.";
    }
    return std::nullopt;
}

// --- context blocks ----------------------------------------------------------

inline constexpr std::string_view kSetsFrameworkFull =
    R"__(The Social-Ecological-Technological Systems (SETS) framework analyzes entities across three interconnected dimensions:

Social: Human aspects such as community interactions, governance, economic systems, cultural values, and social equity

Ecological: The natural environment and its components, often involved in biophysical processes, including natural resources, ecosystem functions, and environmental conditions

Technological: Human-made systems and engineered infrastructures, including infrastructure, technological tools, and innovations

The framework can be used to classify entities and concepts based on their alignment with these dimensions. When doing so, it is helpful to consider not only the entity but the surrounding context in which it was mentioned.)__";

inline constexpr std::string_view kSetsFrameworkMinimal =
    "The Social-Ecological-Technological Systems (SETS) framework analyzes entities across "
    "three interconnected dimensions: social, ecological, and technological.";

inline constexpr std::string_view kCausalContextMinimal =
    "Causality refers to relationships where one event causes or influences another. Look for "
    "statements that express how one thing brings about, leads to, or is responsible for "
    "another thing.";

inline constexpr std::string_view kCausalContextFull =
    R"__(Causal relationships can be indicated through various linguistic structures and at different levels of language. Be aware of the following indicators:

a) Explicit markers: because, since, therefore, thus, hence, consequently, so that, in order to
b) Causal verbs: cause, result, produce, generate, lead, induce, trigger, prompt
c) Noun phrases: causes, reasons, effects, consequences, outcomes
d) Adverbial clauses: due to, owing to, as a result of, because of
e) Implied causation: If-then constructions, resultative constructions
f) Causal reasoning: expressions of purpose (to, in order to), statements of intention (intend to, aim to)
g) Types of causatives: Lexical, Morphological, Periphrastic
h) Causal chain complexity: Simple (A causes B) or complex (A causes B, which causes C)
i) Temporal ordering: Cause typically precedes effect, but language allows various orderings
j) Counterfactual causality: "If X hadn't happened, Y wouldn't have occurred"
k) Causal strength and probability: Language expressing degrees of causal influence
l) Discourse-level causality: Causal relationships spanning across sentences
m) Implicit causality: Verbs carrying implicit causal information
n) Correlation vs. Causation: Be particularly careful to distinguish between:
- True causal relationships where one event directly influences another
- Mere temporal correlation or co-occurrence
- Statistical association without clear causation
- Sequential events without proven causation
o) Multiple causation: When multiple distinct causal relationships exist in the same statement
p) Causal chains: When A causes B, which in turn causes C
q) Parallel causation: When multiple causes lead to the same effect
r) Branching causation: When one cause leads to multiple effects)__";

inline constexpr std::string_view kFigurativeContextFull =
    R"__(Figurative language uses words or expressions with meanings different from their literal interpretation to create vivid imagery, comparisons, or emphasis. Key types include:

1. METAPHORS: Direct comparisons that state one thing IS another thing (e.g., "Love is a battlefield")
2. ANALOGIES: Extended comparisons that explain one concept by comparing it to another (e.g., "The economy works like a machine")
3. SIMILES: Comparisons using "like" or "as" (e.g., "Bright as the sun")
4. PERSONIFICATION: Giving human characteristics to non-human things (e.g., "The ocean roared with fury")

Metaphors create implicit comparisons without using comparison words, while analogies typically involve more detailed structural comparisons between different domains. Similes make explicit comparisons using comparison words, and personification attributes human qualities to non-human entities.)__";

inline constexpr std::string_view kFigurativeContextMinimal =
    R"__(Figurative language uses non-literal meanings to create comparisons or emphasis. Key types:
- Metaphors: Direct comparisons (X is Y) without "like/as"
- Analogies: Extended comparisons explaining concepts through structural similarities
- Similes: Explicit comparisons using "like" or "as"
- Personification: Giving human qualities to non-human things)__";

inline constexpr std::string_view kCodingContextMinimal =
    "Deductive coding applies predefined codes (with definitions) to unstructured text.";

inline constexpr std::string_view kCodingContextFull =
    "Deductive coding applies predefined codes (with definitions) to unstructured text. "
    "Researchers read each segment of text and decide how well each code from a pre-existing "
    "codebook describes it. Codes are labels that describe patterns, such as themes, in "
    "qualitative data.";

inline std::optional<std::string> context_text(Task task, ContextLevel level) {
    if (level == ContextLevel::none) return std::nullopt;
    bool full = level == ContextLevel::full;
    switch (task) {
        case Task::sets:
            return std::string(full ? kSetsFrameworkFull : kSetsFrameworkMinimal);
        case Task::causal_binary:
        case Task::causal_ordinal:
            return std::string(full ? kCausalContextFull : kCausalContextMinimal);
        case Task::figurative:
            return std::string(full ? kFigurativeContextFull : kFigurativeContextMinimal);
        case Task::coding:
            return std::string(full ? kCodingContextFull : kCodingContextMinimal);
    }
    return std::nullopt;
}

// --- placeholder substitution --------------------------------------------------

// Replaces {name} tokens; any brace token left unreplaced is an error so a
// template typo cannot silently leak into a scored prompt.
inline std::string substitute(std::string_view tmpl,
                              const std::map<std::string, std::string>& values,
                              std::string_view template_id) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t close = tmpl.find('}', i + 1);
            if (close == std::string_view::npos)
                throw Error(errc::unresolved_placeholder,
                            std::string(template_id) + ": unterminated '{'");
            std::string key(tmpl.substr(i + 1, close - i - 1));
            auto it = values.find(key);
            if (it == values.end())
                throw Error(errc::unresolved_placeholder,
                            std::string(template_id) + ": no value for {" + key + "}");
            out += it->second;
            i = close + 1;
        } else {
            out += tmpl[i];
            ++i;
        }
    }
    return out;
}

// --- framing bodies -----------------------------------------------------------

struct MidAnchor {
    // {mid} lines are emitted only when the scale has a center position.
    static std::optional<int> of(const ScaleSpec& scale) {
        if (scale.size() % 2 == 0) return std::nullopt;
        return scale.positions[scale.size() / 2];
    }
};

struct FramingDef {
    std::string id;
    Task task;
    std::string suffix;  // every render must end exactly with this cue
};

inline const std::vector<FramingDef>& framing_registry() {
    static const std::vector<FramingDef> defs = {
        {"sets-score", Task::sets, "dimension is:"},
        {"tf-statement", Task::causal_binary, "This statement expresses a causal relationship:"},
        {"yn-question", Task::causal_binary, "Answer (Yes or No):"},
        {"binary-choice", Task::causal_binary, "Answer (A or B):"},
        {"bipolar-causality", Task::causal_ordinal, "Rating:"},
        {"belief-strength", Task::causal_ordinal, "Rating:"},
        {"probability", Task::causal_ordinal, "Rating:"},
        {"causal-strength", Task::causal_ordinal, "Rating:"},
        {"dual-classification", Task::causal_ordinal, "A) Rating:"},
        {"metaphor-intensity", Task::figurative, "Rating:"},
        {"analogy-strength", Task::figurative, "Rating:"},
        {"tf-metaphor", Task::figurative, "Answer:"},
        {"yn-analogy", Task::figurative, "Answer (Yes or No):"},
        {"applicability", Task::coding, "is:"},
        {"applicability-reversed", Task::coding, "is:"},
        {"intensity", Task::coding, "is:"},
        {"evidence", Task::coding, "is:"},
        {"false-true", Task::coding, "is:"},
    };
    return defs;
}

inline const FramingDef& find_framing(std::string_view id, Task task) {
    for (const auto& d : framing_registry())
        if (d.id == id && d.task == task) return d;
    throw Error(errc::unknown_template, "no template for task " + to_string(task) +
                                            " and framing \"" + std::string(id) + "\"");
}

inline std::vector<std::string> framings_for(Task task) {
    std::vector<std::string> ids;
    for (const auto& d : framing_registry())
        if (d.task == task) ids.push_back(d.id);
    return ids;
}

}  // namespace templates

}  // namespace surprobe
