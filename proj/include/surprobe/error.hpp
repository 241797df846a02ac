#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace surprobe {

// All recoverable failures carry a stable kebab-case code so callers (and the
// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
// scale-kit
inline constexpr const char* duplicate_label = "duplicate-label";
inline constexpr const char* invalid_label = "invalid-label";
inline constexpr const char* length_mismatch = "length-mismatch";
inline constexpr const char* non_monotone_positions = "non-monotone-positions";
inline constexpr const char* midpoint_out_of_range = "midpoint-out-of-range";
inline constexpr const char* unknown_position = "unknown-position";
inline constexpr const char* unknown_scale = "unknown-scale";
// prompt-factory
inline constexpr const char* unknown_template = "unknown-template";
inline constexpr const char* unresolved_placeholder = "unresolved-placeholder";
inline constexpr const char* empty_dataset = "empty-dataset";
inline constexpr const char* schema_violation = "schema-violation";
inline constexpr const char* dangling_pair = "dangling-pair";
// logprob-backend
inline constexpr const char* provider_unreachable = "provider-unreachable";
inline constexpr const char* surface_unresolvable = "surface-unresolvable";
inline constexpr const char* malformed_response = "malformed-response";
inline constexpr const char* cache_corrupt = "cache-corrupt";
// surprisal-engine
inline constexpr const char* non_positive_probability = "non-positive-probability";
inline constexpr const char* probability_above_one = "probability-above-one";
inline constexpr const char* non_finite_logit = "non-finite-logit";
inline constexpr const char* arity_mismatch = "arity-mismatch";
inline constexpr const char* non_finite_surprisal = "non-finite-surprisal";
// curve-analysis
inline constexpr const char* curve_too_short = "curve-too-short";
// metrics
inline constexpr const char* empty_group = "empty-group";
inline constexpr const char* scale_mismatch = "scale-mismatch";
inline constexpr const char* midpoint_undefined = "midpoint-undefined";
inline constexpr const char* incomplete_pair = "incomplete-pair";
inline constexpr const char* unknown_factor = "unknown-factor";
// experiment-runner / report-cli
inline constexpr const char* config_invalid = "config-invalid";
inline constexpr const char* config_digest_mismatch = "config-digest-mismatch";
inline constexpr const char* no_match = "no-match";
}  // namespace errc

}  // namespace surprobe
