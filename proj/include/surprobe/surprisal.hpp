#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "surprobe/error.hpp"
#include "surprobe/scale.hpp"

namespace surprobe {

// Probability floor applied before taking logs, so pathological fixtures
// (underflowed softmax cells) yield a large finite surprisal instead of inf.
inline constexpr double kProbFloor = 1e-300;

// Self-information of an event, in nats.
inline double surprisal_of_prob(double p) {
    if (!(p > 0.0))
        throw Error(errc::non_positive_probability,
                    "probability must be > 0, got " + std::to_string(p));
    if (p > 1.0)
        throw Error(errc::probability_above_one, "probability must be <= 1, got " + std::to_string(p));
    return -std::log(p);
}

// Probabilities renormalized over the restricted alternative set, aligned
// with the scale's positions.
struct RestrictedDistribution {
    std::string scale_id;
    std::vector<int> positions;
    std::vector<double> probs;
    bool floor_clamped{false};  // set when any prob hit kProbFloor downstream

    double prob_at(int position) const {
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (positions[i] == position) return probs[i];
        throw Error(errc::unknown_position, "no position " + std::to_string(position));
    }
};

// Softmax over the restricted set, max-subtracted for stability. Adding a
// constant to every logit leaves the result unchanged to ~1e-15.
inline RestrictedDistribution renormalize(const std::vector<double>& logits,
                                          const ScaleSpec& scale) {
    if (logits.size() != scale.size())
        throw Error(errc::arity_mismatch, "scale " + scale.id + " expects " +
                                              std::to_string(scale.size()) + " logits, got " +
                                              std::to_string(logits.size()));
    for (double l : logits)
        if (!std::isfinite(l))
            throw Error(errc::non_finite_logit, "non-finite logit for scale " + scale.id);

    double max_logit = *std::max_element(logits.begin(), logits.end());
    std::vector<double> exps(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        exps[i] = std::exp(logits[i] - max_logit);
        sum += exps[i];
    }

    RestrictedDistribution dist;
    dist.scale_id = scale.id;
    dist.positions = scale.positions;
    dist.probs.resize(exps.size());
    for (std::size_t i = 0; i < exps.size(); ++i) dist.probs[i] = exps[i] / sum;
    return dist;
}

// -sum p ln p with 0 ln 0 := 0, in nats.
inline double entropy_of(const RestrictedDistribution& dist) {
    double h = 0.0;
    for (double p : dist.probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

enum class BinaryClass { positive, negative };

inline std::string to_string(BinaryClass c) {
    return c == BinaryClass::positive ? "positive" : "negative";
}

struct BinaryVerdict {
    BinaryClass verdict{BinaryClass::negative};
    double delta{0.0};  // |S(positive) - S(negative)|
};

// Positive iff the positive completion is strictly less surprising; ties go
// to the "otherwise" branch (negative).
inline BinaryVerdict binary_decide(double s_positive, double s_negative) {
    if (!std::isfinite(s_positive) || !std::isfinite(s_negative))
        throw Error(errc::non_finite_surprisal, "binary_decide requires finite surprisals");
    BinaryVerdict v;
    v.verdict = s_positive < s_negative ? BinaryClass::positive : BinaryClass::negative;
    v.delta = std::abs(s_positive - s_negative);
    return v;
}

// Surprisal per scale position with the derived distribution, entropy and
// argmin verdict. Raw backend logprobs are retained for audit; the reported
// surprisals come from the renormalized distribution.
struct SurprisalCurve {
    std::string scale_id;
    std::vector<int> positions;
    std::vector<double> raw_logprobs;
    std::vector<double> surprisals;
    RestrictedDistribution distribution;
    double entropy{0.0};
    int argmin_position{0};
    std::vector<int> argmin_ties;  // every minimal position, lowest first
    bool floor_clamped{false};

    double surprisal_at(int position) const {
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (positions[i] == position) return surprisals[i];
        throw Error(errc::unknown_position, "no position " + std::to_string(position));
    }
};

inline SurprisalCurve build_curve(const std::vector<double>& raw_logits, const ScaleSpec& scale) {
    SurprisalCurve curve;
    curve.scale_id = scale.id;
    curve.positions = scale.positions;
    curve.raw_logprobs = raw_logits;
    curve.distribution = renormalize(raw_logits, scale);

    curve.surprisals.resize(curve.distribution.probs.size());
    for (std::size_t i = 0; i < curve.surprisals.size(); ++i) {
        double p = curve.distribution.probs[i];
        if (p < kProbFloor) {
            p = kProbFloor;
            curve.floor_clamped = true;
        }
        curve.surprisals[i] = -std::log(p);
    }
    curve.distribution.floor_clamped = curve.floor_clamped;
    curve.entropy = entropy_of(curve.distribution);

    double min_s = *std::min_element(curve.surprisals.begin(), curve.surprisals.end());
    for (std::size_t i = 0; i < curve.surprisals.size(); ++i)
        if (curve.surprisals[i] == min_s) curve.argmin_ties.push_back(curve.positions[i]);
    curve.argmin_position = curve.argmin_ties.front();
    return curve;
}

// Binary verdict from a two-point curve on a binary scale (positions 0/1).
inline BinaryVerdict binary_verdict_of(const SurprisalCurve& curve) {
    return binary_decide(curve.surprisal_at(1), curve.surprisal_at(0));
}

}  // namespace surprobe
