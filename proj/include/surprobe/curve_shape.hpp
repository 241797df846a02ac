#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "surprobe/error.hpp"
#include "surprobe/surprisal.hpp"

namespace surprobe {

enum class Monotonicity { increasing, decreasing, non_monotonic };

inline std::string to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::increasing: return "increasing";
        case Monotonicity::decreasing: return "decreasing";
        case Monotonicity::non_monotonic: return "non-monotonic";
    }
    return "?";
}

struct CurveShape {
    int min_position{0};
    Monotonicity monotonicity{Monotonicity::non_monotonic};
    std::vector<int> local_minima;
    double steepness{0.0};   // mean |adjacent difference|, nats per step
    double asymmetry{0.0};   // mean right-tail |slope| minus mean left-tail |slope|
    bool is_bowl{false};     // interior minimum, both neighbors higher by > eps
};

struct AnalyzeOptions {
    double eps{1e-6};
    // Whole-curve steepness is the default; the windowed variant averages the
    // |differences| adjacent to the minimum only.
    bool steepness_window_about_min{false};
};

// Shape features of a surprisal curve: minimum location, monotonicity class,
// local minima (multi-modality), steepness, tail asymmetry, bowl shape.
inline CurveShape analyze(const std::vector<int>& positions, const std::vector<double>& surprisals,
                          const AnalyzeOptions& opt = {}) {
    const std::size_t n = surprisals.size();
    if (n < 2 || positions.size() != n)
        throw Error(errc::curve_too_short, "curve needs >= 2 aligned positions");
    const double eps = opt.eps;

    CurveShape shape;

    // Global minimum, lowest position on ties.
    std::size_t min_idx = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (surprisals[i] < surprisals[min_idx]) min_idx = i;
    shape.min_position = positions[min_idx];

    // Monotone iff every step stays within eps of the required sign and at
    // least one step actually moves; flat-within-eps curves are non-monotonic.
    bool all_down = true, all_up = true, any_down = false, any_up = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double d = surprisals[i + 1] - surprisals[i];
        if (d > eps) { all_down = false; any_up = true; }
        if (d < -eps) { all_up = false; any_down = true; }
    }
    if (all_down && any_down)
        shape.monotonicity = Monotonicity::decreasing;
    else if (all_up && any_up)
        shape.monotonicity = Monotonicity::increasing;
    else
        shape.monotonicity = Monotonicity::non_monotonic;

    // Local minimum: no neighbor lower by more than eps. Endpoints count with
    // their single neighbor, so monotone curves report their extreme position.
    for (std::size_t i = 0; i < n; ++i) {
        bool left_ok = (i == 0) || surprisals[i] <= surprisals[i - 1] + eps;
        bool right_ok = (i + 1 == n) || surprisals[i] <= surprisals[i + 1] + eps;
        if (left_ok && right_ok) shape.local_minima.push_back(positions[i]);
    }

    if (opt.steepness_window_about_min) {
        double sum = 0.0;
        int count = 0;
        if (min_idx > 0) { sum += std::abs(surprisals[min_idx] - surprisals[min_idx - 1]); ++count; }
        if (min_idx + 1 < n) { sum += std::abs(surprisals[min_idx + 1] - surprisals[min_idx]); ++count; }
        shape.steepness = count ? sum / count : 0.0;
    } else {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) sum += std::abs(surprisals[i + 1] - surprisals[i]);
        shape.steepness = sum / static_cast<double>(n - 1);
    }

    // Tails split at the minimum; an empty tail contributes 0. Positive
    // asymmetry means the right tail rises faster.
    double left_sum = 0.0, right_sum = 0.0;
    std::size_t left_n = min_idx, right_n = n - 1 - min_idx;
    for (std::size_t i = 0; i < min_idx; ++i) left_sum += std::abs(surprisals[i + 1] - surprisals[i]);
    for (std::size_t i = min_idx; i + 1 < n; ++i)
        right_sum += std::abs(surprisals[i + 1] - surprisals[i]);
    double left_mean = left_n ? left_sum / static_cast<double>(left_n) : 0.0;
    double right_mean = right_n ? right_sum / static_cast<double>(right_n) : 0.0;
    shape.asymmetry = right_mean - left_mean;

    shape.is_bowl = min_idx > 0 && min_idx + 1 < n &&
                    surprisals[min_idx - 1] > surprisals[min_idx] + eps &&
                    surprisals[min_idx + 1] > surprisals[min_idx] + eps;
    return shape;
}

inline CurveShape analyze(const SurprisalCurve& curve, const AnalyzeOptions& opt = {}) {
    return analyze(curve.positions, curve.surprisals, opt);
}

enum class ConfidenceBucket { steep, moderate, flat };

inline std::string to_string(ConfidenceBucket b) {
    switch (b) {
        case ConfidenceBucket::steep: return "steep";
        case ConfidenceBucket::moderate: return "moderate";
        case ConfidenceBucket::flat: return "flat";
    }
    return "?";
}

struct ConfidenceThresholds {
    double steep_above{1.0};  // nats per step
    double flat_below{0.25};
};

inline ConfidenceBucket classify_confidence(const CurveShape& shape,
                                            const ConfidenceThresholds& t = {}) {
    if (shape.steepness > t.steep_above) return ConfidenceBucket::steep;
    if (shape.steepness < t.flat_below) return ConfidenceBucket::flat;
    return ConfidenceBucket::moderate;
}

}  // namespace surprobe
