#include <doctest.h>

#include <algorithm>
#include <random>

#include "surprobe/curve_shape.hpp"

using namespace surprobe;

namespace {

std::vector<int> positions_for(std::size_t n) {
    std::vector<int> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i) + 1;
    return p;
}

}  // namespace

TEST_CASE("strict ramp is monotone decreasing with the minimum at the end") {
    CurveShape s = analyze(positions_for(5), {5, 4, 3, 2, 1});
    CHECK(s.monotonicity == Monotonicity::decreasing);
    CHECK(s.min_position == 5);
    CHECK_FALSE(s.is_bowl);
    CHECK(s.local_minima == std::vector<int>{5});
    CHECK(s.steepness == doctest::Approx(1.0));
}

TEST_CASE("symmetric bowl") {
    CurveShape s = analyze(positions_for(5), {4, 2, 1, 2, 4});
    CHECK(s.monotonicity == Monotonicity::non_monotonic);
    CHECK(s.min_position == 3);
    CHECK(s.is_bowl);
    CHECK(s.local_minima == std::vector<int>{3});
    CHECK(s.asymmetry == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two local minima, argmin at the lower one") {
    CurveShape s = analyze(positions_for(5), {3, 1, 2, 1.5, 3});
    CHECK(s.local_minima == std::vector<int>{2, 4});
    CHECK(s.min_position == 2);
    CHECK(s.monotonicity == Monotonicity::non_monotonic);
}

TEST_CASE("every finite curve has at least one local minimum") {
    CHECK(analyze(positions_for(4), {2, 2, 2, 2}).local_minima.size() == 4);  // flat
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> v(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng() % 8;
        std::vector<double> s(n);
        for (auto& x : s) x = v(rng);
        CurveShape shape = analyze(positions_for(n), s);
        CHECK(shape.local_minima.size() >= 1);
        CHECK(std::find(shape.local_minima.begin(), shape.local_minima.end(), shape.min_position) !=
              shape.local_minima.end());
        CHECK(shape.steepness >= 0.0);
    }
}

TEST_CASE("strictly convex discrete curves have exactly one local minimum") {
    CHECK(analyze(positions_for(5), {9, 4, 1, 4, 9}).local_minima.size() == 1);
    CHECK(analyze(positions_for(4), {10, 3, 1, 6}).local_minima.size() == 1);
}

TEST_CASE("reversal swaps monotonicity and negates asymmetry") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> v(0.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 3 + rng() % 6;
        std::vector<double> s(n);
        for (auto& x : s) x = v(rng);
        // unique global minimum keeps the reversal well-defined
        if (std::count(s.begin(), s.end(), *std::min_element(s.begin(), s.end())) != 1) continue;

        std::vector<double> reversed(s.rbegin(), s.rend());
        CurveShape fwd = analyze(positions_for(n), s);
        CurveShape rev = analyze(positions_for(n), reversed);
        if (fwd.monotonicity == Monotonicity::decreasing)
            CHECK(rev.monotonicity == Monotonicity::increasing);
        if (fwd.monotonicity == Monotonicity::increasing)
            CHECK(rev.monotonicity == Monotonicity::decreasing);
        CHECK(rev.asymmetry == doctest::Approx(-fwd.asymmetry).epsilon(1e-9));
        CHECK(rev.steepness == doctest::Approx(fwd.steepness).epsilon(1e-12));
    }
}

TEST_CASE("adding a constant changes no shape field") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> v(0.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + rng() % 7;
        std::vector<double> s(n), t(n);
        double c = v(rng) * 10.0 - 20.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = v(rng);
            t[i] = s[i] + c;
        }
        CurveShape a = analyze(positions_for(n), s);
        CurveShape b = analyze(positions_for(n), t);
        CHECK(a.min_position == b.min_position);
        CHECK(a.monotonicity == b.monotonicity);
        CHECK(a.local_minima == b.local_minima);
        CHECK(a.steepness == doctest::Approx(b.steepness).epsilon(1e-9));
        CHECK(a.asymmetry == doctest::Approx(b.asymmetry).epsilon(1e-9));
        CHECK(a.is_bowl == b.is_bowl);
    }
}

TEST_CASE("windowed steepness averages around the minimum only") {
    AnalyzeOptions opt;
    opt.steepness_window_about_min = true;
    CurveShape s = analyze(positions_for(5), {9, 4, 1, 2, 3}, opt);
    CHECK(s.steepness == doctest::Approx((3.0 + 1.0) / 2.0));
}

TEST_CASE("confidence buckets from steepness thresholds") {
    CurveShape s;
    s.steepness = 1.5;
    CHECK(classify_confidence(s) == ConfidenceBucket::steep);
    s.steepness = 0.1;
    CHECK(classify_confidence(s) == ConfidenceBucket::flat);
    s.steepness = 0.5;
    CHECK(classify_confidence(s) == ConfidenceBucket::moderate);
}

TEST_CASE("curves shorter than two points are rejected") {
    CHECK_THROWS_AS(analyze({1}, {2.0}), Error);
}
