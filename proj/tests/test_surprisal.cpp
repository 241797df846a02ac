#include <doctest.h>

#include <cmath>
#include <random>

#include "surprobe/scale.hpp"
#include "surprobe/surprisal.hpp"

using namespace surprobe;

namespace {

ScaleSpec numeric_scale(int n) {
    std::vector<std::string> labels;
    std::vector<int> positions;
    for (int i = 1; i <= n; ++i) {
        labels.push_back(std::to_string(i));
        positions.push_back(i);
    }
    return build_scale("n" + std::to_string(n), ScaleKind::numeric_ordinal, labels, positions);
}

}  // namespace

TEST_CASE("surprisal_of_prob on pinned values") {
    CHECK(surprisal_of_prob(1.0) == 0.0);
    CHECK(surprisal_of_prob(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(surprisal_of_prob(0.5) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(surprisal_of_prob(0.001) == doctest::Approx(6.907755278982137).epsilon(1e-12));
    CHECK_THROWS_AS(surprisal_of_prob(0.0), Error);
    CHECK_THROWS_AS(surprisal_of_prob(-0.25), Error);
    CHECK_THROWS_AS(surprisal_of_prob(1.5), Error);
}

TEST_CASE("renormalize matches closed forms") {
    ScaleSpec two = numeric_scale(2);
    RestrictedDistribution d = renormalize({0.0, 0.0}, two);
    CHECK(d.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.probs[1] == doctest::Approx(0.5).epsilon(1e-12));

    d = renormalize({std::log(2.0), 0.0}, two);
    CHECK(d.probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(d.probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    double sum = 0.0;
    for (double p : renormalize({-3.1, 0.4, 12.0, -7.7}, numeric_scale(4)).probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(renormalize({0.0}, two), Error);
    CHECK_THROWS_AS(renormalize({0.0, std::numeric_limits<double>::infinity()}, two), Error);
    CHECK_THROWS_AS(renormalize({0.0, std::nan("")}, two), Error);
}

TEST_CASE("softmax shift invariance") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> logit(-50.0, 50.0);
    std::uniform_real_distribution<double> shift(-100.0, 100.0);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + static_cast<int>(rng() % 8);
        ScaleSpec scale = numeric_scale(n);
        std::vector<double> base(n), shifted(n);
        double c = shift(rng);
        for (int i = 0; i < n; ++i) {
            base[i] = logit(rng);
            shifted[i] = base[i] + c;
        }
        RestrictedDistribution a = renormalize(base, scale);
        RestrictedDistribution b = renormalize(shifted, scale);
        for (int i = 0; i < n; ++i) CHECK(std::abs(a.probs[i] - b.probs[i]) <= 1e-12);
    }
}

TEST_CASE("entropy_of on pinned values") {
    RestrictedDistribution degenerate{"", {1, 2, 3}, {1.0, 0.0, 0.0}};
    CHECK(entropy_of(degenerate) == 0.0);

    RestrictedDistribution uniform9{"", {}, std::vector<double>(9, 1.0 / 9.0)};
    CHECK(entropy_of(uniform9) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
    CHECK(entropy_of(uniform9) == doctest::Approx(2.1972245773362196).epsilon(1e-9));

    RestrictedDistribution mixed{"", {1, 2, 3}, {0.7, 0.2, 0.1}};
    double oracle = -(0.7 * std::log(0.7) + 0.2 * std::log(0.2) + 0.1 * std::log(0.1));
    CHECK(entropy_of(mixed) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(entropy_of(mixed) == doctest::Approx(0.8018185525433373).epsilon(1e-9));
}

TEST_CASE("build_curve argmin, ties and entropy") {
    ScaleSpec five = numeric_scale(5);

    SurprisalCurve dominant = build_curve({-0.1, -5, -5, -5, -5}, five);
    CHECK(dominant.argmin_position == 1);
    CHECK(dominant.argmin_ties == std::vector<int>{1});

    SurprisalCurve flat = build_curve({0, 0, 0, 0, 0}, five);
    CHECK(flat.entropy == doctest::Approx(std::log(5.0)).epsilon(1e-9));
    CHECK(flat.entropy == doctest::Approx(1.6094379124341003).epsilon(1e-9));
    CHECK(flat.argmin_position == 1);  // lowest position wins ties
    CHECK(flat.argmin_ties == std::vector<int>{1, 2, 3, 4, 5});

    SurprisalCurve half = build_curve({std::log(0.5), std::log(0.25), std::log(0.25)},
                                      numeric_scale(3));
    CHECK(half.entropy == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(half.entropy == doctest::Approx(1.0397207708399179).epsilon(1e-9));
    CHECK(half.surprisals[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("curve surprisals agree with -ln prob and entropy bounds hold") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logit(-30.0, 30.0);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng() % 8);
        ScaleSpec scale = numeric_scale(n);
        std::vector<double> logits(n);
        for (auto& l : logits) l = logit(rng);
        SurprisalCurve curve = build_curve(logits, scale);
        for (int i = 0; i < n; ++i) {
            CHECK(curve.surprisals[i] >= 0.0);
            CHECK(std::abs(curve.surprisals[i] - (-std::log(curve.distribution.probs[i]))) <= 1e-9);
        }
        CHECK(curve.entropy >= 0.0);
        CHECK(curve.entropy <= std::log(static_cast<double>(n)) + 1e-9);
    }
}

TEST_CASE("entropy reaches ln n only at the uniform distribution") {
    ScaleSpec five = numeric_scale(5);
    CHECK(build_curve({2, 2, 2, 2, 2}, five).entropy ==
          doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(build_curve({2, 2, 2, 2, 2.5}, five).entropy < std::log(5.0) - 1e-3);
}

TEST_CASE("argmin is invariant under renormalization") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> logit(-10.0, 10.0);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng() % 8);
        ScaleSpec scale = numeric_scale(n);
        std::vector<double> logits(n);
        for (auto& l : logits) l = logit(rng);
        std::size_t raw_argmin = 0;  // argmin of -logits == argmax of logits
        for (std::size_t i = 1; i < logits.size(); ++i)
            if (logits[i] > logits[raw_argmin]) raw_argmin = i;
        CHECK(build_curve(logits, scale).argmin_position == scale.positions[raw_argmin]);
    }
}

TEST_CASE("surprisal is strictly decreasing in probability") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(1e-9, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double a = unit(rng), b = unit(rng);
        if (a == b) continue;
        if (a < b) std::swap(a, b);  // a > b
        CHECK(surprisal_of_prob(a) < surprisal_of_prob(b));
    }
}

TEST_CASE("binary_decide follows the strict-inequality rule") {
    BinaryVerdict v = binary_decide(2.0, 3.0);
    CHECK(v.verdict == BinaryClass::positive);
    CHECK(v.delta == doctest::Approx(1.0));

    CHECK(binary_decide(3.0, 3.0).verdict == BinaryClass::negative);  // tie -> otherwise branch

    v = binary_decide(5.2, 1.1);
    CHECK(v.verdict == BinaryClass::negative);
    CHECK(v.delta == doctest::Approx(4.1));

    CHECK_THROWS_AS(binary_decide(std::numeric_limits<double>::infinity(), 1.0), Error);
}

TEST_CASE("pathological underflow clamps at the floor instead of inf") {
    ScaleSpec two = numeric_scale(2);
    SurprisalCurve curve = build_curve({0.0, -800.0}, two);
    CHECK(std::isfinite(curve.surprisals[1]));
    CHECK(curve.floor_clamped);
    CHECK(curve.argmin_position == 1);
}
