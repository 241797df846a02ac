#include <doctest.h>

#include <set>

#include "surprobe/scale.hpp"

using namespace surprobe;

namespace {

void check_error(const std::function<void()>& fn, const char* code) {
    try {
        fn();
        FAIL_CHECK("expected error with code " << code);
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("build_scale accepts the numeric 1-5 preset shape") {
    ScaleSpec s = build_scale("s", ScaleKind::numeric_ordinal, {"1", "2", "3", "4", "5"},
                              {1, 2, 3, 4, 5}, {}, Rational{3, 1});
    CHECK(s.size() == 5);
    CHECK(s.midpoint.num == 3);
    CHECK(s.min_position() == 1);
    CHECK(s.max_position() == 5);
}

TEST_CASE("binary scales canonicalize positive-first input to position order") {
    ScaleSpec s = build_scale("tf", ScaleKind::binary, {"True", "False"}, {1, 0});
    CHECK(s.positions == std::vector<int>{0, 1});
    CHECK(s.labels == std::vector<std::string>{"False", "True"});
    CHECK(s.label_at(1) == "True");
}

TEST_CASE("build_scale rejects bad input") {
    check_error([] { build_scale("s", ScaleKind::numeric_ordinal,
                                 {"1", "2", "3", "4", "5"}, {1, 3, 2, 4, 5}); },
                errc::non_monotone_positions);
    check_error([] { build_scale("s", ScaleKind::numeric_ordinal, {"a", "a"}, {1, 2}); },
                errc::duplicate_label);
    check_error([] { build_scale("s", ScaleKind::numeric_ordinal, {"a", "b", "c"}, {1, 2}); },
                errc::length_mismatch);
    check_error([] { build_scale("s", ScaleKind::binary, {"a", "b", "c"}, {0, 1, 2}); },
                errc::length_mismatch);
    check_error([] { build_scale("s", ScaleKind::numeric_ordinal, {"1", "2", "3"}, {1, 2, 3}, {},
                                 Rational{5, 1}); },
                errc::midpoint_out_of_range);
    check_error([] { build_scale("s", ScaleKind::qualitative_ordinal,
                                 {"not", "extremely applicable"}, {1, 2}); },
                errc::invalid_label);
    check_error([] { build_scale("s", ScaleKind::binary, {"lo", "hi"}, {1, 2}); },
                errc::non_monotone_positions);
}

TEST_CASE("completion_form produces the exact scored surface") {
    ScaleSpec five = build_scale("n5", ScaleKind::numeric_ordinal, {"1", "2", "3", "4", "5"},
                                 {1, 2, 3, 4, 5});
    CHECK(completion_form(five, 4).surface == " 4");

    ScaleSpec tf = build_scale("tf", ScaleKind::binary, {"True", "False"}, {1, 0});
    CHECK(completion_form(tf, 1).surface == " True");
    CHECK(completion_form(tf, 0).surface == " False");

    ScaleSpec bare = build_scale("n5b", ScaleKind::numeric_ordinal, {"1", "2", "3", "4", "5"},
                                 {1, 2, 3, 4, 5}, {}, std::nullopt, /*leading_space=*/false);
    CHECK(completion_form(bare, 4).surface == "4");

    check_error([&] { completion_form(five, 9); }, errc::unknown_position);
}

TEST_CASE("completion_form is injective and round-trips per scale") {
    for (const ScaleSpec& scale : scale_catalog()) {
        std::set<std::string> surfaces;
        for (const CompletionForm& form : completion_forms(scale)) {
            CHECK(surfaces.insert(form.surface).second);  // distinct positions, distinct surfaces
            // stripping the optional leading space recovers exactly one label
            std::string stripped = form.surface;
            if (scale.leading_space) {
                REQUIRE(stripped.front() == ' ');
                stripped.erase(0, 1);
            }
            CHECK(stripped == scale.label_at(form.position));
            CHECK(stripped.find(' ') == std::string::npos);
            CHECK_FALSE(std::isspace(static_cast<unsigned char>(form.surface.back())));
        }
    }
}

TEST_CASE("catalog surfaces match the published completion-target lists") {
    const std::vector<ScaleSpec> catalog = scale_catalog();
    auto surfaces = [&](const char* id) {
        std::vector<std::string> out;
        for (const auto& f : completion_forms(find_scale(catalog, id))) out.push_back(f.surface);
        return out;
    };
    CHECK(surfaces("true-false") == std::vector<std::string>{" False", " True"});
    CHECK(surfaces("yes-no") == std::vector<std::string>{" No", " Yes"});
    CHECK(surfaces("false-true") == std::vector<std::string>{" false", " true"});
    CHECK(surfaces("numeric-1-5") ==
          std::vector<std::string>{" 1", " 2", " 3", " 4", " 5"});
    CHECK(surfaces("numeric-1-9") ==
          std::vector<std::string>{" 1", " 2", " 3", " 4", " 5", " 6", " 7", " 8", " 9"});
    CHECK(surfaces("intensity") ==
          std::vector<std::string>{" none", " weak", " medium", " strong", " perfect"});
    CHECK(surfaces("evidence") ==
          std::vector<std::string>{" negligible", " weak", " moderate", " strong"});
}

TEST_CASE("catalog midpoints support directional metrics") {
    const std::vector<ScaleSpec> catalog = scale_catalog();
    CHECK(find_scale(catalog, "numeric-1-5").midpoint.value() == 3.0);
    CHECK(find_scale(catalog, "numeric-1-9").midpoint.value() == 5.0);
    // 4-point evidence scale midpoint sits between 2 and 3
    const ScaleSpec& evidence = find_scale(catalog, "evidence");
    CHECK(2 < evidence.midpoint);
    CHECK(3 > evidence.midpoint);
}

TEST_CASE("validate_single_token prefers the probe and degrades to the heuristic") {
    ScaleSpec tf = build_scale("tf", ScaleKind::binary, {"True", "False"}, {1, 0});

    auto one_token = [](std::string_view) -> std::optional<int> { return 1; };
    for (const TokenReport& r : validate_single_token(tf, one_token)) {
        CHECK(r.status == TokenStatus::verified_single);
        CHECK(r.token_count == 1);
    }

    auto two_tokens = [](std::string_view) -> std::optional<int> { return 2; };
    CHECK(validate_single_token(tf, two_tokens).front().status == TokenStatus::probe_reject);

    // probe absent: " perfect" passes, a 14-byte label is rejected
    ScaleSpec qual = build_scale("q", ScaleKind::qualitative_ordinal,
                                 {"none", "perfect", "extraordinarily"}, {1, 2, 3});
    auto reports = validate_single_token(qual);
    CHECK(reports[0].status == TokenStatus::unverified_pass);
    CHECK(reports[1].status == TokenStatus::unverified_pass);
    CHECK(reports[1].surface == " perfect");
    CHECK(reports[2].status == TokenStatus::heuristic_reject);

    // throwing probe is non-fatal and downgrades to the heuristic
    auto broken = [](std::string_view) -> std::optional<int> {
        throw std::runtime_error("probe unavailable");
    };
    CHECK(validate_single_token(tf, broken).front().status == TokenStatus::unverified_pass);
}

TEST_CASE("scale catalog JSON round-trips") {
    const std::vector<ScaleSpec> catalog = scale_catalog();
    std::vector<ScaleSpec> reloaded = catalog_from_json(catalog_to_json(catalog));
    REQUIRE(reloaded.size() == catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        CHECK(reloaded[i].id == catalog[i].id);
        CHECK(reloaded[i].labels == catalog[i].labels);
        CHECK(reloaded[i].positions == catalog[i].positions);
        CHECK(reloaded[i].anchors == catalog[i].anchors);
        CHECK(reloaded[i].midpoint == catalog[i].midpoint);
        CHECK(reloaded[i].leading_space == catalog[i].leading_space);
    }
}
