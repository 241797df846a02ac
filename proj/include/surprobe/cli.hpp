#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surprobe/report.hpp"
#include "surprobe/runner.hpp"

namespace surprobe::cli {

// Exit contract: 0 success, 1 partial scientific failure (failed records,
// empty groups, unreachable provider), 2 operator/config error.
inline int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == errc::empty_group || c == errc::no_match || c == errc::provider_unreachable ||
        c == errc::surface_unresolvable || c == errc::malformed_response)
        return 1;
    return 2;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

inline void print_run_summary(const char* verb, const RunSummary& s) {
    std::printf("%s: %zu records (%zu failures), cache %zu hits / %zu misses\n", verb,
                s.records_written, s.failures, s.cache_hits, s.cache_misses);
    std::printf("output: %s\n", s.output_path.c_str());
}

inline TaskItem probe_item(Task task, const std::string& statement, const std::string& entity,
                           const std::string& context_sentence, const std::string& dimension,
                           const std::string& text, const std::string& code,
                           const std::string& definition) {
    TaskItem item;
    item.item_id = "probe";
    item.task = task;
    auto need = [](const std::string& value, const char* flag) {
        if (value.empty())
            throw Error(errc::config_invalid, std::string("probe: missing ") + flag);
        return value;
    };
    switch (task) {
        case Task::sets:
            item.payload = SetsPayload{need(entity, "--entity"),
                                       need(context_sentence, "--context-sentence"),
                                       need(dimension, "--dimension"), 1};
            break;
        case Task::causal_binary:
        case Task::causal_ordinal:
            item.payload = CausalPayload{need(statement, "--statement"), false, ""};
            break;
        case Task::figurative:
            item.payload = FigurativePayload{need(statement, "--statement"), "probe", true};
            break;
        case Task::coding:
            item.payload = CodingPayload{need(text, "--text"), need(code, "--code"),
                                         need(definition, "--definition"), false};
            break;
    }
    return item;
}

inline std::string default_framing(Task task) {
    switch (task) {
        case Task::sets: return "sets-score";
        case Task::causal_binary: return "tf-statement";
        case Task::causal_ordinal: return "causal-strength";
        case Task::figurative: return "metaphor-intensity";
        case Task::coding: return "applicability";
    }
    return "";
}

inline std::string default_scale(Task task) {
    switch (task) {
        case Task::sets: return "numeric-1-9";
        case Task::causal_binary: return "true-false";
        case Task::causal_ordinal: return "numeric-1-5";
        case Task::figurative: return "numeric-1-5";
        case Task::coding: return "numeric-1-5";
    }
    return "";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"surprisal-based LLM evaluation harness"};
    app.require_subcommand(1);

    // run / resume
    std::string config_path;
    bool canonical = false;
    CLI::App* cmd_run = app.add_subcommand("run", "execute an experiment config");
    cmd_run->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd_run->add_flag("--canonical", canonical, "strip timestamps from output");
    CLI::App* cmd_resume = app.add_subcommand("resume", "finish a partial run");
    cmd_resume->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd_resume->add_flag("--canonical", canonical, "strip timestamps from output");

    // report
    std::string records_path, metric_id, group_spec, out_path;
    int threshold = 3;
    bool full_precision = false;
    CLI::App* cmd_report = app.add_subcommand("report", "aggregate records into a CSV table");
    cmd_report->add_option("--records", records_path, "result records (JSON Lines)")->required();
    cmd_report->add_option("--metric", metric_id,
                           "mae | binary-accuracy | directional-accuracy | paired-discrimination "
                           "| thresholded-{accuracy,precision,recall,f1}")
        ->required();
    cmd_report->add_option("--group", group_spec, "comma-separated factors, row factor first")
        ->required();
    cmd_report->add_option("--threshold", threshold, "threshold for thresholded-* metrics");
    cmd_report->add_option("--out", out_path, "write CSV here instead of stdout");
    cmd_report->add_flag("--full-precision", full_precision, "unrounded values");

    // curves
    std::string item_filter, model_filter, scale_filter, curves_out = "curves";
    CLI::App* cmd_curves = app.add_subcommand("curves", "emit per-item plot data");
    cmd_curves->add_option("--records", records_path, "result records (JSON Lines)")->required();
    cmd_curves->add_option("--item", item_filter, "item id or id prefix");
    cmd_curves->add_option("--model", model_filter, "model id");
    cmd_curves->add_option("--scale", scale_filter, "scale id");
    cmd_curves->add_option("--out", curves_out, "output directory (default curves/)");

    // probe
    std::string task_name, statement, entity, context_sentence, dimension, text, code, definition;
    std::string framing, scale_id, context_level = "full", persona = "none", delimiter;
    std::string backend = "mock", model = "probe-model", endpoint;
    std::uint64_t seed = 0;
    CLI::App* cmd_probe = app.add_subcommand("probe", "render and score a single prompt");
    cmd_probe->add_option("--task", task_name, "sets | causal-binary | causal-ordinal | figurative | coding")
        ->required();
    cmd_probe->add_option("--statement", statement, "statement (causal / figurative tasks)");
    cmd_probe->add_option("--entity", entity, "entity (sets)");
    cmd_probe->add_option("--context-sentence", context_sentence, "entity context sentence (sets)");
    cmd_probe->add_option("--dimension", dimension, "social | ecological | technological (sets)");
    cmd_probe->add_option("--text", text, "text to code (coding)");
    cmd_probe->add_option("--code", code, "code name (coding)");
    cmd_probe->add_option("--definition", definition, "code definition (coding)");
    cmd_probe->add_option("--framing", framing, "framing id (task default otherwise)");
    cmd_probe->add_option("--scale", scale_id, "scale id (task default otherwise)");
    cmd_probe->add_option("--context", context_level, "none | minimal | full (default full)");
    cmd_probe->add_option("--persona", persona, "none | qualitative-researcher | domain-expert");
    cmd_probe->add_option("--delimiter", delimiter, "xml | all-caps | none");
    cmd_probe->add_option("--backend", backend, "mock | http (default mock)");
    cmd_probe->add_option("--model", model, "model id sent to the backend");
    cmd_probe->add_option("--endpoint", endpoint, "override SURPROBE_ENDPOINT");
    cmd_probe->add_option("--seed", seed, "mock seed");

    // validate-config / list-scales
    std::string validate_path;
    CLI::App* cmd_validate = app.add_subcommand("validate-config", "check a config file");
    cmd_validate->add_option("config", validate_path, "config path")->required();
    bool scales_json = false;
    CLI::App* cmd_scales = app.add_subcommand("list-scales", "print the scale catalog");
    cmd_scales->add_flag("--json", scales_json, "emit the catalog as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // --help exits 0; usage errors exit 2
    }

    try {
        if (app.got_subcommand(cmd_run) || app.got_subcommand(cmd_resume)) {
            ExperimentConfig config = load_config(config_path);
            if (canonical) config.canonical_output = true;
            RunSummary summary = app.got_subcommand(cmd_run) ? run(config) : resume(config);
            detail::print_run_summary(app.got_subcommand(cmd_run) ? "run" : "resume", summary);
            return summary.failures == 0 ? 0 : 1;
        }

        if (app.got_subcommand(cmd_report)) {
            auto [header, records] = load_records(records_path);
            TableSpec spec{metric_id, detail::split_csv(group_spec), threshold};
            if (spec.group_by.empty())
                throw Error(errc::unknown_factor, "--group names no factors");
            TableArtifact table = build_table(records, spec, scale_catalog());
            std::string csv = table_to_csv(table, full_precision);
            if (out_path.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                std::ofstream out(out_path, std::ios::trunc);
                out << csv;
                std::printf("wrote %s\n", out_path.c_str());
            }
            return 0;
        }

        if (app.got_subcommand(cmd_curves)) {
            auto [header, records] = load_records(records_path);
            CurveFilter filter{item_filter, model_filter, scale_filter};
            std::vector<std::string> written = emit_curves(records, filter, curves_out);
            for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
            return 0;
        }

        if (app.got_subcommand(cmd_probe)) {
            Task task = task_from_string(task_name);
            TaskItem item = detail::probe_item(task, statement, entity, context_sentence,
                                               dimension, text, code, definition);
            if (framing.empty()) framing = detail::default_framing(task);
            if (scale_id.empty()) scale_id = detail::default_scale(task);
            if (delimiter.empty()) delimiter = task == Task::coding ? "xml" : "none";

            FactorCell cell;
            cell.context = context_level_from_string(context_level);
            cell.persona = persona_from_string(persona);
            cell.delimiter = delimiter_from_string(delimiter);
            cell.framing_id = framing;
            cell.scale_id = scale_id;
            cell.model_id = model;

            const std::vector<ScaleSpec> catalog = scale_catalog();
            const ScaleSpec& scale = find_scale(catalog, scale_id);
            PromptInstance prompt = render(item, cell, scale);

            std::shared_ptr<Provider> provider;
            if (backend == "mock") {
                provider = std::make_shared<MockProvider>(seed);
            } else if (backend == "http") {
                HttpProviderConfig http;
                if (endpoint.empty())
                    if (const char* env = std::getenv("SURPROBE_ENDPOINT"); env) endpoint = env;
                if (endpoint.empty())
                    throw Error(errc::config_invalid,
                                "http backend needs --endpoint or SURPROBE_ENDPOINT");
                http.endpoint = endpoint;
                if (const char* env = std::getenv("SURPROBE_API_KEY"); env) http.api_key = env;
                provider = std::make_shared<HttpProvider>(http);
            } else {
                throw Error(errc::config_invalid, "unknown backend \"" + backend + "\"");
            }

            ScoreRequest request{model, prompt.context_text, {}};
            for (const CompletionForm& form : completion_forms(scale))
                request.surfaces.push_back(form.surface);
            ScoredAlternatives scored = provider->score(request);
            SurprisalCurve curve = build_curve(scored.logprobs(), scale);

            std::printf("task %s, framing %s, scale %s, context %s\n", task_name.c_str(),
                        framing.c_str(), scale_id.c_str(), context_level.c_str());
            std::printf("prompt sha256 %s (%zu bytes)\n\n", sha256_hex(prompt.context_text).c_str(),
                        prompt.context_text.size());
            std::printf("%8s  %-14s %12s %10s %11s  %s\n", "position", "surface", "raw_logprob",
                        "prob", "surprisal", "resolution");
            for (std::size_t i = 0; i < curve.positions.size(); ++i)
                std::printf("%8d  %-14s %12.4f %10.6f %11.4f  %s\n", curve.positions[i],
                            ("\"" + scored.entries[i].surface + "\"").c_str(),
                            curve.raw_logprobs[i], curve.distribution.probs[i],
                            curve.surprisals[i], to_string(scored.entries[i].resolution).c_str());
            std::printf("\nentropy %.6f nats (uniform = %.6f)\n", curve.entropy,
                        std::log(static_cast<double>(scale.size())));
            std::printf("argmin position %d (\"%s\")\n", curve.argmin_position,
                        completion_form(scale, curve.argmin_position).surface.c_str());
            if (scale.kind == ScaleKind::binary) {
                BinaryVerdict v = binary_verdict_of(curve);
                std::printf("binary verdict: %s (delta %.4f)\n", to_string(v.verdict).c_str(),
                            v.delta);
            }
            if (curve.positions.size() >= 2) {
                CurveShape shape = analyze(curve);
                std::printf("shape: %s, steepness %.4f nats/step, confidence %s\n",
                            to_string(shape.monotonicity).c_str(), shape.steepness,
                            to_string(classify_confidence(shape)).c_str());
            }
            return 0;
        }

        if (app.got_subcommand(cmd_validate)) {
            ExperimentConfig config = load_config(validate_path);
            std::printf("ok: run_id %s, digest %s\n", config.run_id.c_str(),
                        config_digest(config).c_str());
            return 0;
        }

        if (app.got_subcommand(cmd_scales)) {
            const std::vector<ScaleSpec> catalog = scale_catalog();
            if (scales_json) {
                std::printf("%s\n", catalog_to_json(catalog).dump(2).c_str());
            } else {
                std::printf("%-16s %-20s %-10s %s\n", "id", "kind", "positions", "surfaces");
                for (const auto& scale : catalog) {
                    std::string surfaces;
                    for (const auto& form : completion_forms(scale)) {
                        if (!surfaces.empty()) surfaces += ", ";
                        surfaces += "\"" + form.surface + "\"";
                    }
                    std::printf("%-16s %-20s %d..%-7d %s\n", scale.id.c_str(),
                                to_string(scale.kind).c_str(), scale.min_position(),
                                scale.max_position(), surfaces.c_str());
                }
            }
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", e.code().c_str(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

}  // namespace surprobe::cli
