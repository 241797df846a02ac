#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "surprobe/backend.hpp"
#include "surprobe/digest.hpp"
#include "surprobe/error.hpp"
#include "surprobe/http_backend.hpp"
#include "surprobe/record.hpp"

namespace surprobe {

struct ProviderSettings {
    std::string kind{"mock"};  // "mock" | "http"
    std::string endpoint;      // http only; SURPROBE_ENDPOINT overrides
    std::string api_key;       // resolved from SURPROBE_API_KEY, never serialized
    std::string mock_fixture;  // optional scripted-logit table (JSON)
    int top_k{20};
    int max_attempts{3};
    int backoff_base_ms{100};
};

struct ExperimentConfig {
    std::string run_id;
    std::string dataset_path;
    FactorGrid grid;
    ProviderSettings provider;
    std::uint64_t seed{0};
    int concurrency{4};
    std::string cache_path;   // empty disables caching; SURPROBE_CACHE overrides
    std::string output_path;
    bool canonical_output{false};

    void validate() const {
        if (run_id.empty()) throw Error(errc::config_invalid, "run_id must be non-empty");
        if (dataset_path.empty()) throw Error(errc::config_invalid, "dataset path missing");
        if (output_path.empty()) throw Error(errc::config_invalid, "output path missing");
        if (concurrency < 1) throw Error(errc::config_invalid, "concurrency must be >= 1");
        if (provider.kind != "mock" && provider.kind != "http")
            throw Error(errc::config_invalid, "provider kind must be mock or http");
        grid.validate();
    }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.run_id = j.at("run_id").get<std::string>();
        c.dataset_path = j.at("dataset").get<std::string>();
        const auto& g = j.at("grid");
        for (const auto& s : g.at("context_levels"))
            c.grid.context_levels.push_back(context_level_from_string(s.get<std::string>()));
        for (const auto& s : g.at("personas"))
            c.grid.personas.push_back(persona_from_string(s.get<std::string>()));
        for (const auto& s : g.at("delimiters"))
            c.grid.delimiters.push_back(delimiter_from_string(s.get<std::string>()));
        c.grid.framings = g.at("framings").get<std::vector<std::string>>();
        c.grid.scales = g.at("scales").get<std::vector<std::string>>();
        c.grid.models = g.at("models").get<std::vector<std::string>>();
        if (j.contains("provider")) {
            const auto& p = j["provider"];
            c.provider.kind = p.value("kind", "mock");
            c.provider.endpoint = p.value("endpoint", "");
            c.provider.mock_fixture = p.value("mock_fixture", "");
            c.provider.top_k = p.value("top_k", 20);
            c.provider.max_attempts = p.value("max_attempts", 3);
            c.provider.backoff_base_ms = p.value("backoff_base_ms", 100);
        }
        c.seed = j.value("seed", 0ull);
        c.concurrency = j.value("concurrency", 4);
        c.cache_path = j.value("cache_path", "");
        c.output_path = j.at("output").get<std::string>();
        c.canonical_output = j.value("canonical_output", false);
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::config_invalid, std::string("bad config: ") + e.what());
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::config_invalid, "cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::config_invalid, path + ": " + e.what());
    }
    ExperimentConfig c = config_from_json(j);
    c.validate();
    return c;
}

// Digest of the semantic parts of the config: what is scored and how, minus
// credentials, paths that only say where results land, and retry knobs.
inline std::string config_digest(const ExperimentConfig& c) {
    nlohmann::json j;
    j["run_id"] = c.run_id;
    j["dataset"] = c.dataset_path;
    nlohmann::json grid;
    {
        std::vector<std::string> v;
        for (auto x : c.grid.context_levels) v.push_back(to_string(x));
        grid["context_levels"] = v;
        v.clear();
        for (auto x : c.grid.personas) v.push_back(to_string(x));
        grid["personas"] = v;
        v.clear();
        for (auto x : c.grid.delimiters) v.push_back(to_string(x));
        grid["delimiters"] = v;
    }
    grid["framings"] = c.grid.framings;
    grid["scales"] = c.grid.scales;
    grid["models"] = c.grid.models;
    j["grid"] = grid;
    j["provider_kind"] = c.provider.kind;
    j["mock_fixture"] = c.provider.mock_fixture;
    j["top_k"] = c.provider.top_k;
    j["seed"] = c.seed;
    return sha256_hex(j.dump());
}

inline std::shared_ptr<Provider> make_provider(const ExperimentConfig& config) {
    ProviderSettings settings = config.provider;
    if (const char* env = std::getenv("SURPROBE_ENDPOINT"); env && *env) settings.endpoint = env;
    if (const char* env = std::getenv("SURPROBE_API_KEY"); env && *env) settings.api_key = env;

    std::shared_ptr<Provider> provider;
    if (settings.kind == "mock") {
        std::vector<MockRule> rules;
        if (!settings.mock_fixture.empty()) {
            std::ifstream in(settings.mock_fixture);
            if (!in)
                throw Error(errc::config_invalid, "cannot open mock fixture: " + settings.mock_fixture);
            nlohmann::json j;
            in >> j;
            rules = MockProvider::rules_from_json(j);
        }
        provider = std::make_shared<MockProvider>(config.seed, std::move(rules));
    } else {
        if (settings.endpoint.empty())
            throw Error(errc::config_invalid,
                        "http provider needs an endpoint (config or SURPROBE_ENDPOINT)");
        HttpProviderConfig http;
        http.endpoint = settings.endpoint;
        http.api_key = settings.api_key;
        http.top_k = settings.top_k;
        http.max_attempts = settings.max_attempts;
        http.backoff_base_ms = settings.backoff_base_ms;
        provider = std::make_shared<HttpProvider>(http);
    }

    std::string cache_path = config.cache_path;
    if (const char* env = std::getenv("SURPROBE_CACHE"); env && *env) cache_path = env;
    if (!cache_path.empty()) provider = std::make_shared<CachingProvider>(provider, cache_path);
    return provider;
}

struct RunSummary {
    std::size_t records_written{0};
    std::size_t failures{0};
    std::size_t cache_hits{0};
    std::size_t cache_misses{0};
    std::string output_path;
};

namespace detail {

inline std::string utc_now_iso8601() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string record_key(const std::string& item_id, const FactorCell& cell) {
    return item_id + "\x1f" + cell.key();
}

struct WorkUnit {
    TaskItem item;
    FactorCell cell;
};

// One scoring job: render, score, build the curve, extract shape, package.
inline ResultRecord evaluate_one(const ExperimentConfig& config, const TaskItem& item,
                                 const FactorCell& cell, const std::vector<ScaleSpec>& catalog,
                                 Provider& provider) {
    ResultRecord record;
    record.run_id = config.run_id;
    record.item_id = item.item_id;
    record.task = item.task;
    record.cell = cell;
    record.gold = gold_of(item);
    if (item.task == Task::sets) record.dimension = item.sets().dimension;
    if (item.task == Task::causal_binary || item.task == Task::causal_ordinal)
        record.category = item.causal().category;
    if (item.task == Task::coding) record.code = item.coding().code;
    record.created_at = config.canonical_output ? "" : utc_now_iso8601();

    try {
        const ScaleSpec& scale = find_scale(catalog, cell.scale_id);
        PromptInstance prompt = render(item, cell, scale);
        record.prompt_digest = sha256_hex(prompt.context_text);

        ScoreRequest request;
        request.model_id = cell.model_id;
        request.context_text = prompt.context_text;
        for (const CompletionForm& form : completion_forms(scale))
            request.surfaces.push_back(form.surface);

        ScoredAlternatives scored = provider.score(request);
        SurprisalCurve curve = build_curve(scored.logprobs(), scale);

        record.positions = curve.positions;
        record.raw_logprobs = curve.raw_logprobs;
        record.surprisals = curve.surprisals;
        for (const auto& e : scored.entries) record.resolutions.push_back(to_string(e.resolution));
        record.entropy = curve.entropy;
        record.argmin_position = curve.argmin_position;
        record.argmin_ties = curve.argmin_ties;
        record.floor_clamped = curve.floor_clamped;
        if (scale.kind == ScaleKind::binary) record.binary = binary_verdict_of(curve);
        if (curve.positions.size() >= 2) record.shape = analyze(curve);
    } catch (const Error& e) {
        record.status = "failed";
        record.error_code = e.code();
        record.error_message = e.what();
    } catch (const std::exception& e) {
        record.status = "failed";
        record.error_code = "internal-error";
        record.error_message = e.what();
    }
    return record;
}

inline void write_records(const ExperimentConfig& config, const std::string& digest,
                          const std::vector<ResultRecord>& records) {
    namespace fs = std::filesystem;
    fs::path out_path(config.output_path);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());

    fs::path tmp_path = out_path;
    tmp_path += ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::trunc);
        if (!out)
            throw Error(errc::config_invalid, "cannot write output: " + config.output_path);
        nlohmann::json header{{"record_type", "header"},
                              {"schema_version", kRecordSchemaVersion},
                              {"run_id", config.run_id},
                              {"config_digest", digest}};
        if (!config.canonical_output) header["created_at"] = utc_now_iso8601();
        out << header.dump() << "\n";
        for (const ResultRecord& r : records) out << to_json(r, config.canonical_output).dump() << "\n";
    }
    fs::rename(tmp_path, out_path);
}

// Drives the worker pool over the (item, cell) product in enumeration order.
// skip(key) lets resume leave completed tuples untouched.
template <typename SkipFn>
inline RunSummary execute(const ExperimentConfig& config, const SkipFn& skip,
                          std::vector<ResultRecord> kept) {
    config.validate();
    const std::vector<ScaleSpec> catalog = scale_catalog();
    std::vector<TaskItem> dataset = load_dataset(config.dataset_path);
    std::sort(dataset.begin(), dataset.end(),
              [](const TaskItem& a, const TaskItem& b) { return a.item_id < b.item_id; });

    // Config-level errors abort before any scoring: every (task, framing) in
    // play must have a template and every scale must exist.
    std::set<Task> tasks;
    for (const auto& item : dataset) tasks.insert(item.task);
    for (const auto& framing : config.grid.framings)
        for (Task task : tasks) templates::find_framing(framing, task);
    for (const auto& scale_id : config.grid.scales) find_scale(catalog, scale_id);

    const std::vector<FactorCell> cells = config.grid.cells();
    std::vector<WorkUnit> units;
    std::vector<std::optional<ResultRecord>> slots;
    std::map<std::string, ResultRecord> kept_by_key;
    for (ResultRecord& r : kept) kept_by_key.emplace(record_key(r.item_id, r.cell), std::move(r));

    std::vector<ResultRecord> ordered;
    std::vector<std::size_t> pending_slot_of_unit;
    for (const TaskItem& item : dataset)
        for (const FactorCell& cell : cells) {
            std::string key = record_key(item.item_id, cell);
            auto it = kept_by_key.find(key);
            if (it != kept_by_key.end() && skip(it->second)) {
                ordered.push_back(it->second);
            } else {
                units.push_back(WorkUnit{item, cell});
                ordered.push_back(ResultRecord{});  // placeholder, filled below
                pending_slot_of_unit.push_back(ordered.size() - 1);
            }
        }

    std::shared_ptr<Provider> provider = make_provider(config);
    std::vector<ResultRecord> fresh(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= units.size()) break;
            fresh[i] = evaluate_one(config, units[i].item, units[i].cell, catalog, *provider);
        }
    };
    std::size_t pool = std::min<std::size_t>(config.concurrency, std::max<std::size_t>(units.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    for (std::size_t i = 0; i < units.size(); ++i) ordered[pending_slot_of_unit[i]] = std::move(fresh[i]);

    RunSummary summary;
    summary.output_path = config.output_path;
    summary.records_written = ordered.size();
    for (const auto& r : ordered)
        if (r.status == "failed") ++summary.failures;
    if (auto* caching = dynamic_cast<CachingProvider*>(provider.get())) {
        summary.cache_hits = caching->hit_count();
        summary.cache_misses = caching->miss_count();
    }

    write_records(config, config_digest(config), ordered);
    return summary;
}

}  // namespace detail

// Full pipeline over the factorial grid. Per-item failures become failure
// records; only config errors abort.
inline RunSummary run(const ExperimentConfig& config) {
    return detail::execute(config, [](const ResultRecord&) { return false; }, {});
}

// Loads an existing output file: header + records.
inline std::pair<nlohmann::json, std::vector<ResultRecord>> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::config_invalid, "cannot open records: " + path);
    nlohmann::json header;
    std::vector<ResultRecord> records;
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
                        path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (j.value("record_type", "") == "header")
            header = j;
        else
            records.push_back(record_from_json(j));
    }
    return {header, records};
}

// Re-executes only the (item, cell) tuples missing from the prior output or
// recorded there as failures; completed records are carried over unchanged.
inline RunSummary resume(const ExperimentConfig& config) {
    config.validate();
    auto [header, existing] = load_records(config.output_path);
    if (header.is_null())
        throw Error(errc::config_digest_mismatch, "prior output has no header record");
    if (header.value("run_id", "") != config.run_id ||
        header.value("config_digest", "") != config_digest(config))
        throw Error(errc::config_digest_mismatch,
                    "prior output was produced by a different run_id or config");
    std::size_t carried = 0;
    for (const auto& r : existing)
        if (r.status == "ok") ++carried;
    RunSummary summary =
        detail::execute(config, [](const ResultRecord& r) { return r.status == "ok"; },
                        std::move(existing));
    summary.records_written -= carried;  // report only newly executed tuples
    return summary;
}

}  // namespace surprobe
