#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "surprobe/digest.hpp"
#include "surprobe/error.hpp"
#include "surprobe/scale.hpp"

namespace surprobe {

struct ScoreRequest {
    std::string model_id;
    std::string context_text;
    std::vector<std::string> surfaces;  // non-empty, pairwise distinct

    void validate() const {
        if (surfaces.empty()) throw Error(errc::config_invalid, "score request has no surfaces");
        std::set<std::string> distinct(surfaces.begin(), surfaces.end());
        if (distinct.size() != surfaces.size())
            throw Error(errc::config_invalid, "score request surfaces must be pairwise distinct");
    }
};

enum class Resolution { exact_token, top_k_match, echo_scored, mock };

inline std::string to_string(Resolution r) {
    switch (r) {
        case Resolution::exact_token: return "exact-token";
        case Resolution::top_k_match: return "top-k-match";
        case Resolution::echo_scored: return "echo-scored";
        case Resolution::mock: return "mock";
    }
    return "?";
}

inline Resolution resolution_from_string(std::string_view s) {
    if (s == "exact-token") return Resolution::exact_token;
    if (s == "top-k-match") return Resolution::top_k_match;
    if (s == "echo-scored") return Resolution::echo_scored;
    if (s == "mock") return Resolution::mock;
    throw Error(errc::cache_corrupt, "unknown resolution: " + std::string(s));
}

struct ScoredSurface {
    std::string surface;
    double raw_logprob{0.0};  // natural-log units; <= 0 for true-probability resolutions
    Resolution resolution{Resolution::mock};
};

struct ScoredAlternatives {
    std::vector<ScoredSurface> entries;  // one per requested surface, order preserved
    std::string provider_id;
    double latency_ms{0.0};

    std::vector<double> logprobs() const {
        std::vector<double> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.raw_logprob);
        return out;
    }
};

// Scoring backend seam. Implementations must be safe for concurrent score()
// calls; results are immutable values.
class Provider {
public:
    virtual ~Provider() = default;
    virtual ScoredAlternatives score(const ScoreRequest& request) = 0;
    virtual std::string kind() const = 0;
    // Tokenizer probe capability; absent by default.
    virtual TokenizationProbe tokenization_probe() const { return {}; }
};

// --- mock provider -----------------------------------------------------------

// One rule pins logits for every matching (context, surface). First matching
// rule wins; surfaces it does not cover fall through to "otherwise" or, when
// that is absent, to the hash path.
struct MockRule {
    std::string context_contains;                // "" matches every context
    std::map<std::string, double> surface_logits;
    std::optional<double> otherwise;
};

// Deterministic offline backend. Logits come from a scripted fixture table
// or from a stable 64-bit hash mapped affinely into [-10, 0], so runs are
// reproducible across platforms. May emit logits > 0 via fixtures; the
// downstream renormalization is shift-invariant.
class MockProvider : public Provider {
public:
    explicit MockProvider(std::uint64_t seed = 0, std::vector<MockRule> rules = {})
        : seed_(seed), rules_(std::move(rules)) {}

    static std::vector<MockRule> rules_from_json(const nlohmann::json& j) {
        std::vector<MockRule> rules;
        for (const auto& r : j.at("rules")) {
            MockRule rule;
            rule.context_contains = r.value("context_contains", "");
            for (auto it = r.at("logits").begin(); it != r.at("logits").end(); ++it)
                rule.surface_logits[it.key()] = it.value().get<double>();
            if (r.contains("otherwise") && !r["otherwise"].is_null())
                rule.otherwise = r["otherwise"].get<double>();
            rules.push_back(std::move(rule));
        }
        return rules;
    }

    ScoredAlternatives score(const ScoreRequest& request) override {
        request.validate();
        ScoredAlternatives result;
        result.provider_id = kind();
        for (const auto& surface : request.surfaces) {
            ScoredSurface entry;
            entry.surface = surface;
            entry.resolution = Resolution::mock;
            entry.raw_logprob = logit_for(request.model_id, request.context_text, surface);
            result.entries.push_back(std::move(entry));
        }
        return result;
    }

    std::string kind() const override { return "mock"; }

private:
    double logit_for(const std::string& model, const std::string& context,
                     const std::string& surface) const {
        for (const MockRule& rule : rules_) {
            if (!rule.context_contains.empty() &&
                context.find(rule.context_contains) == std::string::npos)
                continue;
            auto it = rule.surface_logits.find(surface);
            if (it != rule.surface_logits.end()) return it->second;
            if (rule.otherwise.has_value()) return *rule.otherwise;
        }
        std::uint64_t h = 0xcbf29ce484222325ull;
        char seed_bytes[8];
        for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<char>((seed_ >> (8 * i)) & 0xff);
        h = fnv1a64(std::string_view(seed_bytes, 8), h);
        h = fnv1a64(model, h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(context, h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(surface, h);
        // Top 53 bits -> [0, 1); exact in double, so identical everywhere.
        double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
        return -10.0 * unit;
    }

    std::uint64_t seed_;
    std::vector<MockRule> rules_;
};

// --- cache key -----------------------------------------------------------------

inline std::string cache_key(std::string_view provider_kind, std::string_view model_id,
                             std::string_view context_text, std::string_view surface) {
    return sha256_hex({provider_kind, model_id, context_text, surface});
}

// --- caching provider -------------------------------------------------------------

// Append-only line-delimited cache, one record per (context, surface). On a
// duplicate key the last line wins. Unparseable lines are copied to
// <path>.quarantine and skipped; the run continues uncached for those keys.
class CachingProvider : public Provider {
public:
    CachingProvider(std::shared_ptr<Provider> inner, std::string path)
        : inner_(std::move(inner)), path_(std::move(path)) {
        load();
    }

    ScoredAlternatives score(const ScoreRequest& request) override {
        request.validate();
        std::vector<std::string> keys;
        keys.reserve(request.surfaces.size());
        bool all_hit = true;
        {
            std::lock_guard<std::mutex> lock(mu_);
            for (const auto& surface : request.surfaces) {
                keys.push_back(cache_key(inner_->kind(), request.model_id, request.context_text,
                                         surface));
                if (!entries_.count(keys.back())) all_hit = false;
            }
            if (all_hit) {
                ++hits_;
                ScoredAlternatives result;
                result.provider_id = inner_->kind() + "+cache";
                for (std::size_t i = 0; i < request.surfaces.size(); ++i) {
                    const CachedEntry& c = entries_.at(keys[i]);
                    result.entries.push_back(ScoredSurface{request.surfaces[i], c.raw_logprob,
                                                           c.resolution});
                }
                return result;
            }
        }

        ++misses_;
        ScoredAlternatives fresh = inner_->score(request);
        std::lock_guard<std::mutex> lock(mu_);
        for (std::size_t i = 0; i < fresh.entries.size(); ++i)
            append(keys[i], request, fresh.entries[i]);
        return fresh;
    }

    std::string kind() const override { return inner_->kind(); }
    TokenizationProbe tokenization_probe() const override { return inner_->tokenization_probe(); }

    std::size_t hit_count() const { return hits_; }
    std::size_t miss_count() const { return misses_; }
    std::size_t quarantined_count() const { return quarantined_; }

private:
    struct CachedEntry {
        double raw_logprob;
        Resolution resolution;
    };

    void load() {
        std::ifstream in(path_);
        if (!in) return;  // cold cache
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                nlohmann::json j = nlohmann::json::parse(line);
                CachedEntry entry{j.at("raw_logprob").get<double>(),
                                  resolution_from_string(j.at("resolution").get<std::string>())};
                if (!std::isfinite(entry.raw_logprob))
                    throw Error(errc::cache_corrupt, "non-finite cached logprob");
                entries_[j.at("key").get<std::string>()] = entry;
            } catch (const std::exception&) {
                quarantine(line);
            }
        }
    }

    void quarantine(const std::string& line) {
        ++quarantined_;
        std::ofstream q(path_ + ".quarantine", std::ios::app);
        q << line << "\n";
    }

    void append(const std::string& key, const ScoreRequest& request, const ScoredSurface& entry) {
        entries_[key] = CachedEntry{entry.raw_logprob, entry.resolution};
        nlohmann::json j{{"key", key},
                         {"provider", inner_->kind()},
                         {"model", request.model_id},
                         {"surface", entry.surface},
                         {"raw_logprob", entry.raw_logprob},
                         {"resolution", to_string(entry.resolution)}};
        std::ofstream out(path_, std::ios::app);
        out << j.dump() << "\n";  // one write per line keeps concurrent appends line-atomic
    }

    std::shared_ptr<Provider> inner_;
    std::string path_;
    std::mutex mu_;
    std::map<std::string, CachedEntry> entries_;
    std::size_t hits_{0};
    std::size_t misses_{0};
    std::size_t quarantined_{0};
};

}  // namespace surprobe
