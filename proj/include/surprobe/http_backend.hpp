#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "surprobe/backend.hpp"
#include "surprobe/error.hpp"

namespace surprobe {

struct HttpProviderConfig {
    std::string endpoint;  // base URL, e.g. http://127.0.0.1:8000/v1
    std::string api_key;   // sent as a bearer token when non-empty
    int top_k{20};
    int max_attempts{3};
    int backoff_base_ms{100};
    int timeout_s{60};
};

namespace detail {

// BPE-style leading-space markers some servers leave in returned token text.
inline std::string normalize_token(std::string token) {
    auto replace_all = [&](const std::string& from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = token.find(from, pos)) != std::string::npos) {
            token.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace_all("\xC4\xA0", " ");      // 'Ġ'
    replace_all("\xE2\x96\x81", " ");  // '▁'
    return token;
}

}  // namespace detail

// Adapter for the de-facto completions interface: one next-token request at
// temperature 0 with the top-k log-probabilities, surfaces matched against
// the returned tokens, and per-surface echo scoring as the fallback for
// anything the top-k misses.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
        split_endpoint(config_.endpoint, base_url_, path_prefix_);
    }

    ScoredAlternatives score(const ScoreRequest& request) override {
        request.validate();
        auto start = std::chrono::steady_clock::now();

        nlohmann::json body{{"model", request.model_id},
                            {"prompt", request.context_text},
                            {"max_tokens", 1},
                            {"temperature", 0},
                            {"logprobs", config_.top_k}};
        nlohmann::json resp = post_with_retry(body);

        std::string generated;
        double generated_logprob = 0.0;
        bool have_generated = false;
        std::map<std::string, double> top;  // token text -> logprob
        parse_next_token(resp, generated, generated_logprob, have_generated, top);

        ScoredAlternatives result;
        result.provider_id = kind();
        for (const auto& surface : request.surfaces) {
            ScoredSurface entry;
            entry.surface = surface;
            if (have_generated && generated == surface) {
                entry.raw_logprob = clamp_true_logprob(generated_logprob);
                entry.resolution = Resolution::exact_token;
            } else if (auto it = top.find(surface); it != top.end()) {
                entry.raw_logprob = clamp_true_logprob(it->second);
                entry.resolution = Resolution::exact_token;
            } else if (auto normalized = find_normalized(top, surface)) {
                entry.raw_logprob = clamp_true_logprob(*normalized);
                entry.resolution = Resolution::top_k_match;
            } else {
                entry.raw_logprob = clamp_true_logprob(echo_score(request, surface));
                entry.resolution = Resolution::echo_scored;
            }
            result.entries.push_back(std::move(entry));
        }

        result.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        return result;
    }

    std::string kind() const override { return "http"; }

private:
    static void split_endpoint(const std::string& endpoint, std::string& base,
                               std::string& prefix) {
        auto scheme_end = endpoint.find("://");
        if (scheme_end == std::string::npos)
            throw Error(errc::config_invalid, "endpoint must include a scheme: " + endpoint);
        auto path_start = endpoint.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base = endpoint;
            prefix = "/v1";
        } else {
            base = endpoint.substr(0, path_start);
            prefix = endpoint.substr(path_start);
            while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
            if (prefix.empty()) prefix = "/v1";
        }
    }

    nlohmann::json post_with_retry(const nlohmann::json& body) {
        std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config_.backoff_base_ms * (1 << (attempt - 1))));
            httplib::Client client(base_url_);
            client.set_connection_timeout(config_.timeout_s, 0);
            client.set_read_timeout(config_.timeout_s, 0);
            httplib::Headers headers;
            if (!config_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + config_.api_key);
            auto res = client.Post(path_prefix_ + "/completions", headers, payload,
                                   "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw Error(errc::malformed_response,
                            "HTTP " + std::to_string(res->status) + ": " + res->body);
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw Error(errc::malformed_response, std::string("bad JSON: ") + e.what());
            }
        }
        throw Error(errc::provider_unreachable,
                    base_url_ + " unreachable after " + std::to_string(config_.max_attempts) +
                        " attempts (" + last_error + ")");
    }

    static void parse_next_token(const nlohmann::json& resp, std::string& generated,
                                 double& generated_logprob, bool& have_generated,
                                 std::map<std::string, double>& top) {
        try {
            const auto& choice = resp.at("choices").at(0);
            const auto& lp = choice.at("logprobs");
            if (lp.contains("tokens") && lp["tokens"].is_array() && !lp["tokens"].empty()) {
                generated = lp["tokens"][0].get<std::string>();
                have_generated = true;
                if (lp.contains("token_logprobs") && lp["token_logprobs"].is_array() &&
                    !lp["token_logprobs"].empty() && lp["token_logprobs"][0].is_number())
                    generated_logprob = lp["token_logprobs"][0].get<double>();
                else
                    have_generated = false;
            }
            if (lp.contains("top_logprobs") && lp["top_logprobs"].is_array() &&
                !lp["top_logprobs"].empty()) {
                for (auto it = lp["top_logprobs"][0].begin(); it != lp["top_logprobs"][0].end();
                     ++it)
                    top[it.key()] = it.value().get<double>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(errc::malformed_response,
                        std::string("unexpected completions payload: ") + e.what());
        }
        if (top.empty() && !have_generated)
            throw Error(errc::malformed_response, "response carries no logprobs");
    }

    static std::optional<double> find_normalized(const std::map<std::string, double>& top,
                                                 const std::string& surface) {
        for (const auto& [token, logprob] : top)
            if (detail::normalize_token(token) == surface) return logprob;
        return std::nullopt;
    }

    // context+surface submitted with echo; the final token's logprob is read.
    double echo_score(const ScoreRequest& request, const std::string& surface) {
        nlohmann::json body{{"model", request.model_id},
                            {"prompt", request.context_text + surface},
                            {"max_tokens", 0},
                            {"temperature", 0},
                            {"logprobs", 1},
                            {"echo", true}};
        nlohmann::json resp;
        try {
            resp = post_with_retry(body);
        } catch (const Error& e) {
            if (e.code() == errc::provider_unreachable) throw;
            throw Error(errc::surface_unresolvable,
                        "surface \"" + surface + "\" not in top-" + std::to_string(config_.top_k) +
                            " and echo scoring failed: " + e.what());
        }
        try {
            const auto& lp = resp.at("choices").at(0).at("logprobs").at("token_logprobs");
            if (!lp.is_array() || lp.empty() || !lp.back().is_number())
                throw Error(errc::surface_unresolvable,
                            "echo response has no final-token logprob for \"" + surface + "\"");
            return lp.back().get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(errc::malformed_response, std::string("unexpected echo payload: ") + e.what());
        }
    }

    // Positive values within float fuzz are clamped; anything larger is a
    // protocol violation.
    static double clamp_true_logprob(double logprob) {
        if (!std::isfinite(logprob))
            throw Error(errc::malformed_response, "non-finite logprob from provider");
        if (logprob > 1e-6)
            throw Error(errc::malformed_response,
                        "positive logprob from provider: " + std::to_string(logprob));
        return logprob > 0.0 ? 0.0 : logprob;
    }

    HttpProviderConfig config_;
    std::string base_url_;
    std::string path_prefix_;
};

}  // namespace surprobe
