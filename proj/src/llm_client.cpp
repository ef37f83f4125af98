#include "dyad/llm_client.hpp"

#include "dyad/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace dyad {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ChatRole role) {
    switch (role) {
        case ChatRole::system: return "system";
        case ChatRole::user: return "user";
        case ChatRole::assistant: return "assistant";
    }
    return "user";
}

std::string_view to_string(ProviderErrorKind kind) {
    switch (kind) {
        case ProviderErrorKind::configuration: return "configuration";
        case ProviderErrorKind::transport: return "transport";
        case ProviderErrorKind::http_status: return "http_status";
        case ProviderErrorKind::timeout: return "timeout";
        case ProviderErrorKind::rate_limited: return "rate_limited";
        case ProviderErrorKind::malformed_response: return "malformed_response";
        case ProviderErrorKind::script_exhausted: return "script_exhausted";
    }
    return "?";
}

bool is_mock_url(const std::string& url) { return url.rfind("mock:", 0) == 0; }

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

}  // namespace

void validate_provider_config(const ProviderConfig& cfg) {
    if (cfg.model_identifier.empty()) throw ConfigError("provider model identifier is empty");
    if (is_mock_url(cfg.base_url)) return;
    const bool http = cfg.base_url.rfind("http://", 0) == 0 || cfg.base_url.rfind("https://", 0) == 0;
    if (!http || cfg.base_url.find("://") + 3 >= cfg.base_url.size()) {
        throw ConfigError("provider base_url '" + cfg.base_url + "' is not an absolute http(s) URL");
    }
    if (cfg.temperature < 0.0) throw ConfigError("provider temperature must be >= 0");
    if (cfg.max_requests_per_minute < 1) throw ConfigError("max_requests_per_minute must be >= 1");
    if (cfg.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

std::string encode_chat_request(const ProviderConfig& cfg, const ChatRequest& request) {
    ordered_json body;
    body["model"] = cfg.model_identifier;
    auto messages = ordered_json::array();
    for (const auto& m : request.messages) {
        ordered_json jm;
        jm["role"] = std::string(to_string(m.role));
        jm["content"] = m.content;
        messages.push_back(std::move(jm));
    }
    body["messages"] = std::move(messages);
    body["temperature"] = cfg.temperature;
    if (request.json_response) body["response_format"] = {{"type", "json_object"}};
    return body.dump();
}

ChatResponse decode_chat_response(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ProviderError(ProviderErrorKind::malformed_response, false,
                            std::string("response body is not JSON: ") + e.what());
    }
    try {
        const auto& choice = j.at("choices").at(0);
        ChatResponse r;
        const auto& content = choice.at("message").at("content");
        r.text = content.is_null() ? "" : content.get<std::string>();
        if (auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string()) {
            r.finish_reason = fr->get<std::string>();
        }
        if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
            r.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
            r.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
            r.usage.total_tokens = u->value("total_tokens", std::int64_t{0});
        }
        return r;
    } catch (const json::exception& e) {
        throw ProviderError(ProviderErrorKind::malformed_response, false,
                            std::string("unexpected response shape: ") + e.what());
    }
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
    });
}

class HttplibTransport final : public HttpTransport {
public:
    HttpReply post(const std::string& base_url, const std::string& path,
                   const std::map<std::string, std::string>& headers, const std::string& body,
                   std::chrono::milliseconds timeout) override {
        httplib::Client client(base_url);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        auto res = client.Post(path, h, body, "application/json");
        if (!res) {
            const auto err = res.error();
            const auto msg = "POST " + base_url + path + " failed: " + httplib::to_string(err);
            if (err == httplib::Error::ConnectionTimeout) {
                throw ProviderError(ProviderErrorKind::timeout, true, msg);
            }
            const bool retryable = err == httplib::Error::Connection || err == httplib::Error::Read ||
                                   err == httplib::Error::Write || err == httplib::Error::SSLConnection;
            throw ProviderError(ProviderErrorKind::transport, retryable, msg);
        }
        HttpReply reply;
        reply.status = res->status;
        reply.body = res->body;
        for (const auto& [k, v] : res->headers) reply.headers[k] = v;
        return reply;
    }
};

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport() { return std::make_unique<HttplibTransport>(); }

HttpChatProvider::HttpChatProvider(ProviderConfig cfg, std::unique_ptr<HttpTransport> transport,
                                   std::shared_ptr<RateLimiter> limiter, SleepFn sleep)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), limiter_(std::move(limiter)),
      sleep_(std::move(sleep)) {
    try {
        validate_provider_config(cfg_);
    } catch (const ConfigError& e) {
        throw ProviderError(ProviderErrorKind::configuration, false, e.what());
    }
    if (cfg_.api_key_env_var.empty()) {
        throw ProviderError(ProviderErrorKind::configuration, false,
                            "provider for '" + cfg_.model_identifier + "' names no API key variable");
    }
    const char* key = std::getenv(cfg_.api_key_env_var.c_str());
    if (!key || !*key) {
        throw ProviderError(ProviderErrorKind::configuration, false,
                            "environment variable " + cfg_.api_key_env_var + " is not set");
    }
    api_key_ = key;
    if (!transport_) transport_ = make_httplib_transport();
    if (!limiter_) limiter_ = std::make_shared<RateLimiter>(cfg_.max_requests_per_minute);
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::int64_t HttpChatProvider::request_count() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

void HttpChatProvider::log_exchange(const std::string& request_body, const HttpReply* reply,
                                    const std::string& error) {
    if (!cfg_.debug_log) return;
    auto redact = [&](std::string s) {
        for (auto pos = s.find(api_key_); !api_key_.empty() && pos != std::string::npos;
             pos = s.find(api_key_, pos)) {
            s.replace(pos, api_key_.size(), "[REDACTED]");
        }
        return s;
    };
    ordered_json line;
    line["url"] = cfg_.base_url;
    line["authorization"] = "Bearer [REDACTED]";
    line["request"] = redact(request_body);
    if (reply) {
        line["status"] = reply->status;
        line["response"] = redact(reply->body);
    }
    if (!error.empty()) line["error"] = redact(error);
    std::lock_guard lock(mutex_);
    std::ofstream out(*cfg_.debug_log, std::ios::app);
    out << line.dump() << '\n';
}

ChatResponse HttpChatProvider::complete(const ChatRequest& request) {
    const auto url = split_url(cfg_.base_url);
    const auto path = url.path + "/chat/completions";
    const auto body = encode_chat_request(cfg_, request);
    const std::map<std::string, std::string> headers{{"Authorization", "Bearer " + api_key_}};
    auto backoff = cfg_.initial_backoff;

    for (int attempt = 1;; ++attempt) {
        limiter_->acquire();
        {
            std::lock_guard lock(mutex_);
            ++requests_;
        }
        const bool last = attempt >= cfg_.max_attempts;
        std::chrono::milliseconds wait = backoff;
        try {
            const auto reply = transport_->post(url.origin, path, headers, body, cfg_.timeout);
            log_exchange(body, &reply, "");
            if (reply.status >= 200 && reply.status < 300) {
                auto response = decode_chat_response(reply.body);
                response.attempts = attempt;
                return response;
            }
            const auto status_msg = "HTTP " + std::to_string(reply.status) + " from " + cfg_.base_url;
            ProviderError err = [&] {
                if (reply.status == 429) {
                    return ProviderError(ProviderErrorKind::rate_limited, true, status_msg, reply.status);
                }
                if (reply.status == 408) {
                    return ProviderError(ProviderErrorKind::timeout, true, status_msg, reply.status);
                }
                return ProviderError(ProviderErrorKind::http_status, reply.status >= 500, status_msg,
                                     reply.status);
            }();
            if (!err.retryable() || last) throw err;
            for (const auto& [name, value] : reply.headers) {
                if (!iequals(name, "retry-after")) continue;
                try {
                    wait = std::chrono::seconds(std::stoi(value));
                } catch (const std::exception&) {
                }
            }
        } catch (const ProviderError& e) {
            if (e.kind() != ProviderErrorKind::http_status && e.kind() != ProviderErrorKind::rate_limited &&
                e.kind() != ProviderErrorKind::malformed_response) {
                log_exchange(body, nullptr, e.what());
            }
            if (!e.retryable() || last) throw;
        }
        sleep_(wait);
        backoff *= 2;
    }
}

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& cfg) {
    validate_provider_config(cfg);
    if (is_mock_url(cfg.base_url)) {
        if (!cfg.mock_script) throw ConfigError("mock provider '" + cfg.model_identifier + "' has no script");
        return load_mock_provider(*cfg.mock_script, cfg.model_identifier);
    }
    return std::make_unique<HttpChatProvider>(cfg, make_httplib_transport());
}

}  // namespace dyad
