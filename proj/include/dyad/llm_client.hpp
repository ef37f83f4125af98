#pragma once

#include "dyad/error.hpp"
#include "dyad/rate_limiter.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dyad {

enum class ChatRole { system, user, assistant };
std::string_view to_string(ChatRole role);

struct ChatMessage {
    ChatRole role = ChatRole::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    /// Ask the provider for a JSON-object response format.
    bool json_response = false;

    friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t total_tokens = 0;
};

struct ChatResponse {
    std::string text;
    std::string finish_reason;
    Usage usage;
    /// Transport attempts spent, including the successful one.
    int attempts = 1;
};

enum class ProviderErrorKind { configuration, transport, http_status, timeout, rate_limited, malformed_response, script_exhausted };
std::string_view to_string(ProviderErrorKind kind);

class ProviderError : public Error {
public:
    ProviderError(ProviderErrorKind kind, bool retryable, const std::string& message, int http_status = 0)
        : Error(message), kind_(kind), retryable_(retryable), http_status_(http_status) {}

    ProviderErrorKind kind() const noexcept { return kind_; }
    bool retryable() const noexcept { return retryable_; }
    int http_status() const noexcept { return http_status_; }

private:
    ProviderErrorKind kind_;
    bool retryable_;
    int http_status_;
};

struct ProviderConfig {
    std::string base_url;
    std::string model_identifier;
    std::string api_key_env_var;
    double temperature = 0.0;
    std::chrono::milliseconds timeout{60'000};
    int max_requests_per_minute = 60;
    /// Transport attempts per request, including the first.
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{1'000};
    /// Optional file receiving request/response bodies with keys redacted.
    std::optional<std::filesystem::path> debug_log;
    /// Script consumed when base_url uses the mock: scheme.
    std::optional<std::filesystem::path> mock_script;
};

/// Throws ConfigError when the URL is not absolute or the model is empty.
void validate_provider_config(const ProviderConfig& cfg);
bool is_mock_url(const std::string& url);

/// Something that answers chat requests. Implementations must be safe to
/// call from several threads.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual const std::string& model_identifier() const = 0;
    /// Requests that reached the provider (transport attempts for HTTP).
    virtual std::int64_t request_count() const = 0;
};

struct HttpReply {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Raw POST. Throws ProviderError(transport|timeout) when no reply arrives.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpReply post(const std::string& base_url, const std::string& path,
                           const std::map<std::string, std::string>& headers, const std::string& body,
                           std::chrono::milliseconds timeout) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport();

/// Serialises a request in the chat-completions wire shape.
std::string encode_chat_request(const ProviderConfig& cfg, const ChatRequest& request);
/// Parses a chat-completions response body.
ChatResponse decode_chat_response(const std::string& body);

/// Chat-completions client over HTTP+JSON with client-side throttling and
/// bounded retries on retry-able failures.
class HttpChatProvider : public ChatProvider {
public:
    using SleepFn = std::function<void(std::chrono::milliseconds)>;

    /// Reads the API key from the configured environment variable; throws
    /// ProviderError(configuration) before any network use if it is unset.
    HttpChatProvider(ProviderConfig cfg, std::unique_ptr<HttpTransport> transport,
                     std::shared_ptr<RateLimiter> limiter = nullptr, SleepFn sleep = nullptr);

    ChatResponse complete(const ChatRequest& request) override;
    const std::string& model_identifier() const override { return cfg_.model_identifier; }
    std::int64_t request_count() const override;

private:
    void log_exchange(const std::string& request_body, const HttpReply* reply, const std::string& error);

    ProviderConfig cfg_;
    std::string api_key_;
    std::unique_ptr<HttpTransport> transport_;
    std::shared_ptr<RateLimiter> limiter_;
    SleepFn sleep_;
    mutable std::mutex mutex_;
    std::int64_t requests_ = 0;
};

/// Deterministic in-process provider. Replies either from an ordered script
/// or, in keyed mode, from per-target scripts selected by a key function
/// over the request (so results do not depend on call interleaving).
/// Every received request is appended to an inspectable log.
class MockProvider : public ChatProvider {
public:
    using KeyFn = std::function<std::string(const ChatRequest&)>;

    explicit MockProvider(std::vector<std::string> script, std::string model = "mock");
    MockProvider(std::map<std::string, std::vector<std::string>> keyed_script, KeyFn key,
                 std::optional<std::string> fallback = std::nullopt, std::string model = "mock");

    /// Sequential mode throws ProviderError(script_exhausted) once the script
    /// runs out; keyed mode repeats the last reply for a key and throws only
    /// for unknown keys without a fallback.
    ChatResponse complete(const ChatRequest& request) override;
    const std::string& model_identifier() const override { return model_; }
    std::int64_t request_count() const override;

    std::vector<ChatRequest> request_log() const;

private:
    std::string model_;
    std::vector<std::string> script_;
    std::size_t next_ = 0;
    std::map<std::string, std::vector<std::string>> keyed_;
    std::map<std::string, std::size_t> keyed_next_;
    KeyFn key_;
    std::optional<std::string> fallback_;
    bool keyed_mode_ = false;
    mutable std::mutex mutex_;
    std::vector<ChatRequest> log_;
};

/// Loads a mock script file. Format:
///   {"mode": "sequential", "responses": ["...", ...]}
///   {"mode": "by_target", "responses": {"<target text>": ["...", ...]}, "default": "..."}
/// In by_target mode the key is the delimited target utterance of the prompt.
std::unique_ptr<MockProvider> load_mock_provider(const std::filesystem::path& script,
                                                 const std::string& model);

/// Builds the provider a config describes: a MockProvider for mock: URLs,
/// otherwise an HttpChatProvider with its own rate limiter.
std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& cfg);

}  // namespace dyad
