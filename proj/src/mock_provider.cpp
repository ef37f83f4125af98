#include "dyad/llm_client.hpp"

#include "dyad/prompt.hpp"
#include "dyad/util.hpp"

#include <json.hpp>

#include <algorithm>

namespace dyad {

MockProvider::MockProvider(std::vector<std::string> script, std::string model)
    : model_(std::move(model)), script_(std::move(script)) {}

MockProvider::MockProvider(std::map<std::string, std::vector<std::string>> keyed_script, KeyFn key,
                           std::optional<std::string> fallback, std::string model)
    : model_(std::move(model)), keyed_(std::move(keyed_script)), key_(std::move(key)),
      fallback_(std::move(fallback)), keyed_mode_(true) {}

ChatResponse MockProvider::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    log_.push_back(request);
    ChatResponse r;
    r.finish_reason = "stop";
    if (!keyed_mode_) {
        if (next_ >= script_.size()) {
            throw ProviderError(ProviderErrorKind::script_exhausted, false,
                                "mock script exhausted after " + std::to_string(script_.size()) + " replies");
        }
        r.text = script_[next_++];
        return r;
    }
    const auto key = key_(request);
    auto it = keyed_.find(key);
    if (it == keyed_.end()) {
        if (fallback_) {
            r.text = *fallback_;
            return r;
        }
        throw ProviderError(ProviderErrorKind::script_exhausted, false, "mock script has no entry for '" + key + "'");
    }
    if (it->second.empty()) {
        throw ProviderError(ProviderErrorKind::script_exhausted, false, "mock script has no replies for '" + key + "'");
    }
    // The last reply for a target repeats, so identical utterances in
    // different dialogues get the same answer.
    auto& pos = keyed_next_[key];
    r.text = it->second[std::min(pos, it->second.size() - 1)];
    ++pos;
    return r;
}

std::int64_t MockProvider::request_count() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::int64_t>(log_.size());
}

std::vector<ChatRequest> MockProvider::request_log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::unique_ptr<MockProvider> load_mock_provider(const std::filesystem::path& script, const std::string& model) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(script));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("mock script '" + script.string() + "' is not JSON: " + e.what());
    }
    try {
        const auto mode = j.value("mode", std::string("sequential"));
        if (mode == "sequential") {
            return std::make_unique<MockProvider>(j.at("responses").get<std::vector<std::string>>(), model);
        }
        if (mode == "by_target") {
            std::map<std::string, std::vector<std::string>> keyed;
            for (const auto& [k, v] : j.at("responses").items()) {
                keyed[k] = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
            }
            std::optional<std::string> fallback;
            if (auto d = j.find("default"); d != j.end() && d->is_string()) fallback = d->get<std::string>();
            auto key = [](const ChatRequest& req) {
                for (const auto& m : req.messages) {
                    if (m.role != ChatRole::user) continue;
                    auto t = extract_target_utterance(m.content);
                    if (!t.empty()) return t;
                }
                return std::string{};
            };
            return std::make_unique<MockProvider>(std::move(keyed), key, fallback, model);
        }
        throw ConfigError("mock script '" + script.string() + "' has unknown mode '" + mode + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("mock script '" + script.string() + "': " + e.what());
    }
}

}  // namespace dyad
