#include "dyad/annotate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <thread>

namespace dyad {

const EmotionVector* AnnotationSet::find(const UtteranceKey& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

void validate_annotation_keys(const AnnotationSet& set, const Corpus& corpus) {
    auto check = [&](const UtteranceKey& key) {
        const auto* d = corpus.find(key.dialogue_id);
        if (!d) throw SchemaError(key.dialogue_id, "dialogue_id", "annotation refers to an unknown dialogue");
        if (key.turn_index < 1 || static_cast<std::size_t>(key.turn_index) > d->turns.size()) {
            throw SchemaError(key.dialogue_id, "turn_index",
                              "annotation refers to missing turn " + std::to_string(key.turn_index));
        }
    };
    for (const auto& [k, _] : set.entries) check(k);
    for (const auto& [k, _] : set.failures) check(k);
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

LlmAnnotator::LlmAnnotator(std::string name, ChatProvider& provider, PromptConfig cfg, AnnotationCache& cache,
                           Options options)
    : provider_(provider), cfg_(std::move(cfg)), cache_(cache), options_(options) {
    validate_prompt_config(cfg_);
    if (options_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    id_ = {std::move(name), provider_.model_identifier(), prompt_config_hash(cfg_)};
}

AnnotationOutcome LlmAnnotator::annotate(const Dialogue& dialogue, int turn_index) {
    const UtteranceKey key{dialogue.id, turn_index};
    if (auto cached = cache_.lookup(id_, key); cached && (cached->vector || !options_.retry_failed)) {
        return {cached->vector, cached->attempts, true, cached->error};
    }

    const Prompt base = build_prompt(dialogue, turn_index, cfg_);
    std::string last_error;
    int attempt = 0;
    for (attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        Prompt prompt = base;
        if (!last_error.empty()) {
            prompt.user += "\n\nYour previous reply could not be used (" + last_error +
                           "). Reply again with only the JSON object.";
        }
        ChatResponse response;
        try {
            response = provider_.complete(prompt.to_request(cfg_.require_structured_output));
        } catch (const ProviderError& e) {
            throw AnnotationTransportError(key, e.kind(), e.what());
        }
        try {
            auto v = parse_annotation_response(response.text, cfg_.label_set);
            cache_.store({id_, key, v, attempt, "", utc_timestamp()});
            return {v, attempt, false, ""};
        } catch (const ResponseError& e) {
            last_error = std::string(to_string(e.kind())) + ": " + e.what();
        }
    }
    const int attempts = options_.max_attempts;
    cache_.store({id_, key, std::nullopt, attempts, last_error, utc_timestamp()});
    return {std::nullopt, attempts, false, last_error};
}

CorpusAnnotation annotate_corpus(Annotator& annotator, const Corpus& corpus, int parallelism) {
    struct Task {
        const Dialogue* dialogue;
        int turn;
    };
    std::vector<Task> tasks;
    for (const auto& d : corpus.dialogues) {
        for (const auto& u : d.turns) tasks.push_back({&d, u.turn_index});
    }

    struct Slot {
        AnnotationOutcome outcome;
        bool transport_failure = false;
    };
    std::vector<Slot> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (;;) {
            if (abort.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                slots[i].outcome = annotator.annotate(*tasks[i].dialogue, tasks[i].turn);
            } catch (const AnnotationTransportError& e) {
                slots[i].outcome = {std::nullopt, 0, false, e.what()};
                slots[i].transport_failure = true;
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                abort.store(true);
                return;
            }
        }
    };

    const int workers = std::clamp<int>(parallelism, 1, std::max<int>(1, static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (fatal) std::rethrow_exception(fatal);

    CorpusAnnotation out;
    out.set.annotator = annotator.id();
    out.set.label_set = annotator.label_set();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const UtteranceKey key{tasks[i].dialogue->id, tasks[i].turn};
        const auto& slot = slots[i];
        if (slot.outcome.vector) {
            out.set.entries.emplace(key, *slot.outcome.vector);
        } else {
            out.set.failures.emplace(key, AnnotationFailure{slot.outcome.attempts, slot.outcome.error});
            ++out.failed;
            if (slot.transport_failure) ++out.transport_failures;
        }
        if (slot.outcome.from_cache) {
            ++out.from_cache;
        } else if (slot.outcome.vector) {
            ++out.newly_annotated;
        }
    }
    return out;
}

}  // namespace dyad
