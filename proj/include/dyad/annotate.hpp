#pragma once

#include "dyad/corpus.hpp"
#include "dyad/emotion.hpp"
#include "dyad/error.hpp"
#include "dyad/llm_client.hpp"
#include "dyad/prompt.hpp"
#include "dyad/response.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dyad {

struct AnnotatorId {
    std::string name;
    std::string model_identifier;
    std::string prompt_config_hash;

    friend auto operator<=>(const AnnotatorId&, const AnnotatorId&) = default;
    friend bool operator==(const AnnotatorId&, const AnnotatorId&) = default;
};

struct AnnotationFailure {
    int attempts = 0;
    std::string error;

    friend bool operator==(const AnnotationFailure&, const AnnotationFailure&) = default;
};

/// Vectors produced by one annotator configuration. Utterances the annotator
/// gave up on are listed under failures and excluded from analyses.
struct AnnotationSet {
    AnnotatorId annotator;
    LabelSet label_set = canonical_label_set();
    std::map<UtteranceKey, EmotionVector> entries;
    std::map<UtteranceKey, AnnotationFailure> failures;

    const EmotionVector* find(const UtteranceKey& key) const;
    std::size_t attempted() const { return entries.size() + failures.size(); }

    friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

/// Throws SchemaError if a key does not name an utterance of the corpus.
void validate_annotation_keys(const AnnotationSet& set, const Corpus& corpus);

class CacheCorruptionError : public Error {
public:
    using Error::Error;
};

struct CacheRecord {
    AnnotatorId annotator;
    UtteranceKey key;
    std::optional<EmotionVector> vector;  // empty for a recorded failure
    int attempts = 0;
    std::string error;
    std::string timestamp;
};

/// Append-only annotation cache, one JSON record per line. Later records for
/// the same (annotator, utterance) supersede earlier ones. Writes are
/// serialised so concurrent workers never interleave partial lines.
class AnnotationCache {
public:
    /// In-memory cache with no backing file.
    AnnotationCache() = default;
    /// Loads the file if it exists. Throws CacheCorruptionError on a bad line.
    explicit AnnotationCache(std::filesystem::path file);

    std::optional<CacheRecord> lookup(const AnnotatorId& id, const UtteranceKey& key) const;
    void store(CacheRecord record);
    std::size_t size() const;
    /// Rebuilds the AnnotationSet an annotator's records describe.
    AnnotationSet reconstruct(const AnnotatorId& id, const LabelSet& labels) const;

    static std::string encode(const CacheRecord& record);
    static CacheRecord decode(const std::string& line);

private:
    std::optional<std::filesystem::path> file_;
    mutable std::mutex mutex_;
    std::map<std::pair<AnnotatorId, UtteranceKey>, CacheRecord> records_;
};

struct AnnotationOutcome {
    std::optional<EmotionVector> vector;
    int attempts = 0;
    bool from_cache = false;
    std::string error;
};

/// Transport failure while annotating one utterance.
class AnnotationTransportError : public Error {
public:
    AnnotationTransportError(UtteranceKey key, ProviderErrorKind kind, const std::string& message)
        : Error("annotating " + to_string(key) + ": " + message), key_(std::move(key)), kind_(kind) {}
    const UtteranceKey& key() const noexcept { return key_; }
    ProviderErrorKind kind() const noexcept { return kind_; }

private:
    UtteranceKey key_;
    ProviderErrorKind kind_;
};

class Annotator {
public:
    virtual ~Annotator() = default;
    virtual const AnnotatorId& id() const = 0;
    virtual const LabelSet& label_set() const = 0;
    virtual AnnotationOutcome annotate(const Dialogue& dialogue, int turn_index) = 0;
};

inline constexpr int kDefaultMaxAttempts = 3;

/// Prompts a chat provider per utterance, with history and worked examples.
class LlmAnnotator final : public Annotator {
public:
    struct Options {
        int max_attempts = kDefaultMaxAttempts;
        /// Re-query utterances whose cached record is a failure.
        bool retry_failed = false;
    };

    LlmAnnotator(std::string name, ChatProvider& provider, PromptConfig cfg, AnnotationCache& cache,
                 Options options);
    LlmAnnotator(std::string name, ChatProvider& provider, PromptConfig cfg, AnnotationCache& cache)
        : LlmAnnotator(std::move(name), provider, std::move(cfg), cache, Options{}) {}

    const AnnotatorId& id() const override { return id_; }
    const LabelSet& label_set() const override { return cfg_.label_set; }
    const PromptConfig& prompt_config() const { return cfg_; }

    /// Returns the cached vector if present; otherwise queries the provider up
    /// to max_attempts times, feeding each parse error back into the retry
    /// prompt, and caches the outcome. Provider errors throw
    /// AnnotationTransportError.
    AnnotationOutcome annotate(const Dialogue& dialogue, int turn_index) override;

private:
    ChatProvider& provider_;
    PromptConfig cfg_;
    AnnotationCache& cache_;
    Options options_;
    AnnotatorId id_;
};

/// Hard-label to canonical-label mapping for one-hot classifiers.
struct LabelMapping {
    std::map<std::string, EmotionLabel> overrides;

    /// love -> compassion; identity otherwise.
    static LabelMapping default_mapping();
    std::optional<EmotionLabel> map(std::string_view hard_label) const;
};

class UnmappedLabelError : public Error {
public:
    using Error::Error;
};

EmotionVector one_hot_adapter(std::string_view hard_label, const LabelMapping& mapping);

/// Source labels of the six-way Twitter emotion classifier.
inline const std::vector<std::string> kTwitterClassifierLabels{"joy", "anger", "love", "sadness", "fear", "surprise"};

/// Labels reachable from `source_labels` under the mapping, canonical order.
LabelSet mapped_label_set(const std::vector<std::string>& source_labels, const LabelMapping& mapping);

/// Wraps externally produced hard labels as an annotator.
class OneHotAnnotator final : public Annotator {
public:
    OneHotAnnotator(std::string name, std::string model, std::map<UtteranceKey, std::string> hard_labels,
                    LabelMapping mapping, std::vector<std::string> source_labels = kTwitterClassifierLabels);

    const AnnotatorId& id() const override { return id_; }
    const LabelSet& label_set() const override { return labels_; }
    AnnotationOutcome annotate(const Dialogue& dialogue, int turn_index) override;

private:
    AnnotatorId id_;
    std::map<UtteranceKey, std::string> hard_labels_;
    LabelMapping mapping_;
    LabelSet labels_;
};

/// Reads {"labels": [{"dialogue_id", "turn_index", "label"}, ...]}.
std::map<UtteranceKey, std::string> load_hard_labels(const std::filesystem::path& path);

struct CorpusAnnotation {
    AnnotationSet set;
    std::size_t newly_annotated = 0;
    std::size_t from_cache = 0;
    std::size_t failed = 0;
    std::size_t transport_failures = 0;
};

/// Annotates every utterance with up to `parallelism` workers. The result
/// does not depend on the worker count. Only cache corruption aborts.
CorpusAnnotation annotate_corpus(Annotator& annotator, const Corpus& corpus, int parallelism = 1);

}  // namespace dyad
