#include "dyad/annotate.hpp"

#include <json.hpp>

#include <fstream>

namespace dyad {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string AnnotationCache::encode(const CacheRecord& r) {
    ordered_json j;
    j["name"] = r.annotator.name;
    j["model"] = r.annotator.model_identifier;
    j["prompt_hash"] = r.annotator.prompt_config_hash;
    j["dialogue_id"] = r.key.dialogue_id;
    j["turn_index"] = r.key.turn_index;
    if (r.vector) {
        auto w = ordered_json::array();
        for (double v : r.vector->weights()) w.push_back(v);
        j["weights"] = std::move(w);
    } else {
        j["weights"] = nullptr;
    }
    j["attempts"] = r.attempts;
    if (!r.error.empty()) j["error"] = r.error;
    j["timestamp"] = r.timestamp;
    return j.dump();
}

CacheRecord AnnotationCache::decode(const std::string& line) {
    try {
        const auto j = json::parse(line);
        CacheRecord r;
        r.annotator.name = j.at("name").get<std::string>();
        r.annotator.model_identifier = j.at("model").get<std::string>();
        r.annotator.prompt_config_hash = j.at("prompt_hash").get<std::string>();
        r.key.dialogue_id = j.at("dialogue_id").get<std::string>();
        r.key.turn_index = j.at("turn_index").get<int>();
        const auto& w = j.at("weights");
        if (!w.is_null()) {
            if (!w.is_array() || w.size() != kEmotionCount) throw CacheCorruptionError("weights must hold 7 numbers");
            EmotionVector::Weights arr{};
            for (std::size_t i = 0; i < kEmotionCount; ++i) arr[i] = w[i].get<double>();
            r.vector = EmotionVector::from_weights(arr);
        }
        r.attempts = j.at("attempts").get<int>();
        r.error = j.value("error", std::string{});
        r.timestamp = j.value("timestamp", std::string{});
        return r;
    } catch (const CacheCorruptionError&) {
        throw;
    } catch (const std::exception& e) {
        throw CacheCorruptionError(std::string("bad cache record: ") + e.what());
    }
}

AnnotationCache::AnnotationCache(std::filesystem::path file) : file_(std::move(file)) {
    if (file_->has_parent_path()) std::filesystem::create_directories(file_->parent_path());
    std::ifstream in(*file_);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto r = decode(line);
            auto key = std::make_pair(r.annotator, r.key);
            records_.insert_or_assign(std::move(key), std::move(r));
        } catch (const CacheCorruptionError& e) {
            throw CacheCorruptionError(file_->string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::optional<CacheRecord> AnnotationCache::lookup(const AnnotatorId& id, const UtteranceKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find({id, key});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void AnnotationCache::store(CacheRecord record) {
    std::lock_guard lock(mutex_);
    if (file_) {
        const auto line = encode(record) + "\n";
        std::ofstream out(*file_, std::ios::app | std::ios::binary);
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        out.flush();
        if (!out) throw IoError("cannot append to annotation cache '" + file_->string() + "'");
    }
    auto key = std::make_pair(record.annotator, record.key);
    records_.insert_or_assign(std::move(key), std::move(record));
}

std::size_t AnnotationCache::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

AnnotationSet AnnotationCache::reconstruct(const AnnotatorId& id, const LabelSet& labels) const {
    std::lock_guard lock(mutex_);
    AnnotationSet set;
    set.annotator = id;
    set.label_set = labels;
    for (const auto& [k, r] : records_) {
        if (k.first != id) continue;
        if (r.vector) {
            set.entries.emplace(r.key, *r.vector);
        } else {
            set.failures.emplace(r.key, AnnotationFailure{r.attempts, r.error});
        }
    }
    return set;
}

}  // namespace dyad
