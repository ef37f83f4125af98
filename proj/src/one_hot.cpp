#include "dyad/annotate.hpp"

#include "dyad/util.hpp"

#include <json.hpp>

#include <cctype>

namespace dyad {

namespace {

std::string normalize_label(std::string_view s) {
    std::string out(trim(s));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

LabelMapping LabelMapping::default_mapping() {
    LabelMapping m;
    m.overrides.emplace("love", EmotionLabel::compassion);
    return m;
}

std::optional<EmotionLabel> LabelMapping::map(std::string_view hard_label) const {
    const auto name = normalize_label(hard_label);
    if (auto it = overrides.find(name); it != overrides.end()) return it->second;
    return parse_emotion_label(name);
}

EmotionVector one_hot_adapter(std::string_view hard_label, const LabelMapping& mapping) {
    if (auto label = mapping.map(hard_label)) return EmotionVector::one_hot(*label);
    throw UnmappedLabelError("hard label '" + std::string(hard_label) + "' has no emotion mapping");
}

LabelSet mapped_label_set(const std::vector<std::string>& source_labels, const LabelMapping& mapping) {
    LabelSet out;
    for (const auto& s : source_labels) {
        auto label = mapping.map(s);
        if (!label) throw UnmappedLabelError("source label '" + s + "' has no emotion mapping");
        out.push_back(*label);
    }
    return canonicalize(std::move(out));
}

OneHotAnnotator::OneHotAnnotator(std::string name, std::string model,
                                 std::map<UtteranceKey, std::string> hard_labels, LabelMapping mapping,
                                 std::vector<std::string> source_labels)
    : hard_labels_(std::move(hard_labels)), mapping_(std::move(mapping)),
      labels_(mapped_label_set(source_labels, mapping_)) {
    std::string digest = "one-hot";
    for (const auto& [k, v] : mapping_.overrides) digest += "|" + k + "=" + std::string(to_string(v));
    for (const auto& s : source_labels) digest += "|" + s;
    id_ = {std::move(name), std::move(model), hex64(fnv1a64(digest))};
}

AnnotationOutcome OneHotAnnotator::annotate(const Dialogue& dialogue, int turn_index) {
    auto it = hard_labels_.find({dialogue.id, turn_index});
    if (it == hard_labels_.end()) {
        return {std::nullopt, 0, false, "no hard label for " + to_string(UtteranceKey{dialogue.id, turn_index})};
    }
    try {
        auto v = one_hot_adapter(it->second, mapping_);
        if (!contains(labels_, v.argmax())) {
            return {std::nullopt, 1, false, "hard label '" + it->second + "' is outside the classifier schema"};
        }
        return {v, 1, false, ""};
    } catch (const UnmappedLabelError& e) {
        return {std::nullopt, 1, false, e.what()};
    }
}

std::map<UtteranceKey, std::string> load_hard_labels(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", path.string(), std::string("malformed label file: ") + e.what());
    }
    std::map<UtteranceKey, std::string> out;
    try {
        for (const auto& e : j.at("labels")) {
            UtteranceKey key{e.at("dialogue_id").get<std::string>(), e.at("turn_index").get<int>()};
            if (!out.emplace(key, e.at("label").get<std::string>()).second) {
                throw SchemaError(key.dialogue_id, "turn_index", "duplicate hard label for " + to_string(key));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("", path.string(), e.what());
    }
    return out;
}

}  // namespace dyad
