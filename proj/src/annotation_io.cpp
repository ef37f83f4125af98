#include "dyad/annotation_io.hpp"

#include "dyad/util.hpp"

#include <json.hpp>

namespace dyad {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string serialize_annotation_set(const AnnotationSet& set) {
    ordered_json j;
    j["annotator"] = {{"name", set.annotator.name},
                      {"model", set.annotator.model_identifier},
                      {"prompt_hash", set.annotator.prompt_config_hash}};
    auto labels = ordered_json::array();
    for (auto l : set.label_set) labels.push_back(std::string(to_string(l)));
    j["labels"] = std::move(labels);
    auto entries = ordered_json::array();
    for (const auto& [key, v] : set.entries) {
        ordered_json e;
        e["dialogue_id"] = key.dialogue_id;
        e["turn_index"] = key.turn_index;
        ordered_json w;
        for (auto l : kCanonicalLabels) w[std::string(to_string(l))] = v[l];
        e["weights"] = std::move(w);
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    auto failures = ordered_json::array();
    for (const auto& [key, f] : set.failures) {
        failures.push_back(ordered_json{{"dialogue_id", key.dialogue_id},
                                        {"turn_index", key.turn_index},
                                        {"attempts", f.attempts},
                                        {"error", f.error}});
    }
    j["failures"] = std::move(failures);
    return j.dump(1) + "\n";
}

AnnotationSet parse_annotation_set(std::string_view text) {
    AnnotationSet set;
    try {
        const auto j = json::parse(text);
        const auto& a = j.at("annotator");
        set.annotator = {a.at("name").get<std::string>(), a.at("model").get<std::string>(),
                         a.at("prompt_hash").get<std::string>()};
        set.label_set.clear();
        for (const auto& l : j.at("labels")) set.label_set.push_back(emotion_label_from_string(l.get<std::string>()));
        validate_label_set(set.label_set);
        for (const auto& e : j.at("entries")) {
            UtteranceKey key{e.at("dialogue_id").get<std::string>(), e.at("turn_index").get<int>()};
            EmotionVector::Weights w{};
            for (auto l : kCanonicalLabels) w[index_of(l)] = e.at("weights").at(std::string(to_string(l))).get<double>();
            if (!set.entries.emplace(key, EmotionVector::from_weights(w)).second) {
                throw SchemaError(key.dialogue_id, "entries", "duplicate entry for " + to_string(key));
            }
        }
        for (const auto& f : j.at("failures")) {
            UtteranceKey key{f.at("dialogue_id").get<std::string>(), f.at("turn_index").get<int>()};
            set.failures.emplace(key, AnnotationFailure{f.at("attempts").get<int>(), f.value("error", std::string{})});
        }
    } catch (const json::exception& e) {
        throw SchemaError("", "", std::string("annotation set: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError("", "entries", std::string("annotation set: ") + e.what());
    } catch (const ConfigError& e) {
        throw SchemaError("", "labels", e.what());
    }
    return set;
}

void write_annotation_set(const AnnotationSet& set, const std::filesystem::path& path) {
    write_text_file(path, serialize_annotation_set(set));
}

AnnotationSet read_annotation_set(const std::filesystem::path& path) {
    return parse_annotation_set(read_text_file(path));
}

}  // namespace dyad
