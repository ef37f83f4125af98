#include "dyad/analysis.hpp"

#include "dyad/util.hpp"

#include <json.hpp>

#include <cmath>

namespace dyad {

HumanAnnotations parse_human_annotations(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", "", std::string("malformed human annotation file: ") + e.what());
    }
    HumanAnnotations out;
    try {
        for (const auto& l : j.at("labels")) out.label_set.push_back(emotion_label_from_string(l.get<std::string>()));
        validate_label_set(out.label_set);
        out.label_set = canonicalize(out.label_set);
        const auto& anns = j.at("annotations");
        for (std::size_t i = 0; i < anns.size(); ++i) {
            const auto& a = anns[i];
            const std::string where = "annotations[" + std::to_string(i) + "]";
            HumanAnnotation h;
            h.annotator = a.at("annotator").get<std::string>();
            h.key = {a.at("dialogue_id").get<std::string>(), a.at("turn_index").get<int>()};
            EmotionVector::Weights w{};
            for (const auto& [name, value] : a.at("weights").items()) {
                auto label = parse_emotion_label(name);
                if (!label || !contains(out.label_set, *label)) {
                    throw SchemaError(h.key.dialogue_id, where + ".weights." + name, "label outside the human schema");
                }
                const double v = value.get<double>();
                if (!std::isfinite(v) || v < 0.0) {
                    throw SchemaError(h.key.dialogue_id, where + ".weights." + name, "weight must be non-negative");
                }
                w[index_of(*label)] = v;
            }
            try {
                h.vector = EmotionVector::normalized(w);
            } catch (const std::invalid_argument& e) {
                throw SchemaError(h.key.dialogue_id, where + ".weights", e.what());
            }
            out.records.push_back(std::move(h));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("", "", std::string("human annotation file: ") + e.what());
    } catch (const ConfigError& e) {
        throw SchemaError("", "labels", e.what());
    }
    return out;
}

HumanAnnotations load_human_annotations(const std::filesystem::path& path) {
    return parse_human_annotations(read_text_file(path));
}

}  // namespace dyad
