#include "dyad/prompt.hpp"

#include "dyad/error.hpp"
#include "dyad/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace dyad {

using ordered_json = nlohmann::ordered_json;

void validate_prompt_config(const PromptConfig& cfg) {
    validate_label_set(cfg.label_set);
    if (cfg.history_turns && *cfg.history_turns < 0) throw ConfigError("history_turns must be >= 0");
}

std::string prompt_config_hash(const PromptConfig& cfg) {
    ordered_json j;
    j["system"] = cfg.system_role_text;
    j["history"] = cfg.history_turns ? ordered_json(*cfg.history_turns) : ordered_json(nullptr);
    auto icl = ordered_json::array();
    for (const auto& ex : cfg.icl_examples) {
        auto w = ordered_json::array();
        for (double v : ex.gold.weights()) w.push_back(format_double(v));
        icl.push_back({std::string(to_string(ex.speaker)), ex.text, w});
    }
    j["icl"] = std::move(icl);
    auto labels = ordered_json::array();
    for (auto l : cfg.label_set) labels.push_back(std::string(to_string(l)));
    j["labels"] = std::move(labels);
    j["structured"] = cfg.require_structured_output;
    return hex64(fnv1a64(j.dump()));
}

ChatRequest Prompt::to_request(bool json_response) const {
    ChatRequest r;
    r.messages.push_back({ChatRole::system, system});
    r.messages.push_back({ChatRole::user, user});
    r.json_response = json_response;
    return r;
}

std::string serialize_emotion_vector(const EmotionVector& v, const LabelSet& labels) {
    std::string out = "{";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += '"';
        out += to_string(labels[i]);
        out += "\": ";
        out += format_double(v[labels[i]]);
    }
    return out + "}";
}

namespace {

std::string label_list(const LabelSet& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += to_string(labels[i]);
    }
    return out;
}

// Gold weights shown for an example, rescaled onto the prompt's label set.
std::optional<EmotionVector> restrict_gold(const EmotionVector& gold, const LabelSet& labels) {
    EmotionVector::Weights w{};
    double mass = 0.0;
    for (auto l : labels) {
        w[index_of(l)] = gold[l];
        mass += gold[l];
    }
    if (!(mass > 0.0)) return std::nullopt;
    return EmotionVector::normalized(w);
}

std::string turn_line(const Utterance& u) {
    return "[Turn " + std::to_string(u.turn_index) + "] " + std::string(to_string(u.speaker)) + ": " + u.text;
}

}  // namespace

Prompt build_prompt(const Dialogue& dialogue, int target_turn, const PromptConfig& cfg) {
    const auto n = static_cast<int>(dialogue.turns.size());
    if (target_turn < 1 || target_turn > n) {
        throw std::out_of_range("target turn " + std::to_string(target_turn) + " outside dialogue '" +
                                dialogue.id + "' of " + std::to_string(n) + " turns");
    }
    validate_prompt_config(cfg);

    Prompt p;
    p.system = cfg.system_role_text;

    std::string u = "Label the emotions expressed by the speaker of the target turn, using only these labels: " +
                    label_list(cfg.label_set) + ".\n";

    int shown = 0;
    std::string examples;
    for (const auto& ex : cfg.icl_examples) {
        auto gold = restrict_gold(ex.gold, cfg.label_set);
        if (!gold) continue;
        ++shown;
        examples += "\nExample " + std::to_string(shown) + "\n" + std::string(to_string(ex.speaker)) + ": " +
                    ex.text + "\nAnswer: " + serialize_emotion_vector(*gold, cfg.label_set) + "\n";
    }
    if (shown > 0) u += "\nLabelled examples from other disputes:\n" + examples;

    const int available = target_turn - 1;
    const int window = cfg.history_turns ? std::min(*cfg.history_turns, available) : available;
    if (window > 0) {
        u += "\nDialogue history (oldest first):\n";
        for (int t = target_turn - window; t < target_turn; ++t) u += turn_line(dialogue.turn(t)) + "\n";
    }

    u += "\nTarget turn:\n";
    u += kTargetOpen;
    u += "\n" + turn_line(dialogue.turn(target_turn)) + "\n";
    u += kTargetClose;
    u += "\n\nAllocate a weight between 0 and 1 to each of the labels " + label_list(cfg.label_set) +
         " so that the weights sum to one. Reply with only a JSON object mapping every label to its "
         "weight, for example {";
    for (std::size_t i = 0; i < cfg.label_set.size(); ++i) {
        if (i) u += ", ";
        u += "\"" + std::string(to_string(cfg.label_set[i])) + "\": 0.0";
    }
    u += "}.";
    p.user = std::move(u);
    return p;
}

std::string extract_target_utterance(std::string_view text) {
    const auto open = text.find(kTargetOpen);
    if (open == std::string_view::npos) return {};
    const auto start = open + kTargetOpen.size();
    const auto close = text.find(kTargetClose, start);
    if (close == std::string_view::npos) return {};
    auto body = trim(text.substr(start, close - start));
    // Strip "[Turn N] role: ".
    if (body.rfind("[Turn ", 0) == 0) {
        const auto colon = body.find(": ");
        if (colon != std::string_view::npos) body = body.substr(colon + 2);
    }
    return std::string(body);
}

std::vector<IclExample> load_icl_examples(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", path.string(), std::string("malformed ICL file: ") + e.what());
    }
    if (!j.is_array()) throw SchemaError("", path.string(), "ICL file must hold an array");
    std::vector<IclExample> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        const std::string where = path.filename().string() + "[" + std::to_string(i) + "]";
        try {
            IclExample ex;
            auto role = parse_role(e.at("speaker").get<std::string>());
            if (!role) throw SchemaError("", where + ".speaker", "speaker must be 'buyer' or 'seller'");
            ex.speaker = *role;
            ex.text = e.at("text").get<std::string>();
            EmotionVector::Weights w{};
            const auto& jw = e.at("weights");
            for (auto l : kCanonicalLabels) w[index_of(l)] = jw.at(std::string(to_string(l))).get<double>();
            if (jw.size() != kEmotionCount) throw SchemaError("", where + ".weights", "unexpected label");
            ex.gold = EmotionVector::from_weights(w);
            out.push_back(std::move(ex));
        } catch (const nlohmann::json::exception& err) {
            throw SchemaError("", where, err.what());
        } catch (const std::invalid_argument& err) {
            throw SchemaError("", where + ".weights", err.what());
        }
    }
    return out;
}

}  // namespace dyad
