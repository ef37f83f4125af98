#pragma once

#include "dyad/corpus.hpp"
#include "dyad/emotion.hpp"
#include "dyad/llm_client.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyad {

inline constexpr std::string_view kDefaultSystemRole =
    "You are a good emotion classification tool. You read turns from a dispute between a buyer "
    "and a seller and judge which emotions the speaker expresses.";

/// A hand-labelled turn shown to the model as a worked example.
struct IclExample {
    Role speaker = Role::buyer;
    std::string text;
    EmotionVector gold = EmotionVector::one_hot(EmotionLabel::neutral);
};

struct PromptConfig {
    std::string system_role_text{kDefaultSystemRole};
    /// Prior turns to include; nullopt means the whole preceding dialogue.
    std::optional<int> history_turns;
    std::vector<IclExample> icl_examples;
    LabelSet label_set = canonical_label_set();
    bool require_structured_output = true;
};

/// Throws ConfigError for an empty/duplicated label set or negative history.
void validate_prompt_config(const PromptConfig& cfg);

/// Stable digest of everything in the config that affects the prompt.
std::string prompt_config_hash(const PromptConfig& cfg);

struct Prompt {
    std::string system;
    std::string user;

    ChatRequest to_request(bool json_response) const;
};

inline constexpr std::string_view kTargetOpen = "<<<TARGET>>>";
inline constexpr std::string_view kTargetClose = "<<<END TARGET>>>";

/// Assembles, in order: role text (system message), worked examples with
/// their gold weights, the history window with speaker tags, the delimited
/// target utterance and the answer-format instruction.
/// Throws std::out_of_range if target_turn is not a turn of the dialogue.
Prompt build_prompt(const Dialogue& dialogue, int target_turn, const PromptConfig& cfg);

/// Text between the target delimiters of a built prompt, without the speaker
/// tag. Empty when there is no delimited target.
std::string extract_target_utterance(std::string_view prompt_text);

/// The answer format the prompt asks for, restricted to `labels`.
std::string serialize_emotion_vector(const EmotionVector& v, const LabelSet& labels);

/// ICL file: JSON array of {"speaker", "text", "weights": {label: w, ...}}
/// with all seven labels present.
std::vector<IclExample> load_icl_examples(const std::filesystem::path& path);

}  // namespace dyad
