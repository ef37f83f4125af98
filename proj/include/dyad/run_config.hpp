#pragma once

#include "dyad/analysis.hpp"
#include "dyad/annotate.hpp"
#include "dyad/corpus.hpp"
#include "dyad/llm_client.hpp"
#include "dyad/prompt.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dyad {

inline constexpr std::string_view kRunConfigVersion = "1";

struct LlmAnnotatorSpec {
    ProviderConfig provider;
    PromptConfig prompt;
    std::optional<std::filesystem::path> icl_examples_file;
    int max_attempts = kDefaultMaxAttempts;
};

struct OneHotAnnotatorSpec {
    std::string model = "one-hot";
    std::filesystem::path labels_file;
    LabelMapping mapping = LabelMapping::default_mapping();
    std::vector<std::string> source_labels = kTwitterClassifierLabels;
};

struct AnnotatorSpec {
    std::string label;
    std::variant<LlmAnnotatorSpec, OneHotAnnotatorSpec> kind;
};

enum class FrustrationScope { dyad, per_role, both };

struct AnalysisSelection {
    bool frustration = true;
    FrustrationScope frustration_scope = FrustrationScope::dyad;
    bool svi = true;
    bool ablation = true;
    PredictorScheme predictor_scheme = PredictorScheme::both_sides;
    std::vector<EmotionLabel> trajectory_emotions{EmotionLabel::anger, EmotionLabel::compassion};
    int max_turn = kDefaultMaxTurn;
};

struct BenchmarkSpec {
    std::optional<std::filesystem::path> human_annotations;
    std::size_t sample_size = 100;
    bool svi_comparison = true;
};

struct RunConfig {
    std::string config_version{kRunConfigVersion};
    std::filesystem::path corpus;
    ScaleRange scale;
    std::vector<AnnotatorSpec> annotators;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path output_dir = "out";
    AnalysisSelection analysis;
    BenchmarkSpec benchmark;
    int parallelism = 4;
    std::uint64_t seed = 42;
    /// Analyses abort when an annotator failed on more than this fraction.
    double failure_threshold = 0.05;

    const AnnotatorSpec* find_annotator(std::string_view label) const;
};

/// Relative paths resolve against `base_dir`. Throws ConfigError.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
void validate_run_config(const RunConfig& cfg);
/// Effective configuration, written next to outputs for provenance.
std::string serialize_run_config(const RunConfig& cfg);

}  // namespace dyad
