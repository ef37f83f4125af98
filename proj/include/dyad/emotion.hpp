#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyad {

enum class EmotionLabel : std::uint8_t { joy, anger, fear, surprise, compassion, sadness, neutral };

inline constexpr std::size_t kEmotionCount = 7;

inline constexpr std::array<EmotionLabel, kEmotionCount> kCanonicalLabels{
    EmotionLabel::joy,        EmotionLabel::anger,   EmotionLabel::fear,   EmotionLabel::surprise,
    EmotionLabel::compassion, EmotionLabel::sadness, EmotionLabel::neutral};

/// Absolute tolerance on the simplex constraint.
inline constexpr double kSimplexTolerance = 1e-6;

std::string_view to_string(EmotionLabel label);
std::optional<EmotionLabel> parse_emotion_label(std::string_view name);
EmotionLabel emotion_label_from_string(std::string_view name);

inline constexpr std::size_t index_of(EmotionLabel label) {
    return static_cast<std::size_t>(label);
}

/// Ordered, duplicate-free set of labels an annotator can emit.
using LabelSet = std::vector<EmotionLabel>;

LabelSet canonical_label_set();
void validate_label_set(const LabelSet& labels);
bool contains(const LabelSet& labels, EmotionLabel label);
/// Labels present in both sets, in canonical order.
LabelSet intersect(const LabelSet& a, const LabelSet& b);
/// Sorts into canonical order.
LabelSet canonicalize(LabelSet labels);

/// Non-negative weights over the canonical labels summing to one.
class EmotionVector {
public:
    using Weights = std::array<double, kEmotionCount>;

    /// Validates without rescaling. Throws std::invalid_argument when a
    /// weight is negative or non-finite or the sum misses 1 by more than
    /// kSimplexTolerance.
    static EmotionVector from_weights(const Weights& weights);
    /// Divides non-negative weights by their (positive) sum.
    static EmotionVector normalized(const Weights& weights);
    static EmotionVector one_hot(EmotionLabel label);

    double operator[](EmotionLabel label) const { return weights_[index_of(label)]; }
    const Weights& weights() const { return weights_; }
    double sum() const;
    /// Ties go to the first label in canonical order.
    EmotionLabel argmax() const;

    friend bool operator==(const EmotionVector&, const EmotionVector&) = default;

private:
    explicit EmotionVector(const Weights& weights) : weights_(weights) {}
    Weights weights_;
};

}  // namespace dyad
