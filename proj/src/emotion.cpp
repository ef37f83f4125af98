#include "dyad/emotion.hpp"

#include "dyad/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyad {

namespace {
constexpr std::array<std::string_view, kEmotionCount> kNames{
    "joy", "anger", "fear", "surprise", "compassion", "sadness", "neutral"};
}

std::string_view to_string(EmotionLabel label) { return kNames[index_of(label)]; }

std::optional<EmotionLabel> parse_emotion_label(std::string_view name) {
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        if (kNames[i] == name) return kCanonicalLabels[i];
    }
    return std::nullopt;
}

EmotionLabel emotion_label_from_string(std::string_view name) {
    if (auto label = parse_emotion_label(name)) return *label;
    throw ConfigError("unknown emotion label '" + std::string(name) + "'");
}

LabelSet canonical_label_set() { return {kCanonicalLabels.begin(), kCanonicalLabels.end()}; }

void validate_label_set(const LabelSet& labels) {
    if (labels.empty()) throw ConfigError("label set is empty");
    std::array<bool, kEmotionCount> seen{};
    for (auto label : labels) {
        if (seen[index_of(label)]) {
            throw ConfigError("label set repeats '" + std::string(to_string(label)) + "'");
        }
        seen[index_of(label)] = true;
    }
}

bool contains(const LabelSet& labels, EmotionLabel label) {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

LabelSet intersect(const LabelSet& a, const LabelSet& b) {
    LabelSet out;
    for (auto label : kCanonicalLabels) {
        if (contains(a, label) && contains(b, label)) out.push_back(label);
    }
    return out;
}

LabelSet canonicalize(LabelSet labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

EmotionVector EmotionVector::from_weights(const Weights& weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        const double w = weights[i];
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("emotion weight for '" + std::string(kNames[i]) +
                                        "' is negative or non-finite");
        }
        s += w;
    }
    if (std::abs(s - 1.0) > kSimplexTolerance) {
        throw std::invalid_argument("emotion weights sum to " + std::to_string(s) + ", not 1");
    }
    return EmotionVector(weights);
}

EmotionVector EmotionVector::normalized(const Weights& weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        const double w = weights[i];
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("emotion weight for '" + std::string(kNames[i]) +
                                        "' is negative or non-finite");
        }
        s += w;
    }
    if (!(s > 0.0)) throw std::invalid_argument("emotion weights have zero mass");
    Weights out{};
    for (std::size_t i = 0; i < kEmotionCount; ++i) out[i] = weights[i] / s;
    return EmotionVector(out);
}

EmotionVector EmotionVector::one_hot(EmotionLabel label) {
    Weights w{};
    w[index_of(label)] = 1.0;
    return EmotionVector(w);
}

double EmotionVector::sum() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

EmotionLabel EmotionVector::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kEmotionCount; ++i) {
        if (weights_[i] > weights_[best]) best = i;
    }
    return kCanonicalLabels[best];
}

}  // namespace dyad
