#pragma once

#include "dyad/annotate.hpp"
#include "dyad/corpus.hpp"

#include <cstdint>

namespace dyad {

/// Controls the planted-signal generator. One SVI cell is an exact linear
/// function of one party's mean intensity for one emotion plus Gaussian
/// noise; every other self-report is independent uniform noise, except
/// frustration, which rises with anger and falls with joy.
struct SyntheticOptions {
    std::size_t dialogues = 200;
    std::uint64_t seed = 20240628;
    double noise_sigma = 0.01;
    Role planted_role = Role::buyer;
    SviSubscale planted_scale = SviSubscale::process;
    EmotionLabel planted_emotion = EmotionLabel::anger;
    double planted_intercept = 2.0;
    double planted_slope = 4.0;
    int min_turns = 6;
    int max_turns = 16;
};

struct SyntheticData {
    Corpus corpus;
    /// Vectors the planted cell was computed from.
    AnnotationSet planted;
    /// Independent random vectors for the same utterances.
    AnnotationSet noise;
};

SyntheticData generate_planted_signal(const SyntheticOptions& options = {});

}  // namespace dyad
