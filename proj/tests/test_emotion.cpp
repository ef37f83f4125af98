#include "support.hpp"

#include "dyad/error.hpp"
#include "dyad/stats.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace dyad;
using namespace dyad::test;

TEST_SUITE("emotion") {
    TEST_CASE("labels round trip through their names") {
        for (auto l : kCanonicalLabels) CHECK(emotion_label_from_string(to_string(l)) == l);
        CHECK_FALSE(parse_emotion_label("love").has_value());
        CHECK_THROWS_AS(emotion_label_from_string("disgust"), ConfigError);
        CHECK(to_string(kCanonicalLabels.front()) == "joy");
        CHECK(to_string(kCanonicalLabels.back()) == "neutral");
    }

    TEST_CASE("label sets") {
        CHECK(canonical_label_set().size() == kEmotionCount);
        CHECK_THROWS_AS(validate_label_set({}), ConfigError);
        CHECK_THROWS_AS(validate_label_set({EmotionLabel::joy, EmotionLabel::joy}), ConfigError);
        const LabelSet a{EmotionLabel::neutral, EmotionLabel::anger, EmotionLabel::joy};
        const LabelSet b{EmotionLabel::joy, EmotionLabel::neutral, EmotionLabel::fear};
        CHECK(intersect(a, b) == LabelSet{EmotionLabel::joy, EmotionLabel::neutral});
        CHECK(canonicalize(a) == LabelSet{EmotionLabel::joy, EmotionLabel::anger, EmotionLabel::neutral});
    }

    TEST_CASE("emotion vector construction enforces the simplex") {
        EmotionVector::Weights w{};
        w[index_of(EmotionLabel::anger)] = 0.7;
        w[index_of(EmotionLabel::neutral)] = 0.3;
        const auto v = EmotionVector::from_weights(w);
        CHECK(v[EmotionLabel::anger] == 0.7);
        CHECK(v.argmax() == EmotionLabel::anger);

        w[index_of(EmotionLabel::joy)] = -0.1;
        w[index_of(EmotionLabel::neutral)] = 0.4;
        CHECK_THROWS_AS(EmotionVector::from_weights(w), std::invalid_argument);

        EmotionVector::Weights off{};
        off[0] = 0.5;
        CHECK_THROWS_AS(EmotionVector::from_weights(off), std::invalid_argument);
        EmotionVector::Weights nan{};
        nan[0] = std::nan("");
        CHECK_THROWS_AS(EmotionVector::from_weights(nan), std::invalid_argument);
        CHECK_THROWS_AS(EmotionVector::normalized(EmotionVector::Weights{}), std::invalid_argument);

        const auto n = EmotionVector::normalized({2, 0, 0, 0, 0, 0, 2});
        CHECK(n[EmotionLabel::joy] == 0.5);
        CHECK(n[EmotionLabel::neutral] == 0.5);
        // Ties go to the first canonical label.
        CHECK(n.argmax() == EmotionLabel::joy);
    }

    TEST_CASE("one hot") {
        for (auto l : kCanonicalLabels) {
            const auto v = EmotionVector::one_hot(l);
            for (auto k : kCanonicalLabels) CHECK(v[k] == (k == l ? 1.0 : 0.0));
        }
    }

    TEST_CASE("mean of emotion vectors") {
        const auto a = vec({{EmotionLabel::anger, 0.6}, {EmotionLabel::neutral, 0.4}});
        const std::vector<EmotionVector> twice{a, a};
        CHECK(mean_vector(twice) == a);

        const std::vector<EmotionVector> mid{EmotionVector::one_hot(EmotionLabel::anger),
                                             EmotionVector::one_hot(EmotionLabel::joy)};
        const auto m = mean_vector(mid);
        CHECK(m[EmotionLabel::anger] == 0.5);
        CHECK(m[EmotionLabel::joy] == 0.5);
        CHECK(m[EmotionLabel::neutral] == 0.0);

        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<EmotionVector> vs;
            for (int i = 0; i < 5; ++i) vs.push_back(random_simplex(rng));
            const auto got = mean_vector(vs);
            const auto want = oracle_mean(vs);
            for (std::size_t k = 0; k < kEmotionCount; ++k) CHECK(got.weights()[k] == doctest::Approx(want[k]).epsilon(1e-12));
        }
        CHECK_THROWS_AS(mean_vector(std::vector<EmotionVector>{}), InsufficientDataError);
    }
}
