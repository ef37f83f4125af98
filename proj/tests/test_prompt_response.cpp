#include "support.hpp"

#include "dyad/error.hpp"
#include "dyad/prompt.hpp"
#include "dyad/response.hpp"

#include <doctest.h>

using namespace dyad;
using namespace dyad::test;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

ResponseErrorKind kind_of(std::string_view raw, const LabelSet& labels = canonical_label_set()) {
    try {
        parse_annotation_response(raw, labels);
    } catch (const ResponseError& e) {
        return e.kind();
    }
    FAIL("expected a ResponseError for: " << raw);
    return ResponseErrorKind::unparseable;
}

}  // namespace

TEST_SUITE("prompt") {
    TEST_CASE("zero history shows only the target") {
        const auto d = alternating_dialogue("p", Outcome::resolved, Role::buyer, 6);
        PromptConfig cfg;
        cfg.history_turns = 0;
        const auto p = build_prompt(d, 5, cfg);
        CHECK(p.user.find("p turn 5") != std::string::npos);
        for (int t = 1; t <= 4; ++t) CHECK(p.user.find("p turn " + std::to_string(t)) == std::string::npos);
        CHECK(p.user.find("Dialogue history") == std::string::npos);
        CHECK(extract_target_utterance(p.user) == "p turn 5");
    }

    TEST_CASE("unlimited history shows every earlier turn") {
        const auto d = alternating_dialogue("p", Outcome::resolved, Role::buyer, 6);
        const auto p = build_prompt(d, 3, PromptConfig{});
        CHECK(p.user.find("[Turn 1] buyer: p turn 1") != std::string::npos);
        CHECK(p.user.find("[Turn 2] seller: p turn 2") != std::string::npos);
        CHECK(p.user.find("p turn 4") == std::string::npos);
        CHECK(count(p.user, "[Turn ") == 3);
    }

    TEST_CASE("bounded history on the fixture") {
        const auto c = parse_corpus(data_path("fixtures/corpus_fixture.json"));
        const auto& d = *c.find("d01");
        PromptConfig cfg;
        cfg.history_turns = 4;
        const auto p = build_prompt(d, 10, cfg);
        const auto hist_start = p.user.find("Dialogue history");
        const auto target_start = p.user.find(kTargetOpen);
        REQUIRE(hist_start != std::string::npos);
        const std::string history = p.user.substr(hist_start, target_start - hist_start);
        for (int t = 1; t <= 9; ++t) {
            const bool expected = t >= 6;
            CHECK_MESSAGE((history.find(d.turn(t).text) != std::string::npos) == expected, "turn " << t);
        }
        CHECK(history.find("[Turn 6] seller: ") != std::string::npos);
        CHECK(history.find("[Turn 9] buyer: ") != std::string::npos);
        CHECK(extract_target_utterance(p.user) == d.turn(10).text);
    }

    TEST_CASE("prompt sections appear in order") {
        const auto d = alternating_dialogue("p", Outcome::impasse, Role::seller, 4);
        PromptConfig cfg;
        cfg.icl_examples = load_icl_examples(data_path("icl_examples.json"));
        REQUIRE(cfg.icl_examples.size() == 7);
        const auto p = build_prompt(d, 4, cfg);
        CHECK(p.system == std::string(kDefaultSystemRole));
        const auto ex = p.user.find("Example 1");
        const auto hist = p.user.find("Dialogue history");
        const auto target = p.user.find(kTargetOpen);
        const auto instr = p.user.find("sum to one");
        CHECK(ex < hist);
        CHECK(hist < target);
        CHECK(target < instr);
        CHECK(count(p.user, "Answer: {") == 7);
        const auto req = p.to_request(true);
        REQUIRE(req.messages.size() == 2);
        CHECK(req.messages[0].role == ChatRole::system);
        CHECK(req.messages[1].content == p.user);
        CHECK_THROWS_AS(build_prompt(d, 0, cfg), std::out_of_range);
        CHECK_THROWS_AS(build_prompt(d, 5, cfg), std::out_of_range);
    }

    TEST_CASE("restricted label set rescales example answers") {
        const auto d = alternating_dialogue("p", Outcome::resolved, Role::buyer, 2);
        PromptConfig cfg;
        cfg.label_set = {EmotionLabel::anger, EmotionLabel::neutral};
        cfg.icl_examples.push_back({Role::buyer, "angry text", vec({{EmotionLabel::anger, 0.5}, {EmotionLabel::joy, 0.5}})});
        cfg.icl_examples.push_back({Role::buyer, "joyful text", EmotionVector::one_hot(EmotionLabel::joy)});
        const auto p = build_prompt(d, 2, cfg);
        CHECK(p.user.find("Answer: {\"anger\": 1, \"neutral\": 0}") != std::string::npos);
        // An example with no mass on the label set is skipped.
        CHECK(p.user.find("joyful text") == std::string::npos);
        CHECK(p.user.find("\"surprise\"") == std::string::npos);
    }

    TEST_CASE("config hash tracks prompt-affecting fields") {
        PromptConfig a;
        PromptConfig b;
        CHECK(prompt_config_hash(a) == prompt_config_hash(b));
        b.history_turns = 3;
        CHECK(prompt_config_hash(a) != prompt_config_hash(b));
        b = a;
        b.system_role_text += " ";
        CHECK(prompt_config_hash(a) != prompt_config_hash(b));
        b = a;
        b.label_set.pop_back();
        CHECK(prompt_config_hash(a) != prompt_config_hash(b));
        PromptConfig bad;
        bad.history_turns = -1;
        CHECK_THROWS_AS(validate_prompt_config(bad), ConfigError);
    }
}

TEST_SUITE("response") {
    TEST_CASE("already normalized reply is taken as is") {
        const auto v = parse_annotation_response(R"({"anger": 0.7, "neutral": 0.3})", canonical_label_set());
        CHECK(v[EmotionLabel::anger] == 0.7);
        CHECK(v[EmotionLabel::neutral] == 0.3);
        CHECK(v[EmotionLabel::joy] == 0.0);
    }

    TEST_CASE("sum within the window is rescaled") {
        const auto v = parse_annotation_response(
            R"({"joy": 0.15, "anger": 0.15, "fear": 0.15, "surprise": 0.15, "compassion": 0.15, "sadness": 0.15, "neutral": 0.15})",
            canonical_label_set());
        for (auto l : kCanonicalLabels) CHECK(v[l] == doctest::Approx(0.15 / 1.05).epsilon(1e-15));
        CHECK(v[EmotionLabel::joy] == doctest::Approx(0.142857).epsilon(1e-6));
    }

    TEST_CASE("wrapped, nested and differently cased replies") {
        const auto labels = canonical_label_set();
        const auto a = parse_annotation_response("Sure! ```json\n{\"Anger\": 0.5, \"NEUTRAL\": 0.5}\n```", labels);
        CHECK(a[EmotionLabel::anger] == 0.5);
        const auto b = parse_annotation_response(R"({"emotions": {"joy": 1.0}})", labels);
        CHECK(b[EmotionLabel::joy] == 1.0);
        const auto c = parse_annotation_response(R"({"joy": 1.0, "reasoning": "they thank the seller"})", labels);
        CHECK(c[EmotionLabel::joy] == 1.0);
    }

    TEST_CASE("invalid replies raise typed errors") {
        CHECK(kind_of(R"({"anger": -0.2, "neutral": 1.2})") == ResponseErrorKind::negative_weight);
        CHECK(kind_of("I think anger") == ResponseErrorKind::unparseable);
        CHECK(kind_of("{anger: 1}") == ResponseErrorKind::unparseable);
        CHECK(kind_of(R"([1, 2])") == ResponseErrorKind::unparseable);
        CHECK(kind_of(R"({"anger": "high"})") == ResponseErrorKind::non_numeric);
        CHECK(kind_of(R"({"contempt": 1.0})") == ResponseErrorKind::unknown_label);
        CHECK(kind_of(R"({"anger": 0.5})") == ResponseErrorKind::sum_out_of_range);
        CHECK(kind_of(R"({"anger": 0.7, "joy": 0.7})") == ResponseErrorKind::sum_out_of_range);
        CHECK(kind_of(R"({"anger": 0.5, "Anger": 0.5})") == ResponseErrorKind::unparseable);
        CHECK(kind_of("{}") == ResponseErrorKind::sum_out_of_range);
        // A label outside a restricted schema counts as unknown.
        CHECK(kind_of(R"({"surprise": 1.0})", {EmotionLabel::joy, EmotionLabel::neutral}) ==
              ResponseErrorKind::unknown_label);
    }

    TEST_CASE("restricted schema leaves other labels at zero") {
        const LabelSet six{EmotionLabel::joy, EmotionLabel::anger, EmotionLabel::fear, EmotionLabel::compassion,
                           EmotionLabel::sadness, EmotionLabel::neutral};
        const auto v = parse_annotation_response(R"({"joy": 0.2, "sadness": 0.8})", six);
        CHECK(v[EmotionLabel::surprise] == 0.0);
        CHECK(v.sum() == doctest::Approx(1.0));
    }

    TEST_CASE("serialized vectors parse back to themselves") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 200; ++i) {
            const auto v = random_simplex(rng);
            const auto back = parse_annotation_response(serialize_emotion_vector(v, canonical_label_set()),
                                                        canonical_label_set());
            for (auto l : kCanonicalLabels) CHECK(back[l] == doctest::Approx(v[l]).epsilon(1e-15));
        }
    }
}
