#include "support.hpp"

#include "dyad/error.hpp"
#include "dyad/util.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace dyad;
using namespace dyad::test;

namespace {

std::string three_dialogue_file() {
    return R"({"schema_version": "1.0", "dialogues": [
      {"id": "c", "outcome": "resolved", "turns": [
          {"turn_index": 1, "speaker": "buyer", "text": "hello"},
          {"turn_index": 2, "speaker": "seller", "text": "hi"}],
       "reports": {"buyer": {"frustration": 4.0}, "seller": {"frustration": 6.0}}},
      {"id": "a", "outcome": "impasse", "turns": [
          {"turn_index": 1, "speaker": "seller", "text": "no"}],
       "reports": {}},
      {"id": "b", "outcome": "resolved", "turns": [
          {"turn_index": 1, "speaker": "buyer", "text": "ok"}],
       "reports": {"seller": {"svi": {"outcome_feeling": 1, "process": 2, "relationship": 3, "self_feeling": 7}}}}
    ]})";
}

std::string with_turns(const std::string& turns) {
    return R"({"schema_version": "1.0", "dialogues": [{"id": "bad-one", "outcome": "resolved", "turns": [)" + turns +
           R"(], "reports": {}}]})";
}

}  // namespace

TEST_SUITE("corpus") {
    TEST_CASE("three valid dialogues load in file order") {
        const auto c = parse_corpus_text(three_dialogue_file());
        REQUIRE(c.dialogues.size() == 3);
        CHECK(c.dialogues[0].id == "c");
        CHECK(c.dialogues[1].id == "a");
        CHECK(c.dialogues[2].id == "b");
        CHECK(c.dialogues[0].turns[1].speaker == Role::seller);
        CHECK(c.dialogues[1].outcome == Outcome::impasse);
        CHECK(c.dialogues[2].reports.at(Role::seller).svi->self_feeling == 7.0);
        CHECK_FALSE(c.dialogues[2].reports.at(Role::seller).frustration.has_value());
        CHECK(c.utterance_count() == 4);
    }

    TEST_CASE("gap in turn indices names the dialogue") {
        const auto text = with_turns(R"({"turn_index": 1, "speaker": "buyer", "text": "x"},
                                        {"turn_index": 3, "speaker": "seller", "text": "y"})");
        try {
            parse_corpus_text(text);
            FAIL("expected a schema error");
        } catch (const SchemaError& e) {
            CHECK(e.dialogue_id() == "bad-one");
            CHECK(e.field().find("turn_index") != std::string::npos);
        }
    }

    TEST_CASE("schema violations are typed") {
        CHECK_THROWS_AS(parse_corpus_text(with_turns("")), SchemaError);
        CHECK_THROWS_AS(parse_corpus_text(with_turns(R"({"turn_index": 1, "speaker": "buyer", "text": "   "})")),
                        SchemaError);
        CHECK_THROWS_AS(parse_corpus_text(with_turns(R"({"turn_index": 1, "speaker": "broker", "text": "x"})")),
                        SchemaError);
        CHECK_THROWS_AS(parse_corpus_text(with_turns(R"({"turn_index": 1, "speaker": "buyer", "text": "x", "mood": 1})")),
                        SchemaError);
        CHECK_THROWS_AS(parse_corpus_text(R"({"schema_version": "2.0", "dialogues": []})"), SchemaError);
        CHECK_THROWS_AS(parse_corpus_text("{not json"), SchemaError);

        // Self-report outside the response scale.
        const std::string out_of_scale = R"({"schema_version": "1.0", "dialogues": [{"id": "s", "outcome": "resolved",
            "turns": [{"turn_index": 1, "speaker": "buyer", "text": "x"}],
            "reports": {"buyer": {"frustration": 9}}}]})";
        try {
            parse_corpus_text(out_of_scale);
            FAIL("expected a schema error");
        } catch (const SchemaError& e) {
            CHECK(e.dialogue_id() == "s");
            CHECK(e.field() == "reports.buyer.frustration");
        }
        // A wider scale accepts it.
        CHECK_NOTHROW(parse_corpus_text(out_of_scale, ScaleRange{1, 10}));
    }

    TEST_CASE("duplicate dialogue ids are rejected") {
        const std::string text = R"({"schema_version": "1.0", "dialogues": [
            {"id": "x", "outcome": "resolved", "turns": [{"turn_index": 1, "speaker": "buyer", "text": "a"}], "reports": {}},
            {"id": "x", "outcome": "resolved", "turns": [{"turn_index": 1, "speaker": "buyer", "text": "b"}], "reports": {}}]})";
        CHECK_THROWS_AS(parse_corpus_text(text), DuplicateIdError);
    }

    TEST_CASE("fixture matches its manifest") {
        const auto c = parse_corpus(data_path("fixtures/corpus_fixture.json"));
        const auto manifest = nlohmann::json::parse(read_text_file(data_path("fixtures/fixture_manifest.json")));
        CHECK(c.dialogues.size() == manifest["dialogues"].get<std::size_t>());
        CHECK(c.utterance_count() == manifest["utterances"].get<std::size_t>());
        for (const auto& [id, count] : manifest["turn_counts"].items()) {
            const auto* d = c.find(id);
            REQUIRE(d != nullptr);
            CHECK(d->turns.size() == count.get<std::size_t>());
        }
        std::vector<std::string> impasse;
        for (const auto& d : c.dialogues) {
            if (d.outcome == Outcome::impasse) {
                impasse.push_back(d.id);
                CHECK(d.turns.back().text == "I Walk Away");
            }
        }
        CHECK(impasse == manifest["impasse"].get<std::vector<std::string>>());
        CHECK(c.find("d10")->report(Role::seller) == nullptr);
    }

    TEST_CASE("dyad frustration is the mean of the two reports") {
        Dialogue d = alternating_dialogue("f", Outcome::resolved, Role::buyer, 2);
        d.reports[Role::buyer] = report(4.0);
        d.reports[Role::seller] = report(6.0);
        CHECK(dyad_frustration(d) == 5.0);
        d.reports[Role::buyer] = report(3.0);
        d.reports[Role::seller] = report(3.0);
        CHECK(dyad_frustration(d) == 3.0);

        const auto c = parse_corpus(data_path("fixtures/corpus_fixture.json"));
        // d07: buyer 2.5, seller 4.5.
        CHECK(dyad_frustration(*c.find("d07")) == doctest::Approx(3.5).epsilon(1e-15));

        d.reports.erase(Role::seller);
        CHECK_THROWS_AS(dyad_frustration(d), MissingReportError);
        CHECK_FALSE(try_dyad_frustration(d).has_value());
        d.reports[Role::seller] = SelfReport{std::nullopt, SviReport{1, 1, 1, 1}};
        CHECK_THROWS_AS(dyad_frustration(d), MissingReportError);
    }

    TEST_CASE("serialization round trips and is byte stable") {
        TempDir tmp;
        const auto c = parse_corpus(data_path("fixtures/corpus_fixture.json"));
        write_corpus(c, tmp / "a.json");
        const auto first = read_text_file(tmp / "a.json");
        const auto back = parse_corpus(tmp / "a.json");
        CHECK(back == c);
        write_corpus(back, tmp / "b.json");
        CHECK(read_text_file(tmp / "b.json") == first);

        Corpus empty;
        write_corpus(empty, tmp / "empty.json");
        const auto e = parse_corpus(tmp / "empty.json");
        CHECK(e.dialogues.empty());
        CHECK(e == empty);
    }

    TEST_CASE("round trip holds for arbitrary generated corpora") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            Corpus c;
            const int n = static_cast<int>(rng() % 5);
            for (int i = 0; i < n; ++i) {
                auto d = alternating_dialogue("g" + std::to_string(trial) + "_" + std::to_string(i),
                                              rng() % 2 ? Outcome::impasse : Outcome::resolved,
                                              rng() % 2 ? Role::seller : Role::buyer, 1 + static_cast<int>(rng() % 8));
                d.turns[0].text = "quote \" backslash \\ unicode \xc3\xa9 newline\n";
                std::uniform_real_distribution<double> u(1.0, 7.0);
                if (rng() % 2) d.reports[Role::buyer] = report(u(rng), {u(rng), u(rng), u(rng), u(rng)});
                if (rng() % 2) d.reports[Role::seller] = SelfReport{u(rng), std::nullopt};
                c.dialogues.push_back(std::move(d));
            }
            const auto text = serialize_corpus(c);
            const auto back = parse_corpus_text(text);
            CHECK(back == c);
            CHECK(serialize_corpus(back) == text);
        }
    }

    TEST_CASE("missing file is an io error") {
        CHECK_THROWS_AS(parse_corpus("/nonexistent/corpus.json"), IoError);
    }
}
