#include "support.hpp"

#include "dyad/annotation_io.hpp"
#include "dyad/error.hpp"
#include "dyad/run_config.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>

using namespace dyad;
using namespace dyad::test;

namespace {

const std::string kFixtureConfig = data_path("fixtures/run_fixture.json").string();

/// Runs one subcommand of the fixture config with scratch cache and output.
CliResult fixture(const std::string& cmd, const std::filesystem::path& root, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{cmd, "-c", kFixtureConfig, "--cache-dir", (root / "cache").string(), "--output-dir",
                                  (root / "out").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_dyad(args);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("fixture config parses with resolved paths") {
        const auto cfg = load_run_config(kFixtureConfig);
        CHECK(cfg.annotators.size() == 2);
        CHECK(cfg.corpus == data_path("fixtures/corpus_fixture.json").lexically_normal());
        CHECK(cfg.analysis.predictor_scheme == PredictorScheme::own_side);
        CHECK(cfg.analysis.frustration_scope == FrustrationScope::both);
        CHECK(cfg.benchmark.sample_size == 30);
        const auto* llm = std::get_if<LlmAnnotatorSpec>(&cfg.find_annotator("mock-llm")->kind);
        REQUIRE(llm);
        CHECK_FALSE(llm->prompt.history_turns.has_value());
        CHECK(llm->icl_examples_file->filename() == "icl_examples.json");
        CHECK(cfg.find_annotator("missing") == nullptr);
    }

    TEST_CASE("invalid configurations") {
        const std::string base = R"({"config_version": "1", "corpus": "c.json", "annotators": [
            {"label": "a", "type": "one_hot", "labels_file": "x.json"}, ANN]})";
        auto with = [&](const std::string& ann) {
            std::string s = base;
            s.replace(s.find("ANN"), 3, ann);
            return s;
        };
        CHECK_NOTHROW(parse_run_config(with(R"({"label": "b", "type": "one_hot", "labels_file": "y.json"})"), "/tmp"));
        CHECK_THROWS_AS(parse_run_config(with(R"({"label": "a", "type": "one_hot", "labels_file": "y.json"})"), "/tmp"),
                        ConfigError);
        CHECK_THROWS_AS(parse_run_config(with(R"({"label": "b", "type": "rules"})"), "/tmp"), ConfigError);
        CHECK_THROWS_AS(parse_run_config("{not json", "/tmp"), ConfigError);
        CHECK_THROWS_AS(parse_run_config(R"({"config_version": "9", "corpus": "c.json", "annotators": []})", "/tmp"),
                        ConfigError);
        CHECK_THROWS_AS(load_run_config("/nonexistent/run.json"), Error);
    }

    TEST_CASE("effective config round trips") {
        const auto cfg = load_run_config(kFixtureConfig);
        const auto text = serialize_run_config(cfg);
        const auto again = parse_run_config(text, "/");
        CHECK(serialize_run_config(again) == text);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit 2") {
        CHECK(run_dyad({}).code == 2);
        CHECK(run_dyad({"frobnicate"}).code == 2);
        CHECK(run_dyad({"analyze"}).code == 2);
        CHECK(run_dyad({"analyze", "-c", "/nonexistent.json"}).code == 2);
        CHECK(run_dyad({"--help"}).code == 0);
        TempDir tmp;
        CHECK(fixture("analyze", tmp.path(), {"--annotator", "nobody"}).code == 2);
        CHECK(fixture("analyze", tmp.path(), {"--predictor-scheme", "sideways"}).code == 2);
    }

    TEST_CASE("annotate is cached and complete") {
        TempDir tmp;
        const auto first = fixture("annotate", tmp.path());
        REQUIRE_MESSAGE(first.code == 0, first.err);
        CHECK(new_requests(first.out) > 0);
        const auto corpus = parse_corpus(data_path("fixtures/corpus_fixture.json"));
        std::size_t utterances = 0;
        for (const auto& d : corpus.dialogues) utterances += d.turns.size();
        for (const std::string label : {"mock-llm", "one-hot"}) {
            const auto set = read_annotation_set(tmp / ("out/annotations/" + label + ".json"));
            CHECK(set.entries.size() + set.failures.size() == utterances);
            CHECK_NOTHROW(validate_annotation_keys(set, corpus));
        }
        const auto before = read_tree(tmp / "out/annotations");
        const auto second = fixture("annotate", tmp.path());
        REQUIRE(second.code == 0);
        CHECK(new_requests(second.out) == 0);
        CHECK(read_tree(tmp / "out/annotations") == before);
        CHECK(std::filesystem::exists(tmp / "out/manifest.annotate.json"));
        CHECK(std::filesystem::exists(tmp / "out/run_config.annotate.json"));
    }

    TEST_CASE("analyze without annotations names the annotator") {
        TempDir tmp;
        const auto r = fixture("analyze", tmp.path());
        CHECK(r.code == 1);
        CHECK(r.err.find("mock-llm") != std::string::npos);
    }

    TEST_CASE("outputs do not depend on worker count or run") {
        std::vector<std::map<std::string, std::string>> annotations, analyses;
        for (const std::string j : {"1", "8", "1"}) {
            TempDir tmp;
            REQUIRE(fixture("annotate", tmp.path(), {"-j", j}).code == 0);
            const auto a = fixture("analyze", tmp.path());
            REQUIRE_MESSAGE(a.code == 0, a.err);
            annotations.push_back(read_tree(tmp / "out/annotations"));
            analyses.push_back(read_tree(tmp / "out/analysis"));
        }
        CHECK(annotations[0].size() == 2);
        CHECK(analyses[0].count("report.json") == 1);
        CHECK(analyses[0].count("ablation.tsv") == 1);
        CHECK(analyses[0].count("trajectory_mock-llm_anger.tsv") == 1);
        // The one-hot schema has compassion (from love) so both trajectories exist.
        CHECK(analyses[0].count("trajectory_one-hot_compassion.tsv") == 1);
        CHECK(analyses[0].count("frustration_mock-llm_seller.tsv") == 1);
        for (std::size_t i = 1; i < annotations.size(); ++i) {
            CHECK(annotations[i] == annotations[0]);
            CHECK(analyses[i] == analyses[0]);
        }
    }

    TEST_CASE("benchmark is seeded") {
        TempDir tmp;
        REQUIRE(fixture("annotate", tmp.path()).code == 0);
        const auto a = fixture("benchmark", tmp.path());
        REQUIRE_MESSAGE(a.code == 0, a.err);
        const auto first = read_tree(tmp / "out/benchmark");
        CHECK(first.count("sample.tsv") == 1);
        CHECK(first.count("agreement_mock-llm.tsv") == 1);
        CHECK(first.count("svi_comparison.tsv") == 1);
        REQUIRE(fixture("benchmark", tmp.path()).code == 0);
        CHECK(read_tree(tmp / "out/benchmark") == first);
        REQUIRE(fixture("benchmark", tmp.path(), {"--seed", "7"}).code == 0);
        CHECK(read_tree(tmp / "out/benchmark").at("sample.tsv") != first.at("sample.tsv"));

        const auto j = nlohmann::json::parse(first.at("benchmark.json"));
        CHECK(j.dump().find("surprise") == std::string::npos);
    }

    TEST_CASE("benchmark rejects single-annotator utterances") {
        TempDir tmp;
        REQUIRE(fixture("annotate", tmp.path()).code == 0);
        write_text(tmp / "human.json", R"({"labels": ["joy", "anger", "neutral"], "annotations": [
            {"annotator": "h1", "dialogue_id": "d01", "turn_index": 1, "weights": {"joy": 1}},
            {"annotator": "h2", "dialogue_id": "d01", "turn_index": 1, "weights": {"neutral": 1}},
            {"annotator": "h1", "dialogue_id": "d01", "turn_index": 2, "weights": {"anger": 1}}]})");
        const auto r = fixture("benchmark", tmp.path(), {"--human", (tmp / "human.json").string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("d01#2") != std::string::npos);

        write_text(tmp / "stray.json", R"({"labels": ["joy", "neutral"], "annotations": [
            {"annotator": "h1", "dialogue_id": "zz", "turn_index": 1, "weights": {"joy": 1}},
            {"annotator": "h2", "dialogue_id": "zz", "turn_index": 1, "weights": {"neutral": 1}}]})");
        CHECK(fixture("benchmark", tmp.path(), {"--human", (tmp / "stray.json").string()}).code == 1);
    }

    TEST_CASE("validate-corpus") {
        const auto ok = run_dyad({"validate-corpus", data_path("fixtures/corpus_fixture.json").string()});
        CHECK(ok.code == 0);
        CHECK(ok.out.find("10") != std::string::npos);
        TempDir tmp;
        write_text(tmp / "bad.json", R"({"schema_version": "1.0", "dialogues": [{"id": "x", "outcome": "resolved",
            "turns": [], "reports": {}}]})");
        const auto bad = run_dyad({"validate-corpus", (tmp / "bad.json").string()});
        CHECK(bad.code == 1);
        CHECK_FALSE(bad.err.empty());
        CHECK(run_dyad({"validate-corpus", (tmp / "missing.json").string()}).code == 1);
    }

    TEST_CASE("synthetic corpus through analyze") {
        TempDir tmp;
        REQUIRE(run_dyad({"generate-synthetic", tmp.path().string(), "--dialogues", "200", "--seed", "3"}).code == 0);
        write_text(tmp / "run.json", R"({"config_version": "1", "corpus": "corpus.json", "output_dir": ".",
            "cache_dir": "cache",
            "annotators": [{"label": "planted", "type": "one_hot", "labels_file": "unused.json"},
                           {"label": "noise", "type": "one_hot", "labels_file": "unused.json"}],
            "analysis": {"predictor_scheme": "own_side", "trajectory_emotions": ["anger"]}})");
        const auto r = run_dyad({"analyze", "-c", (tmp / "run.json").string()});
        REQUIRE_MESSAGE(r.code == 0, r.err);
        const auto report = nlohmann::json::parse(slurp(tmp / "analysis/report.json"));
        double planted_r2 = -1;
        for (const auto& c : report["annotators"]["planted"]["svi"]["cells"]) {
            if (c["role"] == "buyer" && c["subscale"] == "process") planted_r2 = c["r_squared"].get<double>();
        }
        CHECK(planted_r2 >= 0.99);
        CHECK(report["ablation"][0]["config"] == "planted");
    }
}
