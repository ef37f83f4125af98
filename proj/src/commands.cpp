#include "dyad/commands.hpp"

#include "dyad/annotation_io.hpp"
#include "dyad/report.hpp"
#include "dyad/simd/kernels.hpp"
#include "dyad/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <memory>
#include <ostream>

namespace dyad {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

/// Records every file a command writes, with content digests.
class Outputs {
public:
    explicit Outputs(std::filesystem::path root) : root_(std::move(root)) {}

    void write(const std::filesystem::path& relative, const std::string& content) {
        write_text_file(root_ / relative, content);
        files_.push_back({relative.generic_string(), hex64(fnv1a64(content)), content.size()});
    }

    ordered_json manifest() const {
        auto arr = ordered_json::array();
        for (const auto& f : files_) arr.push_back({{"path", f.path}, {"fnv1a64", f.digest}, {"bytes", f.bytes}});
        return arr;
    }

    const std::filesystem::path& root() const { return root_; }

private:
    struct File {
        std::string path;
        std::string digest;
        std::size_t bytes;
    };
    std::filesystem::path root_;
    std::vector<File> files_;
};

std::filesystem::path annotation_file(const RunConfig& cfg, const std::string& label) {
    return cfg.output_dir / "annotations" / (label + ".json");
}

std::vector<const AnnotatorSpec*> select_annotators(const RunConfig& cfg, const std::vector<std::string>& wanted) {
    std::vector<const AnnotatorSpec*> out;
    if (wanted.empty()) {
        for (const auto& a : cfg.annotators) out.push_back(&a);
        return out;
    }
    for (const auto& w : wanted) {
        const auto* a = cfg.find_annotator(w);
        if (!a) throw ConfigError("no annotator labelled '" + w + "' in the configuration");
        out.push_back(a);
    }
    return out;
}

void write_provenance(const RunConfig& cfg, const std::string& command) {
    write_text_file(cfg.output_dir / ("run_config." + command + ".json"), serialize_run_config(cfg));
}

void write_manifest(const RunConfig& cfg, const std::string& command, const Outputs& outputs, ordered_json extra) {
    ordered_json m;
    m["command"] = command;
    m["config_version"] = cfg.config_version;
    m["corpus"] = cfg.corpus.string();
    m["simd"] = std::string(simd::to_string(simd::active_isa()));
    for (auto& [k, v] : extra.items()) m[k] = v;
    m["outputs"] = outputs.manifest();
    write_text_file(cfg.output_dir / ("manifest." + command + ".json"), m.dump(2) + "\n");
}

struct LoadedAnnotations {
    std::string label;
    AnnotationSet set;
};

/// Reads AnnotationSet files and applies the failure threshold.
std::vector<LoadedAnnotations> load_annotations(const RunConfig& cfg, const Corpus& corpus,
                                                const std::vector<const AnnotatorSpec*>& specs, std::ostream& out) {
    std::vector<LoadedAnnotations> loaded;
    for (const auto* spec : specs) {
        const auto path = annotation_file(cfg, spec->label);
        if (!std::filesystem::exists(path)) {
            throw AnalysisError("no annotation file for annotator '" + spec->label + "' (expected " + path.string() +
                                "); run 'annotate' first");
        }
        auto set = read_annotation_set(path);
        validate_annotation_keys(set, corpus);
        const auto total = set.attempted();
        const double fraction = total ? static_cast<double>(set.failures.size()) / static_cast<double>(total) : 0.0;
        out << spec->label << ": " << set.entries.size() << " annotated utterances, " << set.failures.size()
            << " failed annotation(s) excluded\n";
        if (fraction > cfg.failure_threshold) {
            throw AnalysisError("annotator '" + spec->label + "': " + std::to_string(set.failures.size()) + " of " +
                                std::to_string(total) + " utterances failed, above the threshold of " +
                                format_double(cfg.failure_threshold));
        }
        loaded.push_back({spec->label, std::move(set)});
    }
    return loaded;
}

int report_error(std::ostream& err, const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (const auto* pe = dynamic_cast<const ProviderError*>(&e); pe && pe->kind() == ProviderErrorKind::configuration) {
        return kExitConfig;
    }
    return kExitFailure;
}

}  // namespace

int cmd_annotate(const RunConfig& cfg, const AnnotateOptions& options, std::ostream& out, std::ostream& err) {
    try {
        validate_run_config(cfg);
        const auto specs = select_annotators(cfg, options.annotators);
        const auto corpus = parse_corpus(cfg.corpus, cfg.scale);

        // Build every provider before any work so configuration problems
        // (missing keys, bad URLs) surface before a single request.
        struct Prepared {
            const AnnotatorSpec* spec;
            std::unique_ptr<ChatProvider> provider;
            std::unique_ptr<AnnotationCache> cache;
            std::unique_ptr<Annotator> annotator;
        };
        std::vector<Prepared> prepared;
        for (const auto* spec : specs) {
            Prepared p{spec, nullptr, nullptr, nullptr};
            if (const auto* llm = std::get_if<LlmAnnotatorSpec>(&spec->kind)) {
                p.provider = make_provider(llm->provider);
                p.cache = std::make_unique<AnnotationCache>(cfg.cache_dir / (spec->label + ".jsonl"));
                p.annotator = std::make_unique<LlmAnnotator>(
                    spec->label, *p.provider, llm->prompt, *p.cache,
                    LlmAnnotator::Options{llm->max_attempts, options.retry_failed});
            } else {
                const auto& oh = std::get<OneHotAnnotatorSpec>(spec->kind);
                p.annotator = std::make_unique<OneHotAnnotator>(spec->label, oh.model, load_hard_labels(oh.labels_file),
                                                                oh.mapping, oh.source_labels);
            }
            prepared.push_back(std::move(p));
        }

        write_provenance(cfg, "annotate");
        Outputs outputs(cfg.output_dir);
        auto summary = ordered_json::array();
        bool total_failure = false;
        for (auto& p : prepared) {
            const auto before = p.provider ? p.provider->request_count() : 0;
            auto result = annotate_corpus(*p.annotator, corpus, cfg.parallelism);
            const auto requests = p.provider ? p.provider->request_count() - before : 0;
            outputs.write(std::filesystem::path("annotations") / (p.spec->label + ".json"),
                          serialize_annotation_set(result.set));
            out << p.spec->label << ": " << result.newly_annotated << " annotated, " << result.from_cache
                << " skipped (cached), " << result.failed << " failed, " << requests << " new requests\n";
            summary.push_back({{"label", p.spec->label},
                               {"annotator", to_json(result.set.annotator)},
                               {"utterances", corpus.utterance_count()},
                               {"annotated", result.newly_annotated},
                               {"cached", result.from_cache},
                               {"failed", result.failed},
                               {"requests", requests}});
            if (corpus.utterance_count() > 0 && result.failed == corpus.utterance_count()) {
                err << "error: annotator '" << p.spec->label << "' failed on every utterance\n";
                for (const auto& [key, f] : result.set.failures) {
                    err << "  first failure " << to_string(key) << ": " << f.error << "\n";
                    break;
                }
                total_failure = true;
            }
        }
        write_manifest(cfg, "annotate", outputs, {{"annotators", summary}});
        return total_failure ? kExitFailure : kExitOk;
    } catch (const std::exception& e) {
        return report_error(err, e);
    }
}

int cmd_analyze(const RunConfig& cfg, const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
    try {
        validate_run_config(cfg);
        const auto specs = select_annotators(cfg, options.annotators);
        if (specs.empty()) throw ConfigError("no annotators selected");
        const auto corpus = parse_corpus(cfg.corpus, cfg.scale);
        const auto loaded = load_annotations(cfg, corpus, specs, out);
        const auto& sel = cfg.analysis;

        write_provenance(cfg, "analyze");
        Outputs outputs(cfg.output_dir);
        ordered_json report;
        report["annotators"] = ordered_json::object();
        std::vector<std::pair<std::string, SviFitReport>> svi_reports;

        for (const auto& [label, set] : loaded) {
            const std::filesystem::path dir = "analysis";
            ordered_json jr;
            try {
                if (sel.frustration) {
                    if (sel.frustration_scope != FrustrationScope::per_role) {
                        const auto t = frustration_correlations(corpus, set);
                        outputs.write(dir / ("frustration_" + label + ".tsv"), frustration_table_tsv(t));
                        jr["frustration"] = to_json(t);
                        out << label << ": frustration correlations over " << t.used << " dialogues ("
                            << t.skipped_missing_reports << " skipped for missing reports)\n";
                    }
                    if (sel.frustration_scope != FrustrationScope::dyad) {
                        auto arr = ordered_json::array();
                        for (auto role : kRoles) {
                            const auto t = frustration_correlations_by_role(corpus, set, role);
                            outputs.write(dir / ("frustration_" + label + "_" + std::string(to_string(role)) + ".tsv"),
                                          frustration_table_tsv(t));
                            arr.push_back(to_json(t));
                        }
                        jr["frustration_by_role"] = std::move(arr);
                    }
                }
                if (sel.svi) {
                    auto svi = svi_regression(corpus, set, sel.predictor_scheme);
                    outputs.write(dir / ("svi_cells_" + label + ".tsv"), svi_cells_tsv(svi));
                    outputs.write(dir / ("svi_coefficients_" + label + ".tsv"), svi_coefficients_tsv(svi));
                    outputs.write(dir / ("svi_means_" + label + ".tsv"), svi_means_tsv(svi));
                    jr["svi"] = to_json(svi);
                    out << label << ": SVI mean R^2 " << format_table_double(svi.pooled_mean_r_squared) << " (scheme "
                        << to_string(svi.scheme) << ")\n";
                    svi_reports.emplace_back(label, std::move(svi));
                }
                auto traj = ordered_json::array();
                for (auto emotion : sel.trajectory_emotions) {
                    if (!contains(set.label_set, emotion)) {
                        out << label << ": no '" << to_string(emotion) << "' label, trajectory skipped\n";
                        continue;
                    }
                    const auto profiles = trajectories(corpus, set, emotion, sel.max_turn);
                    outputs.write(dir / ("trajectory_" + label + "_" + std::string(to_string(emotion)) + ".tsv"),
                                  trajectory_tsv(profiles));
                    for (auto& p : to_json(profiles)) traj.push_back(std::move(p));
                }
                jr["trajectories"] = std::move(traj);
            } catch (const Error& e) {
                throw AnalysisError("annotator '" + label + "': " + e.what());
            }
            report["annotators"][label] = std::move(jr);
        }

        if (sel.svi && sel.ablation) {
            if (svi_reports.size() >= 2) {
                const auto rows = ablation_rows(svi_reports);
                outputs.write(std::filesystem::path("analysis") / "ablation.tsv", ablation_tsv(rows));
                report["ablation"] = to_json(rows);
            } else {
                out << "ablation comparison skipped: needs at least two annotators\n";
            }
        }
        outputs.write(std::filesystem::path("analysis") / "report.json", report.dump(2) + "\n");
        write_manifest(cfg, "analyze", outputs, ordered_json::object());
        return kExitOk;
    } catch (const std::exception& e) {
        return report_error(err, e);
    }
}

int cmd_benchmark(const RunConfig& cfg, const BenchmarkOptions& options, std::ostream& out, std::ostream& err) {
    try {
        validate_run_config(cfg);
        if (!cfg.benchmark.human_annotations) throw ConfigError("benchmark.human_annotations is not set");
        const auto specs = select_annotators(cfg, options.annotators);
        if (specs.empty()) throw ConfigError("no annotators selected");
        const auto corpus = parse_corpus(cfg.corpus, cfg.scale);
        const auto humans = load_human_annotations(*cfg.benchmark.human_annotations);
        for (const auto& h : humans.records) {
            const auto* d = corpus.find(h.key.dialogue_id);
            if (!d || h.key.turn_index < 1 || static_cast<std::size_t>(h.key.turn_index) > d->turns.size()) {
                throw SchemaError(h.key.dialogue_id, "annotations", "human annotation for unknown utterance " + to_string(h.key));
            }
        }
        const auto means = aggregate_human(humans.records);
        std::vector<UtteranceKey> keys;
        for (const auto& [k, _] : means) keys.push_back(k);
        const auto sample = sample_utterances(keys, cfg.benchmark.sample_size, cfg.seed);
        std::map<UtteranceKey, EmotionVector> sampled;
        for (const auto& k : sample) sampled.emplace(k, means.at(k));
        out << "benchmark: " << sample.size() << " sampled utterances from " << means.size()
            << " with human annotations (seed " << cfg.seed << ")\n";

        const auto loaded = load_annotations(cfg, corpus, specs, out);
        write_provenance(cfg, "benchmark");
        Outputs outputs(cfg.output_dir);
        const std::filesystem::path dir = "benchmark";
        std::string sample_tsv = "dialogue_id\tturn_index\n";
        for (const auto& k : sample) sample_tsv += k.dialogue_id + "\t" + std::to_string(k.turn_index) + "\n";
        outputs.write(dir / "sample.tsv", sample_tsv);

        ordered_json report;
        auto human_labels = ordered_json::array();
        for (auto l : humans.label_set) human_labels.push_back(std::string(to_string(l)));
        report["human_labels"] = std::move(human_labels);
        report["sampled_utterances"] = sample.size();
        report["agreement"] = ordered_json::array();
        std::vector<std::pair<std::string, SviFitReport>> svi_reports;
        for (const auto& [label, set] : loaded) {
            try {
                const auto rep = agreement(set, sampled, humans.label_set);
                outputs.write(dir / ("agreement_" + label + ".tsv"), agreement_tsv(rep));
                report["agreement"].push_back(to_json(rep));
                if (cfg.benchmark.svi_comparison) {
                    svi_reports.emplace_back(label, svi_regression(corpus, set, cfg.analysis.predictor_scheme));
                }
            } catch (const Error& e) {
                throw AnalysisError("annotator '" + label + "': " + e.what());
            }
        }
        if (cfg.benchmark.svi_comparison) {
            std::vector<AblationRow> rows;
            if (svi_reports.size() >= 2) {
                rows = ablation_rows(svi_reports);
            } else {
                for (const auto& [label, rep] : svi_reports) rows.push_back({label, rep.pooled_mean_r_squared, rep.mean_r_squared});
            }
            outputs.write(dir / "svi_comparison.tsv", ablation_tsv(rows));
            report["svi_comparison"] = to_json(rows);
        }
        outputs.write(dir / "benchmark.json", report.dump(2) + "\n");
        write_manifest(cfg, "benchmark", outputs, {{"seed", cfg.seed}, {"sample_size", cfg.benchmark.sample_size}});
        return kExitOk;
    } catch (const std::exception& e) {
        return report_error(err, e);
    }
}

int cmd_validate_corpus(const std::filesystem::path& path, const ScaleRange& scale, std::ostream& out, std::ostream& err) {
    try {
        const auto corpus = parse_corpus(path, scale);
        std::size_t impasse = 0;
        std::size_t with_frustration = 0;
        std::size_t svi_reports = 0;
        for (const auto& d : corpus.dialogues) {
            impasse += d.outcome == Outcome::impasse ? 1 : 0;
            with_frustration += try_dyad_frustration(d) ? 1 : 0;
            for (const auto& [_, r] : d.reports) svi_reports += r.svi ? 1 : 0;
        }
        out << "valid corpus (schema " << corpus.schema_version << "): " << corpus.dialogues.size() << " dialogues, "
            << corpus.utterance_count() << " utterances, " << impasse << " impasse, " << with_frustration
            << " with both frustration reports, " << svi_reports << " SVI reports\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return report_error(err, e);
    }
}

int cmd_generate_synthetic(const std::filesystem::path& out_dir, const SyntheticOptions& options, std::ostream& out,
                           std::ostream& err) {
    try {
        const auto data = generate_planted_signal(options);
        write_corpus(data.corpus, out_dir / "corpus.json");
        write_annotation_set(data.planted, out_dir / "annotations" / "planted.json");
        write_annotation_set(data.noise, out_dir / "annotations" / "noise.json");
        out << "wrote " << data.corpus.dialogues.size() << " synthetic dialogues to " << out_dir.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return report_error(err, e);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Soft-label emotion annotation and analysis for buyer/seller dispute dialogues"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> corpus_override;
    std::optional<std::string> output_override;
    std::optional<std::string> cache_override;
    std::optional<int> parallelism_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> scheme_override;
    std::vector<std::string> selected;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--corpus", corpus_override, "Override the corpus path");
        sub->add_option("--output-dir", output_override, "Override the output directory");
        sub->add_option("--annotator", selected, "Restrict to these annotator labels");
        sub->add_option("--seed", seed_override, "Override the random seed");
        sub->add_option("--predictor-scheme", scheme_override, "both_sides | own_side | both_sides_no_intercept");
        sub->add_option("--cache-dir", cache_override, "Override the cache directory");
    };

    auto* annotate = app.add_subcommand("annotate", "Annotate every utterance and write AnnotationSet files");
    add_common(annotate);
    annotate->add_option("-j,--parallelism", parallelism_override, "Concurrent annotation workers")->check(CLI::PositiveNumber);
    bool retry_failed = false;
    annotate->add_flag("--retry-failed", retry_failed, "Re-query utterances whose cached record is a failure");

    auto* analyze = app.add_subcommand("analyze", "Frustration, SVI, ablation and trajectory tables");
    add_common(analyze);

    auto* benchmark = app.add_subcommand("benchmark", "Agreement with human annotations");
    add_common(benchmark);
    std::optional<std::string> human_override;
    std::optional<std::size_t> sample_override;
    benchmark->add_option("--human", human_override, "Human annotation file");
    benchmark->add_option("-n,--sample-size", sample_override, "Number of utterances to sample");

    auto* validate = app.add_subcommand("validate-corpus", "Check a corpus file against the schema");
    std::string validate_path;
    double scale_min = 1.0;
    double scale_max = 7.0;
    validate->add_option("corpus", validate_path, "Corpus file")->required();
    validate->add_option("--scale-min", scale_min, "Lowest response-scale value");
    validate->add_option("--scale-max", scale_max, "Highest response-scale value");

    auto* synth = app.add_subcommand("generate-synthetic", "Write a planted-signal corpus with annotations");
    std::string synth_dir;
    SyntheticOptions synth_opts;
    synth->add_option("out_dir", synth_dir, "Destination directory")->required();
    synth->add_option("--dialogues", synth_opts.dialogues, "Number of dialogues");
    synth->add_option("--seed", synth_opts.seed, "Generator seed");
    synth->add_option("--noise", synth_opts.noise_sigma, "Noise standard deviation on the planted cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (validate->parsed()) return cmd_validate_corpus(validate_path, {scale_min, scale_max}, out, err);
    if (synth->parsed()) return cmd_generate_synthetic(synth_dir, synth_opts, out, err);

    RunConfig cfg;
    try {
        cfg = load_run_config(config_path);
        if (corpus_override) cfg.corpus = *corpus_override;
        if (output_override) cfg.output_dir = *output_override;
        if (cache_override) cfg.cache_dir = *cache_override;
        if (parallelism_override) cfg.parallelism = *parallelism_override;
        if (seed_override) cfg.seed = *seed_override;
        if (scheme_override) {
            auto s = parse_predictor_scheme(*scheme_override);
            if (!s) throw ConfigError("unknown predictor scheme '" + *scheme_override + "'");
            cfg.analysis.predictor_scheme = *s;
        }
        if (human_override) cfg.benchmark.human_annotations = *human_override;
        if (sample_override) cfg.benchmark.sample_size = *sample_override;
    } catch (const std::exception& e) {
        return report_error(err, e);
    }

    if (annotate->parsed()) return cmd_annotate(cfg, {selected, retry_failed}, out, err);
    if (analyze->parsed()) return cmd_analyze(cfg, {selected}, out, err);
    return cmd_benchmark(cfg, {selected}, out, err);
}

}  // namespace dyad
