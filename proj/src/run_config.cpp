#include "dyad/run_config.hpp"

#include "dyad/util.hpp"

#include <json.hpp>

#include <set>

namespace dyad {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const AnnotatorSpec* RunConfig::find_annotator(std::string_view label) const {
    for (const auto& a : annotators) {
        if (a.label == label) return &a;
    }
    return nullptr;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

LabelSet parse_labels(const json& arr) {
    LabelSet out;
    for (const auto& l : arr) out.push_back(emotion_label_from_string(l.get<std::string>()));
    validate_label_set(out);
    return out;
}

AnnotatorSpec parse_annotator(const json& j, const std::filesystem::path& base) {
    AnnotatorSpec spec;
    spec.label = j.at("label").get<std::string>();
    if (spec.label.empty()) throw ConfigError("annotator label is empty");
    const auto type = j.value("type", std::string("llm"));
    if (type == "one_hot") {
        OneHotAnnotatorSpec oh;
        oh.model = j.value("model", oh.model);
        oh.labels_file = resolve(base, j.at("labels_file").get<std::string>());
        if (auto m = j.find("mapping"); m != j.end()) {
            oh.mapping.overrides.clear();
            for (const auto& [k, v] : m->items()) oh.mapping.overrides[k] = emotion_label_from_string(v.get<std::string>());
        }
        if (auto s = j.find("source_labels"); s != j.end()) oh.source_labels = s->get<std::vector<std::string>>();
        spec.kind = std::move(oh);
        return spec;
    }
    if (type != "llm") throw ConfigError("annotator '" + spec.label + "' has unknown type '" + type + "'");

    LlmAnnotatorSpec llm;
    const auto& p = j.at("provider");
    llm.provider.base_url = p.at("base_url").get<std::string>();
    llm.provider.model_identifier = p.at("model").get<std::string>();
    llm.provider.api_key_env_var = p.value("api_key_env", std::string{});
    llm.provider.temperature = p.value("temperature", 0.0);
    llm.provider.timeout = std::chrono::milliseconds(p.value("timeout_ms", std::int64_t{60'000}));
    llm.provider.max_requests_per_minute = p.value("max_requests_per_minute", 60);
    llm.provider.max_attempts = p.value("max_attempts", 4);
    llm.provider.initial_backoff = std::chrono::milliseconds(p.value("initial_backoff_ms", std::int64_t{1'000}));
    if (auto d = p.find("debug_log"); d != p.end() && d->is_string()) llm.provider.debug_log = resolve(base, d->get<std::string>());
    if (auto m = p.find("mock_script"); m != p.end() && m->is_string()) llm.provider.mock_script = resolve(base, m->get<std::string>());
    validate_provider_config(llm.provider);

    if (auto pr = j.find("prompt"); pr != j.end()) {
        llm.prompt.system_role_text = pr->value("system_role_text", llm.prompt.system_role_text);
        if (auto h = pr->find("history_turns"); h != pr->end() && !h->is_null()) {
            if (h->is_string() && h->get<std::string>() == "unlimited") {
                llm.prompt.history_turns.reset();
            } else {
                llm.prompt.history_turns = h->get<int>();
            }
        }
        if (auto icl = pr->find("icl_examples"); icl != pr->end() && icl->is_string()) {
            llm.icl_examples_file = resolve(base, icl->get<std::string>());
        }
        if (auto l = pr->find("labels"); l != pr->end()) llm.prompt.label_set = parse_labels(*l);
        llm.prompt.require_structured_output = pr->value("structured_output", true);
    }
    if (llm.icl_examples_file) llm.prompt.icl_examples = load_icl_examples(*llm.icl_examples_file);
    validate_prompt_config(llm.prompt);
    llm.max_attempts = j.value("max_attempts", kDefaultMaxAttempts);
    spec.kind = std::move(llm);
    return spec;
}

std::string_view to_string(FrustrationScope s) {
    switch (s) {
        case FrustrationScope::dyad: return "dyad";
        case FrustrationScope::per_role: return "per_role";
        case FrustrationScope::both: return "both";
    }
    return "dyad";
}

}  // namespace

void validate_run_config(const RunConfig& cfg) {
    if (cfg.config_version != kRunConfigVersion) {
        throw ConfigError("unsupported config_version '" + cfg.config_version + "'");
    }
    std::set<std::string> labels;
    for (const auto& a : cfg.annotators) {
        if (!labels.insert(a.label).second) throw ConfigError("duplicate annotator label '" + a.label + "'");
    }
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (cfg.failure_threshold < 0.0 || cfg.failure_threshold > 1.0) {
        throw ConfigError("failure_threshold must lie in [0, 1]");
    }
    if (cfg.analysis.max_turn < 1) throw ConfigError("analysis.max_turn must be >= 1");
    if (cfg.scale.min >= cfg.scale.max) throw ConfigError("scale.min must be below scale.max");
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    try {
        const auto j = json::parse(text);
        cfg.config_version = j.value("config_version", std::string(kRunConfigVersion));
        if (auto c = j.find("corpus"); c != j.end()) cfg.corpus = resolve(base_dir, c->get<std::string>());
        if (auto s = j.find("scale"); s != j.end()) {
            cfg.scale.min = s->value("min", 1.0);
            cfg.scale.max = s->value("max", 7.0);
        }
        cfg.cache_dir = resolve(base_dir, j.value("cache_dir", std::string("cache")));
        cfg.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
        cfg.parallelism = j.value("parallelism", cfg.parallelism);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.failure_threshold = j.value("failure_threshold", cfg.failure_threshold);
        if (auto as = j.find("annotators"); as != j.end()) {
            for (const auto& a : *as) cfg.annotators.push_back(parse_annotator(a, base_dir));
        }
        if (auto a = j.find("analysis"); a != j.end()) {
            auto& sel = cfg.analysis;
            sel.frustration = a->value("frustration", sel.frustration);
            const auto scope = a->value("frustration_scope", std::string("dyad"));
            if (scope == "dyad") {
                sel.frustration_scope = FrustrationScope::dyad;
            } else if (scope == "per_role") {
                sel.frustration_scope = FrustrationScope::per_role;
            } else if (scope == "both") {
                sel.frustration_scope = FrustrationScope::both;
            } else {
                throw ConfigError("unknown frustration_scope '" + scope + "'");
            }
            sel.svi = a->value("svi", sel.svi);
            sel.ablation = a->value("ablation", sel.ablation);
            if (auto ps = a->find("predictor_scheme"); ps != a->end()) {
                auto scheme = parse_predictor_scheme(ps->get<std::string>());
                if (!scheme) throw ConfigError("unknown predictor_scheme '" + ps->get<std::string>() + "'");
                sel.predictor_scheme = *scheme;
            }
            if (auto te = a->find("trajectory_emotions"); te != a->end()) {
                sel.trajectory_emotions.clear();
                for (const auto& e : *te) sel.trajectory_emotions.push_back(emotion_label_from_string(e.get<std::string>()));
            }
            sel.max_turn = a->value("max_turn", sel.max_turn);
        }
        if (auto b = j.find("benchmark"); b != j.end()) {
            if (auto h = b->find("human_annotations"); h != b->end() && h->is_string()) {
                cfg.benchmark.human_annotations = resolve(base_dir, h->get<std::string>());
            }
            cfg.benchmark.sample_size = b->value("sample_size", cfg.benchmark.sample_size);
            cfg.benchmark.svi_comparison = b->value("svi_comparison", cfg.benchmark.svi_comparison);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    } catch (const SchemaError& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    validate_run_config(cfg);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_run_config(text, std::filesystem::absolute(path).parent_path());
}

std::string serialize_run_config(const RunConfig& cfg) {
    ordered_json j;
    j["config_version"] = cfg.config_version;
    j["corpus"] = cfg.corpus.string();
    j["scale"] = {{"min", cfg.scale.min}, {"max", cfg.scale.max}};
    j["cache_dir"] = cfg.cache_dir.string();
    j["output_dir"] = cfg.output_dir.string();
    j["parallelism"] = cfg.parallelism;
    j["seed"] = cfg.seed;
    j["failure_threshold"] = cfg.failure_threshold;
    auto anns = ordered_json::array();
    for (const auto& a : cfg.annotators) {
        ordered_json ja;
        ja["label"] = a.label;
        if (const auto* llm = std::get_if<LlmAnnotatorSpec>(&a.kind)) {
            ja["type"] = "llm";
            const auto& p = llm->provider;
            ordered_json jp;
            jp["base_url"] = p.base_url;
            jp["model"] = p.model_identifier;
            jp["api_key_env"] = p.api_key_env_var;
            jp["temperature"] = p.temperature;
            jp["timeout_ms"] = p.timeout.count();
            jp["max_requests_per_minute"] = p.max_requests_per_minute;
            jp["max_attempts"] = p.max_attempts;
            jp["initial_backoff_ms"] = p.initial_backoff.count();
            if (p.mock_script) jp["mock_script"] = p.mock_script->string();
            ja["provider"] = std::move(jp);
            ordered_json pr;
            pr["system_role_text"] = llm->prompt.system_role_text;
            pr["history_turns"] = llm->prompt.history_turns ? ordered_json(*llm->prompt.history_turns) : ordered_json(nullptr);
            pr["icl_examples"] = llm->icl_examples_file ? ordered_json(llm->icl_examples_file->string()) : ordered_json(nullptr);
            auto labels = ordered_json::array();
            for (auto l : llm->prompt.label_set) labels.push_back(std::string(dyad::to_string(l)));
            pr["labels"] = std::move(labels);
            pr["structured_output"] = llm->prompt.require_structured_output;
            pr["hash"] = prompt_config_hash(llm->prompt);
            ja["prompt"] = std::move(pr);
            ja["max_attempts"] = llm->max_attempts;
        } else {
            const auto& oh = std::get<OneHotAnnotatorSpec>(a.kind);
            ja["type"] = "one_hot";
            ja["model"] = oh.model;
            ja["labels_file"] = oh.labels_file.string();
            ordered_json m = ordered_json::object();
            for (const auto& [k, v] : oh.mapping.overrides) m[k] = std::string(dyad::to_string(v));
            ja["mapping"] = std::move(m);
            ja["source_labels"] = oh.source_labels;
        }
        anns.push_back(std::move(ja));
    }
    j["annotators"] = std::move(anns);
    ordered_json an;
    an["frustration"] = cfg.analysis.frustration;
    an["frustration_scope"] = std::string(to_string(cfg.analysis.frustration_scope));
    an["svi"] = cfg.analysis.svi;
    an["ablation"] = cfg.analysis.ablation;
    an["predictor_scheme"] = std::string(dyad::to_string(cfg.analysis.predictor_scheme));
    auto te = ordered_json::array();
    for (auto e : cfg.analysis.trajectory_emotions) te.push_back(std::string(dyad::to_string(e)));
    an["trajectory_emotions"] = std::move(te);
    an["max_turn"] = cfg.analysis.max_turn;
    j["analysis"] = std::move(an);
    ordered_json b;
    b["human_annotations"] = cfg.benchmark.human_annotations ? ordered_json(cfg.benchmark.human_annotations->string())
                                                             : ordered_json(nullptr);
    b["sample_size"] = cfg.benchmark.sample_size;
    b["svi_comparison"] = cfg.benchmark.svi_comparison;
    j["benchmark"] = std::move(b);
    return j.dump(2) + "\n";
}

}  // namespace dyad
