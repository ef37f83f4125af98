#include "dyad/corpus.hpp"

#include "dyad/error.hpp"
#include "dyad/util.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace dyad {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Role role) { return role == Role::buyer ? "buyer" : "seller"; }

std::optional<Role> parse_role(std::string_view name) {
    if (name == "buyer") return Role::buyer;
    if (name == "seller") return Role::seller;
    return std::nullopt;
}

std::string_view to_string(Outcome outcome) {
    return outcome == Outcome::resolved ? "resolved" : "impasse";
}

std::optional<Outcome> parse_outcome(std::string_view name) {
    if (name == "resolved") return Outcome::resolved;
    if (name == "impasse") return Outcome::impasse;
    return std::nullopt;
}

std::string_view to_string(SviSubscale scale) {
    switch (scale) {
        case SviSubscale::outcome_feeling: return "outcome_feeling";
        case SviSubscale::process: return "process";
        case SviSubscale::relationship: return "relationship";
        case SviSubscale::self_feeling: return "self_feeling";
    }
    return "?";
}

double SviReport::operator[](SviSubscale scale) const {
    switch (scale) {
        case SviSubscale::outcome_feeling: return outcome_feeling;
        case SviSubscale::process: return process;
        case SviSubscale::relationship: return relationship;
        case SviSubscale::self_feeling: return self_feeling;
    }
    return 0.0;
}

const SelfReport* Dialogue::report(Role role) const {
    auto it = reports.find(role);
    return it == reports.end() ? nullptr : &it->second;
}

const Utterance& Dialogue::turn(int turn_index) const {
    if (turn_index < 1 || static_cast<std::size_t>(turn_index) > turns.size()) {
        throw std::out_of_range("dialogue '" + id + "' has no turn " + std::to_string(turn_index));
    }
    return turns[static_cast<std::size_t>(turn_index - 1)];
}

const Dialogue* Corpus::find(std::string_view id) const {
    for (const auto& d : dialogues) {
        if (d.id == id) return &d;
    }
    return nullptr;
}

std::size_t Corpus::utterance_count() const {
    std::size_t n = 0;
    for (const auto& d : dialogues) n += d.turns.size();
    return n;
}

std::string to_string(const UtteranceKey& key) {
    return key.dialogue_id + "#" + std::to_string(key.turn_index);
}

void validate_dialogue(const Dialogue& d, const ScaleRange& scale) {
    if (d.id.empty()) throw SchemaError("", "id", "dialogue id is empty");
    if (d.turns.empty()) throw SchemaError(d.id, "turns", "dialogue has no turns");
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
        const auto& u = d.turns[i];
        const std::string field = "turns[" + std::to_string(i) + "]";
        if (u.turn_index != static_cast<int>(i) + 1) {
            throw SchemaError(d.id, field + ".turn_index",
                              "expected " + std::to_string(i + 1) + ", found " +
                                  std::to_string(u.turn_index) +
                                  " (turn indices must be contiguous from 1)");
        }
        if (trim(u.text).empty()) throw SchemaError(d.id, field + ".text", "utterance text is blank");
    }
    auto check = [&](double v, const std::string& field) {
        if (!std::isfinite(v) || !scale.contains(v)) {
            throw SchemaError(d.id, field,
                              "value " + format_double(v) + " outside scale [" +
                                  format_double(scale.min) + ", " + format_double(scale.max) + "]");
        }
    };
    for (const auto& [role, rep] : d.reports) {
        const std::string base = "reports." + std::string(to_string(role));
        if (rep.frustration) check(*rep.frustration, base + ".frustration");
        if (rep.svi) {
            for (auto s : kSviSubscales) check((*rep.svi)[s], base + ".svi." + std::string(to_string(s)));
        }
    }
}

void validate_corpus(const Corpus& corpus, const ScaleRange& scale) {
    std::set<std::string_view> ids;
    for (const auto& d : corpus.dialogues) {
        validate_dialogue(d, scale);
        if (!ids.insert(d.id).second) throw DuplicateIdError(d.id);
    }
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& id, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(id, where.empty() ? key : where + "." + key, "unknown field");
    }
}

const json& require(const json& obj, const char* key, const std::string& id,
                    const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw SchemaError(id, where.empty() ? key : where + "." + key, "missing required field");
    }
    return *it;
}

double require_number(const json& v, const std::string& id, const std::string& field) {
    if (!v.is_number()) throw SchemaError(id, field, "expected a number");
    return v.get<double>();
}

SviReport parse_svi(const json& j, const std::string& id, const std::string& where) {
    if (!j.is_object()) throw SchemaError(id, where, "expected an object");
    reject_unknown_keys(j, {"outcome_feeling", "process", "relationship", "self_feeling"}, id, where);
    SviReport r;
    r.outcome_feeling = require_number(require(j, "outcome_feeling", id, where), id, where + ".outcome_feeling");
    r.process = require_number(require(j, "process", id, where), id, where + ".process");
    r.relationship = require_number(require(j, "relationship", id, where), id, where + ".relationship");
    r.self_feeling = require_number(require(j, "self_feeling", id, where), id, where + ".self_feeling");
    return r;
}

Dialogue parse_dialogue(const json& j, std::size_t index) {
    const std::string pos = "dialogues[" + std::to_string(index) + "]";
    if (!j.is_object()) throw SchemaError("", pos, "expected an object");
    auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_string()) throw SchemaError("", pos + ".id", "missing or non-string id");
    Dialogue d;
    d.id = id_it->get<std::string>();
    reject_unknown_keys(j, {"id", "outcome", "turns", "reports"}, d.id, "");

    const auto& outcome = require(j, "outcome", d.id, "");
    if (!outcome.is_string()) throw SchemaError(d.id, "outcome", "expected a string");
    auto oc = parse_outcome(outcome.get<std::string>());
    if (!oc) throw SchemaError(d.id, "outcome", "unknown outcome '" + outcome.get<std::string>() + "'");
    d.outcome = *oc;

    const auto& turns = require(j, "turns", d.id, "");
    if (!turns.is_array()) throw SchemaError(d.id, "turns", "expected an array");
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const auto& t = turns[i];
        const std::string where = "turns[" + std::to_string(i) + "]";
        if (!t.is_object()) throw SchemaError(d.id, where, "expected an object");
        reject_unknown_keys(t, {"turn_index", "speaker", "text"}, d.id, where);
        Utterance u;
        const auto& ti = require(t, "turn_index", d.id, where);
        if (!ti.is_number_integer()) throw SchemaError(d.id, where + ".turn_index", "expected an integer");
        u.turn_index = ti.get<int>();
        const auto& sp = require(t, "speaker", d.id, where);
        auto role = sp.is_string() ? parse_role(sp.get<std::string>()) : std::nullopt;
        if (!role) throw SchemaError(d.id, where + ".speaker", "speaker must be 'buyer' or 'seller'");
        u.speaker = *role;
        const auto& text = require(t, "text", d.id, where);
        if (!text.is_string()) throw SchemaError(d.id, where + ".text", "expected a string");
        u.text = text.get<std::string>();
        d.turns.push_back(std::move(u));
    }

    if (auto rit = j.find("reports"); rit != j.end()) {
        if (!rit->is_object()) throw SchemaError(d.id, "reports", "expected an object");
        for (const auto& [key, rep] : rit->items()) {
            auto role = parse_role(key);
            const std::string where = "reports." + key;
            if (!role) throw SchemaError(d.id, where, "report key must be 'buyer' or 'seller'");
            if (!rep.is_object()) throw SchemaError(d.id, where, "expected an object");
            reject_unknown_keys(rep, {"frustration", "svi"}, d.id, where);
            SelfReport sr;
            if (auto f = rep.find("frustration"); f != rep.end()) {
                sr.frustration = require_number(*f, d.id, where + ".frustration");
            }
            if (auto s = rep.find("svi"); s != rep.end()) sr.svi = parse_svi(*s, d.id, where + ".svi");
            d.reports.emplace(*role, sr);
        }
    }
    return d;
}

}  // namespace

Corpus parse_corpus_text(std::string_view text, const ScaleRange& scale) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", "", std::string("malformed document: ") + e.what());
    }
    if (!root.is_object()) throw SchemaError("", "", "top level must be an object");
    reject_unknown_keys(root, {"schema_version", "dialogues"}, "", "");
    const auto& ver = require(root, "schema_version", "", "");
    if (!ver.is_string()) throw SchemaError("", "schema_version", "expected a string");
    Corpus corpus;
    corpus.schema_version = ver.get<std::string>();
    if (corpus.schema_version != kCorpusSchemaVersion) {
        throw SchemaError("", "schema_version", "unsupported version '" + corpus.schema_version + "'");
    }
    const auto& ds = require(root, "dialogues", "", "");
    if (!ds.is_array()) throw SchemaError("", "dialogues", "expected an array");
    corpus.dialogues.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) corpus.dialogues.push_back(parse_dialogue(ds[i], i));
    validate_corpus(corpus, scale);
    return corpus;
}

Corpus parse_corpus(const std::filesystem::path& path, const ScaleRange& scale) {
    return parse_corpus_text(read_text_file(path), scale);
}

std::string serialize_corpus(const Corpus& corpus) {
    ordered_json root;
    root["schema_version"] = corpus.schema_version;
    auto dialogues = ordered_json::array();
    for (const auto& d : corpus.dialogues) {
        ordered_json jd;
        jd["id"] = d.id;
        jd["outcome"] = std::string(to_string(d.outcome));
        auto turns = ordered_json::array();
        for (const auto& u : d.turns) {
            ordered_json jt;
            jt["turn_index"] = u.turn_index;
            jt["speaker"] = std::string(to_string(u.speaker));
            jt["text"] = u.text;
            turns.push_back(std::move(jt));
        }
        jd["turns"] = std::move(turns);
        if (!d.reports.empty()) {
            ordered_json reps = ordered_json::object();
            for (const auto& [role, rep] : d.reports) {
                ordered_json jr = ordered_json::object();
                if (rep.frustration) jr["frustration"] = *rep.frustration;
                if (rep.svi) {
                    ordered_json js;
                    for (auto s : kSviSubscales) js[std::string(to_string(s))] = (*rep.svi)[s];
                    jr["svi"] = std::move(js);
                }
                reps[std::string(to_string(role))] = std::move(jr);
            }
            jd["reports"] = std::move(reps);
        }
        dialogues.push_back(std::move(jd));
    }
    root["dialogues"] = std::move(dialogues);
    return root.dump(2) + "\n";
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    write_text_file(path, serialize_corpus(corpus));
}

std::optional<double> try_dyad_frustration(const Dialogue& d) {
    const auto* b = d.report(Role::buyer);
    const auto* s = d.report(Role::seller);
    if (!b || !s || !b->frustration || !s->frustration) return std::nullopt;
    return (*b->frustration + *s->frustration) / 2.0;
}

double dyad_frustration(const Dialogue& d) {
    if (auto v = try_dyad_frustration(d)) return *v;
    throw MissingReportError("dialogue '" + d.id + "' lacks a frustration report for at least one role");
}

}  // namespace dyad
