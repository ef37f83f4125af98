#include "dyad/report.hpp"

#include "dyad/util.hpp"

namespace dyad {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string num(double v) { return format_table_double(v); }

std::string role_name(const FrustrationCorrelationTable& t) {
    return t.role ? std::string(to_string(*t.role)) : std::string("dyad");
}

}  // namespace

std::string frustration_table_tsv(const FrustrationCorrelationTable& table) {
    std::string out = "scope\temotion\tr\tn\n";
    for (const auto& row : table.rows) {
        out += role_name(table) + "\t" + std::string(to_string(row.label)) + "\t";
        out += row.result ? num(row.result->r) + "\t" + std::to_string(row.result->n) : "NA\t" + std::to_string(table.used);
        out += "\n";
    }
    return out;
}

std::string svi_cells_tsv(const SviFitReport& report) {
    std::string out = "role\tsubscale\tr_squared\tn\tskipped\tintercept\tdropped_constant\n";
    for (const auto& c : report.cells) {
        std::string dropped;
        for (const auto& d : c.dropped_constant) dropped += (dropped.empty() ? "" : ",") + d;
        out += std::string(to_string(c.role)) + "\t" + std::string(to_string(c.scale)) + "\t" + num(c.fit.r_squared) +
               "\t" + std::to_string(c.fit.n) + "\t" + std::to_string(c.skipped) + "\t" +
               (c.fit.has_intercept ? num(c.fit.intercept) : std::string("NA")) + "\t" +
               (dropped.empty() ? "-" : dropped) + "\n";
    }
    return out;
}

std::string svi_coefficients_tsv(const SviFitReport& report) {
    std::string out = "role\tsubscale\tpredictor\tcoefficient\n";
    for (const auto& c : report.cells) {
        const std::string prefix = std::string(to_string(c.role)) + "\t" + std::string(to_string(c.scale)) + "\t";
        if (c.fit.has_intercept) out += prefix + kInterceptName + "\t" + num(c.fit.intercept) + "\n";
        for (const auto& name : c.fit.predictor_names) out += prefix + name + "\t" + num(c.fit.coefficient(name)) + "\n";
    }
    return out;
}

std::string svi_means_tsv(const SviFitReport& report) {
    std::string out = "scope\tmean_r_squared\n";
    for (const auto& [role, v] : report.mean_r_squared) out += std::string(to_string(role)) + "\t" + num(v) + "\n";
    out += "pooled\t" + num(report.pooled_mean_r_squared) + "\n";
    return out;
}

std::string ablation_tsv(const std::vector<AblationRow>& rows) {
    std::string out = "rank\tconfig\tmean_r_squared\tbuyer_mean_r_squared\tseller_mean_r_squared\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out += std::to_string(i + 1) + "\t" + r.config + "\t" + num(r.mean_r_squared) + "\t" +
               num(r.role_mean_r_squared.at(Role::buyer)) + "\t" + num(r.role_mean_r_squared.at(Role::seller)) + "\n";
    }
    return out;
}

std::string trajectory_tsv(const std::vector<TrajectoryProfile>& profiles) {
    std::string out = "emotion\trole\toutcome\tturn\tmean\tn\n";
    for (const auto& p : profiles) {
        for (const auto& pt : p.points) {
            out += std::string(to_string(p.emotion)) + "\t" + std::string(to_string(p.role)) + "\t" +
                   std::string(to_string(p.outcome)) + "\t" + std::to_string(pt.turn_index) + "\t" + num(pt.mean) + "\t" +
                   std::to_string(pt.n) + "\n";
        }
    }
    return out;
}

std::string agreement_tsv(const AgreementReport& report) {
    std::string out = "annotator\temotion\tr\tn\n";
    for (const auto& row : report.rows) {
        out += report.annotator.name + "\t" + std::string(to_string(row.label)) + "\t";
        out += row.result ? num(row.result->r) + "\t" + std::to_string(row.result->n)
                          : "NA\t" + std::to_string(report.shared_utterances);
        out += "\n";
    }
    return out;
}

ordered_json to_json(const AnnotatorId& id) {
    return {{"name", id.name}, {"model", id.model_identifier}, {"prompt_hash", id.prompt_config_hash}};
}

ordered_json to_json(const FrustrationCorrelationTable& table) {
    ordered_json j;
    j["annotator"] = to_json(table.annotator);
    j["scope"] = role_name(table);
    j["used"] = table.used;
    j["skipped_missing_reports"] = table.skipped_missing_reports;
    j["skipped_unannotated"] = table.skipped_unannotated;
    auto rows = ordered_json::array();
    for (const auto& r : table.rows) {
        ordered_json jr{{"emotion", std::string(to_string(r.label))}};
        jr["r"] = r.result ? ordered_json(r.result->r) : ordered_json(nullptr);
        jr["n"] = r.result ? r.result->n : table.used;
        if (!r.note.empty()) jr["note"] = r.note;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j;
}

ordered_json to_json(const SviFitReport& report) {
    ordered_json j;
    j["annotator"] = to_json(report.annotator);
    j["scheme"] = std::string(to_string(report.scheme));
    auto cells = ordered_json::array();
    for (const auto& c : report.cells) {
        ordered_json jc;
        jc["role"] = std::string(to_string(c.role));
        jc["subscale"] = std::string(to_string(c.scale));
        jc["r_squared"] = c.fit.r_squared;
        jc["n"] = c.fit.n;
        jc["skipped"] = c.skipped;
        jc["intercept"] = c.fit.has_intercept ? ordered_json(c.fit.intercept) : ordered_json(nullptr);
        ordered_json coef = ordered_json::object();
        for (const auto& name : c.fit.predictor_names) coef[name] = c.fit.coefficient(name);
        jc["coefficients"] = std::move(coef);
        jc["dropped_constant"] = c.dropped_constant;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    ordered_json means = ordered_json::object();
    for (const auto& [role, v] : report.mean_r_squared) means[std::string(to_string(role))] = v;
    means["pooled"] = report.pooled_mean_r_squared;
    j["mean_r_squared"] = std::move(means);
    return j;
}

ordered_json to_json(const std::vector<AblationRow>& rows) {
    auto out = ordered_json::array();
    for (const auto& r : rows) {
        out.push_back({{"config", r.config},
                       {"mean_r_squared", r.mean_r_squared},
                       {"buyer_mean_r_squared", r.role_mean_r_squared.at(Role::buyer)},
                       {"seller_mean_r_squared", r.role_mean_r_squared.at(Role::seller)}});
    }
    return out;
}

ordered_json to_json(const std::vector<TrajectoryProfile>& profiles) {
    auto out = ordered_json::array();
    for (const auto& p : profiles) {
        ordered_json jp;
        jp["emotion"] = std::string(to_string(p.emotion));
        jp["role"] = std::string(to_string(p.role));
        jp["outcome"] = std::string(to_string(p.outcome));
        jp["cohort_dialogues"] = p.cohort_dialogues;
        auto pts = ordered_json::array();
        for (const auto& pt : p.points) pts.push_back({{"turn", pt.turn_index}, {"mean", pt.mean}, {"n", pt.n}});
        jp["points"] = std::move(pts);
        out.push_back(std::move(jp));
    }
    return out;
}

ordered_json to_json(const AgreementReport& report) {
    ordered_json j;
    j["annotator"] = to_json(report.annotator);
    auto labels = ordered_json::array();
    for (auto l : report.shared_labels) labels.push_back(std::string(to_string(l)));
    j["shared_labels"] = std::move(labels);
    j["shared_utterances"] = report.shared_utterances;
    auto rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json jr{{"emotion", std::string(to_string(r.label))}};
        jr["r"] = r.result ? ordered_json(r.result->r) : ordered_json(nullptr);
        if (!r.note.empty()) jr["note"] = r.note;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j;
}

}  // namespace dyad
