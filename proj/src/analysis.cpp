#include "dyad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dyad {

namespace {

// Analyses visit dialogues in id order so results do not depend on file order.
std::vector<const Dialogue*> sorted_dialogues(const Corpus& corpus) {
    std::vector<const Dialogue*> out;
    out.reserve(corpus.dialogues.size());
    for (const auto& d : corpus.dialogues) out.push_back(&d);
    std::sort(out.begin(), out.end(), [](const Dialogue* a, const Dialogue* b) { return a->id < b->id; });
    return out;
}

std::string annotator_label(const AnnotationSet& a) {
    return a.annotator.name.empty() ? std::string("(unnamed annotator)") : a.annotator.name;
}

}  // namespace

std::optional<EmotionVector> dialogue_mean(const Dialogue& dialogue, const AnnotationSet& annotations,
                                           std::optional<Role> role) {
    std::vector<EmotionVector> vs;
    for (const auto& u : dialogue.turns) {
        if (role && u.speaker != *role) continue;
        if (const auto* v = annotations.find({dialogue.id, u.turn_index})) vs.push_back(*v);
    }
    if (vs.empty()) return std::nullopt;
    return mean_vector(vs);
}

// ---------------------------------------------------------------------------

const LabelCorrelation* FrustrationCorrelationTable::row(EmotionLabel label) const {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

namespace {

FrustrationCorrelationTable correlate_frustration(const Corpus& corpus, const AnnotationSet& annotations,
                                                  std::optional<Role> role) {
    FrustrationCorrelationTable table;
    table.annotator = annotations.annotator;
    table.role = role;
    std::vector<double> frustration;
    std::vector<EmotionVector> means;
    for (const auto* d : sorted_dialogues(corpus)) {
        std::optional<double> f;
        if (role) {
            if (const auto* rep = d->report(*role); rep && rep->frustration) f = rep->frustration;
        } else {
            f = try_dyad_frustration(*d);
        }
        if (!f) {
            ++table.skipped_missing_reports;
            continue;
        }
        auto m = dialogue_mean(*d, annotations, role);
        if (!m) {
            ++table.skipped_unannotated;
            continue;
        }
        frustration.push_back(*f);
        means.push_back(*m);
    }
    table.used = frustration.size();
    if (table.used < 2) {
        throw AnalysisError("frustration correlation for '" + annotator_label(annotations) + "': only " +
                            std::to_string(table.used) + " usable dialogue(s)");
    }
    for (auto label : canonicalize(annotations.label_set)) {
        std::vector<double> x;
        x.reserve(means.size());
        for (const auto& m : means) x.push_back(m[label]);
        LabelCorrelation row{label, std::nullopt, ""};
        try {
            row.result = pearson(x, frustration);
        } catch (const ConstantSeriesError&) {
            row.note = "not computable: constant series";
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace

FrustrationCorrelationTable frustration_correlations(const Corpus& corpus, const AnnotationSet& annotations) {
    return correlate_frustration(corpus, annotations, std::nullopt);
}

FrustrationCorrelationTable frustration_correlations_by_role(const Corpus& corpus, const AnnotationSet& annotations,
                                                             Role role) {
    return correlate_frustration(corpus, annotations, role);
}

// ---------------------------------------------------------------------------

std::string_view to_string(PredictorScheme scheme) {
    switch (scheme) {
        case PredictorScheme::both_sides: return "both_sides";
        case PredictorScheme::own_side: return "own_side";
        case PredictorScheme::both_sides_no_intercept: return "both_sides_no_intercept";
        case PredictorScheme::all_labels_with_intercept: return "all_labels_with_intercept";
    }
    return "?";
}

std::optional<PredictorScheme> parse_predictor_scheme(std::string_view name) {
    for (auto s : {PredictorScheme::both_sides, PredictorScheme::own_side, PredictorScheme::both_sides_no_intercept,
                   PredictorScheme::all_labels_with_intercept}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

EmotionLabel reference_label(const LabelSet& labels) {
    if (labels.empty()) throw AnalysisError("empty label set has no reference label");
    return canonicalize(labels).back();
}

const SviCell& SviFitReport::cell(Role role, SviSubscale scale) const {
    for (const auto& c : cells) {
        if (c.role == role && c.scale == scale) return c;
    }
    throw std::out_of_range("no SVI cell for " + std::string(to_string(role)) + "/" + std::string(to_string(scale)));
}

SviFitReport svi_regression(const Corpus& corpus, const AnnotationSet& annotations, PredictorScheme scheme) {
    const LabelSet labels = canonicalize(annotations.label_set);
    const bool drop_reference = scheme == PredictorScheme::both_sides || scheme == PredictorScheme::own_side;
    const bool intercept = scheme != PredictorScheme::both_sides_no_intercept;
    LabelSet predictors;
    for (auto l : labels) {
        if (!drop_reference || l != reference_label(labels)) predictors.push_back(l);
    }
    const auto dialogues = sorted_dialogues(corpus);

    SviFitReport report;
    report.annotator = annotations.annotator;
    report.scheme = scheme;
    for (auto role : kRoles) {
        std::vector<Role> sides;
        if (scheme == PredictorScheme::own_side) {
            sides = {role};
        } else {
            sides = {Role::buyer, Role::seller};
        }
        // Without an intercept the first party's full vector stands in for it;
        // the second party still needs its reference label dropped.
        std::vector<LabelSet> side_labels;
        for (std::size_t k = 0; k < sides.size(); ++k) {
            LabelSet ls;
            for (auto l : predictors) {
                if (intercept || k == 0 || l != reference_label(labels)) ls.push_back(l);
            }
            side_labels.push_back(std::move(ls));
        }
        std::vector<std::string> names;
        for (std::size_t k = 0; k < sides.size(); ++k) {
            for (auto l : side_labels[k]) names.push_back(std::string(to_string(sides[k])) + "." + std::string(to_string(l)));
        }

        for (auto scale : kSviSubscales) {
            SviCell cell;
            cell.role = role;
            cell.scale = scale;
            std::vector<std::vector<double>> rows;
            std::vector<double> y;
            for (const auto* d : dialogues) {
                const auto* rep = d->report(role);
                if (!rep || !rep->svi) {
                    ++cell.skipped;
                    continue;
                }
                std::vector<double> row;
                bool ok = true;
                for (std::size_t k = 0; k < sides.size(); ++k) {
                    auto m = dialogue_mean(*d, annotations, sides[k]);
                    if (!m) {
                        ok = false;
                        break;
                    }
                    for (auto l : side_labels[k]) row.push_back((*m)[l]);
                }
                if (!ok) {
                    ++cell.skipped;
                    continue;
                }
                rows.push_back(std::move(row));
                y.push_back((*rep->svi)[scale]);
            }

            std::vector<std::size_t> keep;
            for (std::size_t j = 0; j < names.size(); ++j) {
                const bool constant =
                    !rows.empty() && std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r[j] == rows.front()[j]; });
                if (constant && intercept) {
                    cell.dropped_constant.push_back(names[j]);
                } else {
                    keep.push_back(j);
                }
            }
            std::vector<std::string> kept_names;
            for (auto j : keep) kept_names.push_back(names[j]);
            std::vector<std::vector<double>> kept_rows;
            kept_rows.reserve(rows.size());
            for (const auto& r : rows) {
                std::vector<double> kr;
                for (auto j : keep) kr.push_back(r[j]);
                kept_rows.push_back(std::move(kr));
            }

            const std::string where = "SVI regression for '" + annotator_label(annotations) + "' (" +
                                      std::string(to_string(role)) + " " + std::string(to_string(scale)) +
                                      ", scheme " + std::string(to_string(scheme)) + "): ";
            try {
                cell.fit = fit_mlr(make_design(kept_rows, kept_names), y, FitOptions{intercept, 1e-10});
            } catch (const RankDeficiencyError& e) {
                throw RankDeficiencyError(e.columns(),
                                          where + e.what() +
                                              ". Mean emotion vectors sum to one, so with an intercept one label "
                                              "per party must be dropped (scheme both_sides or own_side).");
            } catch (const InsufficientDataError& e) {
                throw InsufficientDataError(where + e.what());
            } catch (const ConstantSeriesError& e) {
                throw ConstantSeriesError(where + e.what());
            }
            report.cells.push_back(std::move(cell));
        }
    }
    double pooled = 0.0;
    for (auto role : kRoles) {
        double s = 0.0;
        for (auto scale : kSviSubscales) s += report.cell(role, scale).fit.r_squared;
        report.mean_r_squared[role] = s / static_cast<double>(kSviSubscales.size());
        pooled += s;
    }
    report.pooled_mean_r_squared = pooled / static_cast<double>(report.cells.size());
    return report;
}

std::vector<AblationRow> ablation_rows(const std::vector<std::pair<std::string, SviFitReport>>& reports) {
    if (reports.size() < 2) throw AnalysisError("ablation comparison needs at least two configurations");
    std::vector<AblationRow> rows;
    for (const auto& [label, rep] : reports) rows.push_back({label, rep.pooled_mean_r_squared, rep.mean_r_squared});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const AblationRow& a, const AblationRow& b) { return a.mean_r_squared > b.mean_r_squared; });
    return rows;
}

std::vector<AblationRow> ablation_compare(const Corpus& corpus,
                                          const std::vector<std::pair<std::string, AnnotationSet>>& configs,
                                          PredictorScheme scheme) {
    if (configs.size() < 2) throw AnalysisError("ablation comparison needs at least two configurations");
    std::vector<std::pair<std::string, SviFitReport>> reports;
    for (const auto& [label, set] : configs) reports.emplace_back(label, svi_regression(corpus, set, scheme));
    return ablation_rows(reports);
}

// ---------------------------------------------------------------------------

std::vector<TrajectoryProfile> trajectories(const Corpus& corpus, const AnnotationSet& annotations,
                                            EmotionLabel emotion, int max_turn) {
    if (!contains(annotations.label_set, emotion)) {
        throw AnalysisError("annotator '" + annotator_label(annotations) + "' has no '" +
                            std::string(to_string(emotion)) + "' label");
    }
    if (max_turn < 1) throw AnalysisError("max_turn must be >= 1");
    const auto dialogues = sorted_dialogues(corpus);
    std::vector<TrajectoryProfile> out;
    for (auto role : kRoles) {
        for (auto outcome : kOutcomes) {
            TrajectoryProfile p;
            p.emotion = emotion;
            p.role = role;
            p.outcome = outcome;
            for (const auto* d : dialogues) p.cohort_dialogues += d->outcome == outcome ? 1 : 0;
            for (int t = 1; t <= max_turn; ++t) {
                double sum = 0.0;
                std::size_t n = 0;
                for (const auto* d : dialogues) {
                    if (d->outcome != outcome || static_cast<std::size_t>(t) > d->turns.size()) continue;
                    if (d->turn(t).speaker != role) continue;
                    if (const auto* v = annotations.find({d->id, t})) {
                        sum += (*v)[emotion];
                        ++n;
                    }
                }
                if (n > 0) p.points.push_back({t, sum / static_cast<double>(n), n});
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::map<UtteranceKey, EmotionVector> aggregate_human(const std::vector<HumanAnnotation>& records) {
    std::map<UtteranceKey, std::map<std::string, EmotionVector>> grouped;
    for (const auto& r : records) {
        auto& per = grouped[r.key];
        if (!per.emplace(r.annotator, r.vector).second) {
            throw SchemaError(r.key.dialogue_id, "annotations",
                              "annotator '" + r.annotator + "' labelled " + to_string(r.key) + " twice");
        }
    }
    std::map<UtteranceKey, EmotionVector> out;
    for (const auto& [key, per] : grouped) {
        if (per.size() < 2) throw CoverageError(key, per.size());
        std::vector<EmotionVector> vs;
        for (const auto& [_, v] : per) vs.push_back(v);
        out.emplace(key, EmotionVector::normalized(mean_vector(vs).weights()));
    }
    return out;
}

const AgreementRow* AgreementReport::row(EmotionLabel label) const {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

AgreementReport agreement(const AnnotationSet& model, const std::map<UtteranceKey, EmotionVector>& human_means,
                          const LabelSet& human_labels) {
    AgreementReport rep;
    rep.annotator = model.annotator;
    rep.shared_labels = intersect(model.label_set, human_labels);
    if (rep.shared_labels.empty()) {
        throw AnalysisError("annotator '" + annotator_label(model) + "' shares no labels with the human schema");
    }
    std::vector<const EmotionVector*> mv;
    std::vector<const EmotionVector*> hv;
    for (const auto& [key, h] : human_means) {
        if (const auto* v = model.find(key)) {
            mv.push_back(v);
            hv.push_back(&h);
        }
    }
    rep.shared_utterances = mv.size();
    if (rep.shared_utterances < 2) {
        throw AnalysisError("annotator '" + annotator_label(model) + "' shares " +
                            std::to_string(rep.shared_utterances) + " utterance(s) with the human annotations");
    }
    for (auto label : rep.shared_labels) {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < mv.size(); ++i) {
            x.push_back((*mv[i])[label]);
            y.push_back((*hv[i])[label]);
        }
        AgreementRow row{label, std::nullopt, ""};
        try {
            row.result = pearson(x, y);
        } catch (const ConstantSeriesError&) {
            row.note = "not computable: constant series";
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::vector<UtteranceKey> sample_utterances(std::vector<UtteranceKey> keys, std::size_t n, std::uint64_t seed) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::mt19937_64 rng(seed);
    std::shuffle(keys.begin(), keys.end(), rng);
    if (keys.size() > n) keys.resize(n);
    std::sort(keys.begin(), keys.end());
    return keys;
}

// ---------------------------------------------------------------------------

DirectionalFindings directional_findings(const Corpus& corpus, const AnnotationSet& annotations, int max_turn) {
    DirectionalFindings f;
    const auto table = frustration_correlations(corpus, annotations);
    auto r_of = [&](EmotionLabel label) {
        const auto* row = table.row(label);
        return row && row->result ? row->result->r : std::numeric_limits<double>::quiet_NaN();
    };
    f.anger_frustration_r = r_of(EmotionLabel::anger);
    f.joy_frustration_r = r_of(EmotionLabel::joy);

    std::map<Outcome, std::pair<double, std::size_t>> acc;
    for (const auto& d : corpus.dialogues) {
        for (const auto& u : d.turns) {
            if (u.speaker != Role::seller || u.turn_index < 3 || u.turn_index > max_turn) continue;
            if (const auto* v = annotations.find({d.id, u.turn_index})) {
                acc[d.outcome].first += (*v)[EmotionLabel::anger];
                acc[d.outcome].second += 1;
            }
        }
    }
    auto mean = [&](Outcome o) {
        const auto& [s, n] = acc[o];
        return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    };
    f.impasse_seller_anger = mean(Outcome::impasse);
    f.resolved_seller_anger = mean(Outcome::resolved);
    return f;
}

}  // namespace dyad
