#pragma once

#include "dyad/annotate.hpp"
#include "dyad/corpus.hpp"
#include "dyad/emotion.hpp"
#include "dyad/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dyad {

class AnalysisError : public Error {
public:
    using Error::Error;
};

/// Mean vector over a dialogue's annotated utterances, optionally only those
/// spoken by `role`. Empty when no such utterance has a vector.
std::optional<EmotionVector> dialogue_mean(const Dialogue& dialogue, const AnnotationSet& annotations,
                                           std::optional<Role> role = std::nullopt);

// ---------------------------------------------------------------------------
// Frustration correlations

struct LabelCorrelation {
    EmotionLabel label = EmotionLabel::neutral;
    std::optional<CorrelationResult> result;  // empty when not computable
    std::string note;
};

struct FrustrationCorrelationTable {
    AnnotatorId annotator;
    /// nullopt: dyad-average frustration against whole-dialogue means.
    std::optional<Role> role;
    /// One row per label of the annotator's schema, canonical order.
    std::vector<LabelCorrelation> rows;
    std::size_t used = 0;
    std::size_t skipped_missing_reports = 0;
    std::size_t skipped_unannotated = 0;

    const LabelCorrelation* row(EmotionLabel label) const;
};

/// Correlates each label's dialogue-mean intensity with dyad frustration.
/// Throws AnalysisError when fewer than 2 dialogues are usable.
FrustrationCorrelationTable frustration_correlations(const Corpus& corpus, const AnnotationSet& annotations);
/// Per-role variant: the role's own frustration against its own utterances.
FrustrationCorrelationTable frustration_correlations_by_role(const Corpus& corpus, const AnnotationSet& annotations,
                                                             Role role);

// ---------------------------------------------------------------------------
// SVI regression

enum class PredictorScheme {
    /// Both parties' mean vectors, reference label dropped from each, intercept.
    both_sides,
    /// The reporting party's mean vector only, reference label dropped, intercept.
    own_side,
    /// Buyer full vector, seller with the reference label dropped, no intercept.
    both_sides_no_intercept,
    /// Both parties' full mean vectors plus intercept; collinear by construction.
    all_labels_with_intercept,
};

std::string_view to_string(PredictorScheme scheme);
std::optional<PredictorScheme> parse_predictor_scheme(std::string_view name);

/// Label dropped to break the simplex collinearity: the last label of the
/// schema in canonical order (neutral when present).
EmotionLabel reference_label(const LabelSet& labels);

struct SviCell {
    Role role = Role::buyer;
    SviSubscale scale = SviSubscale::outcome_feeling;
    RegressionResult fit;
    std::size_t skipped = 0;
    /// Predictors with no variation across the usable dialogues.
    std::vector<std::string> dropped_constant;
};

struct SviFitReport {
    AnnotatorId annotator;
    PredictorScheme scheme = PredictorScheme::both_sides;
    /// Role-major, sub-scales in instrument order.
    std::vector<SviCell> cells;
    std::map<Role, double> mean_r_squared;
    /// Mean over all eight cells.
    double pooled_mean_r_squared = 0.0;

    const SviCell& cell(Role role, SviSubscale scale) const;
};

/// Regresses each role's four SVI sub-scales on dialogue-mean intensities.
/// RankDeficiencyError and InsufficientDataError carry the annotator and cell.
SviFitReport svi_regression(const Corpus& corpus, const AnnotationSet& annotations,
                            PredictorScheme scheme = PredictorScheme::both_sides);

struct AblationRow {
    std::string config;
    double mean_r_squared = 0.0;
    std::map<Role, double> role_mean_r_squared;
};

/// One row per configuration, sorted by pooled mean R^2 descending; ties keep
/// input order. Needs at least two configurations.
std::vector<AblationRow> ablation_compare(const Corpus& corpus,
                                          const std::vector<std::pair<std::string, AnnotationSet>>& configs,
                                          PredictorScheme scheme = PredictorScheme::both_sides);
std::vector<AblationRow> ablation_rows(const std::vector<std::pair<std::string, SviFitReport>>& reports);

// ---------------------------------------------------------------------------
// Trajectories

inline constexpr int kDefaultMaxTurn = 12;

struct TrajectoryPoint {
    int turn_index = 0;
    double mean = 0.0;
    std::size_t n = 0;
};

struct TrajectoryProfile {
    EmotionLabel emotion = EmotionLabel::anger;
    Role role = Role::buyer;
    Outcome outcome = Outcome::resolved;
    std::size_t cohort_dialogues = 0;
    /// Turns with no contributing utterance are omitted.
    std::vector<TrajectoryPoint> points;
};

/// Profiles for (buyer, resolved), (buyer, impasse), (seller, resolved),
/// (seller, impasse), in that order. The speaker of each turn comes from the data.
std::vector<TrajectoryProfile> trajectories(const Corpus& corpus, const AnnotationSet& annotations,
                                            EmotionLabel emotion, int max_turn = kDefaultMaxTurn);

// ---------------------------------------------------------------------------
// Human agreement

struct HumanAnnotation {
    std::string annotator;
    UtteranceKey key;
    EmotionVector vector = EmotionVector::one_hot(EmotionLabel::neutral);
};

struct HumanAnnotations {
    LabelSet label_set;
    std::vector<HumanAnnotation> records;
};

/// {"labels": [...], "annotations": [{"annotator", "dialogue_id", "turn_index",
/// "weights": {label: w}}]}. Raw weights may be any non-negative numbers and
/// are rescaled onto the simplex.
HumanAnnotations load_human_annotations(const std::filesystem::path& path);
HumanAnnotations parse_human_annotations(std::string_view text);

class CoverageError : public AnalysisError {
public:
    CoverageError(UtteranceKey key, std::size_t annotators)
        : AnalysisError("utterance " + to_string(key) + " has " + std::to_string(annotators) +
                        " distinct human annotator(s); at least 2 required"),
          key_(std::move(key)) {}
    const UtteranceKey& key() const noexcept { return key_; }

private:
    UtteranceKey key_;
};

/// Unweighted mean across annotators per utterance.
std::map<UtteranceKey, EmotionVector> aggregate_human(const std::vector<HumanAnnotation>& records);

struct AgreementRow {
    EmotionLabel label = EmotionLabel::neutral;
    std::optional<CorrelationResult> result;
    std::string note;
};

struct AgreementReport {
    AnnotatorId annotator;
    LabelSet shared_labels;
    std::size_t shared_utterances = 0;
    std::vector<AgreementRow> rows;

    const AgreementRow* row(EmotionLabel label) const;
};

AgreementReport agreement(const AnnotationSet& model, const std::map<UtteranceKey, EmotionVector>& human_means,
                          const LabelSet& human_labels);

/// Seeded sample without replacement; all keys when fewer than n exist.
std::vector<UtteranceKey> sample_utterances(std::vector<UtteranceKey> keys, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Directional findings on real data

struct DirectionalFindings {
    double anger_frustration_r = 0.0;
    double joy_frustration_r = 0.0;
    double impasse_seller_anger = 0.0;   // turns >= 3, up to max_turn
    double resolved_seller_anger = 0.0;
    bool anger_positive() const { return anger_frustration_r > 0.0; }
    bool joy_negative() const { return joy_frustration_r < 0.0; }
    bool impasse_seller_angrier() const { return impasse_seller_anger > resolved_seller_anger; }
    bool all_hold() const { return anger_positive() && joy_negative() && impasse_seller_angrier(); }
};

DirectionalFindings directional_findings(const Corpus& corpus, const AnnotationSet& annotations,
                                         int max_turn = kDefaultMaxTurn);

}  // namespace dyad
