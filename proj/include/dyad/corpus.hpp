#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyad {

enum class Role : std::uint8_t { buyer, seller };
inline constexpr std::array<Role, 2> kRoles{Role::buyer, Role::seller};

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

/// Walk-away endings are recorded as impasse.
enum class Outcome : std::uint8_t { resolved, impasse };
inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::resolved, Outcome::impasse};

std::string_view to_string(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view name);

enum class SviSubscale : std::uint8_t { outcome_feeling, process, relationship, self_feeling };
inline constexpr std::array<SviSubscale, 4> kSviSubscales{
    SviSubscale::outcome_feeling, SviSubscale::process, SviSubscale::relationship,
    SviSubscale::self_feeling};

std::string_view to_string(SviSubscale scale);

struct SviReport {
    double outcome_feeling = 0.0;
    double process = 0.0;
    double relationship = 0.0;
    double self_feeling = 0.0;

    double operator[](SviSubscale scale) const;
    friend bool operator==(const SviReport&, const SviReport&) = default;
};

/// Per-role questionnaire answers. Either part may be missing (attrition).
struct SelfReport {
    std::optional<double> frustration;
    std::optional<SviReport> svi;

    friend bool operator==(const SelfReport&, const SelfReport&) = default;
};

struct Utterance {
    int turn_index = 0;
    Role speaker = Role::buyer;
    std::string text;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Dialogue {
    std::string id;
    std::vector<Utterance> turns;
    Outcome outcome = Outcome::resolved;
    std::map<Role, SelfReport> reports;

    const SelfReport* report(Role role) const;
    const Utterance& turn(int turn_index) const;

    friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

inline constexpr std::string_view kCorpusSchemaVersion = "1.0";

struct Corpus {
    std::string schema_version{kCorpusSchemaVersion};
    std::vector<Dialogue> dialogues;

    const Dialogue* find(std::string_view id) const;
    std::size_t utterance_count() const;

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Response scale shared by the frustration and SVI instruments.
struct ScaleRange {
    double min = 1.0;
    double max = 7.0;

    bool contains(double v) const { return v >= min && v <= max; }
};

/// Identifies one utterance across a corpus.
struct UtteranceKey {
    std::string dialogue_id;
    int turn_index = 0;

    friend auto operator<=>(const UtteranceKey&, const UtteranceKey&) = default;
    friend bool operator==(const UtteranceKey&, const UtteranceKey&) = default;
};

std::string to_string(const UtteranceKey& key);

/// Throws SchemaError naming the dialogue and field on the first violation.
void validate_dialogue(const Dialogue& dialogue, const ScaleRange& scale = {});
void validate_corpus(const Corpus& corpus, const ScaleRange& scale = {});

Corpus parse_corpus_text(std::string_view text, const ScaleRange& scale = {});
Corpus parse_corpus(const std::filesystem::path& path, const ScaleRange& scale = {});
std::string serialize_corpus(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Mean of buyer and seller frustration. Throws MissingReportError.
double dyad_frustration(const Dialogue& dialogue);
std::optional<double> try_dyad_frustration(const Dialogue& dialogue);

}  // namespace dyad
