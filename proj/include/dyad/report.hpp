#pragma once

#include "dyad/analysis.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dyad {

// Tab-separated tables (header row first) and structured counterparts.
// Numbers use 10 significant digits; non-computable cells print "NA".

std::string frustration_table_tsv(const FrustrationCorrelationTable& table);
std::string svi_cells_tsv(const SviFitReport& report);
std::string svi_coefficients_tsv(const SviFitReport& report);
std::string svi_means_tsv(const SviFitReport& report);
std::string ablation_tsv(const std::vector<AblationRow>& rows);
std::string trajectory_tsv(const std::vector<TrajectoryProfile>& profiles);
std::string agreement_tsv(const AgreementReport& report);

nlohmann::ordered_json to_json(const AnnotatorId& id);
nlohmann::ordered_json to_json(const FrustrationCorrelationTable& table);
nlohmann::ordered_json to_json(const SviFitReport& report);
nlohmann::ordered_json to_json(const std::vector<AblationRow>& rows);
nlohmann::ordered_json to_json(const std::vector<TrajectoryProfile>& profiles);
nlohmann::ordered_json to_json(const AgreementReport& report);

}  // namespace dyad
