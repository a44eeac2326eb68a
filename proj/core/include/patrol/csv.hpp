#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "patrol/generator.hpp"
#include "patrol/harness.hpp"

namespace patrol {

// Observation CSV: header row, then
//   day,match_id,player_id,<8 covariates in schema order>,toxic
// Reals are written with 17 significant digits so replay is exact.
void write_observation_csv(std::ostream& os, const MatchStream& stream);
void write_observation_csv(const std::string& path, const MatchStream& stream);

// Strict reader: validates the header, field count, finiteness and the
// covariate invariants; failures name the row and column. The returned
// stream carries `config` only for bookkeeping (days, sigma_u if given).
MatchStream read_observation_csv(std::istream& is);
MatchStream read_observation_csv(const std::string& path);

// Results CSV: policy,param,target_share,realized_share,detection_rate,seed,sigma_u
// with 6 decimal places on real-valued fields.
void write_results_csv(std::ostream& os, std::span<const MetricsRow> rows);
void write_results_csv(const std::string& path, std::span<const MetricsRow> rows);
std::vector<MetricsRow> read_results_csv(std::istream& is);
std::vector<MetricsRow> read_results_csv(const std::string& path);

// Plot data: one row per (policy, target share) with the detection-rate mean
// and min/max across replicas.
void write_plot_csv(std::ostream& os, std::span<const SharePoint> points);
void write_plot_csv(const std::string& path, std::span<const SharePoint> points);

// Improvement table (LinUCB vs probabilistic ETC) side by side with the
// reference detection rates.
void write_improvement_csv(std::ostream& os, std::span<const ImprovementRow> rows);
void write_improvement_csv(const std::string& path,
                           std::span<const ImprovementRow> rows);

}  // namespace patrol
