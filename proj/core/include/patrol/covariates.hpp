#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace patrol {

inline constexpr std::size_t kCovariateCount = 8;
// 8 covariates plus a constant intercept slot, intercept last.
inline constexpr std::size_t kFeatureDim = kCovariateCount + 1;

// Pre-match covariates for one (player, match) observation.
struct CovariateRecord {
  double skill_level = 0.0;
  double avg_skill_diff_opponents = 0.0;  // >= 0
  double avg_skill_diff_teammates = 0.0;  // >= 0
  double has_party_teammates = 0.0;       // {0,1}
  double prop_party_teammates = 0.0;      // [0,1]; 0 whenever has_party_teammates = 0
  double matches_in_session = 0.0;        // count
  double reports_against_24h = 0.0;       // count
  double reports_by_24h = 0.0;            // count
};

inline constexpr std::array<std::string_view, kCovariateCount> kCovariateNames = {
    "skill_level",
    "avg_skill_diff_opponents",
    "avg_skill_diff_teammates",
    "has_party_teammates",
    "prop_party_teammates",
    "matches_in_session",
    "reports_against_24h",
    "reports_by_24h",
};

std::array<double, kCovariateCount> to_array(const CovariateRecord& rec);
CovariateRecord record_from_array(const std::array<double, kCovariateCount>& values);

// Throws ConfigError naming the offending field if the record violates its
// invariants (non-finite value, negative count, proportion out of range,
// party proportion without party presence).
void validate(const CovariateRecord& rec);

// Per-feature location/scale applied before scoring. Scales are strictly
// positive; degenerate features are stored with sd = 1 so they contribute
// only through the intercept.
struct FeatureStats {
  std::array<double, kCovariateCount> mean{};
  std::array<double, kCovariateCount> sd{};

  // mean 0 / sd 1 everywhere: standardization becomes a raw passthrough.
  static FeatureStats identity();
  // Published population statistics used for synthetic runs.
  static FeatureStats defaults();
};

void validate(const FeatureStats& stats);

using FeatureVector = std::array<double, kFeatureDim>;

// z-scores the 8 covariates against `stats` and appends the constant 1
// intercept slot. Rejects non-finite inputs with a diagnostic naming the
// feature.
FeatureVector standardize(const CovariateRecord& rec, const FeatureStats& stats);

// Sample mean/sd per feature; zero-variance features get sd = 1 (a warning
// is emitted once per call on stderr naming them).
FeatureStats compute_stats(std::span<const CovariateRecord> records);

}  // namespace patrol
