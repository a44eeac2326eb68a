#include "patrol/covariates.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "patrol/errors.hpp"

namespace patrol {

std::array<double, kCovariateCount> to_array(const CovariateRecord& rec) {
  return {rec.skill_level,          rec.avg_skill_diff_opponents,
          rec.avg_skill_diff_teammates, rec.has_party_teammates,
          rec.prop_party_teammates, rec.matches_in_session,
          rec.reports_against_24h,  rec.reports_by_24h};
}

CovariateRecord record_from_array(const std::array<double, kCovariateCount>& v) {
  CovariateRecord rec;
  rec.skill_level = v[0];
  rec.avg_skill_diff_opponents = v[1];
  rec.avg_skill_diff_teammates = v[2];
  rec.has_party_teammates = v[3];
  rec.prop_party_teammates = v[4];
  rec.matches_in_session = v[5];
  rec.reports_against_24h = v[6];
  rec.reports_by_24h = v[7];
  return rec;
}

void validate(const CovariateRecord& rec) {
  const auto values = to_array(rec);
  for (std::size_t i = 0; i < kCovariateCount; ++i) {
    if (!std::isfinite(values[i])) {
      throw ConfigError("covariate '" + std::string(kCovariateNames[i]) +
                        "' is not finite");
    }
  }
  if (rec.avg_skill_diff_opponents < 0.0 || rec.avg_skill_diff_teammates < 0.0)
    throw ConfigError("skill differences must be non-negative");
  if (rec.has_party_teammates != 0.0 && rec.has_party_teammates != 1.0)
    throw ConfigError("covariate 'has_party_teammates' must be 0 or 1");
  if (rec.prop_party_teammates < 0.0 || rec.prop_party_teammates > 1.0)
    throw ConfigError("covariate 'prop_party_teammates' must lie in [0,1]");
  if (rec.has_party_teammates == 0.0 && rec.prop_party_teammates != 0.0)
    throw ConfigError(
        "covariate 'prop_party_teammates' must be 0 without party presence");
  if (rec.matches_in_session < 0.0 || rec.reports_against_24h < 0.0 ||
      rec.reports_by_24h < 0.0)
    throw ConfigError("count covariates must be non-negative");
}

FeatureStats FeatureStats::identity() {
  FeatureStats s;
  s.mean.fill(0.0);
  s.sd.fill(1.0);
  return s;
}

FeatureStats FeatureStats::defaults() {
  FeatureStats s;
  s.mean = {-43.994, 96.025, 103.586, 0.336, 0.104, 3.751, 0.0364, 0.0449};
  s.sd = {207.828, 76.750, 85.075, 0.472, 0.185, 5.840, 0.236, 0.914};
  return s;
}

void validate(const FeatureStats& stats) {
  for (std::size_t i = 0; i < kCovariateCount; ++i) {
    if (!std::isfinite(stats.mean[i]) || !std::isfinite(stats.sd[i]) ||
        stats.sd[i] <= 0.0) {
      throw ConfigError("feature stats for '" + std::string(kCovariateNames[i]) +
                        "' must be finite with sd > 0");
    }
  }
}

FeatureVector standardize(const CovariateRecord& rec, const FeatureStats& stats) {
  const auto raw = to_array(rec);
  FeatureVector out;
  for (std::size_t i = 0; i < kCovariateCount; ++i) {
    if (!std::isfinite(raw[i])) {
      throw ConfigError("standardize: non-finite value for feature '" +
                        std::string(kCovariateNames[i]) + "'");
    }
    out[i] = (raw[i] - stats.mean[i]) / stats.sd[i];
  }
  out[kFeatureDim - 1] = 1.0;
  return out;
}

FeatureStats compute_stats(std::span<const CovariateRecord> records) {
  FeatureStats stats = FeatureStats::identity();
  if (records.empty()) return stats;

  const double n = static_cast<double>(records.size());
  std::array<double, kCovariateCount> sum{};
  std::array<double, kCovariateCount> sumsq{};
  for (const auto& rec : records) {
    const auto v = to_array(rec);
    for (std::size_t i = 0; i < kCovariateCount; ++i) {
      sum[i] += v[i];
      sumsq[i] += v[i] * v[i];
    }
  }
  for (std::size_t i = 0; i < kCovariateCount; ++i) {
    stats.mean[i] = sum[i] / n;
    const double var = sumsq[i] / n - stats.mean[i] * stats.mean[i];
    if (var > 1e-24) {
      stats.sd[i] = std::sqrt(var);
    } else {
      stats.sd[i] = 1.0;
      std::fprintf(stderr,
                   "patrol: feature '%s' has zero variance; using sd = 1\n",
                   std::string(kCovariateNames[i]).c_str());
    }
  }
  return stats;
}

}  // namespace patrol
