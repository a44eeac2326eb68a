#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "patrol/covariates.hpp"
#include "patrol/errors.hpp"

using namespace patrol;

namespace {

CovariateRecord record_at_means(const FeatureStats& stats) {
  return record_from_array(stats.mean);
}

}  // namespace

TEST_CASE("standardize: raw values at the means give zeros plus intercept") {
  const FeatureStats stats = FeatureStats::defaults();
  const FeatureVector x = standardize(record_at_means(stats), stats);
  for (std::size_t i = 0; i < kCovariateCount; ++i) CHECK(x[i] == 0.0);
  CHECK(x[kFeatureDim - 1] == 1.0);
}

TEST_CASE("standardize: published skill location and scale") {
  const FeatureStats stats = FeatureStats::defaults();
  CHECK(stats.mean[0] == -43.994);
  CHECK(stats.sd[0] == 207.828);
  CovariateRecord rec = record_at_means(stats);
  rec.skill_level = -43.994;
  CHECK(standardize(rec, stats)[0] == 0.0);
}

TEST_CASE("standardize: one-sd offsets give ones") {
  const FeatureStats stats = FeatureStats::defaults();
  std::array<double, kCovariateCount> raw;
  for (std::size_t i = 0; i < kCovariateCount; ++i)
    raw[i] = stats.mean[i] + stats.sd[i];
  const FeatureVector x = standardize(record_from_array(raw), stats);
  for (std::size_t i = 0; i < kCovariateCount; ++i)
    CHECK(x[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x[kFeatureDim - 1] == 1.0);
}

TEST_CASE("standardize: non-finite input is rejected naming the feature") {
  const FeatureStats stats = FeatureStats::defaults();
  CovariateRecord rec = record_at_means(stats);
  rec.reports_by_24h = std::nan("");
  CHECK_THROWS_WITH_AS(standardize(rec, stats),
                       doctest::Contains("reports_by_24h"), ConfigError);
}

TEST_CASE("covariate invariants are enforced") {
  CovariateRecord rec;
  rec.has_party_teammates = 0.0;
  rec.prop_party_teammates = 0.2;
  CHECK_THROWS_AS(validate(rec), ConfigError);

  rec = CovariateRecord{};
  rec.prop_party_teammates = 1.5;
  rec.has_party_teammates = 1.0;
  CHECK_THROWS_AS(validate(rec), ConfigError);

  rec = CovariateRecord{};
  rec.reports_against_24h = -1.0;
  CHECK_THROWS_AS(validate(rec), ConfigError);

  rec = CovariateRecord{};
  rec.has_party_teammates = 1.0;
  rec.prop_party_teammates = 0.4;
  CHECK_NOTHROW(validate(rec));
}

TEST_CASE("compute_stats: degenerate features fall back to sd = 1") {
  std::vector<CovariateRecord> records(5);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].skill_level = static_cast<double>(i) * 10.0;
    records[i].has_party_teammates = 1.0;  // constant
    records[i].prop_party_teammates = 0.25;
  }
  const FeatureStats stats = compute_stats(records);
  CHECK(stats.sd[3] == 1.0);
  CHECK(stats.mean[3] == 1.0);
  CHECK(stats.sd[0] > 1.0);
  CHECK(stats.mean[0] == doctest::Approx(20.0));
}
