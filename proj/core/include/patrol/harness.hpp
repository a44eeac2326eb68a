#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patrol/generator.hpp"
#include "patrol/policies.hpp"

namespace patrol {

struct DayCounts {
  std::int64_t observations = 0;
  std::int64_t monitored = 0;
  std::int64_t toxic_total = 0;     // ground truth, monitored or not
  std::int64_t toxic_detected = 0;  // toxic AND monitored
};

struct EpisodeLog {
  std::vector<DayCounts> days;

  DayCounts totals() const;
  double realized_share() const;
  // Detection rate over the episode; empty when no toxic events occurred.
  std::optional<double> detection_rate() const;
};

std::optional<double> detection_rate(const EpisodeLog& log);

struct RunOptions {
  int threads = 1;
  // Seed for the per-observation decision draws (probabilistic policies).
  std::uint64_t decision_seed = 0;
  // Resume support: skip days before start_day and extend resume_log.
  std::int32_t start_day = 0;
  EpisodeLog resume_log;
  // Called after each day's update, before the next day starts.
  std::function<void(std::int32_t day, const MonitorPolicy&, const EpisodeLog&)>
      day_end;
  // When set, per-day decision bitmaps are appended here (test hook).
  std::vector<std::vector<std::uint8_t>>* decision_trace = nullptr;
};

// Day-batched episode: every observation of a day is scored against the
// policy state frozen at the previous day boundary; labels are revealed to
// the policy only for monitored observations, at the end of the day.
EpisodeLog run_episode(MonitorPolicy& policy, const MatchStream& stream,
                       std::int32_t days, const RunOptions& options = {});

enum class PolicyFamily { linucb, prob_etc, det_etc };

std::string family_name(PolicyFamily family);
PolicyFamily family_from_name(const std::string& name);

struct SweepSpec {
  std::vector<double> target_shares = {0.1, 0.2, 0.3, 0.4, 0.5,
                                       0.6, 0.7, 0.8, 0.9};
  double exploration = 1.0;  // delta for the LinUCB c-sweep
  std::vector<std::uint64_t> eval_seeds = {43, 44, 45};
  std::uint64_t calibration_seed = 1042;
  double share_tolerance = 0.005;
  int threads = 1;
  FeatureStats stats = FeatureStats::defaults();
};

void validate(const SweepSpec& spec);

std::unique_ptr<MonitorPolicy> make_policy(PolicyFamily family, double knob,
                                           const SweepSpec& spec);

// Bisection on the family's scalar knob (c for LinUCB at fixed delta,
// epsilon for prob-ETC, integer m for det-ETC) until the realized episode
// share on the calibration stream is within spec.share_tolerance of target
// (det-ETC: closest achievable m). Throws ConfigError on bracket failure.
double calibrate_to_share(PolicyFamily family, double target,
                          const SweepSpec& spec,
                          const MatchStream& calibration_stream);

struct MetricsRow {
  std::string policy;
  double param = 0.0;
  double target_share = 0.0;
  double realized_share = 0.0;
  double detection_rate = 0.0;  // NaN when no toxic events occurred
  std::uint64_t seed = 0;
  double sigma_u = 0.0;
};

// Streams are requested once per seed; callers may cache behind the factory.
using StreamFactory =
    std::function<std::shared_ptr<const MatchStream>(std::uint64_t seed)>;

// Calibrate each (family, target) on the calibration stream, then evaluate
// on every replica seed. Rows come out grouped by family, then target, then
// seed, in spec order.
std::vector<MetricsRow> sweep(const SweepSpec& spec,
                              std::span<const PolicyFamily> families,
                              const StreamFactory& stream_factory);

struct SharePoint {
  std::string policy;
  double target_share = 0.0;
  double mean_share = 0.0;
  double mean_rate = 0.0;
  double min_rate = 0.0;
  double max_rate = 0.0;
  int replicas = 0;
};

// One row per (policy, target share): detection-rate mean and min/max across
// replicas. Input rows need not be grouped.
std::vector<SharePoint> aggregate_rows(std::span<const MetricsRow> rows);

struct ImprovementRow {
  double target_share = 0.0;
  double linucb_rate = 0.0;
  double etc_rate = 0.0;
  double improvement_pp = 0.0;   // (linucb - etc) * 100
  double improvement_pct = 0.0;  // improvement_pp / etc, in percent
};

// LinUCB vs probabilistic ETC at matched target shares. Shares present for
// only one of the two policies are skipped with a warning on stderr.
std::vector<ImprovementRow> improvement_table(std::span<const MetricsRow> rows);

// Detection rates reported for a full-scale production deployment of these
// policies; carried for side-by-side context in reports.
inline constexpr std::array<double, 9> kReferenceShares = {
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
inline constexpr std::array<double, 9> kReferenceProbEtcRate = {
    0.2196, 0.3634, 0.4769, 0.5751, 0.6604, 0.7383, 0.8112, 0.8779, 0.9405};
inline constexpr std::array<double, 9> kReferenceLinUcbRate = {
    0.3202, 0.55, 0.7225, 0.8035, 0.8496, 0.8897, 0.9219, 0.9506, 0.9792};

}  // namespace patrol
