#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "patrol/covariates.hpp"
#include "patrol/ledger.hpp"
#include "patrol/linucb.hpp"

namespace patrol {

struct LabeledObservation {
  PlayerId player_id = 0;
  CovariateRecord covariates;
  bool toxic = false;
};

// Day-frozen monitoring policy. decide() is read-only (safe to call
// concurrently within a day) and never sees labels; the harness reveals
// labels only for monitored observations, at the day boundary.
class MonitorPolicy {
 public:
  virtual ~MonitorPolicy() = default;

  virtual std::string name() const = 0;
  // The scalar knob the sweep calibrates (c, epsilon or m).
  virtual double param() const = 0;

  // draw is a uniform [0,1) value supplied by the harness; policies that do
  // not randomize ignore it.
  virtual bool decide(PlayerId player, const CovariateRecord& covariates,
                      double draw) const = 0;

  virtual void end_of_day(std::span<const LabeledObservation> monitored) = 0;

  virtual void reset() = 0;
};

// LinUCB monitoring policy. With fixed stats the standardization is constant
// for the whole run; in frozen-from-stream mode the stats are computed from
// the first day that produced monitored observations and kept thereafter.
class LinUcbPolicy final : public MonitorPolicy {
 public:
  // Fixed standardization (synthetic runs use FeatureStats::defaults()).
  LinUcbPolicy(UcbParams params, FeatureStats stats);
  // Replay mode: freeze stats from the first day's monitored observations.
  explicit LinUcbPolicy(UcbParams params);

  std::string name() const override { return "linucb"; }
  double param() const override { return params_.cost; }
  bool decide(PlayerId player, const CovariateRecord& covariates,
              double draw) const override;
  void end_of_day(std::span<const LabeledObservation> monitored) override;
  void reset() override;

  const LinUcbModel& model() const { return model_; }
  const FeatureStats& stats() const { return stats_; }
  const UcbParams& params() const { return params_; }
  bool stats_frozen() const { return stats_frozen_; }

  void restore(ModelCheckpoint checkpoint);

 private:
  UcbParams params_;
  FeatureStats initial_stats_;
  FeatureStats stats_;
  bool auto_stats_ = false;
  bool stats_frozen_ = false;
  LinUcbModel model_;
};

class DetEtcPolicy final : public MonitorPolicy {
 public:
  explicit DetEtcPolicy(std::int64_t exploration_matches);

  std::string name() const override { return "det-etc"; }
  double param() const override {
    return static_cast<double>(exploration_matches_);
  }
  bool decide(PlayerId player, const CovariateRecord& covariates,
              double draw) const override;
  void end_of_day(std::span<const LabeledObservation> monitored) override;
  void reset() override { ledger_.clear(); }

  PlayerLedger& ledger() { return ledger_; }
  const PlayerLedger& ledger() const { return ledger_; }

 private:
  std::int64_t exploration_matches_;
  PlayerLedger ledger_;
};

class ProbEtcPolicy final : public MonitorPolicy {
 public:
  explicit ProbEtcPolicy(double epsilon);

  std::string name() const override { return "prob-etc"; }
  double param() const override { return epsilon_; }
  bool decide(PlayerId player, const CovariateRecord& covariates,
              double draw) const override;
  void end_of_day(std::span<const LabeledObservation> monitored) override;
  void reset() override { ledger_.clear(); }

  PlayerLedger& ledger() { return ledger_; }
  const PlayerLedger& ledger() const { return ledger_; }

 private:
  double epsilon_;
  PlayerLedger ledger_;
};

// monitor-everything / monitor-nothing, for tests and baselines.
class FixedPolicy final : public MonitorPolicy {
 public:
  explicit FixedPolicy(bool monitor) : monitor_(monitor) {}

  std::string name() const override { return monitor_ ? "always" : "never"; }
  double param() const override { return monitor_ ? 1.0 : 0.0; }
  bool decide(PlayerId, const CovariateRecord&, double) const override {
    return monitor_;
  }
  void end_of_day(std::span<const LabeledObservation>) override {}
  void reset() override {}

 private:
  bool monitor_;
};

}  // namespace patrol
