#include "patrol/policies.hpp"

#include <vector>

#include "patrol/errors.hpp"

namespace patrol {

LinUcbPolicy::LinUcbPolicy(UcbParams params, FeatureStats stats)
    : params_(params),
      initial_stats_(stats),
      stats_(stats),
      auto_stats_(false),
      model_(static_cast<int>(kFeatureDim)) {
  validate(params_);
  validate(stats_);
}

LinUcbPolicy::LinUcbPolicy(UcbParams params)
    : params_(params),
      initial_stats_(FeatureStats::identity()),
      stats_(FeatureStats::identity()),
      auto_stats_(true),
      model_(static_cast<int>(kFeatureDim)) {
  validate(params_);
}

bool LinUcbPolicy::decide(PlayerId, const CovariateRecord& covariates,
                          double) const {
  const FeatureVector x = standardize(covariates, stats_);
  return model_.ucb_score(x, params_).monitor;
}

void LinUcbPolicy::end_of_day(std::span<const LabeledObservation> monitored) {
  if (monitored.empty()) return;
  if (auto_stats_ && !stats_frozen_) {
    std::vector<CovariateRecord> covs;
    covs.reserve(monitored.size());
    for (const auto& obs : monitored) covs.push_back(obs.covariates);
    stats_ = compute_stats(covs);
    stats_frozen_ = true;
  }
  std::vector<LabeledFeature> batch;
  batch.reserve(monitored.size());
  for (const auto& obs : monitored)
    batch.push_back(
        LabeledFeature{standardize(obs.covariates, stats_), obs.toxic ? 1.0 : 0.0});
  model_.ingest_batch(batch);
}

void LinUcbPolicy::reset() {
  model_ = LinUcbModel(static_cast<int>(kFeatureDim));
  stats_ = initial_stats_;
  stats_frozen_ = false;
}

void LinUcbPolicy::restore(ModelCheckpoint checkpoint) {
  if (checkpoint.model.dim() != model_.dim())
    throw ConfigError("policy restore: dimension mismatch");
  params_ = checkpoint.params;
  stats_ = checkpoint.stats;
  stats_frozen_ = true;
  model_ = std::move(checkpoint.model);
}

DetEtcPolicy::DetEtcPolicy(std::int64_t exploration_matches)
    : exploration_matches_(exploration_matches) {
  validate(EtcParams{EtcParams::Kind::deterministic, exploration_matches, 0.0});
}

bool DetEtcPolicy::decide(PlayerId player, const CovariateRecord&,
                          double) const {
  return decide_det_etc(ledger_, player, exploration_matches_);
}

void DetEtcPolicy::end_of_day(std::span<const LabeledObservation> monitored) {
  for (const auto& obs : monitored) ledger_.record(obs.player_id, true, obs.toxic);
}

ProbEtcPolicy::ProbEtcPolicy(double epsilon) : epsilon_(epsilon) {
  validate(EtcParams{EtcParams::Kind::probabilistic, 0, epsilon});
}

bool ProbEtcPolicy::decide(PlayerId player, const CovariateRecord&,
                           double draw) const {
  return decide_prob_etc(ledger_, player, epsilon_, draw);
}

void ProbEtcPolicy::end_of_day(std::span<const LabeledObservation> monitored) {
  for (const auto& obs : monitored) ledger_.record(obs.player_id, true, obs.toxic);
}

}  // namespace patrol
