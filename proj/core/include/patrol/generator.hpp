#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "patrol/covariates.hpp"
#include "patrol/rng.hpp"

namespace patrol {

// Logistic intercept calibrated so the default configuration hits the target
// toxic rate; recompute with calibrate_intercept() after changing the
// coefficient vector or the marginal parameters.
inline constexpr double kDefaultLogisticIntercept = -9.282992239544253;

// Synthetic match-stream configuration: population size and cadence, the
// covariate marginals, and the logistic toxicity process on raw covariates.
struct GeneratorConfig {
  std::int64_t n_players = 100000;
  std::int32_t days = 30;
  std::int64_t matches_per_day = 9722;
  std::int32_t players_per_match = 12;  // team size x 2
  std::uint64_t seed = 42;

  // Per-player random intercept scale (log-odds).
  double sigma_u = 1.0;

  // Logistic coefficients on raw covariates, in covariate order.
  std::array<double, kCovariateCount> beta = {0.001, -0.001, 0.0,  1.566,
                                              0.697, -0.001, 0.251, 0.033};
  double beta0 = kDefaultLogisticIntercept;
  double target_toxic_rate = 0.000372;

  // Skill marginal: truncated normal.
  double skill_mean = -43.994;
  double skill_sd = 207.828;
  double skill_min = -736.0;
  double skill_max = 716.0;

  // Match composition targets (mean absolute skill differences).
  double diff_opponents_mean = 96.025;
  double diff_teammates_mean = 103.586;

  // Party covariates.
  double party_rate = 0.336;
  double party_prop_mean = 0.104;  // overall mean including the zeros
  double party_prop_alpha = 2.0;   // beta shape of the gated proportion

  // Session-length marginal (geometric) and within-day dynamics.
  double session_mean = 3.751;
  std::int64_t session_cap = 150;

  // Report-count marginals (zero-inflated Poisson) and windows.
  double reports_against_mean = 0.0364;
  double reports_against_sd = 0.236;
  std::int64_t reports_against_cap = 153;
  double reports_by_mean = 0.0449;
  double reports_by_sd = 0.914;
  std::int64_t reports_by_cap = 304;
  // Chance that a toxic event produces a report on each side.
  double report_file_prob = 0.5;

  std::int64_t events_per_day() const {
    return matches_per_day * players_per_match;
  }
  std::int64_t total_events() const { return events_per_day() * days; }
};

void validate(const GeneratorConfig& config);

struct PlayerProfile {
  std::uint32_t id = 0;
  double skill = 0.0;
  double latent_intercept = 0.0;  // u, log-odds
};

struct ObservationEvent {
  std::int32_t day = 0;
  std::int64_t match_id = 0;
  std::uint32_t player_id = 0;
  CovariateRecord covariates;
  bool toxic = false;  // ground truth, drawn exactly once at generation
};

double sigmoid(double z);

// P(toxic) = sigmoid(beta0 + beta . raw covariates + u).
double toxicity_prob(const CovariateRecord& raw, double u,
                     const std::array<double, kCovariateCount>& beta,
                     double beta0);

// n_players profiles with truncated-normal skill and N(0, sigma_u^2)
// intercepts; deterministic under the config seed.
std::vector<PlayerProfile> sample_population(const GeneratorConfig& config);

// Day-by-day synthetic stream. Report windows and session counters carry
// across matches and days, so days must be generated in order.
class StreamGenerator {
 public:
  explicit StreamGenerator(GeneratorConfig config);

  const GeneratorConfig& config() const { return config_; }
  const std::vector<PlayerProfile>& population() const { return population_; }
  std::int32_t day() const { return day_; }

  std::vector<ObservationEvent> next_day();
  void generate_day(std::vector<ObservationEvent>& out);  // appends one day

 private:
  void roll_report_windows();
  std::uint32_t nearest_by_skill(double target,
                                 std::span<const std::uint32_t> taken) const;

  GeneratorConfig config_;
  std::vector<PlayerProfile> population_;
  std::vector<double> sorted_skills_;
  std::vector<std::uint32_t> sorted_ids_;
  Rng rng_;
  std::int32_t day_ = 0;

  // Matchmaking knobs solved from the skill-difference targets.
  double match_spread_ = 0.0;
  double alternate_prob_ = 0.0;

  // Zero-inflated Poisson parameters for the exogenous report draws.
  double zip_against_pi0_ = 0.0, zip_against_lambda_ = 0.0;
  double zip_by_pi0_ = 0.0, zip_by_lambda_ = 0.0;

  double party_prop_beta_ = 0.0;  // second beta shape
  double session_reset_prob_ = 0.0;
  double conditional_prop_mean_ = 0.0;

  // Per-player evolving state.
  std::vector<std::int32_t> session_count_;
  std::vector<std::int32_t> exo_against_, exo_by_;
  std::vector<std::int32_t> endo_against_today_, endo_against_yesterday_;
  std::vector<std::int32_t> endo_by_today_, endo_by_yesterday_;

  // Scratch buffers reused across matches.
  std::vector<std::uint32_t> match_ids_;
  std::vector<double> match_skills_;
  std::vector<std::uint8_t> match_team_;
};

// Fully materialized stream with day offsets for random day access.
struct MatchStream {
  GeneratorConfig config;
  std::vector<ObservationEvent> events;
  std::vector<std::size_t> day_offsets;  // size days+1

  std::int32_t days() const {
    return static_cast<std::int32_t>(day_offsets.size()) - 1;
  }
  std::span<const ObservationEvent> day_events(std::int32_t d) const {
    return {events.data() + day_offsets[d],
            day_offsets[d + 1] - day_offsets[d]};
  }
};

MatchStream generate_stream(const GeneratorConfig& config);

// Bisection on the logistic intercept until the Monte-Carlo mean of
// toxicity_prob over a pilot stream of at least `min_pilot_events` events is
// within 5% relative of target_rate. Regenerates the pilot once with the
// solved intercept to absorb the report-feedback loop.
double calibrate_intercept(const GeneratorConfig& config, double target_rate,
                           std::int64_t min_pilot_events = 1000000);

}  // namespace patrol
