#include "patrol/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "patrol/errors.hpp"

namespace patrol {

namespace {

constexpr std::uint64_t kPopulationSalt = 0x706f70756c617465ULL;
constexpr std::uint64_t kStreamSalt = 0x73747265616d3031ULL;
constexpr std::uint64_t kMatchCalibSalt = 0x6d617463686d6b31ULL;
constexpr std::uint64_t kSelectionPilotSalt = 0x70696c6f74646179ULL;

// Mean absolute skill differences produced by one team-assignment pattern,
// per unit of within-match spread. Estimated once per configuration by Monte
// Carlo on standard-normal skills (match = anchor at 0 plus n-1 draws).
struct PatternConstants {
  double alt_opponents = 0.0;
  double alt_teammates = 0.0;
  double rand_opponents = 0.0;
  double rand_teammates = 0.0;
};

PatternConstants estimate_pattern_constants(int players_per_match) {
  const int n = players_per_match;
  const int team = n / 2;
  const int trials = 120000;
  Rng rng(kMatchCalibSalt);

  std::vector<double> skills(n);
  std::vector<int> labels(n);
  PatternConstants out;

  double alt_opp = 0.0, alt_team = 0.0, rand_opp = 0.0, rand_team = 0.0;
  for (int t = 0; t < trials; ++t) {
    skills[0] = 0.0;
    for (int i = 1; i < n; ++i) skills[i] = rng.normal();
    std::sort(skills.begin(), skills.end());

    // Random assignment labels (the alternating labels are implicit in the
    // sorted index parity).
    for (int i = 0; i < n; ++i) labels[i] = i < team ? 0 : 1;
    for (int i = n - 1; i > 0; --i)
      std::swap(labels[i], labels[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);

    double ao = 0.0, at = 0.0, ro = 0.0, rt = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = skills[j] - skills[i];
        if ((i & 1) == (j & 1))
          at += d;
        else
          ao += d;
        if (labels[i] == labels[j])
          rt += d;
        else
          ro += d;
      }
    alt_opp += ao;
    alt_team += at;
    rand_opp += ro;
    rand_team += rt;
  }
  // Player-averaged means: cross pairs appear in `team` opponent slots on
  // each of the 2*team players, within pairs in (team-1) teammate slots.
  const double cross_scale = 1.0 / (static_cast<double>(trials) * team * team);
  const double within_scale =
      team > 1 ? 1.0 / (static_cast<double>(trials) * team * (team - 1)) : 0.0;
  out.alt_opponents = alt_opp * cross_scale;
  out.alt_teammates = alt_team * within_scale;
  out.rand_opponents = rand_opp * cross_scale;
  out.rand_teammates = rand_team * within_scale;
  return out;
}

struct ZipParams {
  double pi0 = 0.0;
  double lambda = 0.0;
};

// Solve (pi0, lambda) so the zero-inflated Poisson matches the requested
// mean and (approximately) the requested sd; falls back to plain Poisson for
// underdispersed targets.
ZipParams solve_zip(double mean, double sd) {
  ZipParams p;
  if (mean <= 0.0) return p;  // degenerate: always zero
  const double var = sd * sd;
  const double pilam = var / mean - 1.0;
  if (pilam <= 0.0) {
    p.pi0 = 0.0;
    p.lambda = mean;
    return p;
  }
  p.pi0 = 1.0 / (1.0 + mean / pilam);
  p.lambda = pilam / p.pi0;
  return p;
}

}  // namespace

void validate(const GeneratorConfig& c) {
  if (c.n_players <= 0) throw ConfigError("n_players must be positive");
  if (c.days <= 0) throw ConfigError("days must be positive");
  if (c.matches_per_day <= 0) throw ConfigError("matches_per_day must be positive");
  if (c.players_per_match < 2 || c.players_per_match % 2 != 0)
    throw ConfigError("players_per_match must be even and >= 2");
  if (c.n_players < c.players_per_match)
    throw ConfigError("n_players must be at least players_per_match");
  if (!(c.sigma_u >= 0.0) || !std::isfinite(c.sigma_u))
    throw ConfigError("sigma_u must be finite and >= 0");
  for (double b : c.beta)
    if (!std::isfinite(b)) throw ConfigError("beta entries must be finite");
  if (!std::isfinite(c.beta0)) throw ConfigError("beta0 must be finite");
  if (!(c.target_toxic_rate > 0.0 && c.target_toxic_rate < 1.0))
    throw ConfigError("target_toxic_rate must lie in (0,1)");
  if (!(c.skill_sd > 0.0)) throw ConfigError("skill_sd must be positive");
  if (!(c.skill_min < c.skill_max))
    throw ConfigError("skill_min must be below skill_max");
  if (!(c.party_rate >= 0.0 && c.party_rate <= 1.0))
    throw ConfigError("party_rate must lie in [0,1]");
  if (c.party_rate > 0.0) {
    const double cond = c.party_prop_mean / c.party_rate;
    if (!(cond > 0.0 && cond < 1.0))
      throw ConfigError("party_prop_mean / party_rate must lie in (0,1)");
  }
  if (!(c.party_prop_alpha > 0.0))
    throw ConfigError("party_prop_alpha must be positive");
  if (!(c.session_mean >= 0.0)) throw ConfigError("session_mean must be >= 0");
  if (c.session_cap <= 0) throw ConfigError("session_cap must be positive");
  if (c.reports_against_mean < 0.0 || c.reports_by_mean < 0.0)
    throw ConfigError("report means must be >= 0");
  if (c.reports_against_cap <= 0 || c.reports_by_cap <= 0)
    throw ConfigError("report caps must be positive");
  if (!(c.report_file_prob >= 0.0 && c.report_file_prob <= 1.0))
    throw ConfigError("report_file_prob must lie in [0,1]");
  if (!(c.diff_opponents_mean > 0.0) || !(c.diff_teammates_mean > 0.0))
    throw ConfigError("skill-difference targets must be positive");
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double toxicity_prob(const CovariateRecord& raw, double u,
                     const std::array<double, kCovariateCount>& beta,
                     double beta0) {
  const auto x = to_array(raw);
  double z = beta0 + u;
  for (std::size_t i = 0; i < kCovariateCount; ++i) z += beta[i] * x[i];
  return sigmoid(z);
}

std::vector<PlayerProfile> sample_population(const GeneratorConfig& config) {
  validate(config);
  Rng rng(config.seed ^ kPopulationSalt);
  std::vector<PlayerProfile> players(static_cast<std::size_t>(config.n_players));
  for (std::size_t i = 0; i < players.size(); ++i) {
    players[i].id = static_cast<std::uint32_t>(i);
    players[i].skill = rng.truncated_normal(config.skill_mean, config.skill_sd,
                                            config.skill_min, config.skill_max);
    players[i].latent_intercept =
        config.sigma_u > 0.0 ? rng.normal(0.0, config.sigma_u) : 0.0;
  }
  return players;
}

StreamGenerator::StreamGenerator(GeneratorConfig config)
    : config_(std::move(config)), rng_(config_.seed ^ kStreamSalt) {
  validate(config_);
  population_ = sample_population(config_);

  const std::size_t n = population_.size();
  sorted_ids_.resize(n);
  std::iota(sorted_ids_.begin(), sorted_ids_.end(), 0u);
  std::sort(sorted_ids_.begin(), sorted_ids_.end(),
            [this](std::uint32_t a, std::uint32_t b) {
              if (population_[a].skill != population_[b].skill)
                return population_[a].skill < population_[b].skill;
              return a < b;
            });
  sorted_skills_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    sorted_skills_[i] = population_[sorted_ids_[i]].skill;

  // Solve the two matchmaking knobs (within-match spread, share of
  // rank-alternating team splits) against the two skill-difference targets.
  const PatternConstants k = estimate_pattern_constants(config_.players_per_match);
  if (config_.players_per_match == 2) {
    alternate_prob_ = 0.0;
    match_spread_ = config_.diff_opponents_mean / k.rand_opponents;
  } else {
    const double ratio = config_.diff_teammates_mean / config_.diff_opponents_mean;
    const double num = ratio * k.rand_opponents - k.rand_teammates;
    const double den =
        (k.alt_teammates - k.rand_teammates) - ratio * (k.alt_opponents - k.rand_opponents);
    double q = den != 0.0 ? num / den : 0.0;
    if (q < 0.0 || q > 1.0) {
      std::fprintf(stderr,
                   "patrol: skill-difference targets outside the reachable "
                   "ratio band; clamping team-split mix\n");
      q = std::clamp(q, 0.0, 1.0);
    }
    alternate_prob_ = q;
    match_spread_ = config_.diff_opponents_mean /
                    (q * k.alt_opponents + (1.0 - q) * k.rand_opponents);
  }

  // Exogenous report means are lowered by the expected in-window endogenous
  // contribution so the observed covariate means stay on target. Selection
  // rates vary across players (skill-gap ownership in the snapping step), so
  // the observation-weighted window sees E[nu^2]/E[nu] matches per player-day
  // rather than the plain mean; estimate it from one pilot day of selections.
  double selection_second_moment_ratio;  // E[m^2]/E[m] over one day
  {
    Rng pilot(kSelectionPilotSalt);
    std::vector<std::int32_t> counts(n, 0);
    std::vector<std::uint32_t> picked(
        static_cast<std::size_t>(config_.players_per_match));
    for (std::int64_t m = 0; m < config_.matches_per_day; ++m) {
      picked[0] = static_cast<std::uint32_t>(
          pilot.uniform_int(static_cast<std::uint64_t>(config_.n_players)));
      const double anchor = population_[picked[0]].skill;
      for (int j = 1; j < config_.players_per_match; ++j) {
        const double target = anchor + pilot.normal(0.0, match_spread_);
        picked[j] = nearest_by_skill(
            target, std::span<const std::uint32_t>(picked.data(),
                                                   static_cast<std::size_t>(j)));
      }
      for (int j = 0; j < config_.players_per_match; ++j) counts[picked[j]] += 1;
    }
    double s1 = 0.0, s2 = 0.0;
    for (const std::int32_t c : counts) {
      s1 += c;
      s2 += static_cast<double>(c) * c;
    }
    selection_second_moment_ratio = s1 > 0.0 ? s2 / s1 : 1.0;
  }
  const double teammates = config_.players_per_match / 2.0 - 1.0;
  const double endo_visible = 1.5 * (selection_second_moment_ratio - 1.0) *
                              config_.target_toxic_rate * teammates *
                              config_.report_file_prob;
  const auto zip_a = solve_zip(
      std::max(config_.reports_against_mean - endo_visible, 0.0),
      config_.reports_against_sd);
  const auto zip_b = solve_zip(
      std::max(config_.reports_by_mean - endo_visible, 0.0),
      config_.reports_by_sd);
  zip_against_pi0_ = zip_a.pi0;
  zip_against_lambda_ = zip_a.lambda;
  zip_by_pi0_ = zip_b.pi0;
  zip_by_lambda_ = zip_b.lambda;

  const double cond_mean =
      config_.party_rate > 0.0 ? config_.party_prop_mean / config_.party_rate : 0.0;
  conditional_prop_mean_ = cond_mean;
  party_prop_beta_ = cond_mean > 0.0
                         ? config_.party_prop_alpha * (1.0 - cond_mean) / cond_mean
                         : 1.0;
  session_reset_prob_ = 1.0 / (1.0 + config_.session_mean);

  session_count_.resize(n);
  for (auto& s : session_count_)
    s = static_cast<std::int32_t>(
        std::min<std::int64_t>(rng_.geometric(config_.session_mean), config_.session_cap));
  exo_against_.assign(n, 0);
  exo_by_.assign(n, 0);
  endo_against_today_.assign(n, 0);
  endo_against_yesterday_.assign(n, 0);
  endo_by_today_.assign(n, 0);
  endo_by_yesterday_.assign(n, 0);

  match_ids_.resize(config_.players_per_match);
  match_skills_.resize(config_.players_per_match);
  match_team_.resize(config_.players_per_match);
}

void StreamGenerator::roll_report_windows() {
  std::swap(endo_against_yesterday_, endo_against_today_);
  std::swap(endo_by_yesterday_, endo_by_today_);
  std::fill(endo_against_today_.begin(), endo_against_today_.end(), 0);
  std::fill(endo_by_today_.begin(), endo_by_today_.end(), 0);
  for (std::size_t i = 0; i < exo_against_.size(); ++i) {
    exo_against_[i] = static_cast<std::int32_t>(
        rng_.zero_inflated_poisson(zip_against_pi0_, zip_against_lambda_));
    exo_by_[i] = static_cast<std::int32_t>(
        rng_.zero_inflated_poisson(zip_by_pi0_, zip_by_lambda_));
  }
}

std::uint32_t StreamGenerator::nearest_by_skill(
    double target, std::span<const std::uint32_t> taken) const {
  const auto is_taken = [&taken](std::uint32_t id) {
    return std::find(taken.begin(), taken.end(), id) != taken.end();
  };
  const auto begin = sorted_skills_.begin();
  std::size_t right = static_cast<std::size_t>(
      std::lower_bound(begin, sorted_skills_.end(), target) - begin);
  std::size_t left = right;  // candidates are [left-1] and [right]

  for (;;) {
    const bool has_left = left > 0;
    const bool has_right = right < sorted_skills_.size();
    if (!has_left && !has_right) throw NumericError("matchmaking: pool exhausted");
    bool pick_left;
    if (!has_left) {
      pick_left = false;
    } else if (!has_right) {
      pick_left = true;
    } else {
      pick_left = (target - sorted_skills_[left - 1]) <=
                  (sorted_skills_[right] - target);
    }
    if (pick_left) {
      const std::uint32_t id = sorted_ids_[left - 1];
      if (!is_taken(id)) return id;
      --left;
    } else {
      const std::uint32_t id = sorted_ids_[right];
      if (!is_taken(id)) return id;
      ++right;
    }
  }
}

std::vector<ObservationEvent> StreamGenerator::next_day() {
  std::vector<ObservationEvent> out;
  out.reserve(static_cast<std::size_t>(config_.events_per_day()));
  generate_day(out);
  return out;
}

void StreamGenerator::generate_day(std::vector<ObservationEvent>& out) {
  const int ppm = config_.players_per_match;
  const int team = ppm / 2;
  roll_report_windows();

  for (std::int64_t m = 0; m < config_.matches_per_day; ++m) {
    const std::int64_t match_id =
        static_cast<std::int64_t>(day_) * config_.matches_per_day + m;

    // Anchor plus skill-banded fill.
    match_ids_[0] = static_cast<std::uint32_t>(
        rng_.uniform_int(static_cast<std::uint64_t>(config_.n_players)));
    const double anchor_skill = population_[match_ids_[0]].skill;
    for (int j = 1; j < ppm; ++j) {
      const double target = anchor_skill + rng_.normal(0.0, match_spread_);
      match_ids_[j] = nearest_by_skill(
          target, std::span<const std::uint32_t>(match_ids_.data(),
                                                 static_cast<std::size_t>(j)));
    }

    std::sort(match_ids_.begin(), match_ids_.end(),
              [this](std::uint32_t a, std::uint32_t b) {
                if (population_[a].skill != population_[b].skill)
                  return population_[a].skill < population_[b].skill;
                return a < b;
              });
    for (int j = 0; j < ppm; ++j)
      match_skills_[j] = population_[match_ids_[j]].skill;

    if (rng_.bernoulli(alternate_prob_)) {
      for (int j = 0; j < ppm; ++j) match_team_[j] = static_cast<std::uint8_t>(j % 2);
    } else {
      for (int j = 0; j < ppm; ++j) match_team_[j] = static_cast<std::uint8_t>(j < team ? 0 : 1);
      for (int j = ppm - 1; j > 0; --j) {
        const int k = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(j) + 1));
        std::swap(match_team_[j], match_team_[k]);
      }
    }

    const std::size_t first_event = out.size();
    for (int j = 0; j < ppm; ++j) {
      const std::uint32_t pid = match_ids_[j];
      double team_sum = 0.0, opp_sum = 0.0;
      for (int k = 0; k < ppm; ++k) {
        if (k == j) continue;
        const double d = std::abs(match_skills_[j] - match_skills_[k]);
        if (match_team_[k] == match_team_[j])
          team_sum += d;
        else
          opp_sum += d;
      }

      CovariateRecord cov;
      cov.skill_level = match_skills_[j];
      cov.avg_skill_diff_opponents = opp_sum / team;
      cov.avg_skill_diff_teammates = team > 1 ? team_sum / (team - 1) : 0.0;
      const bool has_party = rng_.bernoulli(config_.party_rate);
      cov.has_party_teammates = has_party ? 1.0 : 0.0;
      cov.prop_party_teammates =
          has_party ? rng_.beta(config_.party_prop_alpha, party_prop_beta_) : 0.0;
      cov.matches_in_session = static_cast<double>(
          std::min<std::int64_t>(session_count_[pid], config_.session_cap));
      cov.reports_against_24h = static_cast<double>(std::min<std::int64_t>(
          static_cast<std::int64_t>(exo_against_[pid]) +
              endo_against_yesterday_[pid] + endo_against_today_[pid],
          config_.reports_against_cap));
      cov.reports_by_24h = static_cast<double>(std::min<std::int64_t>(
          static_cast<std::int64_t>(exo_by_[pid]) + endo_by_yesterday_[pid] +
              endo_by_today_[pid],
          config_.reports_by_cap));

      const double p = toxicity_prob(cov, population_[pid].latent_intercept,
                                     config_.beta, config_.beta0);
      const bool toxic = rng_.bernoulli(p);
      out.push_back(ObservationEvent{day_, match_id, pid, cov, toxic});
    }

    // Report feedback: each toxic event may generate reports filed by the
    // offender's teammates.
    for (int j = 0; j < ppm; ++j) {
      if (!out[first_event + j].toxic) continue;
      const std::uint32_t offender = match_ids_[j];
      for (int k = 0; k < ppm; ++k) {
        if (k == j || match_team_[k] != match_team_[j]) continue;
        if (rng_.bernoulli(config_.report_file_prob))
          endo_by_today_[match_ids_[k]] += 1;
        if (rng_.bernoulli(config_.report_file_prob))
          endo_against_today_[offender] += 1;
      }
    }

    // Session bookkeeping: play one more match, then maybe end the session.
    for (int j = 0; j < ppm; ++j) {
      const std::uint32_t pid = match_ids_[j];
      if (session_count_[pid] < config_.session_cap) session_count_[pid] += 1;
      if (rng_.bernoulli(session_reset_prob_)) session_count_[pid] = 0;
    }
  }
  ++day_;
}

MatchStream generate_stream(const GeneratorConfig& config) {
  StreamGenerator gen(config);
  MatchStream stream;
  stream.config = config;
  stream.events.reserve(static_cast<std::size_t>(config.total_events()));
  stream.day_offsets.push_back(0);
  for (std::int32_t d = 0; d < config.days; ++d) {
    gen.generate_day(stream.events);
    stream.day_offsets.push_back(stream.events.size());
  }
  return stream;
}

double calibrate_intercept(const GeneratorConfig& config, double target_rate,
                           std::int64_t min_pilot_events) {
  if (!(target_rate > 0.0 && target_rate < 1.0))
    throw ConfigError("calibrate_intercept: target rate must lie in (0,1)");

  GeneratorConfig pilot = config;
  pilot.days = static_cast<std::int32_t>(
      (min_pilot_events + pilot.events_per_day() - 1) / pilot.events_per_day());
  pilot.beta0 = std::log(target_rate / (1.0 - target_rate));

  double beta0 = pilot.beta0;
  // Two passes: the report-feedback loop makes the covariates themselves
  // depend (weakly) on the intercept, so regenerate once with the solution.
  for (int pass = 0; pass < 2; ++pass) {
    pilot.beta0 = beta0;
    StreamGenerator gen(pilot);
    std::vector<double> predictor;  // beta . x + u, intercept excluded
    predictor.reserve(static_cast<std::size_t>(pilot.total_events()));
    for (std::int32_t d = 0; d < pilot.days; ++d) {
      for (const auto& ev : gen.next_day()) {
        const auto x = to_array(ev.covariates);
        double z = gen.population()[ev.player_id].latent_intercept;
        for (std::size_t i = 0; i < kCovariateCount; ++i)
          z += pilot.beta[i] * x[i];
        predictor.push_back(z);
      }
    }

    const auto mean_prob = [&predictor](double b0) {
      double acc = 0.0;
      for (double z : predictor) acc += sigmoid(b0 + z);
      return acc / static_cast<double>(predictor.size());
    };

    double lo = -30.0, hi = 5.0;
    if (mean_prob(lo) > target_rate || mean_prob(hi) < target_rate)
      throw ConfigError(
          "calibrate_intercept: bisection bracket failure (target " +
          std::to_string(target_rate) + " unreachable in [-30, 5])");
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mean_prob(mid) < target_rate)
        lo = mid;
      else
        hi = mid;
    }
    beta0 = 0.5 * (lo + hi);

    const double achieved = mean_prob(beta0);
    if (std::abs(achieved - target_rate) > 0.05 * target_rate)
      throw ConfigError("calibrate_intercept: achieved rate " +
                        std::to_string(achieved) + " outside 5% of target " +
                        std::to_string(target_rate));
  }
  return beta0;
}

}  // namespace patrol
