#include "patrol/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <thread>

#include "patrol/errors.hpp"
#include "patrol/rng.hpp"

namespace patrol {

DayCounts EpisodeLog::totals() const {
  DayCounts t;
  for (const auto& d : days) {
    t.observations += d.observations;
    t.monitored += d.monitored;
    t.toxic_total += d.toxic_total;
    t.toxic_detected += d.toxic_detected;
  }
  return t;
}

double EpisodeLog::realized_share() const {
  const DayCounts t = totals();
  return t.observations > 0
             ? static_cast<double>(t.monitored) / static_cast<double>(t.observations)
             : 0.0;
}

std::optional<double> EpisodeLog::detection_rate() const {
  const DayCounts t = totals();
  if (t.toxic_total == 0) return std::nullopt;
  return static_cast<double>(t.toxic_detected) / static_cast<double>(t.toxic_total);
}

std::optional<double> detection_rate(const EpisodeLog& log) {
  return log.detection_rate();
}

namespace {

void score_range(const MonitorPolicy& policy,
                 std::span<const ObservationEvent> events, std::size_t begin,
                 std::size_t end, std::uint64_t decision_seed,
                 std::uint64_t ordinal_base, std::uint8_t* decisions) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto& ev = events[i];
    const double draw = decision_draw(decision_seed, ordinal_base + i);
    decisions[i] = policy.decide(ev.player_id, ev.covariates, draw) ? 1 : 0;
  }
}

}  // namespace

EpisodeLog run_episode(MonitorPolicy& policy, const MatchStream& stream,
                       std::int32_t days, const RunOptions& options) {
  if (days < 0 || days > stream.days())
    throw ConfigError("run_episode: requested " + std::to_string(days) +
                      " days but the stream has " + std::to_string(stream.days()));
  if (options.start_day < 0 || options.start_day > days)
    throw ConfigError("run_episode: start_day out of range");
  if (options.start_day > 0 &&
      static_cast<std::int32_t>(options.resume_log.days.size()) != options.start_day)
    throw ConfigError("run_episode: resume log does not cover the skipped days");

  EpisodeLog log = options.resume_log;
  log.days.reserve(static_cast<std::size_t>(days));
  const int threads = std::max(options.threads, 1);

  std::vector<std::uint8_t> decisions;
  std::vector<LabeledObservation> monitored;

  for (std::int32_t day = options.start_day; day < days; ++day) {
    const auto events = stream.day_events(day);
    const std::size_t n = events.size();
    const std::uint64_t ordinal_base = stream.day_offsets[day];
    decisions.assign(n, 0);

    if (threads == 1 || n < 1024) {
      score_range(policy, events, 0, n, options.decision_seed, ordinal_base,
                  decisions.data());
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      const std::size_t chunk = (n + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::size_t b = std::min(static_cast<std::size_t>(t) * chunk, n);
        const std::size_t e = std::min(b + chunk, n);
        if (b == e) break;
        pool.emplace_back(score_range, std::cref(policy), events, b, e,
                          options.decision_seed, ordinal_base, decisions.data());
      }
      for (auto& th : pool) th.join();
    }

    DayCounts counts;
    counts.observations = static_cast<std::int64_t>(n);
    monitored.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ev = events[i];
      if (ev.toxic) counts.toxic_total += 1;
      if (decisions[i]) {
        counts.monitored += 1;
        if (ev.toxic) counts.toxic_detected += 1;
        // Labels are revealed only here, for monitored observations.
        monitored.push_back(LabeledObservation{ev.player_id, ev.covariates, ev.toxic});
      }
    }
    log.days.push_back(counts);

    if (options.decision_trace) options.decision_trace->push_back(decisions);

    policy.end_of_day(monitored);
    if (options.day_end) options.day_end(day, policy, log);
  }
  return log;
}

std::string family_name(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::linucb:
      return "linucb";
    case PolicyFamily::prob_etc:
      return "prob-etc";
    case PolicyFamily::det_etc:
      return "det-etc";
  }
  throw ConfigError("unknown policy family");
}

PolicyFamily family_from_name(const std::string& name) {
  if (name == "linucb") return PolicyFamily::linucb;
  if (name == "prob-etc") return PolicyFamily::prob_etc;
  if (name == "det-etc") return PolicyFamily::det_etc;
  throw ConfigError("unknown policy family '" + name + "'");
}

void validate(const SweepSpec& spec) {
  if (spec.target_shares.empty())
    throw ConfigError("sweep: target shares must be non-empty");
  double prev = 0.0;
  for (double t : spec.target_shares) {
    if (!(t > 0.0 && t < 1.0))
      throw ConfigError("sweep: target shares must lie in (0,1)");
    if (!(t > prev))
      throw ConfigError("sweep: target shares must be strictly increasing");
    prev = t;
  }
  if (!(spec.exploration >= 0.0))
    throw ConfigError("sweep: exploration factor must be >= 0");
  if (spec.eval_seeds.empty()) throw ConfigError("sweep: no evaluation seeds");
  for (std::uint64_t s : spec.eval_seeds)
    if (s == spec.calibration_seed)
      throw ConfigError("sweep: calibration seed must differ from eval seeds");
  if (!(spec.share_tolerance > 0.0))
    throw ConfigError("sweep: share tolerance must be positive");
  validate(spec.stats);
}

std::unique_ptr<MonitorPolicy> make_policy(PolicyFamily family, double knob,
                                           const SweepSpec& spec) {
  switch (family) {
    case PolicyFamily::linucb:
      return std::make_unique<LinUcbPolicy>(UcbParams{spec.exploration, knob},
                                            spec.stats);
    case PolicyFamily::prob_etc:
      return std::make_unique<ProbEtcPolicy>(knob);
    case PolicyFamily::det_etc:
      return std::make_unique<DetEtcPolicy>(static_cast<std::int64_t>(std::llround(knob)));
  }
  throw ConfigError("unknown policy family");
}

namespace {

double realized_share_for(PolicyFamily family, double knob, const SweepSpec& spec,
                          const MatchStream& stream) {
  const auto policy = make_policy(family, knob, spec);
  RunOptions opts;
  opts.threads = spec.threads;
  opts.decision_seed = spec.calibration_seed;
  const EpisodeLog log = run_episode(*policy, stream, stream.days(), opts);
  return log.realized_share();
}

}  // namespace

double calibrate_to_share(PolicyFamily family, double target,
                          const SweepSpec& spec,
                          const MatchStream& calibration_stream) {
  if (!(target > 0.0 && target <= 1.0))
    throw ConfigError("calibrate_to_share: target must lie in (0,1]");

  const auto eval = [&](double knob) {
    return realized_share_for(family, knob, spec, calibration_stream);
  };

  if (family == PolicyFamily::det_etc) {
    // Integer knob: exponential search for an upper bracket, then bisect to
    // the closest achievable share.
    std::int64_t hi = 1;
    double share_hi = eval(static_cast<double>(hi));
    while (share_hi < target && hi < (1LL << 20)) {
      hi *= 2;
      share_hi = eval(static_cast<double>(hi));
    }
    if (share_hi < target)
      throw ConfigError("calibrate_to_share: det-etc cannot reach share " +
                        std::to_string(target));
    std::int64_t lo = hi / 2;
    double best_m = static_cast<double>(hi);
    double best_err = std::abs(share_hi - target);
    const double share_lo = eval(static_cast<double>(lo));
    if (std::abs(share_lo - target) < best_err) {
      best_err = std::abs(share_lo - target);
      best_m = static_cast<double>(lo);
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      const double share = eval(static_cast<double>(mid));
      if (std::abs(share - target) < best_err) {
        best_err = std::abs(share - target);
        best_m = static_cast<double>(mid);
      }
      if (share < target)
        lo = mid;
      else
        hi = mid;
    }
    return best_m;
  }

  // Continuous knob: share is non-increasing in c (LinUCB) and
  // non-decreasing in epsilon (prob-ETC).
  const bool increasing = family == PolicyFamily::prob_etc;
  double lo = family == PolicyFamily::prob_etc ? 0.0 : 1e-9;
  double hi = family == PolicyFamily::prob_etc ? 1.0 : 1.0 - 1e-9;
  double share_lo = eval(lo);
  double share_hi = eval(hi);
  const double low_end = increasing ? share_lo : share_hi;
  const double high_end = increasing ? share_hi : share_lo;
  if (target < low_end - spec.share_tolerance ||
      target > high_end + spec.share_tolerance)
    throw ConfigError("calibrate_to_share: " + family_name(family) +
                      " bracket failure, reachable shares [" +
                      std::to_string(low_end) + ", " + std::to_string(high_end) +
                      "] exclude target " + std::to_string(target));

  double best_knob = lo;
  double best_err = std::abs(share_lo - target);
  if (std::abs(share_hi - target) < best_err) {
    best_err = std::abs(share_hi - target);
    best_knob = hi;
  }
  for (int it = 0; it < 40 && best_err > spec.share_tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double share = eval(mid);
    if (std::abs(share - target) < best_err) {
      best_err = std::abs(share - target);
      best_knob = mid;
    }
    const bool go_up = increasing ? share < target : share > target;
    if (go_up)
      lo = mid;
    else
      hi = mid;
  }
  return best_knob;
}

std::vector<MetricsRow> sweep(const SweepSpec& spec,
                              std::span<const PolicyFamily> families,
                              const StreamFactory& stream_factory) {
  validate(spec);
  if (families.empty()) throw ConfigError("sweep: empty policy list");

  // Phase 1: calibrate every (family, target) knob on the calibration stream.
  std::vector<std::vector<double>> knobs(families.size());
  {
    const auto calibration = stream_factory(spec.calibration_seed);
    if (!calibration) throw ConfigError("sweep: stream factory returned null");
    for (std::size_t f = 0; f < families.size(); ++f) {
      knobs[f].reserve(spec.target_shares.size());
      for (const double target : spec.target_shares)
        knobs[f].push_back(
            calibrate_to_share(families[f], target, spec, *calibration));
    }
  }

  // Phase 2: evaluate on the replica seeds, one stream in memory at a time.
  std::vector<std::vector<MetricsRow>> per_seed(spec.eval_seeds.size());
  for (std::size_t s = 0; s < spec.eval_seeds.size(); ++s) {
    const std::uint64_t seed = spec.eval_seeds[s];
    const auto stream = stream_factory(seed);
    if (!stream) throw ConfigError("sweep: stream factory returned null");
    for (std::size_t f = 0; f < families.size(); ++f) {
      for (std::size_t t = 0; t < spec.target_shares.size(); ++t) {
        const auto policy = make_policy(families[f], knobs[f][t], spec);
        RunOptions opts;
        opts.threads = spec.threads;
        opts.decision_seed = seed;
        const EpisodeLog log = run_episode(*policy, *stream, stream->days(), opts);
        MetricsRow row;
        row.policy = family_name(families[f]);
        row.param = knobs[f][t];
        row.target_share = spec.target_shares[t];
        row.realized_share = log.realized_share();
        row.detection_rate =
            log.detection_rate().value_or(std::numeric_limits<double>::quiet_NaN());
        row.seed = seed;
        row.sigma_u = stream->config.sigma_u;
        per_seed[s].push_back(std::move(row));
      }
    }
  }

  // Emit grouped by family, then target, then seed.
  std::vector<MetricsRow> rows;
  rows.reserve(families.size() * spec.target_shares.size() * spec.eval_seeds.size());
  for (std::size_t f = 0; f < families.size(); ++f)
    for (std::size_t t = 0; t < spec.target_shares.size(); ++t)
      for (std::size_t s = 0; s < spec.eval_seeds.size(); ++s)
        rows.push_back(per_seed[s][f * spec.target_shares.size() + t]);
  return rows;
}

std::vector<SharePoint> aggregate_rows(std::span<const MetricsRow> rows) {
  std::vector<SharePoint> points;
  for (const auto& row : rows) {
    auto it = std::find_if(points.begin(), points.end(), [&](const SharePoint& p) {
      return p.policy == row.policy && p.target_share == row.target_share;
    });
    if (it == points.end()) {
      points.push_back(SharePoint{row.policy, row.target_share, 0.0, 0.0,
                                  std::numeric_limits<double>::infinity(),
                                  -std::numeric_limits<double>::infinity(), 0});
      it = points.end() - 1;
    }
    it->mean_share += row.realized_share;
    it->mean_rate += row.detection_rate;
    it->min_rate = std::min(it->min_rate, row.detection_rate);
    it->max_rate = std::max(it->max_rate, row.detection_rate);
    it->replicas += 1;
  }
  for (auto& p : points) {
    p.mean_share /= p.replicas;
    p.mean_rate /= p.replicas;
  }
  return points;
}

std::vector<ImprovementRow> improvement_table(std::span<const MetricsRow> rows) {
  const auto points = aggregate_rows(rows);
  std::map<double, std::pair<const SharePoint*, const SharePoint*>> by_share;
  for (const auto& p : points) {
    if (p.policy == "linucb") by_share[p.target_share].first = &p;
    if (p.policy == "prob-etc") by_share[p.target_share].second = &p;
  }

  std::vector<ImprovementRow> table;
  for (const auto& [share, pair] : by_share) {
    if (!pair.first || !pair.second) {
      std::fprintf(stderr,
                   "patrol: share %.3f present for only one policy; column "
                   "omitted from the improvement table\n",
                   share);
      continue;
    }
    ImprovementRow row;
    row.target_share = share;
    row.linucb_rate = pair.first->mean_rate;
    row.etc_rate = pair.second->mean_rate;
    row.improvement_pp = (row.linucb_rate - row.etc_rate) * 100.0;
    row.improvement_pct = row.improvement_pp / row.etc_rate;
    table.push_back(row);
  }
  return table;
}

}  // namespace patrol
