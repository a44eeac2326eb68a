// patrol: synthetic match-stream generator plus a day-batched monitoring
// policy simulator (LinUCB and explore-then-commit baselines).
//
// Verbs:
//   generate   write an observation CSV and its manifest
//   run        run one or more policies over a stream, with checkpoints
//   sweep      calibrate policies to target monitored shares and compare
//   report     rebuild plot/improvement tables from a results CSV

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "patrol/config.hpp"
#include "patrol/csv.hpp"
#include "patrol/errors.hpp"
#include "patrol/harness.hpp"
#include "patrol/policies.hpp"

namespace fs = std::filesystem;
using namespace patrol;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("PATROL_OUT_DIR");
  return env && *env ? env : ".";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

GeneratorConfig load_config(const std::string& path) {
  return path.empty() ? GeneratorConfig{} : read_generator_config(path);
}

void write_manifest(const std::string& path, const KeyValueList& pairs) {
  write_key_values(path, pairs);
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 const std::string& csv_name) {
  const GeneratorConfig config = load_config(config_path);
  ensure_dir(out_dir);

  const MatchStream stream = generate_stream(config);
  const std::string csv_path = out_dir + "/" + csv_name;
  write_observation_csv(csv_path, stream);
  write_generator_config(out_dir + "/effective_config.cfg", config);

  std::int64_t toxic = 0;
  for (const auto& ev : stream.events) toxic += ev.toxic ? 1 : 0;
  const double rate =
      stream.events.empty() ? 0.0
                            : static_cast<double>(toxic) / stream.events.size();

  char rate_buf[32];
  std::snprintf(rate_buf, sizeof(rate_buf), "%.17g", rate);
  write_manifest(out_dir + "/generate_manifest.txt",
                 {{"command", "generate"},
                  {"config_hash", config_hash(config)},
                  {"seed", std::to_string(config.seed)},
                  {"days", std::to_string(config.days)},
                  {"rows", std::to_string(stream.events.size())},
                  {"toxic_count", std::to_string(toxic)},
                  {"toxic_rate", rate_buf},
                  {"csv", csv_name}});
  std::printf("wrote %zu observations (%lld toxic) to %s\n",
              stream.events.size(), static_cast<long long>(toxic),
              csv_path.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

struct PolicySpec {
  std::string name;
  std::unique_ptr<MonitorPolicy> policy;
};

std::unique_ptr<MonitorPolicy> build_policy(const std::string& name,
                                            double delta, double cost,
                                            double epsilon, std::int64_t m,
                                            bool synthetic_stats) {
  if (name == "linucb") {
    const UcbParams params{delta, cost};
    if (synthetic_stats)
      return std::make_unique<LinUcbPolicy>(params, FeatureStats::defaults());
    return std::make_unique<LinUcbPolicy>(params);  // freeze stats from day 1
  }
  if (name == "prob-etc") return std::make_unique<ProbEtcPolicy>(epsilon);
  if (name == "det-etc") return std::make_unique<DetEtcPolicy>(m);
  if (name == "always") return std::make_unique<FixedPolicy>(true);
  if (name == "never") return std::make_unique<FixedPolicy>(false);
  throw ConfigError("unknown policy '" + name + "'");
}

std::string day_file(const std::string& dir, std::int32_t day,
                     const char* suffix) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "day_%05d.", day);
  return dir + "/" + buf + suffix;
}

void write_runstate(const std::string& path, const EpisodeLog& log) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write runstate '" + path + "'");
  os << "patrol_runstate 1\n" << log.days.size() << "\n";
  for (const auto& d : log.days)
    os << d.observations << ' ' << d.monitored << ' ' << d.toxic_total << ' '
       << d.toxic_detected << "\n";
}

EpisodeLog read_runstate(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read runstate '" + path + "'");
  std::string tag;
  int version = 0;
  std::size_t n = 0;
  if (!(is >> tag >> version >> n) || tag != "patrol_runstate" || version != 1)
    throw IoError("runstate '" + path + "': unrecognized header");
  EpisodeLog log;
  log.days.resize(n);
  for (auto& d : log.days)
    if (!(is >> d.observations >> d.monitored >> d.toxic_total >> d.toxic_detected))
      throw IoError("runstate '" + path + "': truncated");
  return log;
}

void write_policy_checkpoint(const std::string& dir, std::int32_t day,
                             const MonitorPolicy& policy) {
  if (const auto* lin = dynamic_cast<const LinUcbPolicy*>(&policy)) {
    std::ofstream os(day_file(dir, day, "model"));
    if (!os) throw IoError("cannot write model checkpoint");
    write_model_checkpoint(os, lin->model(), lin->stats(), lin->params());
  } else if (const auto* det = dynamic_cast<const DetEtcPolicy*>(&policy)) {
    std::ofstream os(day_file(dir, day, "ledger"));
    if (!os) throw IoError("cannot write ledger checkpoint");
    write_ledger_checkpoint(os, det->ledger());
  } else if (const auto* prob = dynamic_cast<const ProbEtcPolicy*>(&policy)) {
    std::ofstream os(day_file(dir, day, "ledger"));
    if (!os) throw IoError("cannot write ledger checkpoint");
    write_ledger_checkpoint(os, prob->ledger());
  }
}

// Latest day with a runstate plus the matching state file; -1 when none.
std::int32_t latest_checkpoint_day(const std::string& dir,
                                   const MonitorPolicy& policy) {
  std::int32_t best = -1;
  if (!fs::exists(dir)) return best;
  const bool is_linucb = dynamic_cast<const LinUcbPolicy*>(&policy) != nullptr;
  const bool is_fixed = dynamic_cast<const FixedPolicy*>(&policy) != nullptr;
  for (std::int32_t day = 0;; ++day) {
    const bool has_state =
        is_fixed || fs::exists(day_file(dir, day, is_linucb ? "model" : "ledger"));
    if (!fs::exists(day_file(dir, day, "runstate")) || !has_state) break;
    best = day;
  }
  return best;
}

void restore_policy(const std::string& dir, std::int32_t day,
                    MonitorPolicy& policy) {
  if (auto* lin = dynamic_cast<LinUcbPolicy*>(&policy)) {
    std::ifstream is(day_file(dir, day, "model"));
    if (!is) throw IoError("cannot read model checkpoint");
    lin->restore(read_model_checkpoint(is));
  } else if (auto* det = dynamic_cast<DetEtcPolicy*>(&policy)) {
    std::ifstream is(day_file(dir, day, "ledger"));
    if (!is) throw IoError("cannot read ledger checkpoint");
    det->ledger() = read_ledger_checkpoint(is);
  } else if (auto* prob = dynamic_cast<ProbEtcPolicy*>(&policy)) {
    std::ifstream is(day_file(dir, day, "ledger"));
    if (!is) throw IoError("cannot read ledger checkpoint");
    prob->ledger() = read_ledger_checkpoint(is);
  }
}

int cmd_run(const std::string& config_path, const std::string& stream_path,
            const std::vector<std::string>& policy_names, double delta,
            double cost, double epsilon, std::int64_t m, const std::string& out_dir,
            std::uint64_t decision_seed, bool have_decision_seed, int threads,
            std::int32_t max_days, bool resume, bool checkpoints) {
  if (policy_names.empty()) throw ConfigError("run: no policies selected");
  ensure_dir(out_dir);

  MatchStream stream;
  GeneratorConfig config;
  bool synthetic = false;
  if (!stream_path.empty()) {
    stream = read_observation_csv(stream_path);
    if (!config_path.empty()) {
      config = load_config(config_path);
      stream.config.sigma_u = config.sigma_u;
    }
  } else {
    config = load_config(config_path);
    stream = generate_stream(config);
    synthetic = true;
  }
  if (!have_decision_seed) decision_seed = stream.config.seed;

  std::int32_t days = stream.days();
  if (max_days >= 0) days = std::min(days, max_days);

  std::vector<MetricsRow> rows;
  for (const auto& name : policy_names) {
    auto policy = build_policy(name, delta, cost, epsilon, m, synthetic);
    const std::string ckpt_dir = out_dir + "/checkpoints/" + name;
    if (checkpoints) ensure_dir(ckpt_dir);

    RunOptions opts;
    opts.threads = threads;
    opts.decision_seed = decision_seed;
    if (resume) {
      const std::int32_t day = latest_checkpoint_day(ckpt_dir, *policy);
      if (day >= 0) {
        restore_policy(ckpt_dir, day, *policy);
        opts.resume_log = read_runstate(day_file(ckpt_dir, day, "runstate"));
        opts.start_day = day + 1;
        std::printf("resuming %s from day %d\n", name.c_str(), day + 1);
      }
    }
    if (checkpoints) {
      opts.day_end = [&ckpt_dir](std::int32_t day, const MonitorPolicy& p,
                                 const EpisodeLog& log) {
        write_policy_checkpoint(ckpt_dir, day, p);
        write_runstate(day_file(ckpt_dir, day, "runstate"), log);
      };
    }

    const EpisodeLog log = run_episode(*policy, stream, days, opts);
    MetricsRow row;
    row.policy = name;
    row.param = policy->param();
    row.target_share = std::numeric_limits<double>::quiet_NaN();
    row.realized_share = log.realized_share();
    row.detection_rate =
        log.detection_rate().value_or(std::numeric_limits<double>::quiet_NaN());
    row.seed = decision_seed;
    row.sigma_u = stream.config.sigma_u;
    rows.push_back(std::move(row));
  }

  write_results_csv(out_dir + "/results.csv", rows);
  write_manifest(out_dir + "/run_manifest.txt",
                 {{"command", "run"},
                  {"config_hash", config_hash(stream.config)},
                  {"stream", stream_path.empty() ? "generated" : stream_path},
                  {"decision_seed", std::to_string(decision_seed)},
                  {"days", std::to_string(days)},
                  {"policies", std::to_string(policy_names.size())}});
  std::printf("wrote %s\n", (out_dir + "/results.csv").c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& policy_names,
              const std::vector<double>& targets, double delta, int replicas,
              std::uint64_t calibration_seed, bool have_calibration_seed,
              std::vector<std::uint64_t> eval_seeds, double tolerance,
              int threads) {
  if (policy_names.empty()) throw ConfigError("sweep: empty policy list");
  const GeneratorConfig base = load_config(config_path);
  ensure_dir(out_dir);

  SweepSpec spec;
  if (!targets.empty()) spec.target_shares = targets;
  spec.exploration = delta;
  spec.share_tolerance = tolerance;
  spec.threads = threads;
  spec.calibration_seed =
      have_calibration_seed ? calibration_seed : base.seed + 1000;
  if (eval_seeds.empty()) {
    eval_seeds.reserve(static_cast<std::size_t>(replicas));
    for (int i = 1; i <= replicas; ++i) eval_seeds.push_back(base.seed + i);
  }
  spec.eval_seeds = std::move(eval_seeds);

  std::vector<PolicyFamily> families;
  families.reserve(policy_names.size());
  for (const auto& name : policy_names) families.push_back(family_from_name(name));

  const auto factory = [&base](std::uint64_t seed) {
    GeneratorConfig cfg = base;
    cfg.seed = seed;
    return std::make_shared<const MatchStream>(generate_stream(cfg));
  };

  const std::vector<MetricsRow> rows = sweep(spec, families, factory);
  write_results_csv(out_dir + "/results.csv", rows);
  write_plot_csv(out_dir + "/plot.csv", aggregate_rows(rows));
  write_improvement_csv(out_dir + "/improvement.csv", improvement_table(rows));
  write_manifest(out_dir + "/sweep_manifest.txt",
                 {{"command", "sweep"},
                  {"config_hash", config_hash(base)},
                  {"calibration_seed", std::to_string(spec.calibration_seed)},
                  {"replicas", std::to_string(spec.eval_seeds.size())},
                  {"targets", std::to_string(spec.target_shares.size())},
                  {"policies", std::to_string(families.size())},
                  {"rows", std::to_string(rows.size())}});
  std::printf("wrote %zu result rows to %s\n", rows.size(),
              (out_dir + "/results.csv").c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::string& results_path, const std::string& out_dir) {
  const std::vector<MetricsRow> rows = read_results_csv(results_path);
  if (rows.empty()) throw ConfigError("report: results file has no rows");
  ensure_dir(out_dir);
  write_plot_csv(out_dir + "/plot.csv", aggregate_rows(rows));
  write_improvement_csv(out_dir + "/improvement.csv", improvement_table(rows));
  std::printf("wrote %s and %s\n", (out_dir + "/plot.csv").c_str(),
              (out_dir + "/improvement.csv").c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monitoring-policy simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string stream_path;
  std::string out_dir = default_out_dir();
  std::string csv_name = "observations.csv";
  std::string results_path;
  std::vector<std::string> policies;
  std::vector<double> targets;
  std::vector<std::uint64_t> eval_seeds;
  double delta = 1.0;
  double cost = 0.01;
  double epsilon = 0.1;
  std::int64_t m = 3;
  std::uint64_t decision_seed = 0;
  std::uint64_t calibration_seed = 0;
  int replicas = 3;
  int threads = 1;
  double tolerance = 0.005;
  std::int32_t max_days = -1;
  bool resume = false;
  bool no_checkpoints = false;

  auto* gen = app.add_subcommand("generate", "write a synthetic observation CSV");
  gen->add_option("--config", config_path, "generator config file");
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--csv-name", csv_name, "observation CSV filename");

  auto* run = app.add_subcommand("run", "run policies over a stream");
  run->add_option("--config", config_path, "generator config file");
  run->add_option("--stream", stream_path, "observation CSV to replay");
  run->add_option("--policy", policies, "policy (repeatable): linucb, prob-etc, det-etc, always, never")
      ->required();
  run->add_option("--delta", delta, "LinUCB exploration factor");
  run->add_option("--cost", cost, "LinUCB monitoring cost");
  run->add_option("--epsilon", epsilon, "prob-etc exploration probability");
  run->add_option("--m", m, "det-etc exploration matches");
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--decision-seed", decision_seed,
                                   "seed for per-observation decision draws");
  run->add_option("--threads", threads, "scoring threads");
  run->add_option("--max-days", max_days, "stop after this many days");
  run->add_flag("--resume", resume, "resume from the latest checkpoint");
  run->add_flag("--no-checkpoints", no_checkpoints, "skip day-boundary checkpoints");

  auto* swp = app.add_subcommand("sweep", "calibrated share sweep and comparison");
  swp->add_option("--config", config_path, "generator config file");
  swp->add_option("--out", out_dir, "output directory");
  swp->add_option("--policies", policies, "policy families to sweep")
      ->delimiter(',');
  swp->add_option("--targets", targets, "target monitored shares")->delimiter(',');
  swp->add_option("--delta", delta, "LinUCB exploration factor");
  swp->add_option("--replicas", replicas, "number of evaluation seeds");
  auto* cal_opt = swp->add_option("--calibration-seed", calibration_seed,
                                  "calibration stream seed");
  swp->add_option("--eval-seeds", eval_seeds, "explicit evaluation seeds")
      ->delimiter(',');
  swp->add_option("--tolerance", tolerance, "share calibration tolerance");
  swp->add_option("--threads", threads, "scoring threads");

  auto* rep = app.add_subcommand("report", "plot/improvement tables from results");
  rep->add_option("--results", results_path, "results CSV")->required();
  rep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_dir, csv_name);
    if (run->parsed())
      return cmd_run(config_path, stream_path, policies, delta, cost, epsilon,
                     m, out_dir, decision_seed, seed_opt->count() > 0, threads,
                     max_days, resume, !no_checkpoints);
    if (swp->parsed()) {
      if (policies.empty())
        policies = {"linucb", "prob-etc", "det-etc"};
      return cmd_sweep(config_path, out_dir, policies, targets, delta, replicas,
                       calibration_seed, cal_opt->count() > 0,
                       std::move(eval_seeds), tolerance, threads);
    }
    if (rep->parsed()) return cmd_report(results_path, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIoError;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumericError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitConfigError;
}
