// End-to-end checks of the command-line tool. Expects the binary path as
// argv[1] and runs everything inside a scratch directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_root;
int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string manifest_value(const fs::path& path, const std::string& key) {
  std::ifstream is(path);
  std::string k, v;
  while (is >> k >> v)
    if (k == key) return v;
  return "";
}

void write_small_config(const fs::path& path, unsigned seed) {
  std::ofstream os(path);
  os << "n_players 4000\n"
     << "days 6\n"
     << "matches_per_day 400\n"
     << "players_per_match 12\n"
     << "seed " << seed << "\n"
     << "target_toxic_rate 0.01\n"
     << "beta0 -5.8\n";
}

void test_generate() {
  write_small_config(g_root / "gen.cfg", 7);
  const std::string cfg = (g_root / "gen.cfg").string();

  check(run("generate --config " + cfg + " --out " + (g_root / "g1").string()) == 0,
        "generate exits 0");
  check(run("generate --config " + cfg + " --out " + (g_root / "g2").string()) == 0,
        "generate twice exits 0");
  check(slurp(g_root / "g1/observations.csv") == slurp(g_root / "g2/observations.csv"),
        "same config+seed gives identical observation files");
  check(manifest_value(g_root / "g1/generate_manifest.txt", "rows") == "28800",
        "manifest row count matches config");
  check(!manifest_value(g_root / "g1/generate_manifest.txt", "config_hash").empty(),
        "manifest carries a config hash");

  // invalid config: fewer players than one match needs
  std::ofstream bad(g_root / "bad.cfg");
  bad << "n_players 6\nplayers_per_match 12\n";
  bad.close();
  check(run("generate --config " + (g_root / "bad.cfg").string() + " --out " +
            (g_root / "gbad").string()) == 2,
        "undersized population exits with the config error code");
  check(run("generate --config " + (g_root / "missing.cfg").string() + " --out " +
            (g_root / "gmiss").string()) == 3,
        "missing config file exits with the io error code");
}

void test_run_and_checkpoints() {
  const std::string cfg = (g_root / "gen.cfg").string();
  const std::string out = (g_root / "r1").string();
  check(run("run --config " + cfg + " --policy always --policy linucb --out " + out) == 0,
        "run exits 0");

  const std::string results = slurp(g_root / "r1/results.csv");
  check(results.find("always,1.000000,nan,1.000000,1.000000") != std::string::npos,
        "monitor-everything reports detection rate 1.0");

  // one model checkpoint per day boundary
  int model_files = 0;
  for (const auto& entry : fs::directory_iterator(g_root / "r1/checkpoints/linucb"))
    if (entry.path().extension() == ".model") ++model_files;
  check(model_files == 6, "one model checkpoint per day boundary");

  // replaying the generated CSV gives the same counts as the live stream
  const std::string replay = (g_root / "replay").string();
  check(run("run --stream " + (g_root / "g1/observations.csv").string() +
            " --policy always --decision-seed 7 --out " + replay +
            " --no-checkpoints") == 0,
        "replay from an observation CSV exits 0");
  const std::string rep = slurp(g_root / "replay/results.csv");
  check(rep.find("always,1.000000,nan,1.000000,1.000000,7") != std::string::npos,
        "replayed monitor-everything matches the live run");
}

void test_resume_equivalence() {
  const std::string cfg = (g_root / "gen.cfg").string();
  const std::string full = (g_root / "full").string();
  const std::string split = (g_root / "split").string();
  check(run("run --config " + cfg + " --policy linucb --policy prob-etc --out " +
            full) == 0,
        "uninterrupted run exits 0");
  check(run("run --config " + cfg + " --policy linucb --policy prob-etc --out " +
            split + " --max-days 3") == 0,
        "interrupted run exits 0");
  check(run("run --config " + cfg + " --policy linucb --policy prob-etc --out " +
            split + " --resume") == 0,
        "resume exits 0");
  check(slurp(g_root / "full/results.csv") == slurp(g_root / "split/results.csv"),
        "resumed results equal the uninterrupted run");
}

void test_sweep_and_report() {
  write_small_config(g_root / "sweep.cfg", 21);
  const std::string cfg = (g_root / "sweep.cfg").string();
  const std::string out = (g_root / "s1").string();
  check(run("sweep --config " + cfg + " --out " + out +
            " --targets 0.3,0.6 --policies linucb,prob-etc --replicas 2 "
            "--threads 2") == 0,
        "sweep exits 0");
  const std::string results = slurp(g_root / "s1/results.csv");
  int lines = -1;  // discount header
  for (const char ch : results)
    if (ch == '\n') ++lines;
  check(lines == 2 * 2 * 2, "sweep writes |policies| x |targets| x replicas rows");
  check(fs::exists(g_root / "s1/plot.csv"), "sweep writes plot data");
  check(fs::exists(g_root / "s1/improvement.csv"), "sweep writes the improvement table");

  check(run("sweep --config " + cfg + " --out " + (g_root / "sbad").string() +
            " --policies nonsense") == 2,
        "unknown policy family exits with the config error code");

  // report: feed the published recall grid as a fixture and check the
  // improvement arithmetic lands exactly on the reference columns.
  {
    std::ofstream os(g_root / "fixture.csv");
    os << "policy,param,target_share,realized_share,detection_rate,seed,sigma_u\n";
    const double shares[9] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const double etc[9] = {0.2196, 0.3634, 0.4769, 0.5751, 0.6604,
                           0.7383, 0.8112, 0.8779, 0.9405};
    const double lin[9] = {0.3202, 0.55, 0.7225, 0.8035, 0.8496,
                           0.8897, 0.9219, 0.9506, 0.9792};
    char buf[160];
    for (int i = 0; i < 9; ++i) {
      std::snprintf(buf, sizeof(buf), "linucb,0.01,%g,%g,%g,1,1.0\n", shares[i],
                    shares[i], lin[i]);
      os << buf;
      std::snprintf(buf, sizeof(buf), "prob-etc,0.1,%g,%g,%g,1,1.0\n", shares[i],
                    shares[i], etc[i]);
      os << buf;
    }
  }
  check(run("report --results " + (g_root / "fixture.csv").string() + " --out " +
            (g_root / "rep").string()) == 0,
        "report exits 0");
  const std::string imp = slurp(g_root / "rep/improvement.csv");
  check(imp.find("10.060000,45.810565") != std::string::npos &&
            imp.find("24.560000,51.499266") != std::string::npos &&
            imp.find("3.870000,4.114833") != std::string::npos,
        "report reproduces the reference improvement arithmetic");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_test <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];
  g_root = fs::temp_directory_path() / "patrol_cli_test";
  std::error_code ec;
  fs::remove_all(g_root, ec);
  fs::create_directories(g_root);

  test_generate();
  test_run_and_checkpoints();
  test_resume_equivalence();
  test_sweep_and_report();

  if (g_failures > 0) {
    std::printf("%d CLI check(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all CLI checks passed\n");
  return 0;
}
