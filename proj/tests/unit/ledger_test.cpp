#include <sstream>

#include "doctest.h"
#include "patrol/errors.hpp"
#include "patrol/ledger.hpp"
#include "patrol/rng.hpp"

using namespace patrol;

TEST_CASE("det-etc: exploration window") {
  PlayerLedger ledger;
  CHECK(decide_det_etc(ledger, 1, 3));  // new player, inside the window

  for (int i = 0; i < 3; ++i) ledger.record(1, true, false);
  CHECK_FALSE(decide_det_etc(ledger, 1, 3));  // window exhausted, never flagged
}

TEST_CASE("det-etc: flagged players stay monitored even at m = 0") {
  PlayerLedger ledger;
  ledger.record(2, true, true);
  CHECK(decide_det_etc(ledger, 2, 0));
}

TEST_CASE("det-etc: m = 0 on a fresh ledger monitors nothing") {
  PlayerLedger ledger;
  for (PlayerId id = 0; id < 50; ++id) CHECK_FALSE(decide_det_etc(ledger, id, 0));
}

TEST_CASE("prob-etc: epsilon edges") {
  PlayerLedger ledger;
  Rng rng(21);
  for (int i = 0; i < 200; ++i)
    CHECK(decide_prob_etc(ledger, 5, 1.0, rng.uniform()));  // always explore

  ledger.record(6, true, true);
  CHECK(decide_prob_etc(ledger, 6, 0.0, 0.999));   // flagged: monitoring continues
  CHECK_FALSE(decide_prob_etc(ledger, 7, 0.0, 0.0));  // unflagged, no exploration
}

TEST_CASE("ledger updates") {
  PlayerLedger ledger;
  ledger.record(3, false, false);  // unmonitored: no entry materializes
  CHECK(ledger.size() == 0);
  CHECK(ledger.entry(3).monitored_matches == 0);

  CHECK_THROWS_AS(ledger.record(3, false, true), ConfigError);

  ledger.record(3, true, true);
  CHECK(ledger.entry(3).flagged);
  const auto once = ledger.entry(3);
  ledger.record(3, true, true);  // flag is idempotent
  CHECK(ledger.entry(3).flagged == once.flagged);
  CHECK(ledger.entry(3).monitored_matches == 2);
}

TEST_CASE("prob-etc: empirical share approaches epsilon with no toxicity") {
  PlayerLedger ledger;
  Rng rng(22);
  const double eps = 0.35;
  const int n = 200000;
  long monitored = 0;
  for (int i = 0; i < n; ++i) {
    const PlayerId id = rng.uniform_int(1000);
    const bool m = decide_prob_etc(ledger, id, eps, rng.uniform());
    monitored += m ? 1 : 0;
    ledger.record(id, m, false);
  }
  // Within 3 standard errors of a Bernoulli mean.
  const double se = std::sqrt(eps * (1.0 - eps) / n);
  CHECK(std::abs(static_cast<double>(monitored) / n - eps) < 3.0 * se);
}

TEST_CASE("prob-etc: flagged players push the share above epsilon") {
  PlayerLedger ledger;
  Rng rng(23);
  const double eps = 0.2;
  const int players = 500;
  // Flag a tenth of the population first.
  for (PlayerId id = 0; id < players / 10; ++id) ledger.record(id, true, true);
  long monitored = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const PlayerId id = rng.uniform_int(players);
    monitored += decide_prob_etc(ledger, id, eps, rng.uniform()) ? 1 : 0;
  }
  CHECK(static_cast<double>(monitored) / n > eps);
}

TEST_CASE("ledger checkpoint round-trips exactly") {
  PlayerLedger ledger;
  Rng rng(24);
  for (int i = 0; i < 300; ++i) {
    const PlayerId id = rng.uniform_int(100);
    const bool monitored = rng.bernoulli(0.7);
    ledger.record(id, monitored, monitored && rng.bernoulli(0.05));
  }
  std::ostringstream first;
  write_ledger_checkpoint(first, ledger);
  std::istringstream in(first.str());
  const PlayerLedger restored = read_ledger_checkpoint(in);

  CHECK(restored.size() == ledger.size());
  for (const auto& [id, entry] : ledger.entries()) {
    CHECK(restored.entry(id).monitored_matches == entry.monitored_matches);
    CHECK(restored.entry(id).flagged == entry.flagged);
  }
  std::ostringstream second;
  write_ledger_checkpoint(second, restored);
  CHECK(first.str() == second.str());
}

TEST_CASE("etc params validation") {
  CHECK_THROWS_AS(
      validate(EtcParams{EtcParams::Kind::deterministic, -1, 0.0}), ConfigError);
  CHECK_THROWS_AS(
      validate(EtcParams{EtcParams::Kind::probabilistic, 0, 1.5}), ConfigError);
  CHECK_NOTHROW(validate(EtcParams{EtcParams::Kind::probabilistic, 0, 1.0}));
}
