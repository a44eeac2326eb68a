#include "patrol/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <vector>

#include "patrol/errors.hpp"

namespace patrol {

namespace {
const LedgerEntry kFreshEntry{};
}

const LedgerEntry& PlayerLedger::entry(PlayerId id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? kFreshEntry : it->second;
}

void PlayerLedger::record(PlayerId id, bool monitored, bool toxic_observed) {
  if (toxic_observed && !monitored)
    throw ConfigError("ledger: toxic outcome reported for an unmonitored match");
  if (!monitored) return;
  auto& e = entries_[id];
  e.monitored_matches += 1;
  e.flagged = e.flagged || toxic_observed;
}

void PlayerLedger::restore(PlayerId id, const LedgerEntry& entry) {
  if (entry.monitored_matches < 0)
    throw ConfigError("ledger: negative monitored_matches");
  if (entry.flagged && entry.monitored_matches == 0)
    throw ConfigError("ledger: flagged player with no monitored matches");
  entries_[id] = entry;
}

bool decide_det_etc(const PlayerLedger& ledger, PlayerId id,
                    std::int64_t exploration_matches) {
  const auto& e = ledger.entry(id);
  return e.flagged || e.monitored_matches < exploration_matches;
}

bool decide_prob_etc(const PlayerLedger& ledger, PlayerId id, double epsilon,
                     double draw) {
  return ledger.entry(id).flagged || draw < epsilon;
}

void validate(const EtcParams& params) {
  if (params.kind == EtcParams::Kind::deterministic) {
    if (params.exploration_matches < 0)
      throw ConfigError("exploration matches must be >= 0");
  } else {
    if (!std::isfinite(params.exploration_probability) ||
        params.exploration_probability < 0.0 ||
        params.exploration_probability > 1.0)
      throw ConfigError("exploration probability must lie in [0,1]");
  }
}

void write_ledger_checkpoint(std::ostream& os, const PlayerLedger& ledger) {
  std::vector<std::pair<PlayerId, LedgerEntry>> rows(ledger.entries().begin(),
                                                     ledger.entries().end());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  os << "patrol_ledger 1\n" << rows.size() << "\n";
  for (const auto& [id, e] : rows)
    os << id << ' ' << e.monitored_matches << ' ' << (e.flagged ? 1 : 0) << "\n";
}

PlayerLedger read_ledger_checkpoint(std::istream& is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "patrol_ledger" || version != 1)
    throw IoError("ledger checkpoint: unrecognized header");
  std::size_t n = 0;
  if (!(is >> n)) throw IoError("ledger checkpoint: bad row count");

  PlayerLedger ledger;
  for (std::size_t i = 0; i < n; ++i) {
    PlayerId id;
    std::int64_t matches;
    int flagged;
    if (!(is >> id >> matches >> flagged) || matches < 0 ||
        (flagged != 0 && flagged != 1))
      throw IoError("ledger checkpoint: bad row " + std::to_string(i));
    ledger.restore(id, LedgerEntry{matches, flagged == 1});
  }
  return ledger;
}

}  // namespace patrol
