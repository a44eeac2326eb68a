#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>

namespace patrol {

using PlayerId = std::uint64_t;

struct LedgerEntry {
  std::int64_t monitored_matches = 0;
  bool flagged = false;  // observed toxic at least once while monitored; never cleared
};

// Per-player monitoring history used by the explore-then-commit baselines.
// Unknown players read as fresh zeroed entries and are materialized lazily.
class PlayerLedger {
 public:
  const LedgerEntry& entry(PlayerId id) const;

  // monitored match outcome bookkeeping; toxic_observed requires monitored
  // (unmonitored behavior is invisible and must not reach the ledger).
  void record(PlayerId id, bool monitored, bool toxic_observed);

  // Direct injection for checkpoint restore.
  void restore(PlayerId id, const LedgerEntry& entry);

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  const std::unordered_map<PlayerId, LedgerEntry>& entries() const {
    return entries_;
  }

 private:
  std::unordered_map<PlayerId, LedgerEntry> entries_;
};

// Deterministic explore-then-commit: monitor while fewer than
// `exploration_matches` monitored matches, and forever once flagged.
bool decide_det_etc(const PlayerLedger& ledger, PlayerId id,
                    std::int64_t exploration_matches);

// Probabilistic explore-then-commit: monitor flagged players always,
// otherwise with probability epsilon (draw is uniform in [0,1)).
bool decide_prob_etc(const PlayerLedger& ledger, PlayerId id, double epsilon,
                     double draw);

struct EtcParams {
  enum class Kind { deterministic, probabilistic };
  Kind kind = Kind::probabilistic;
  std::int64_t exploration_matches = 0;  // m, deterministic variant
  double exploration_probability = 0.0;  // epsilon, probabilistic variant
};

void validate(const EtcParams& params);

// Text checkpoint of (player id, monitored_matches, flagged) rows, sorted by
// id; round-trips exactly.
void write_ledger_checkpoint(std::ostream& os, const PlayerLedger& ledger);
PlayerLedger read_ledger_checkpoint(std::istream& is);

}  // namespace patrol
