#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lgc/mdp.hpp"
#include "lgc/rng.hpp"

namespace lgc {

struct LearnerConfig {
  double alpha = 0.1;     // learning rate, in (0, 1]
  double gamma = 0.9999;  // discount factor, in (0, 1]
  double epsilon_start = 0.2;
  double epsilon_min = 0.01;
  double epsilon_decay = 0.98;  // multiplied in per reward epoch
  // Exploration prior (P): probability that an exploratory draw collects
  // anything at all; anchored to CPython's 1-in-700 cadence.
  double prior_collect_prob = 1.0 / 700.0;
  // Reward shaping (S): shaped r = r - kappa * collection_cost / epoch_ticks.
  double shaping_kappa = 0.1;
  // Table initialization (I): value preloaded into non-full-collect cells of
  // saturation-bin states.
  double penalty_init = -100.0;
  // Subtracted from the reward of a transition that forced a full collection.
  double threshold_penalty = 1.0;
  bool enable_prior = false;    // P
  bool enable_shaping = false;  // S
  bool enable_init = false;     // I
};

// Throws std::invalid_argument naming the offending field.
void validate(const LearnerConfig& cfg);

// Sparse state/action value table. Rows materialize on first write (or on
// first read of a saturation-bin state when lazy initialization is enabled);
// absent cells read as zero.
class QTable {
 public:
  explicit QTable(int num_actions) : num_actions_(num_actions) {}

  double value(const GcState& s, GcAction a) const;
  void set(const GcState& s, GcAction a, double v);
  bool has_row(const GcState& s) const { return rows_.contains(key(s)); }
  std::vector<double>& row(const GcState& s);  // materializes zeros

  int num_actions() const { return num_actions_; }
  std::size_t state_count() const { return rows_.size(); }
  std::size_t entry_count() const { return rows_.size() * num_actions_; }

  // Deterministic footprint estimate: 8 bytes per value plus 16 bytes of
  // key/bucket overhead per state row. Empty table reports zero.
  std::uint64_t footprint_bytes() const {
    return rows_.size() * (16 + static_cast<std::uint64_t>(num_actions_) * 8);
  }

  // Snapshot as "site,mem_bin,action,q_value" rows, sorted; values round-trip
  // exactly through import_csv.
  void export_csv(std::ostream& out) const;
  static QTable import_csv(std::istream& in, int num_actions);

 private:
  static std::uint64_t key(const GcState& s) {
    return (static_cast<std::uint64_t>(s.site) << 20) | s.mem_bin;
  }
  int num_actions_;
  std::unordered_map<std::uint64_t, std::vector<double>> rows_;
};

struct TransitionRecord {
  GcState state;
  GcAction action;
  Ticks collection_cost = 0;  // ticks spent in the chosen collection
  bool forced_full = false;   // allocation breached M, full collection forced
  std::optional<GcState> next_state;  // pending until the next decision
};

struct UpdateSummary {
  std::size_t transitions_applied = 0;
  double epsilon_used = 0.0;  // exploration rate in effect during the epoch
};

// Tabular Q-learning policy over allocation-time decisions. Decisions are
// epsilon-greedy reads of the table; learning happens in batches when the
// periodic reward arrives, with the whole epoch reward attributed to every
// transition recorded since the previous reward.
class Learner {
 public:
  Learner(const LearnerConfig& cfg, const MemoryConfig& mem,
          int num_generations);

  // Greedy table read; ties break toward the earliest action in decision
  // order (nothing first, then youngest generation).
  std::pair<GcAction, double> opt_action(const GcState& s);

  // Epsilon-greedy: explores with probability epsilon, otherwise opt_action.
  // With the prior enabled an exploratory draw collects with probability
  // prior_collect_prob (uniform over generations); otherwise it is uniform
  // over all |G|+1 actions.
  GcAction select_action(const GcState& s, Rng& rng);

  void record_transition(const GcState& s, GcAction a, Ticks collection_cost,
                         bool forced_full);

  // Replays every completed transition against the classical update rule
  //   Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
  // where r is the epoch reward (in [0,1], enforced) minus the shaping and
  // threshold penalties this record earned, floored at -1. Consumed records
  // are dropped; the final still-pending record carries to the next epoch.
  // Decays epsilon once.
  UpdateSummary apply_reward(double reward, Ticks epoch_ticks);

  std::uint64_t table_bytes() const { return table_.footprint_bytes(); }
  double epsilon() const { return epsilon_; }
  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const std::vector<TransitionRecord>& buffer() const { return buffer_; }
  const std::vector<GcAction>& actions() const { return actions_; }

 private:
  // Opt#3: first touch of a saturation-bin state seeds every action except
  // the full collection with penalty_init.
  void ensure_initialized(const GcState& s);

  LearnerConfig cfg_;
  MemoryConfig mem_;
  int num_generations_;
  std::vector<GcAction> actions_;
  QTable table_;
  std::vector<TransitionRecord> buffer_;
  double epsilon_;
};

// CPython-style threshold policy: collect generation 1 once net allocations
// since the last collection reach threshold0; every threshold1-th young
// trigger escalates to generation 2 and every threshold2-th of those to a
// full collection. Counters reset the way CPython zeroes its generation
// counts.
class BaselineGc {
 public:
  explicit BaselineGc(std::int64_t threshold0 = 700, int threshold1 = 10,
                      int threshold2 = 10)
      : t0_(threshold0), t1_(threshold1), t2_(threshold2) {}

  void on_allocation() { ++net_allocations_; }
  void on_frees(std::uint64_t count) {
    net_allocations_ -= static_cast<std::int64_t>(count);
  }
  // An externally forced full collection zeroes every counter.
  void on_forced_full() {
    net_allocations_ = 0;
    young_triggers_ = 0;
    mid_triggers_ = 0;
  }

  GcAction decide(int num_generations);

 private:
  std::int64_t t0_;
  int t1_;
  int t2_;
  std::int64_t net_allocations_ = 0;
  int young_triggers_ = 0;
  int mid_triggers_ = 0;
};

}  // namespace lgc
