#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lgc/heap.hpp"
#include "lgc/mdp.hpp"
#include "lgc/policy.hpp"
#include "lgc/workloads.hpp"

namespace lgc {

// Q/QP/QPS/QPSI are the learned policy with none, the prior, prior+shaping,
// or all three optimizations enabled; Baseline is the CPython-style threshold
// scheme; NeverCollect does nothing voluntarily. The memory threshold is
// enforced for every variant.
enum class Variant { Baseline, NeverCollect, Q, QP, QPS, QPSI };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);
bool variant_learns(Variant v);
void apply_variant_flags(Variant v, LearnerConfig& cfg);

struct BaselineParams {
  std::int64_t threshold0 = 700;
  int threshold1 = 10;
  int threshold2 = 10;
};

struct ExperimentConfig {
  WorkloadSpec workload;
  Variant variant = Variant::QPSI;
  LearnerConfig learner;
  MemoryConfig memory;  // threshold_bytes == 0 means "not resolved yet"
  BaselineParams baseline;
  bool threshold_auto = true;  // resolve M by calibration before running
  int num_generations = 3;
  Ticks duration_ticks = 2'000'000;
  Ticks epoch_ticks = 10'000;
  std::uint64_t seed = 1;
};

// Throws std::invalid_argument naming the offending field.
void validate_config(const ExperimentConfig& cfg);

struct EpochRecord {
  std::uint64_t epoch_index = 0;
  double raw_reward = 0.0;         // work units per tick over the window
  double normalized_reward = 0.0;  // raw / running max, in [0,1]
  Bytes live_bytes_end = 0;
  std::uint64_t table_bytes = 0;
  std::vector<std::uint64_t> collections_by_gen;  // voluntary, per generation
  std::uint64_t forced_full = 0;
  double epsilon = 0.0;
};

struct RunResult {
  ExperimentConfig config;  // echo, with the resolved threshold
  std::vector<EpochRecord> epochs;
  double median_reward = 0.0;  // median of per-epoch raw rewards
  Bytes peak_live_bytes = 0;
  std::uint64_t total_collections = 0;  // voluntary + forced
  std::uint64_t forced_full_total = 0;
  std::uint64_t decisions_total = 0;
  std::uint64_t decisions_in_io = 0;  // decision points inside I/O windows
  std::uint64_t voluntary_collections = 0;
  std::uint64_t voluntary_collections_in_io = 0;
  Bytes max_event_alloc_bytes = 0;  // largest single workload event
};

// Observation hooks for trace-level tests; default run has none attached.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_allocation(SiteId /*site*/, Bytes /*size*/,
                             Bytes /*live_after*/) {}
  virtual void on_collection(int /*generation*/, const CollectionStats&,
                             bool /*forced*/) {}
  virtual void on_breach(Bytes /*live_bytes*/) {}
};

// Scripted decision function for experiments outside the named variants
// (tests use these for placement studies). Never touches a Q table.
using ScriptedPolicy =
    std::function<GcAction(const GcState&, bool io_phase, Rng&)>;

// Runs one experiment to completion. Requires a resolved memory threshold;
// calibrate first (or use threshold_auto through the CLI/compare paths).
// final_table, when given, receives the learned policy snapshot (left empty
// for non-learning variants).
RunResult run(const ExperimentConfig& cfg, RunObserver* observer = nullptr,
              QTable* final_table = nullptr);

// Same loop driven by an arbitrary policy; threshold_bytes == 0 disables the
// forced-collection rule, which scripted studies sometimes want.
RunResult run_scripted(const ExperimentConfig& cfg,
                       const ScriptedPolicy& policy,
                       RunObserver* observer = nullptr);

// Median of per-epoch end-of-epoch heap usage under the Baseline variant
// with the threshold disabled; the paper sets M this way.
Bytes calibrate_threshold(const ExperimentConfig& cfg);

double median(std::vector<double> values);
Bytes median_bytes(std::vector<Bytes> values);

// 100 * (variant - baseline) / baseline over median rewards.
// Throws std::runtime_error when the baseline median is zero.
double median_improvement(const RunResult& variant, const RunResult& baseline);

struct CompareSpec {
  ExperimentConfig base;  // shared knobs; workload/variant/seed set per cell
  std::vector<WorkloadSpec::Kind> workloads;
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  double variant_median = 0.0;
  double baseline_median = 0.0;
  double improvement_pct = 0.0;
  Bytes threshold_bytes = 0;
};

struct ComparisonCell {
  WorkloadSpec::Kind workload = WorkloadSpec::Kind::LruCache;
  Variant variant = Variant::Q;
  std::vector<SeedOutcome> seeds;
  double median_improvement_pct = 0.0;  // median of per-seed improvements
};

struct ComparisonTable {
  std::vector<WorkloadSpec::Kind> workloads;
  std::vector<Variant> variants;
  std::vector<ComparisonCell> cells;  // workload-major, then variant order
};

struct MatrixRun {
  WorkloadSpec::Kind workload;
  Variant variant;
  std::uint64_t seed;
  RunResult result;
};

// Runs the full (workload x variant x seed) matrix against per-seed Baseline
// runs and aggregates the paper's median-improvement table. Baseline runs are
// executed once per (workload, seed) and the threshold is calibrated there
// when threshold_auto is set. Pass collect to also receive every run.
ComparisonTable compare_variants(const CompareSpec& spec,
                                 std::vector<MatrixRun>* collect = nullptr);

}  // namespace lgc
