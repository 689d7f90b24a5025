#include "lgc/harness.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "lgc/rng.hpp"

namespace lgc {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Baseline:
      return "baseline";
    case Variant::NeverCollect:
      return "nevercollect";
    case Variant::Q:
      return "q";
    case Variant::QP:
      return "qp";
    case Variant::QPS:
      return "qps";
    case Variant::QPSI:
      return "qpsi";
  }
  return "unknown";
}

Variant variant_from_name(const std::string& name) {
  if (name == "baseline") return Variant::Baseline;
  if (name == "nevercollect") return Variant::NeverCollect;
  if (name == "q") return Variant::Q;
  if (name == "qp") return Variant::QP;
  if (name == "qps") return Variant::QPS;
  if (name == "qpsi") return Variant::QPSI;
  throw std::invalid_argument("unknown variant: " + name);
}

bool variant_learns(Variant v) {
  return v == Variant::Q || v == Variant::QP || v == Variant::QPS ||
         v == Variant::QPSI;
}

void apply_variant_flags(Variant v, LearnerConfig& cfg) {
  cfg.enable_prior = v == Variant::QP || v == Variant::QPS || v == Variant::QPSI;
  cfg.enable_shaping = v == Variant::QPS || v == Variant::QPSI;
  cfg.enable_init = v == Variant::QPSI;
}

void validate_config(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("config: " + what);
  };
  if (cfg.num_generations < 1) fail("heap.generations must be >= 1");
  if (cfg.epoch_ticks == 0) fail("epoch_ticks must be > 0");
  if (cfg.duration_ticks < cfg.epoch_ticks) {
    fail("duration_ticks must be >= epoch_ticks");
  }
  if (cfg.memory.num_bins < 2) fail("memory.bins must be >= 2");
  if (cfg.baseline.threshold0 < 1) fail("baseline.threshold0 must be >= 1");
  if (cfg.baseline.threshold1 < 1) fail("baseline.threshold1 must be >= 1");
  if (cfg.baseline.threshold2 < 1) fail("baseline.threshold2 must be >= 1");
  if (cfg.workload.lru.cluster_objects == 0) {
    fail("workload.lru.cluster_objects must be >= 1");
  }
  if (cfg.workload.lru.capacity_clusters == 0) {
    fail("workload.lru.capacity must be >= 1");
  }
  if (!(cfg.workload.lru.insert_fraction >= 0.0 &&
        cfg.workload.lru.insert_fraction <= 1.0)) {
    fail("workload.lru.insert_fraction must be in [0,1]");
  }
  if (cfg.workload.tx.nodes_per_tx == 0) {
    fail("workload.tx.nodes_per_tx must be >= 1");
  }
  if (cfg.workload.tx.mean_lifetime_epochs <= 0.0) {
    fail("workload.tx.mean_lifetime_epochs must be > 0");
  }
  validate(cfg.learner);
}

namespace {

struct EpochTallies {
  std::vector<std::uint64_t> collections_by_gen;
  std::uint64_t forced = 0;
};

class MutatorImpl final : public Mutator {
 public:
  MutatorImpl(Heap& heap, const ExperimentConfig& cfg, Learner* learner,
              BaselineGc* baseline, const ScriptedPolicy* scripted,
              Rng& policy_rng, RunObserver* observer, RunResult& result)
      : heap_(heap),
        cfg_(cfg),
        learner_(learner),
        baseline_(baseline),
        scripted_(scripted),
        policy_rng_(policy_rng),
        observer_(observer),
        result_(result) {
    epoch_.collections_by_gen.assign(
        static_cast<std::size_t>(cfg.num_generations), 0);
  }

  ObjectId allocate(SiteId site, Bytes size, std::span<const ObjectId> refs,
                    bool root) override {
    const GcState state = encode_state(site, heap_.live_bytes(), cfg_.memory);
    ++result_.decisions_total;
    if (io_phase_) ++result_.decisions_in_io;
    const GcAction action = decide(state);
    Ticks voluntary_cost = 0;
    if (action.collects()) {
      const CollectionStats st = heap_.collect(action.generation());
      voluntary_cost = st.cost_ticks;
      ++epoch_.collections_by_gen[static_cast<std::size_t>(
          action.generation() - 1)];
      ++result_.voluntary_collections;
      if (io_phase_) ++result_.voluntary_collections_in_io;
      if (observer_) observer_->on_collection(action.generation(), st, false);
    }
    const ObjectId id = heap_.allocate(site, size, refs);
    if (root) heap_.add_root(id);
    event_alloc_bytes_ += size;
    if (baseline_) baseline_->on_allocation();
    if (observer_) observer_->on_allocation(site, size, heap_.live_bytes());
    bool forced = false;
    Ticks forced_cost = 0;
    if (threshold_breached(heap_.live_bytes(), cfg_.memory)) {
      if (observer_) observer_->on_breach(heap_.live_bytes());
      const CollectionStats st = heap_.collect(cfg_.num_generations);
      forced = true;
      forced_cost = st.cost_ticks;
      ++epoch_.forced;
      ++result_.forced_full_total;
      if (baseline_) baseline_->on_forced_full();
      if (observer_) {
        observer_->on_collection(cfg_.num_generations, st, true);
      }
    }
    last_decision_cost_ = voluntary_cost + forced_cost;
    if (learner_) {
      learner_->record_transition(state, action, voluntary_cost, forced);
    }
    return id;
  }

  void add_root(ObjectId id) override { heap_.add_root(id); }
  void remove_root(ObjectId id) override {
    const std::uint64_t freed = heap_.remove_root(id);
    if (baseline_) baseline_->on_frees(freed);
  }
  void add_ref(ObjectId from, ObjectId to) override {
    heap_.add_ref(from, to);
  }
  void remove_ref(ObjectId from, ObjectId to) override {
    const std::uint64_t freed = heap_.remove_ref(from, to);
    if (baseline_) baseline_->on_frees(freed);
  }
  void work(Ticks ticks) override { heap_.advance_clock(ticks); }
  void begin_io_window() override { io_phase_ = true; }
  void end_io_window() override { io_phase_ = false; }
  Ticks last_decision_cost() const override { return last_decision_cost_; }

  EpochTallies take_epoch_tallies() {
    EpochTallies out = epoch_;
    std::fill(epoch_.collections_by_gen.begin(),
              epoch_.collections_by_gen.end(), 0);
    epoch_.forced = 0;
    return out;
  }

  void end_event() {
    result_.max_event_alloc_bytes =
        std::max(result_.max_event_alloc_bytes, event_alloc_bytes_);
    event_alloc_bytes_ = 0;
  }

 private:
  GcAction decide(const GcState& state) {
    if (scripted_) return (*scripted_)(state, io_phase_, policy_rng_);
    if (learner_) return learner_->select_action(state, policy_rng_);
    if (baseline_) return baseline_->decide(cfg_.num_generations);
    return GcAction::nothing();  // NeverCollect
  }

  Heap& heap_;
  const ExperimentConfig& cfg_;
  Learner* learner_;
  BaselineGc* baseline_;
  const ScriptedPolicy* scripted_;
  Rng& policy_rng_;
  RunObserver* observer_;
  RunResult& result_;
  EpochTallies epoch_;
  bool io_phase_ = false;
  Ticks last_decision_cost_ = 0;
  Bytes event_alloc_bytes_ = 0;
};

RunResult run_loop(const ExperimentConfig& cfg, const ScriptedPolicy* scripted,
                   RunObserver* observer, QTable* final_table = nullptr) {
  validate_config(cfg);
  Heap heap(cfg.num_generations);
  Rng workload_rng(mix_seed(cfg.seed, 1));
  Rng policy_rng(mix_seed(cfg.seed, 2));
  auto workload = make_workload(cfg.workload, cfg.epoch_ticks);

  std::optional<Learner> learner;
  std::optional<BaselineGc> baseline;
  if (!scripted) {
    if (variant_learns(cfg.variant)) {
      LearnerConfig lc = cfg.learner;
      apply_variant_flags(cfg.variant, lc);
      learner.emplace(lc, cfg.memory, cfg.num_generations);
    } else if (cfg.variant == Variant::Baseline) {
      baseline.emplace(cfg.baseline.threshold0, cfg.baseline.threshold1,
                       cfg.baseline.threshold2);
    }
  }

  RunResult result;
  result.config = cfg;
  MutatorImpl mutator(heap, cfg, learner ? &*learner : nullptr,
                      baseline ? &*baseline : nullptr, scripted, policy_rng,
                      observer, result);

  std::uint64_t work_window = 0;
  Ticks epoch_end = cfg.epoch_ticks;
  double running_max = 0.0;
  std::uint64_t epoch_index = 0;

  auto emit_epoch = [&]() {
    const double raw = static_cast<double>(work_window) /
                       static_cast<double>(cfg.epoch_ticks);
    running_max = std::max(running_max, raw);
    const double norm = running_max > 0.0 ? raw / running_max : 0.0;
    EpochRecord rec;
    rec.epoch_index = epoch_index++;
    rec.raw_reward = raw;
    rec.normalized_reward = norm;
    rec.live_bytes_end = heap.live_bytes();
    if (learner) {
      const UpdateSummary s = learner->apply_reward(norm, cfg.epoch_ticks);
      rec.epsilon = s.epsilon_used;
      rec.table_bytes = learner->table_bytes();
    }
    const EpochTallies t = mutator.take_epoch_tallies();
    rec.collections_by_gen = t.collections_by_gen;
    rec.forced_full = t.forced;
    result.epochs.push_back(std::move(rec));
    work_window = 0;
    epoch_end += cfg.epoch_ticks;
  };

  while (heap.virtual_clock() < cfg.duration_ticks) {
    const Ticks before = heap.virtual_clock();
    const WorkEvent ev = workload->step(mutator, workload_rng);
    if (heap.virtual_clock() == before) heap.advance_clock(1);
    // close any reward windows the step ran past, then credit its work to
    // the window it completed in
    while (heap.virtual_clock() >= epoch_end &&
           epoch_end <= cfg.duration_ticks) {
      emit_epoch();
    }
    work_window += ev.work_units;
    mutator.end_event();
  }
  while (epoch_end <= cfg.duration_ticks) emit_epoch();

  std::vector<double> rewards;
  rewards.reserve(result.epochs.size());
  for (const EpochRecord& e : result.epochs) rewards.push_back(e.raw_reward);
  result.median_reward = rewards.empty() ? 0.0 : median(std::move(rewards));
  result.peak_live_bytes = heap.peak_live_bytes();
  result.total_collections =
      result.voluntary_collections + result.forced_full_total;
  if (final_table && learner) *final_table = learner->table();
  return result;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, RunObserver* observer,
              QTable* final_table) {
  if (cfg.memory.threshold_bytes == 0) {
    throw std::invalid_argument(
        "config: memory.threshold_bytes is unresolved; calibrate first or "
        "set an explicit value");
  }
  return run_loop(cfg, nullptr, observer, final_table);
}

RunResult run_scripted(const ExperimentConfig& cfg,
                       const ScriptedPolicy& policy, RunObserver* observer) {
  return run_loop(cfg, &policy, observer);
}

Bytes calibrate_threshold(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.variant = Variant::Baseline;
  c.memory.threshold_bytes = 0;  // no forced collections while observing
  const RunResult r = run_loop(c, nullptr, nullptr);
  std::vector<Bytes> usage;
  usage.reserve(r.epochs.size());
  for (const EpochRecord& e : r.epochs) usage.push_back(e.live_bytes_end);
  if (usage.empty()) return 1;
  return std::max<Bytes>(1, median_bytes(std::move(usage)));
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

Bytes median_bytes(std::vector<Bytes> values) {
  if (values.empty()) {
    throw std::invalid_argument("median_bytes: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2;
}

double median_improvement(const RunResult& variant,
                          const RunResult& baseline) {
  if (baseline.median_reward == 0.0) {
    throw std::runtime_error(
        "median_improvement: baseline median reward is zero");
  }
  return 100.0 * (variant.median_reward - baseline.median_reward) /
         baseline.median_reward;
}

ComparisonTable compare_variants(const CompareSpec& spec,
                                 std::vector<MatrixRun>* collect) {
  if (spec.workloads.empty() || spec.variants.empty() || spec.seeds.empty()) {
    throw std::invalid_argument(
        "compare: workloads, variants, and seeds must all be nonempty");
  }
  validate_config(spec.base);
  ComparisonTable table;
  table.workloads = spec.workloads;
  table.variants = spec.variants;
  for (const WorkloadSpec::Kind workload : spec.workloads) {
    std::vector<ComparisonCell> cells(spec.variants.size());
    for (std::size_t vi = 0; vi < spec.variants.size(); ++vi) {
      cells[vi].workload = workload;
      cells[vi].variant = spec.variants[vi];
    }
    for (const std::uint64_t seed : spec.seeds) {
      ExperimentConfig cell_cfg = spec.base;
      cell_cfg.workload.kind = workload;
      cell_cfg.seed = seed;
      if (cell_cfg.threshold_auto || cell_cfg.memory.threshold_bytes == 0) {
        cell_cfg.memory.threshold_bytes = calibrate_threshold(cell_cfg);
      }
      cell_cfg.variant = Variant::Baseline;
      const RunResult baseline_run = run(cell_cfg);
      if (collect) {
        collect->push_back({workload, Variant::Baseline, seed, baseline_run});
      }
      for (std::size_t vi = 0; vi < spec.variants.size(); ++vi) {
        const Variant v = spec.variants[vi];
        SeedOutcome outcome;
        outcome.seed = seed;
        outcome.baseline_median = baseline_run.median_reward;
        outcome.threshold_bytes = cell_cfg.memory.threshold_bytes;
        if (v == Variant::Baseline) {
          outcome.variant_median = baseline_run.median_reward;
          outcome.improvement_pct = 0.0;
        } else {
          cell_cfg.variant = v;
          const RunResult vr = run(cell_cfg);
          outcome.variant_median = vr.median_reward;
          outcome.improvement_pct = median_improvement(vr, baseline_run);
          if (collect) collect->push_back({workload, v, seed, vr});
        }
        cells[vi].seeds.push_back(outcome);
      }
    }
    for (ComparisonCell& cell : cells) {
      std::vector<double> improvements;
      improvements.reserve(cell.seeds.size());
      for (const SeedOutcome& s : cell.seeds) {
        improvements.push_back(s.improvement_pct);
      }
      cell.median_improvement_pct = median(std::move(improvements));
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace lgc
