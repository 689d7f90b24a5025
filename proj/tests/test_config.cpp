#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lgc/config.hpp"
#include "lgc/harness.hpp"
#include "lgc/reports.hpp"

using namespace lgc;

TEST_CASE("kv parser handles sections, dotted keys, comments, and quotes") {
  const KvMap kv = parse_kv_text(
      "# experiment\n"
      "variant = qpsi\n"
      "workload.kind = \"lru\"\n"
      "\n"
      "[learner]\n"
      "alpha = 0.2   # inline comment\n"
      "gamma = 0.5\n"
      "\n"
      "[workload.lru]\n"
      "capacity = 64\n");
  CHECK(kv.at("variant") == "qpsi");
  CHECK(kv.at("workload.kind") == "lru");
  CHECK(kv.at("learner.alpha") == "0.2");
  CHECK(kv.at("learner.gamma") == "0.5");
  CHECK(kv.at("workload.lru.capacity") == "64");
}

TEST_CASE("kv parser rejects malformed lines and duplicates") {
  CHECK_THROWS_AS(parse_kv_text("alpha\n"), ConfigError);
  CHECK_THROWS_AS(parse_kv_text("[learner\nalpha = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_kv_text("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_kv_text("= 3\n"), ConfigError);
}

TEST_CASE("a minimal config fills in the published defaults") {
  const ExperimentConfig cfg = experiment_from_kv(parse_kv_text(""));
  CHECK(cfg.learner.alpha == doctest::Approx(0.1));
  CHECK(cfg.learner.gamma == doctest::Approx(0.9999));
  CHECK(cfg.memory.num_bins == 64);
  CHECK(cfg.num_generations == 3);
  CHECK(cfg.threshold_auto);
  CHECK(cfg.duration_ticks == 2'000'000);
  CHECK(cfg.epoch_ticks == 10'000);
  CHECK(cfg.baseline.threshold0 == 700);
  CHECK(cfg.variant == Variant::QPSI);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(experiment_from_kv(parse_kv_text("learner.alpa = 0.1\n")),
                       doctest::Contains("learner.alpa"), ConfigError);
}

TEST_CASE("invariant violations are rejected at load time") {
  CHECK_THROWS_AS(experiment_from_kv(parse_kv_text("learner.alpha = 1.5\n")),
                  ConfigError);
  CHECK_THROWS_AS(experiment_from_kv(parse_kv_text("memory.bins = 1\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      experiment_from_kv(parse_kv_text("memory.threshold_bytes = 0\n")),
      ConfigError);
  CHECK_THROWS_AS(experiment_from_kv(parse_kv_text(
                      "duration_ticks = 100\nepoch_ticks = 200\n")),
                  ConfigError);
}

TEST_CASE("overrides apply after the file and unknown overrides reject") {
  KvMap kv = parse_kv_text("learner.alpha = 0.3\n");
  apply_overrides(kv, {"learner.alpha=0.5", "seed=9"});
  const ExperimentConfig cfg = experiment_from_kv(kv);
  CHECK(cfg.learner.alpha == doctest::Approx(0.5));
  CHECK(cfg.seed == 9);
  apply_overrides(kv, {"learner.alpha=1.5"});
  CHECK_THROWS_AS(experiment_from_kv(kv), ConfigError);
  CHECK_THROWS_AS(apply_overrides(kv, {"no-equals"}), ConfigError);
}

TEST_CASE("explicit thresholds disable auto calibration") {
  const ExperimentConfig cfg =
      experiment_from_kv(parse_kv_text("memory.threshold_bytes = 123456\n"));
  CHECK_FALSE(cfg.threshold_auto);
  CHECK(cfg.memory.threshold_bytes == 123456);
}

TEST_CASE("configs round-trip through the kv echo") {
  KvMap kv = parse_kv_text(
      "variant = qps\n"
      "seed = 31\n"
      "workload.kind = tx\n"
      "workload.tx.fanout = 3\n"
      "learner.epsilon_decay = 0.95\n"
      "memory.threshold_bytes = 777777\n");
  const ExperimentConfig cfg = experiment_from_kv(kv);
  const KvMap echo = experiment_to_kv(cfg);
  const ExperimentConfig reloaded = experiment_from_kv(echo);
  CHECK(experiment_to_kv(reloaded) == echo);
  CHECK(reloaded.seed == 31);
  CHECK(reloaded.workload.tx.fanout == 3);
  CHECK(reloaded.memory.threshold_bytes == 777777);
}

TEST_CASE("run summaries embed a reloadable config echo") {
  ExperimentConfig cfg;
  cfg.workload.kind = WorkloadSpec::Kind::LruCache;
  cfg.workload.lru.capacity_clusters = 16;
  cfg.variant = Variant::QP;
  cfg.duration_ticks = 50'000;
  cfg.epoch_ticks = 5'000;
  cfg.threshold_auto = false;
  cfg.memory.threshold_bytes = 100'000;
  const RunResult r = run(cfg);
  const ExperimentConfig reloaded = config_from_summary_json(summary_json(r));
  CHECK(experiment_to_kv(reloaded) == experiment_to_kv(cfg));
}

TEST_CASE("compare specs parse their matrix lists") {
  const CompareSpec spec = compare_from_kv(parse_kv_text(
      "duration_ticks = 100000\n"
      "compare.workloads = lru, webserver\n"
      "compare.variants = q, qpsi\n"
      "compare.seeds = 1,2,3\n"));
  CHECK(spec.workloads ==
        std::vector<WorkloadSpec::Kind>{WorkloadSpec::Kind::LruCache,
                                        WorkloadSpec::Kind::Webserver});
  CHECK(spec.variants == std::vector<Variant>{Variant::Q, Variant::QPSI});
  CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(spec.base.duration_ticks == 100'000);
  CHECK_THROWS_AS(compare_from_kv(parse_kv_text("compare.seeds = x\n")),
                  ConfigError);
}

TEST_CASE("doubles format with exact round-trips") {
  for (const double v : {0.1, 0.9999, 1.0 / 700.0, -100.0, 1e-17, 0.0}) {
    CHECK(parse_double(format_double(v), "t") == v);
  }
}

TEST_CASE("run stems name workload, variant, and seed") {
  ExperimentConfig cfg;
  cfg.workload.kind = WorkloadSpec::Kind::Webserver;
  cfg.variant = Variant::QPSI;
  cfg.seed = 42;
  CHECK(run_stem(cfg) == "webserver_qpsi_42");
}
