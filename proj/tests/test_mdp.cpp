#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lgc/mdp.hpp"

using namespace lgc;

namespace {
MemoryConfig mem(Bytes m, std::uint32_t bins = 64) {
  MemoryConfig cfg;
  cfg.threshold_bytes = m;
  cfg.num_bins = bins;
  return cfg;
}
}  // namespace

TEST_CASE("state encoding discretizes usage against the threshold") {
  const MemoryConfig cfg = mem(1 << 20);
  CHECK(encode_state(5, 0, cfg).mem_bin == 0);
  CHECK(encode_state(5, 0, cfg).site == 5);
  CHECK(encode_state(5, cfg.threshold_bytes, cfg).mem_bin == 64);  // saturates
  CHECK(encode_state(5, cfg.threshold_bytes / 2, cfg).mem_bin == 32);
  CHECK(encode_state(5, cfg.threshold_bytes * 3, cfg).mem_bin == 64);
}

TEST_CASE("state encoding is monotone in usage and saturates") {
  const MemoryConfig cfg = mem(100'000);
  std::uint32_t prev = 0;
  for (Bytes live = 0; live <= 250'000; live += 1'000) {
    const std::uint32_t bin = encode_state(1, live, cfg).mem_bin;
    CHECK(bin >= prev);
    CHECK(bin <= cfg.num_bins);
    prev = bin;
  }
  CHECK(prev == cfg.num_bins);
}

TEST_CASE("action set has |G|+1 actions in a fixed order") {
  const auto actions3 = action_set(3);
  REQUIRE(actions3.size() == 4);
  CHECK(actions3[0] == GcAction::nothing());
  CHECK(actions3[1] == GcAction::collect(1));
  CHECK(actions3[2] == GcAction::collect(2));
  CHECK(actions3[3] == GcAction::collect(3));
  CHECK(action_set(3) == actions3);  // stable across calls

  const auto actions1 = action_set(1);
  REQUIRE(actions1.size() == 2);
  CHECK(actions1[0] == GcAction::nothing());
  CHECK(actions1[1] == GcAction::collect(1));
}

TEST_CASE("action names") {
  CHECK(action_name(GcAction::nothing()) == "nothing");
  CHECK(action_name(GcAction::collect(3)) == "cg3");
  CHECK_FALSE(GcAction::nothing().collects());
  CHECK(GcAction::collect(2).generation() == 2);
}

TEST_CASE("threshold breach is strict excess over M") {
  const MemoryConfig cfg = mem(4096);
  CHECK_FALSE(threshold_breached(0, cfg));
  CHECK_FALSE(threshold_breached(4096, cfg));
  CHECK(threshold_breached(4097, cfg));
}

TEST_CASE("disabled threshold never breaches and bins to zero") {
  const MemoryConfig cfg = mem(0);
  CHECK_FALSE(threshold_breached(1 << 30, cfg));
  CHECK(encode_state(1, 1 << 30, cfg).mem_bin == 0);
}
