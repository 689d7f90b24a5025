#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgc/heap.hpp"

namespace lgc {

struct MemoryConfig {
  // Forced-collection threshold M. Zero disables the threshold entirely
  // (used while calibrating M itself); configs passed to run() must have a
  // resolved positive value.
  Bytes threshold_bytes = 0;
  std::uint32_t num_bins = 64;  // B; bin B is the saturation bin (usage >= M)
};

// MDP state observed at an allocation: where the program is allocating and
// how full the heap is.
struct GcState {
  SiteId site = 0;
  std::uint32_t mem_bin = 0;
  bool operator==(const GcState&) const = default;
};

// Either "collect nothing" (index 0) or "collect generation g and younger"
// (index g).
class GcAction {
 public:
  constexpr GcAction() = default;

  static constexpr GcAction nothing() { return GcAction(0); }
  static constexpr GcAction collect(int generation) {
    return GcAction(generation);
  }

  constexpr bool collects() const { return index_ > 0; }
  constexpr int generation() const { return index_; }  // 0 when not collecting
  constexpr int index() const { return index_; }

  constexpr bool operator==(const GcAction&) const = default;

 private:
  explicit constexpr GcAction(int index) : index_(index) {}
  int index_ = 0;
};

inline std::string action_name(GcAction a) {
  return a.collects() ? "cg" + std::to_string(a.generation()) : "nothing";
}

// Discretize heap usage: bin = floor(live * B / M), saturating at bin B.
inline GcState encode_state(SiteId site, Bytes live_bytes,
                            const MemoryConfig& cfg) {
  GcState s;
  s.site = site;
  if (cfg.threshold_bytes == 0 || live_bytes >= cfg.threshold_bytes) {
    s.mem_bin = cfg.threshold_bytes == 0 ? 0 : cfg.num_bins;
  } else {
    s.mem_bin = static_cast<std::uint32_t>(live_bytes * cfg.num_bins /
                                           cfg.threshold_bytes);
  }
  return s;
}

// Fixed decision order: [nothing, cg1, ..., cg|G|]. Argmax ties resolve in
// this order, so "collect nothing" wins when values are equal.
inline std::vector<GcAction> action_set(int num_generations) {
  std::vector<GcAction> actions;
  actions.reserve(static_cast<std::size_t>(num_generations) + 1);
  actions.push_back(GcAction::nothing());
  for (int g = 1; g <= num_generations; ++g) {
    actions.push_back(GcAction::collect(g));
  }
  return actions;
}

// Strict excess: usage equal to M does not force a collection.
inline bool threshold_breached(Bytes live_bytes, const MemoryConfig& cfg) {
  return cfg.threshold_bytes != 0 && live_bytes > cfg.threshold_bytes;
}

}  // namespace lgc
