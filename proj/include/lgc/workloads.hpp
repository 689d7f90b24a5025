#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "lgc/heap.hpp"
#include "lgc/rng.hpp"

namespace lgc {

struct WorkEvent {
  std::uint32_t work_units = 0;  // queries / requests / transactions finished
};

// Surface the harness exposes to workloads. Allocations route through the
// garbage-collection decision point; work() advances simulated time.
class Mutator {
 public:
  virtual ~Mutator() = default;

  virtual ObjectId allocate(SiteId site, Bytes size,
                            std::span<const ObjectId> refs, bool root) = 0;
  virtual void add_root(ObjectId id) = 0;
  virtual void remove_root(ObjectId id) = 0;
  virtual void add_ref(ObjectId from, ObjectId to) = 0;
  virtual void remove_ref(ObjectId from, ObjectId to) = 0;
  virtual void work(Ticks ticks) = 0;

  // Marks decisions that fall inside an I/O wait, where collection overlaps
  // with time the program would spend blocked anyway.
  virtual void begin_io_window() = 0;
  virtual void end_io_window() = 0;

  // Collection ticks (chosen + forced) paid at the most recent allocate().
  virtual Ticks last_decision_cost() const = 0;
};

class Workload {
 public:
  virtual ~Workload() = default;
  virtual WorkEvent step(Mutator& m, Rng& rng) = 0;
};

// --- workload parameter blocks (defaults are the documented desk scale) ---

struct LruParams {
  std::uint32_t capacity_clusters = 256;
  std::uint32_t cluster_objects = 8;  // ring length; cyclic by construction
  Bytes object_bytes = 256;
  Bytes scratch_bytes = 64;      // per-query scratch, refcount-freed
  double insert_fraction = 0.25;  // rest of the queries are lookups
  Ticks lookup_ticks = 6;
  Ticks insert_ticks = 12;
};

struct WebserverParams {
  std::uint32_t working_objects = 8;  // per-request cyclic working set
  Bytes working_bytes = 1536;
  std::uint32_t scratch_objects = 2;  // acyclic, freed with the request
  Bytes scratch_bytes = 64;
  Bytes response_bytes = 16384;  // the rendered page is the big allocation
  Ticks request_ticks = 100;    // CPU between accept and response queued
  Ticks io_window_ticks = 50;   // response in flight; GC absorbed up to this
  std::uint32_t static_objects = 20000;  // site content, lives forever
  Bytes static_bytes = 16;
};

struct TxParams {
  std::uint32_t nodes_per_tx = 2;
  Bytes node_bytes = 512;
  std::uint32_t fanout = 1;  // references into recent transactions
  std::uint32_t target_window = 512;  // how far back references may reach
  double mean_lifetime_epochs = 20.0;
  Ticks search_ticks = 30;
};

struct WorkloadSpec {
  enum class Kind { LruCache, Webserver, TxGraph };
  Kind kind = Kind::LruCache;
  LruParams lru;
  WebserverParams web;
  TxParams tx;
};

std::string workload_name(WorkloadSpec::Kind kind);
WorkloadSpec::Kind workload_from_name(const std::string& name);

// epoch_ticks is needed to convert the Tx lifetime (specified in reward
// epochs) into a step count; the event stream itself never reads the clock,
// so it is identical for every policy given the same spec and seed.
std::unique_ptr<Workload> make_workload(const WorkloadSpec& spec,
                                        Ticks epoch_ticks);

}  // namespace lgc
