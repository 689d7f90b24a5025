#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lgc {

using ObjectId = std::uint64_t;
using SiteId = std::uint32_t;
using Bytes = std::uint64_t;
using Ticks = std::uint64_t;

struct HeapObject {
  ObjectId id = 0;
  SiteId site = 0;
  Bytes size = 0;
  int generation = 1;  // only ever increases, capped at the oldest generation
  std::vector<ObjectId> out_refs;  // multiset of outgoing references
  std::uint64_t ref_count = 0;     // incoming references from roots + live objects
};

struct CollectionStats {
  int generation_collected = 0;
  std::uint64_t objects_scanned = 0;
  std::uint64_t objects_freed = 0;
  Bytes bytes_freed = 0;
  Ticks cost_ticks = 0;  // objects_scanned * scan cost
};

// Deterministic generational heap simulation.
//
// Objects carry reference counts maintained by add/remove root/ref; an object
// whose count drops to zero is freed immediately together with anything it
// was keeping alive (cascade). Cycles defeat that path and are only reclaimed
// by collect(g): mark-and-sweep over generations <= g, treating roots and all
// older-generation objects as mark seeds, then promotion of survivors to
// min(g+1, oldest).
//
// Simulated time: each allocation advances the virtual clock by
// alloc_cost_ticks, each collection by objects_scanned * scan_cost_ticks.
// Misuse of the API (dead ids, missing edges) is a simulator bug and throws
// std::logic_error.
class Heap {
 public:
  explicit Heap(int num_generations = 3, Ticks alloc_cost_ticks = 1,
                Ticks scan_cost_ticks = 1);

  // New object in generation 1 referencing initial_refs. Its own ref_count
  // starts at zero; root it or reference it to keep it across collections.
  ObjectId allocate(SiteId site, Bytes size,
                    std::span<const ObjectId> initial_refs = {});

  void add_root(ObjectId id);
  // Returns the number of objects freed by the refcount cascade (0 if none).
  std::uint64_t remove_root(ObjectId id);

  void add_ref(ObjectId from, ObjectId to);
  std::uint64_t remove_ref(ObjectId from, ObjectId to);

  CollectionStats collect(int generation);

  // Exact set of objects reachable from the root set. Pure; test oracle.
  std::unordered_set<ObjectId> reachable_set() const;

  bool is_live(ObjectId id) const { return objects_.contains(id); }
  const HeapObject& object(ObjectId id) const;

  Bytes live_bytes() const { return live_bytes_; }
  Bytes peak_live_bytes() const { return peak_live_bytes_; }
  std::size_t live_objects() const { return objects_.size(); }
  int num_generations() const { return num_generations_; }

  Ticks virtual_clock() const { return clock_; }
  void advance_clock(Ticks ticks) { clock_ += ticks; }

  std::uint64_t total_allocations() const { return total_allocations_; }
  std::uint64_t total_objects_freed() const { return total_freed_; }

  const std::unordered_map<ObjectId, HeapObject>& objects() const {
    return objects_;
  }
  const std::unordered_map<ObjectId, std::uint32_t>& roots() const {
    return roots_;
  }

  // Recounts ref_counts and live_bytes from scratch and throws on any
  // mismatch with the stored values.
  void check_integrity() const;

  // Debug dump: one "R <id>" line per root entry, one "<from> <to>" line per
  // reference, sorted.
  std::string dump_edges() const;

 private:
  HeapObject& live_object(ObjectId id, const char* op);
  // Frees id (ref_count must be zero) and recursively anything whose count
  // drops to zero. Returns objects freed.
  std::uint64_t cascade_free(ObjectId id);

  std::unordered_map<ObjectId, HeapObject> objects_;
  std::unordered_map<ObjectId, std::uint32_t> roots_;  // id -> multiplicity
  int num_generations_;
  Ticks alloc_cost_ticks_;
  Ticks scan_cost_ticks_;
  Bytes live_bytes_ = 0;
  Bytes peak_live_bytes_ = 0;
  Ticks clock_ = 0;
  ObjectId next_id_ = 1;  // ids are never reused within a run
  std::uint64_t total_allocations_ = 0;
  std::uint64_t total_freed_ = 0;
};

}  // namespace lgc
