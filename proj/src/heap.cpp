#include "lgc/heap.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lgc {

Heap::Heap(int num_generations, Ticks alloc_cost_ticks, Ticks scan_cost_ticks)
    : num_generations_(num_generations),
      alloc_cost_ticks_(alloc_cost_ticks),
      scan_cost_ticks_(scan_cost_ticks) {
  if (num_generations < 1) {
    throw std::logic_error("heap: num_generations must be >= 1");
  }
}

HeapObject& Heap::live_object(ObjectId id, const char* op) {
  auto it = objects_.find(id);
  if (it == objects_.end()) {
    throw std::logic_error(std::string(op) + ": object " + std::to_string(id) +
                           " is not live");
  }
  return it->second;
}

const HeapObject& Heap::object(ObjectId id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) {
    throw std::logic_error("object: id " + std::to_string(id) +
                           " is not live");
  }
  return it->second;
}

ObjectId Heap::allocate(SiteId site, Bytes size,
                        std::span<const ObjectId> initial_refs) {
  if (size == 0) throw std::logic_error("allocate: size must be > 0");
  for (ObjectId ref : initial_refs) {
    live_object(ref, "allocate");  // validate before mutating anything
  }
  const ObjectId id = next_id_++;
  HeapObject obj;
  obj.id = id;
  obj.site = site;
  obj.size = size;
  obj.generation = 1;
  obj.out_refs.assign(initial_refs.begin(), initial_refs.end());
  for (ObjectId ref : initial_refs) {
    ++objects_.at(ref).ref_count;
  }
  objects_.emplace(id, std::move(obj));
  live_bytes_ += size;
  peak_live_bytes_ = std::max(peak_live_bytes_, live_bytes_);
  ++total_allocations_;
  clock_ += alloc_cost_ticks_;
  return id;
}

void Heap::add_root(ObjectId id) {
  live_object(id, "add_root").ref_count++;
  roots_[id]++;
}

std::uint64_t Heap::remove_root(ObjectId id) {
  auto it = roots_.find(id);
  if (it == roots_.end()) {
    throw std::logic_error("remove_root: id " + std::to_string(id) +
                           " is not rooted");
  }
  if (--it->second == 0) roots_.erase(it);
  HeapObject& obj = live_object(id, "remove_root");
  if (--obj.ref_count == 0) return cascade_free(id);
  return 0;
}

void Heap::add_ref(ObjectId from, ObjectId to) {
  HeapObject& src = live_object(from, "add_ref");
  HeapObject& dst = live_object(to, "add_ref");
  src.out_refs.push_back(to);
  ++dst.ref_count;
}

std::uint64_t Heap::remove_ref(ObjectId from, ObjectId to) {
  HeapObject& src = live_object(from, "remove_ref");
  HeapObject& dst = live_object(to, "remove_ref");
  auto it = std::find(src.out_refs.begin(), src.out_refs.end(), to);
  if (it == src.out_refs.end()) {
    throw std::logic_error("remove_ref: no edge " + std::to_string(from) +
                           " -> " + std::to_string(to));
  }
  *it = src.out_refs.back();
  src.out_refs.pop_back();
  if (--dst.ref_count == 0) return cascade_free(to);
  return 0;
}

std::uint64_t Heap::cascade_free(ObjectId id) {
  std::uint64_t freed = 0;
  std::vector<ObjectId> worklist{id};
  while (!worklist.empty()) {
    const ObjectId cur = worklist.back();
    worklist.pop_back();
    auto it = objects_.find(cur);
    if (it == objects_.end() || it->second.ref_count != 0) {
      throw std::logic_error("cascade_free: object not free-able");
    }
    const std::vector<ObjectId> refs = std::move(it->second.out_refs);
    live_bytes_ -= it->second.size;
    objects_.erase(it);
    ++freed;
    for (ObjectId ref : refs) {
      HeapObject& target = objects_.at(ref);
      if (--target.ref_count == 0) worklist.push_back(ref);
    }
  }
  total_freed_ += freed;
  return freed;
}

CollectionStats Heap::collect(int generation) {
  if (generation < 1 || generation > num_generations_) {
    throw std::logic_error("collect: generation " +
                           std::to_string(generation) + " out of range");
  }
  CollectionStats stats;
  stats.generation_collected = generation;

  // Mark: reachability over objects in generations <= g, seeded by the root
  // set and by references out of older (uncollected) generations.
  std::unordered_set<ObjectId> marked;
  std::vector<ObjectId> worklist;
  auto mark_candidate = [&](ObjectId id) {
    auto it = objects_.find(id);
    if (it == objects_.end()) return;
    if (it->second.generation > generation) return;
    if (marked.insert(id).second) worklist.push_back(id);
  };
  for (const auto& [id, mult] : roots_) mark_candidate(id);
  for (const auto& [id, obj] : objects_) {
    if (obj.generation <= generation) {
      ++stats.objects_scanned;
    } else {
      for (ObjectId ref : obj.out_refs) mark_candidate(ref);
    }
  }
  while (!worklist.empty()) {
    const ObjectId cur = worklist.back();
    worklist.pop_back();
    for (ObjectId ref : objects_.at(cur).out_refs) mark_candidate(ref);
  }

  // Sweep: free unreachable candidates. Edges from freed objects into
  // survivors are unhooked (ref_count only); the mark phase already decided
  // liveness, so no cascade here.
  std::vector<ObjectId> freed;
  for (const auto& [id, obj] : objects_) {
    if (obj.generation <= generation && !marked.contains(id)) {
      freed.push_back(id);
    }
  }
  std::unordered_set<ObjectId> freed_set(freed.begin(), freed.end());
  for (ObjectId id : freed) {
    const HeapObject& obj = objects_.at(id);
    for (ObjectId ref : obj.out_refs) {
      if (!freed_set.contains(ref)) --objects_.at(ref).ref_count;
    }
    stats.bytes_freed += obj.size;
  }
  for (ObjectId id : freed) {
    live_bytes_ -= objects_.at(id).size;
    objects_.erase(id);
  }
  stats.objects_freed = freed.size();
  total_freed_ += freed.size();

  // Promote survivors of the collected generations; the oldest generation
  // holds its objects until they are freed.
  const int target = std::min(generation + 1, num_generations_);
  for (auto& [id, obj] : objects_) {
    if (obj.generation <= generation) obj.generation = target;
  }

  stats.cost_ticks = stats.objects_scanned * scan_cost_ticks_;
  clock_ += stats.cost_ticks;
  return stats;
}

std::unordered_set<ObjectId> Heap::reachable_set() const {
  std::unordered_set<ObjectId> reached;
  std::vector<ObjectId> worklist;
  for (const auto& [id, mult] : roots_) {
    if (reached.insert(id).second) worklist.push_back(id);
  }
  while (!worklist.empty()) {
    const ObjectId cur = worklist.back();
    worklist.pop_back();
    for (ObjectId ref : objects_.at(cur).out_refs) {
      if (reached.insert(ref).second) worklist.push_back(ref);
    }
  }
  return reached;
}

void Heap::check_integrity() const {
  std::unordered_map<ObjectId, std::uint64_t> counted;
  Bytes bytes = 0;
  for (const auto& [id, obj] : objects_) {
    bytes += obj.size;
    if (obj.generation < 1 || obj.generation > num_generations_) {
      throw std::logic_error("integrity: generation out of range");
    }
    for (ObjectId ref : obj.out_refs) {
      if (!objects_.contains(ref)) {
        throw std::logic_error("integrity: dangling reference");
      }
      ++counted[ref];
    }
  }
  for (const auto& [id, mult] : roots_) {
    if (!objects_.contains(id)) {
      throw std::logic_error("integrity: dangling root");
    }
    counted[id] += mult;
  }
  if (bytes != live_bytes_) {
    throw std::logic_error("integrity: live_bytes mismatch");
  }
  for (const auto& [id, obj] : objects_) {
    const std::uint64_t expect = counted.contains(id) ? counted.at(id) : 0;
    if (obj.ref_count != expect) {
      throw std::logic_error("integrity: ref_count mismatch on object " +
                             std::to_string(id));
    }
  }
}

std::string Heap::dump_edges() const {
  std::vector<ObjectId> root_lines;
  for (const auto& [id, mult] : roots_) {
    for (std::uint32_t i = 0; i < mult; ++i) root_lines.push_back(id);
  }
  std::sort(root_lines.begin(), root_lines.end());
  std::vector<std::pair<ObjectId, ObjectId>> edges;
  for (const auto& [id, obj] : objects_) {
    for (ObjectId ref : obj.out_refs) edges.emplace_back(id, ref);
  }
  std::sort(edges.begin(), edges.end());
  std::ostringstream out;
  for (ObjectId id : root_lines) out << "R " << id << "\n";
  for (const auto& [from, to] : edges) out << from << " " << to << "\n";
  return out.str();
}

}  // namespace lgc
