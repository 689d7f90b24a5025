#pragma once

#include <map>
#include <set>
#include <vector>

#include "lgc/heap.hpp"

namespace lgc::testsupport {

// Frozen copy of the object graph, taken before a collection so the freed
// set can be recomputed independently of the heap's own mark phase.
struct GraphSnapshot {
  struct Node {
    int generation = 1;
    std::vector<ObjectId> refs;
  };
  std::map<ObjectId, Node> nodes;
  std::vector<ObjectId> roots;  // one entry per root multiplicity
};

inline GraphSnapshot snapshot(const Heap& heap) {
  GraphSnapshot snap;
  for (const auto& [id, obj] : heap.objects()) {
    snap.nodes[id] = {obj.generation, obj.out_refs};
  }
  for (const auto& [id, mult] : heap.roots()) {
    for (std::uint32_t i = 0; i < mult; ++i) snap.roots.push_back(id);
  }
  return snap;
}

// Brute-force freed set for collect(g): everything in generations <= g that
// is not reachable when roots and all older-generation objects are treated
// as starting points. Walks the snapshot with plain breadth-first search.
inline std::set<ObjectId> expected_freed(const GraphSnapshot& snap, int g) {
  std::set<ObjectId> visited;
  std::vector<ObjectId> frontier;
  auto visit = [&](ObjectId id) {
    if (visited.insert(id).second) frontier.push_back(id);
  };
  for (const ObjectId id : snap.roots) visit(id);
  for (const auto& [id, node] : snap.nodes) {
    if (node.generation > g) visit(id);
  }
  while (!frontier.empty()) {
    const ObjectId cur = frontier.back();
    frontier.pop_back();
    for (const ObjectId ref : snap.nodes.at(cur).refs) visit(ref);
  }
  std::set<ObjectId> freed;
  for (const auto& [id, node] : snap.nodes) {
    if (node.generation <= g && !visited.contains(id)) freed.insert(id);
  }
  return freed;
}

}  // namespace lgc::testsupport
