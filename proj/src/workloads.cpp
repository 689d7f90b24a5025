#include "lgc/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace lgc {

std::string workload_name(WorkloadSpec::Kind kind) {
  switch (kind) {
    case WorkloadSpec::Kind::LruCache:
      return "lru";
    case WorkloadSpec::Kind::Webserver:
      return "webserver";
    case WorkloadSpec::Kind::TxGraph:
      return "tx";
  }
  return "unknown";
}

WorkloadSpec::Kind workload_from_name(const std::string& name) {
  if (name == "lru") return WorkloadSpec::Kind::LruCache;
  if (name == "webserver") return WorkloadSpec::Kind::Webserver;
  if (name == "tx") return WorkloadSpec::Kind::TxGraph;
  throw std::invalid_argument("unknown workload: " + name);
}

namespace {

// site numbering, stable per logical allocation point
constexpr SiteId kLruHeadSite = 1;
constexpr SiteId kLruRingSite = 2;
constexpr SiteId kLruScratchSite = 3;
constexpr SiteId kWebWorkingSiteBase = 10;  // one site per working object
constexpr SiteId kWebScratchSiteBase = 14;
constexpr SiteId kWebResponseSite = 16;
constexpr SiteId kWebStaticSite = 17;
constexpr SiteId kTxNodeSite = 20;

std::uint64_t geometric_steps(Rng& rng, double mean) {
  const double p = 1.0 / std::max(1.0, mean);
  double u = rng.uniform();
  if (u <= 0.0) u = 0x1.0p-53;
  const double k = std::floor(std::log(u) / std::log1p(-p));
  return 1 + static_cast<std::uint64_t>(std::max(0.0, k));
}

// Every object is reachable from the moment it is placed: a collection can
// fire at any allocation (and a forced full collection right after one), so
// links are built forward from a rooted head, with a temporary root covering
// the gap between placement and linking.
ObjectId allocate_linked(Mutator& m, SiteId site, Bytes size, ObjectId prev) {
  const ObjectId id = m.allocate(site, size, {}, true);
  m.add_ref(prev, id);
  m.remove_root(id);
  return id;
}

// Large cyclic entries in an LRU cache: eviction drops the root but the ring
// keeps every ref_count positive, so only mark-and-sweep reclaims them.
class LruCacheWorkload final : public Workload {
 public:
  explicit LruCacheWorkload(const LruParams& p) : p_(p) {}

  WorkEvent step(Mutator& m, Rng& rng) override {
    const ObjectId scratch =
        m.allocate(kLruScratchSite, p_.scratch_bytes, {}, true);
    const bool insert = entries_.empty() || rng.uniform() < p_.insert_fraction;
    if (insert) {
      if (entries_.size() >= p_.capacity_clusters) {
        m.remove_root(entries_.back());  // evicted ring leaks until collected
        entries_.pop_back();
      }
      const ObjectId head = m.allocate(kLruHeadSite, p_.object_bytes, {}, true);
      ObjectId prev = head;
      for (std::uint32_t i = 1; i < p_.cluster_objects; ++i) {
        prev = allocate_linked(m, kLruRingSite, p_.object_bytes, prev);
      }
      m.add_ref(prev, head);  // close the ring (self-cycle when length 1)
      entries_.push_front(head);
      m.work(p_.insert_ticks);
    } else {
      // touch a random entry: move it to the front of the LRU order
      const std::uint64_t idx = rng.uniform_int(entries_.size());
      auto it = entries_.begin() + static_cast<std::ptrdiff_t>(idx);
      const ObjectId head = *it;
      entries_.erase(it);
      entries_.push_front(head);
      m.work(p_.lookup_ticks);
    }
    m.remove_root(scratch);
    return {1};
  }

 private:
  LruParams p_;
  std::deque<ObjectId> entries_;  // front = most recently used
};

// One request per step: collection chosen during the request phase delays the
// response tick-for-tick, while the response allocation's decision lands in
// the I/O window, where collection overlaps the wait. The working set forms a
// cycle and is dropped only after the window, so request garbage needs the
// collector.
class WebserverWorkload final : public Workload {
 public:
  explicit WebserverWorkload(const WebserverParams& p) : p_(p) {}

  WorkEvent step(Mutator& m, Rng& rng) override {
    (void)rng;  // requests are identical; the interesting noise is GC timing
    if (!static_ready_) {
      for (std::uint32_t i = 0; i < p_.static_objects; ++i) {
        m.allocate(kWebStaticSite, p_.static_bytes, {}, true);
      }
      static_ready_ = true;
    }
    const std::uint32_t allocs = p_.working_objects + p_.scratch_objects;
    const Ticks slice = p_.request_ticks / (allocs + 1);
    Ticks spent = 0;

    ObjectId head = 0;
    ObjectId prev = 0;
    for (std::uint32_t i = 0; i < p_.working_objects; ++i) {
      m.work(slice);
      spent += slice;
      const SiteId site = kWebWorkingSiteBase + (i % 4);
      if (i == 0) {
        head = prev = m.allocate(site, p_.working_bytes, {}, true);
      } else {
        prev = allocate_linked(m, site, p_.working_bytes, prev);
      }
    }
    if (head != 0) m.add_ref(prev, head);  // close the working-set cycle

    std::vector<ObjectId> scratch;
    scratch.reserve(p_.scratch_objects);
    for (std::uint32_t j = 0; j < p_.scratch_objects; ++j) {
      m.work(slice);
      spent += slice;
      scratch.push_back(m.allocate(kWebScratchSiteBase + (j % 2),
                                   p_.scratch_bytes, {}, true));
    }
    if (p_.request_ticks > spent) m.work(p_.request_ticks - spent);

    // response queued; collection chosen here overlaps the I/O wait
    m.begin_io_window();
    const ObjectId response =
        m.allocate(kWebResponseSite, p_.response_bytes, {}, true);
    const Ticks gc = m.last_decision_cost();
    m.end_io_window();
    if (gc < p_.io_window_ticks) m.work(p_.io_window_ticks - gc);

    // window over: request state dropped; the cyclic working set leaks
    if (head != 0) m.remove_root(head);
    for (ObjectId id : scratch) m.remove_root(id);
    m.remove_root(response);
    return {1};
  }

 private:
  WebserverParams p_;
  bool static_ready_ = false;
};

// Long-lived cyclic transaction graph: batches stay rooted for a geometric
// number of epochs, and each new transaction references a recent one, so
// survivors dominate every collection and retired garbage is released in
// waves once its referrers retire too.
class TxGraphWorkload final : public Workload {
 public:
  TxGraphWorkload(const TxParams& p, Ticks epoch_ticks) : p_(p) {
    const double step_ticks =
        static_cast<double>(p_.search_ticks + p_.nodes_per_tx);
    mean_lifetime_steps_ =
        std::max(1.0, p_.mean_lifetime_epochs *
                          static_cast<double>(epoch_ticks) / step_ticks);
  }

  WorkEvent step(Mutator& m, Rng& rng) override {
    ++step_;
    while (!retire_queue_.empty() && retire_queue_.top().first <= step_) {
      const std::uint32_t idx = retire_queue_.top().second;
      retire_queue_.pop();
      m.remove_root(batches_[idx].root);
      for (ObjectId id : batches_[idx].nodes) retired_.insert(id);
      batches_[idx].nodes.clear();
    }

    Batch batch;
    ObjectId prev = 0;
    for (std::uint32_t i = 0; i < p_.nodes_per_tx; ++i) {
      ObjectId id;
      if (i == 0) {
        id = m.allocate(kTxNodeSite, p_.node_bytes, {}, true);
        batch.root = id;
        // one outward reference per transaction, into the recent window;
        // anything older has to survive on its own roots
        for (std::uint32_t f = 0; f < p_.fanout; ++f) {
          const ObjectId target = pick_recent(rng);
          if (target != 0) m.add_ref(id, target);
        }
      } else {
        id = allocate_linked(m, kTxNodeSite, p_.node_bytes, prev);
      }
      batch.nodes.push_back(id);
      recent_.push_back(id);
      prev = id;
    }
    m.add_ref(prev, batch.root);  // in-batch cycle (self-cycle when single)
    const std::uint64_t lifetime = geometric_steps(rng, mean_lifetime_steps_);
    retire_queue_.emplace(step_ + lifetime,
                          static_cast<std::uint32_t>(batches_.size()));
    batches_.push_back(std::move(batch));

    m.work(p_.search_ticks);
    return {1};
  }

 private:
  struct Batch {
    ObjectId root = 0;
    std::vector<ObjectId> nodes;
  };
  using RetireEntry = std::pair<std::uint64_t, std::uint32_t>;

  // Random node among the newest target_window allocations whose batch is
  // still rooted (rooted batches are guaranteed live).
  ObjectId pick_recent(Rng& rng) {
    const std::uint64_t window =
        std::min<std::uint64_t>(p_.target_window, recent_.size());
    if (window == 0) return 0;
    for (int attempt = 0; attempt < 32; ++attempt) {
      const ObjectId id =
          recent_[recent_.size() - 1 - rng.uniform_int(window)];
      if (!retired_.contains(id)) return id;
    }
    return 0;
  }

  TxParams p_;
  double mean_lifetime_steps_ = 1.0;
  std::uint64_t step_ = 0;
  std::vector<Batch> batches_;
  std::priority_queue<RetireEntry, std::vector<RetireEntry>,
                      std::greater<RetireEntry>>
      retire_queue_;
  std::vector<ObjectId> recent_;  // allocation order, append-only
  std::unordered_set<ObjectId> retired_;
};

}  // namespace

std::unique_ptr<Workload> make_workload(const WorkloadSpec& spec,
                                        Ticks epoch_ticks) {
  switch (spec.kind) {
    case WorkloadSpec::Kind::LruCache:
      return std::make_unique<LruCacheWorkload>(spec.lru);
    case WorkloadSpec::Kind::Webserver:
      return std::make_unique<WebserverWorkload>(spec.web);
    case WorkloadSpec::Kind::TxGraph:
      return std::make_unique<TxGraphWorkload>(spec.tx, epoch_ticks);
  }
  throw std::invalid_argument("unknown workload kind");
}

}  // namespace lgc
