#include "lgc/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace lgc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("config: " + field + ": not a number: " + text);
  }
  return v;
}

KvMap parse_kv_text(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    if (kv.contains(key)) {
      throw ConfigError("config: duplicate key: " + key);
    }
    kv[key] = value;
  }
  return kv;
}

KvMap load_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str());
}

void apply_overrides(KvMap& kv, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override: expected key=value, got: " + item);
    }
    kv[trim(item.substr(0, eq))] = unquote(trim(item.substr(eq + 1)));
  }
}

namespace {

// Reads typed values out of a KvMap while tracking which keys were consumed,
// so anything left over can be rejected by name.
class KvReader {
 public:
  explicit KvReader(const KvMap& kv) : kv_(kv) {}

  bool has(const std::string& key) {
    if (kv_.contains(key)) {
      used_.insert(key);
      return true;
    }
    return false;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    return has(key) ? kv_.at(key) : fallback;
  }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return parse_double(kv_.at(key), key);
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const std::string& text = kv_.at(key);
    std::uint64_t v = 0;
    const auto res =
        std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw ConfigError("config: " + key + ": not an integer: " + text);
    }
    return v;
  }

  void reject_unused(const std::set<std::string>& also_allowed = {}) const {
    for (const auto& [key, value] : kv_) {
      if (!used_.contains(key) && !also_allowed.contains(key)) {
        throw ConfigError("config: unknown key: " + key);
      }
    }
  }

 private:
  const KvMap& kv_;
  std::set<std::string> used_;
};

ExperimentConfig experiment_from_reader(KvReader& r) {
  ExperimentConfig cfg;
  cfg.workload.kind = workload_from_name(r.str("workload.kind", "lru"));
  cfg.variant = variant_from_name(r.str("variant", "qpsi"));
  cfg.seed = r.uint("seed", 1);
  cfg.duration_ticks = r.uint("duration_ticks", 2'000'000);
  cfg.epoch_ticks = r.uint("epoch_ticks", 10'000);
  cfg.num_generations = static_cast<int>(r.uint("heap.generations", 3));

  const std::string threshold = r.str("memory.threshold_bytes", "auto");
  if (threshold == "auto") {
    cfg.threshold_auto = true;
    cfg.memory.threshold_bytes = 0;
  } else {
    cfg.threshold_auto = false;
    std::uint64_t v = 0;
    const auto res =
        std::from_chars(threshold.data(), threshold.data() + threshold.size(), v);
    if (res.ec != std::errc() ||
        res.ptr != threshold.data() + threshold.size() || v == 0) {
      throw ConfigError(
          "config: memory.threshold_bytes must be a positive integer or "
          "\"auto\"");
    }
    cfg.memory.threshold_bytes = v;
  }
  cfg.memory.num_bins =
      static_cast<std::uint32_t>(r.uint("memory.bins", 64));

  cfg.learner.alpha = r.real("learner.alpha", 0.1);
  cfg.learner.gamma = r.real("learner.gamma", 0.9999);
  cfg.learner.epsilon_start = r.real("learner.epsilon_start", 0.2);
  cfg.learner.epsilon_min = r.real("learner.epsilon_min", 0.01);
  cfg.learner.epsilon_decay = r.real("learner.epsilon_decay", 0.98);
  cfg.learner.prior_collect_prob =
      r.real("learner.prior_collect_prob", 1.0 / 700.0);
  cfg.learner.shaping_kappa = r.real("learner.shaping_kappa", 0.1);
  cfg.learner.penalty_init = r.real("learner.penalty_init", -100.0);
  cfg.learner.threshold_penalty = r.real("learner.threshold_penalty", 1.0);

  cfg.baseline.threshold0 =
      static_cast<std::int64_t>(r.uint("baseline.threshold0", 700));
  cfg.baseline.threshold1 = static_cast<int>(r.uint("baseline.threshold1", 10));
  cfg.baseline.threshold2 = static_cast<int>(r.uint("baseline.threshold2", 10));

  LruParams& lru = cfg.workload.lru;
  lru.capacity_clusters =
      static_cast<std::uint32_t>(r.uint("workload.lru.capacity", 256));
  lru.cluster_objects =
      static_cast<std::uint32_t>(r.uint("workload.lru.cluster_objects", 8));
  lru.object_bytes = r.uint("workload.lru.object_bytes", 256);
  lru.scratch_bytes = r.uint("workload.lru.scratch_bytes", 64);
  lru.insert_fraction = r.real("workload.lru.insert_fraction", 0.25);
  lru.lookup_ticks = r.uint("workload.lru.lookup_ticks", 6);
  lru.insert_ticks = r.uint("workload.lru.insert_ticks", 12);

  WebserverParams& web = cfg.workload.web;
  web.working_objects =
      static_cast<std::uint32_t>(r.uint("workload.web.working_objects", 8));
  web.working_bytes = r.uint("workload.web.working_bytes", 1536);
  web.scratch_objects =
      static_cast<std::uint32_t>(r.uint("workload.web.scratch_objects", 2));
  web.scratch_bytes = r.uint("workload.web.scratch_bytes", 64);
  web.response_bytes = r.uint("workload.web.response_bytes", 16384);
  web.request_ticks = r.uint("workload.web.request_ticks", 100);
  web.io_window_ticks = r.uint("workload.web.io_window_ticks", 50);
  web.static_objects =
      static_cast<std::uint32_t>(r.uint("workload.web.static_objects", 20000));
  web.static_bytes = r.uint("workload.web.static_bytes", 16);

  TxParams& tx = cfg.workload.tx;
  tx.nodes_per_tx =
      static_cast<std::uint32_t>(r.uint("workload.tx.nodes_per_tx", 2));
  tx.node_bytes = r.uint("workload.tx.node_bytes", 512);
  tx.fanout = static_cast<std::uint32_t>(r.uint("workload.tx.fanout", 1));
  tx.target_window =
      static_cast<std::uint32_t>(r.uint("workload.tx.target_window", 512));
  tx.mean_lifetime_epochs = r.real("workload.tx.mean_lifetime_epochs", 20.0);
  tx.search_ticks = r.uint("workload.tx.search_ticks", 30);

  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace

ExperimentConfig experiment_from_kv(const KvMap& kv) {
  KvReader r(kv);
  ExperimentConfig cfg = experiment_from_reader(r);
  r.reject_unused();
  return cfg;
}

KvMap experiment_to_kv(const ExperimentConfig& cfg) {
  KvMap kv;
  kv["workload.kind"] = workload_name(cfg.workload.kind);
  kv["variant"] = variant_name(cfg.variant);
  kv["seed"] = std::to_string(cfg.seed);
  kv["duration_ticks"] = std::to_string(cfg.duration_ticks);
  kv["epoch_ticks"] = std::to_string(cfg.epoch_ticks);
  kv["heap.generations"] = std::to_string(cfg.num_generations);
  kv["memory.threshold_bytes"] = cfg.memory.threshold_bytes == 0
                                     ? "auto"
                                     : std::to_string(cfg.memory.threshold_bytes);
  kv["memory.bins"] = std::to_string(cfg.memory.num_bins);
  kv["learner.alpha"] = format_double(cfg.learner.alpha);
  kv["learner.gamma"] = format_double(cfg.learner.gamma);
  kv["learner.epsilon_start"] = format_double(cfg.learner.epsilon_start);
  kv["learner.epsilon_min"] = format_double(cfg.learner.epsilon_min);
  kv["learner.epsilon_decay"] = format_double(cfg.learner.epsilon_decay);
  kv["learner.prior_collect_prob"] =
      format_double(cfg.learner.prior_collect_prob);
  kv["learner.shaping_kappa"] = format_double(cfg.learner.shaping_kappa);
  kv["learner.penalty_init"] = format_double(cfg.learner.penalty_init);
  kv["learner.threshold_penalty"] =
      format_double(cfg.learner.threshold_penalty);
  kv["baseline.threshold0"] = std::to_string(cfg.baseline.threshold0);
  kv["baseline.threshold1"] = std::to_string(cfg.baseline.threshold1);
  kv["baseline.threshold2"] = std::to_string(cfg.baseline.threshold2);
  kv["workload.lru.capacity"] = std::to_string(cfg.workload.lru.capacity_clusters);
  kv["workload.lru.cluster_objects"] =
      std::to_string(cfg.workload.lru.cluster_objects);
  kv["workload.lru.object_bytes"] = std::to_string(cfg.workload.lru.object_bytes);
  kv["workload.lru.scratch_bytes"] =
      std::to_string(cfg.workload.lru.scratch_bytes);
  kv["workload.lru.insert_fraction"] =
      format_double(cfg.workload.lru.insert_fraction);
  kv["workload.lru.lookup_ticks"] = std::to_string(cfg.workload.lru.lookup_ticks);
  kv["workload.lru.insert_ticks"] = std::to_string(cfg.workload.lru.insert_ticks);
  kv["workload.web.working_objects"] =
      std::to_string(cfg.workload.web.working_objects);
  kv["workload.web.working_bytes"] =
      std::to_string(cfg.workload.web.working_bytes);
  kv["workload.web.scratch_objects"] =
      std::to_string(cfg.workload.web.scratch_objects);
  kv["workload.web.scratch_bytes"] =
      std::to_string(cfg.workload.web.scratch_bytes);
  kv["workload.web.response_bytes"] =
      std::to_string(cfg.workload.web.response_bytes);
  kv["workload.web.request_ticks"] =
      std::to_string(cfg.workload.web.request_ticks);
  kv["workload.web.io_window_ticks"] =
      std::to_string(cfg.workload.web.io_window_ticks);
  kv["workload.web.static_objects"] =
      std::to_string(cfg.workload.web.static_objects);
  kv["workload.web.static_bytes"] =
      std::to_string(cfg.workload.web.static_bytes);
  kv["workload.tx.nodes_per_tx"] = std::to_string(cfg.workload.tx.nodes_per_tx);
  kv["workload.tx.node_bytes"] = std::to_string(cfg.workload.tx.node_bytes);
  kv["workload.tx.fanout"] = std::to_string(cfg.workload.tx.fanout);
  kv["workload.tx.target_window"] =
      std::to_string(cfg.workload.tx.target_window);
  kv["workload.tx.mean_lifetime_epochs"] =
      format_double(cfg.workload.tx.mean_lifetime_epochs);
  kv["workload.tx.search_ticks"] = std::to_string(cfg.workload.tx.search_ticks);
  return kv;
}

CompareSpec compare_from_kv(const KvMap& kv) {
  KvReader r(kv);
  CompareSpec spec;
  spec.base = experiment_from_reader(r);
  for (const std::string& name :
       split_list(r.str("compare.workloads", "lru,webserver,tx"))) {
    spec.workloads.push_back(workload_from_name(name));
  }
  for (const std::string& name :
       split_list(r.str("compare.variants", "q,qp,qps,qpsi"))) {
    spec.variants.push_back(variant_from_name(name));
  }
  for (const std::string& s : split_list(r.str("compare.seeds", "1,2,3,4,5"))) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ConfigError("config: compare.seeds: not an integer: " + s);
    }
    spec.seeds.push_back(v);
  }
  r.reject_unused();
  if (spec.workloads.empty() || spec.variants.empty() || spec.seeds.empty()) {
    throw ConfigError("config: compare lists must be nonempty");
  }
  return spec;
}

}  // namespace lgc
