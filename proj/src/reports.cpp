#include "lgc/reports.hpp"

#include <json.hpp>

#include "lgc/config.hpp"

namespace lgc {

std::string epochs_csv(const RunResult& result) {
  std::string out =
      "epoch,raw_reward,normalized_reward,live_bytes,table_bytes,"
      "collections_g1,collections_g2,collections_g3,forced_full,epsilon\n";
  for (const EpochRecord& e : result.epochs) {
    auto gen_count = [&](std::size_t g) -> std::uint64_t {
      return g < e.collections_by_gen.size() ? e.collections_by_gen[g] : 0;
    };
    out += std::to_string(e.epoch_index);
    out += ',';
    out += format_double(e.raw_reward);
    out += ',';
    out += format_double(e.normalized_reward);
    out += ',';
    out += std::to_string(e.live_bytes_end);
    out += ',';
    out += std::to_string(e.table_bytes);
    out += ',';
    out += std::to_string(gen_count(0));
    out += ',';
    out += std::to_string(gen_count(1));
    out += ',';
    out += std::to_string(gen_count(2));
    out += ',';
    out += std::to_string(e.forced_full);
    out += ',';
    out += format_double(e.epsilon);
    out += '\n';
  }
  return out;
}

std::string summary_json(const RunResult& result) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  for (const auto& [key, value] : experiment_to_kv(result.config)) {
    cfg[key] = value;
  }
  j["config"] = cfg;
  j["epochs"] = result.epochs.size();
  j["median_reward"] = result.median_reward;
  j["peak_live_bytes"] = result.peak_live_bytes;
  j["total_collections"] = result.total_collections;
  j["forced_full_total"] = result.forced_full_total;
  j["decisions_total"] = result.decisions_total;
  j["decisions_in_io"] = result.decisions_in_io;
  j["voluntary_collections"] = result.voluntary_collections;
  j["voluntary_collections_in_io"] = result.voluntary_collections_in_io;
  j["max_event_alloc_bytes"] = result.max_event_alloc_bytes;
  j["final_table_bytes"] =
      result.epochs.empty() ? 0 : result.epochs.back().table_bytes;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_summary_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  KvMap kv;
  for (const auto& [key, value] : j.at("config").items()) {
    kv[key] = value.get<std::string>();
  }
  return experiment_from_kv(kv);
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "workload";
  for (const Variant v : table.variants) out += "," + variant_name(v);
  out += '\n';
  for (const WorkloadSpec::Kind workload : table.workloads) {
    out += workload_name(workload);
    for (const Variant v : table.variants) {
      for (const ComparisonCell& cell : table.cells) {
        if (cell.workload == workload && cell.variant == v) {
          out += ',';
          out += format_double(cell.median_improvement_pct);
        }
      }
    }
    out += '\n';
  }
  return out;
}

std::string comparison_detail_csv(const ComparisonTable& table) {
  std::string out =
      "workload,variant,seed,median_reward,baseline_median_reward,"
      "improvement_pct,threshold_bytes\n";
  for (const ComparisonCell& cell : table.cells) {
    for (const SeedOutcome& s : cell.seeds) {
      out += workload_name(cell.workload);
      out += ',';
      out += variant_name(cell.variant);
      out += ',';
      out += std::to_string(s.seed);
      out += ',';
      out += format_double(s.variant_median);
      out += ',';
      out += format_double(s.baseline_median);
      out += ',';
      out += format_double(s.improvement_pct);
      out += ',';
      out += std::to_string(s.threshold_bytes);
      out += '\n';
    }
  }
  return out;
}

std::string run_stem(const ExperimentConfig& cfg) {
  return workload_name(cfg.workload.kind) + "_" + variant_name(cfg.variant) +
         "_" + std::to_string(cfg.seed);
}

}  // namespace lgc
