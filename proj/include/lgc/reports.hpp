#pragma once

#include <string>

#include "lgc/harness.hpp"

namespace lgc {

// Per-epoch metrics CSV, schema:
//   epoch,raw_reward,normalized_reward,live_bytes,table_bytes,
//   collections_g1,collections_g2,collections_g3,forced_full,epsilon
std::string epochs_csv(const RunResult& result);

// JSON run summary embedding the full config echo.
std::string summary_json(const RunResult& result);

// Reload the config echo out of a summary produced by summary_json.
ExperimentConfig config_from_summary_json(const std::string& json_text);

// Median-improvement table mirroring the paper's shape: one row per
// workload, one column per variant, cells in percent.
std::string comparison_csv(const ComparisonTable& table);

// Per-seed detail rows behind the aggregated table.
std::string comparison_detail_csv(const ComparisonTable& table);

// File name stem "<workload>_<variant>_<seed>" used for run outputs.
std::string run_stem(const ExperimentConfig& cfg);

}  // namespace lgc
