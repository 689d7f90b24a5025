#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgc/harness.hpp"

namespace lgc {

// Raised for malformed files, unknown keys, and invariant violations; the
// CLI maps it (and std::invalid_argument) to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat dotted key -> scalar string, insertion-independent ordering.
using KvMap = std::map<std::string, std::string>;

// INI/TOML-subset: '#' comments, optional [section] headers that prefix the
// keys below them, and "key = value" lines. Values may be quoted.
KvMap parse_kv_text(const std::string& text);
KvMap load_kv_file(const std::string& path);

// "key=value" pairs applied on top of a loaded file.
void apply_overrides(KvMap& kv, const std::vector<std::string>& overrides);

// Builds a validated config. Unknown keys are rejected. memory.threshold_bytes
// accepts "auto" (resolved by calibration later).
ExperimentConfig experiment_from_kv(const KvMap& kv);

// Full echo of a config as the same flat key schema; round-trips through
// experiment_from_kv to an equivalent config.
KvMap experiment_to_kv(const ExperimentConfig& cfg);

// Comparison matrix: base experiment keys plus compare.workloads,
// compare.variants, and compare.seeds lists (comma separated).
CompareSpec compare_from_kv(const KvMap& kv);

// Deterministic shortest-round-trip formatting used across all outputs.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& field);

}  // namespace lgc
