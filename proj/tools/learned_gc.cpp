#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgc/config.hpp"
#include "lgc/harness.hpp"
#include "lgc/reports.hpp"

namespace {

namespace fs = std::filesystem;

std::string default_out_dir() {
  if (const char* env = std::getenv("LEARNED_GC_OUT")) return env;
  return ".";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

lgc::KvMap load_with_overrides(const std::string& config_path,
                               const std::vector<std::string>& overrides,
                               const std::optional<std::uint64_t>& seed) {
  lgc::KvMap kv = lgc::load_kv_file(config_path);
  lgc::apply_overrides(kv, overrides);
  if (seed) kv["seed"] = std::to_string(*seed);
  return kv;
}

lgc::ExperimentConfig resolve_threshold(lgc::ExperimentConfig cfg) {
  if (cfg.memory.threshold_bytes == 0) {
    std::cerr << "calibrating memory threshold ("
              << lgc::workload_name(cfg.workload.kind) << ", seed " << cfg.seed
              << ")...\n";
    cfg.memory.threshold_bytes = lgc::calibrate_threshold(cfg);
    std::cerr << "threshold M = " << cfg.memory.threshold_bytes << " bytes\n";
  }
  return cfg;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides,
            const std::optional<std::uint64_t>& seed) {
  const lgc::ExperimentConfig cfg = resolve_threshold(
      lgc::experiment_from_kv(load_with_overrides(config_path, overrides, seed)));
  const lgc::RunResult result = lgc::run(cfg);
  fs::create_directories(out_dir);
  const std::string stem = "run_" + lgc::run_stem(cfg);
  const fs::path csv_path = fs::path(out_dir) / (stem + ".csv");
  const fs::path json_path = fs::path(out_dir) / (stem + ".json");
  write_file(csv_path, lgc::epochs_csv(result));
  write_file(json_path, lgc::summary_json(result));
  std::cerr << "wrote " << csv_path.string() << "\n";
  std::cerr << "wrote " << json_path.string() << "\n";
  std::cerr << "median reward " << lgc::format_double(result.median_reward)
            << ", peak live " << result.peak_live_bytes << " bytes, "
            << result.total_collections << " collections ("
            << result.forced_full_total << " forced)\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                const std::vector<std::string>& overrides) {
  const lgc::CompareSpec spec =
      lgc::compare_from_kv(load_with_overrides(config_path, overrides, {}));
  std::cerr << "comparing " << spec.workloads.size() << " workload(s) x "
            << spec.variants.size() << " variant(s) x " << spec.seeds.size()
            << " seed(s)...\n";
  const lgc::ComparisonTable table = lgc::compare_variants(spec);
  fs::create_directories(out_dir);
  const fs::path table_path = fs::path(out_dir) / "table1.csv";
  const fs::path detail_path = fs::path(out_dir) / "table1_detail.csv";
  write_file(table_path, lgc::comparison_csv(table));
  write_file(detail_path, lgc::comparison_detail_csv(table));
  std::cerr << "wrote " << table_path.string() << "\n";
  std::cerr << "wrote " << detail_path.string() << "\n";
  std::cerr << lgc::comparison_csv(table);
  return 0;
}

int cmd_calibrate(const std::optional<std::string>& config_path,
                  const std::optional<std::string>& workload,
                  const std::vector<std::string>& overrides,
                  const std::optional<std::uint64_t>& seed,
                  const std::optional<std::uint64_t>& duration) {
  lgc::KvMap kv;
  if (config_path) {
    kv = lgc::load_kv_file(*config_path);
  }
  lgc::apply_overrides(kv, overrides);
  if (workload) kv["workload.kind"] = *workload;
  if (seed) kv["seed"] = std::to_string(*seed);
  if (duration) kv["duration_ticks"] = std::to_string(*duration);
  const lgc::ExperimentConfig cfg = lgc::experiment_from_kv(kv);
  const lgc::Bytes m = lgc::calibrate_threshold(cfg);
  std::cout << m << "\n";
  return 0;
}

int cmd_export_policy(const std::string& config_path,
                      const std::string& out_dir,
                      const std::vector<std::string>& overrides,
                      const std::optional<std::uint64_t>& seed) {
  const lgc::ExperimentConfig cfg = resolve_threshold(
      lgc::experiment_from_kv(load_with_overrides(config_path, overrides, seed)));
  if (!lgc::variant_learns(cfg.variant)) {
    throw lgc::ConfigError("export-policy: variant " +
                           lgc::variant_name(cfg.variant) +
                           " has no policy table");
  }
  lgc::QTable table(cfg.num_generations + 1);
  lgc::run(cfg, nullptr, &table);
  fs::create_directories(out_dir);
  const fs::path path =
      fs::path(out_dir) / ("policy_" + lgc::run_stem(cfg) + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  table.export_csv(out);
  std::cerr << "wrote " << path.string() << " (" << table.state_count()
            << " states)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned garbage collection simulator"};
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> duration;
  std::optional<std::string> calibrate_config;
  std::optional<std::string> calibrate_workload;

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cmd->add_option("--config", config_path, "experiment config file")
      ->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--set", overrides, "key=value config overrides");

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "run the variant comparison matrix");
  compare_cmd->add_option("--config", config_path, "matrix config file")
      ->required();
  compare_cmd->add_option("--out", out_dir, "output directory");
  compare_cmd->add_option("--set", overrides, "key=value config overrides");

  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "print the calibrated memory threshold M in bytes");
  calibrate_cmd->add_option("--config", calibrate_config, "config file");
  calibrate_cmd->add_option("--workload", calibrate_workload,
                            "workload name (lru, webserver, tx)");
  calibrate_cmd->add_option("--seed", seed, "seed");
  calibrate_cmd->add_option("--duration", duration, "duration in ticks");
  calibrate_cmd->add_option("--set", overrides, "key=value config overrides");

  CLI::App* export_cmd = app.add_subcommand(
      "export-policy", "run an experiment and export its final Q table");
  export_cmd->add_option("--config", config_path, "experiment config file")
      ->required();
  export_cmd->add_option("--out", out_dir, "output directory");
  export_cmd->add_option("--seed", seed, "override the config seed");
  export_cmd->add_option("--set", overrides, "key=value config overrides");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir, overrides, seed);
    if (compare_cmd->parsed()) return cmd_compare(config_path, out_dir, overrides);
    if (calibrate_cmd->parsed()) {
      if (!calibrate_config && !calibrate_workload) {
        throw lgc::ConfigError("calibrate: need --config or --workload");
      }
      return cmd_calibrate(calibrate_config, calibrate_workload, overrides,
                           seed, duration);
    }
    if (export_cmd->parsed()) {
      return cmd_export_policy(config_path, out_dir, overrides, seed);
    }
  } catch (const lgc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
