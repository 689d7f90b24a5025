#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks against the built binary (path injected by CMake).

namespace {

namespace fs = std::filesystem;

const std::string kBinary = LEARNED_GC_BINARY;

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

CommandResult run_command(const std::string& args) {
  const std::string cmd = kBinary + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) result.output += buf;
  const int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "lgc_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "exp.toml";
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kSmallRun =
    "workload.kind = lru\n"
    "variant = qp\n"
    "seed = 5\n"
    "duration_ticks = 60000\n"
    "epoch_ticks = 5000\n"
    "memory.threshold_bytes = 300000\n"
    "workload.lru.capacity = 32\n";

}  // namespace

TEST_CASE("missing config exits 1 and names the path") {
  const CommandResult r = run_command("run --config /no/such/file.toml");
  CHECK(r.exit_code == 1);
}

TEST_CASE("invalid config values exit 1") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = write_config(dir, "learner.alpha = 1.5\n");
  CHECK(run_command("run --config " + cfg.string()).exit_code == 1);
  // same rejection through an override
  const fs::path ok = write_config(dir, kSmallRun);
  CHECK(run_command("run --config " + ok.string() +
                    " --set learner.alpha=1.5")
            .exit_code == 1);
}

TEST_CASE("run writes the named csv and json outputs") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = write_config(dir, kSmallRun);
  const CommandResult r = run_command("run --config " + cfg.string() +
                                      " --out " + (dir / "out").string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "out" / "run_lru_qp_5.csv");
  CHECK(csv.starts_with("epoch,raw_reward,normalized_reward,live_bytes,"));
  const std::string json = slurp(dir / "out" / "run_lru_qp_5.json");
  CHECK(json.find("\"median_reward\"") != std::string::npos);
  // seed override is reflected in the file name
  const CommandResult r2 = run_command("run --config " + cfg.string() +
                                       " --seed 9 --out " +
                                       (dir / "out").string());
  CHECK(r2.exit_code == 0);
  CHECK(fs::exists(dir / "out" / "run_lru_qp_9.csv"));
}

TEST_CASE("calibrate prints the threshold in bytes on stdout") {
  const CommandResult r = run_command(
      "calibrate --workload lru --seed 42 --duration 60000 "
      "--set epoch_ticks=5000 --set workload.lru.capacity=32");
  CHECK(r.exit_code == 0);
  const std::uint64_t m = std::strtoull(r.output.c_str(), nullptr, 10);
  CHECK(m > 0);
}

TEST_CASE("export-policy writes a q-table snapshot") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = write_config(dir, kSmallRun);
  const CommandResult r = run_command("export-policy --config " +
                                      cfg.string() + " --out " +
                                      (dir / "out").string());
  CHECK(r.exit_code == 0);
  const std::string snapshot = slurp(dir / "out" / "policy_lru_qp_5.csv");
  CHECK(snapshot.starts_with("site,mem_bin,action,q_value\n"));
  CHECK(snapshot.find("\ncg") == std::string::npos);  // rows are complete
}

TEST_CASE("export-policy rejects variants without a table") {
  const fs::path dir = scratch_dir();
  fs::path cfg = write_config(dir, std::string(kSmallRun) +
                                       "\n# baseline has no table\n");
  const CommandResult r = run_command("export-policy --config " +
                                      cfg.string() +
                                      " --set variant=baseline");
  CHECK(r.exit_code == 1);
}

TEST_CASE("the output directory falls back to LEARNED_GC_OUT") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = write_config(dir, kSmallRun);
  const std::string cmd = "LEARNED_GC_OUT=" + (dir / "env_out").string() +
                          " " + kBinary + " run --config " + cfg.string() +
                          " 2>/dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(dir / "env_out" / "run_lru_qp_5.csv"));
}

TEST_CASE("auto thresholds are calibrated before the run") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = write_config(
      dir,
      "workload.kind = lru
"
      "variant = qpsi
"
      "seed = 3
"
      "duration_ticks = 60000
"
      "epoch_ticks = 5000
"
      "memory.threshold_bytes = auto
"
      "workload.lru.capacity = 32
");
  const CommandResult r = run_command("run --config " + cfg.string() +
                                      " --out " + (dir / "out").string());
  CHECK(r.exit_code == 0);
  // the summary echoes the resolved threshold, not "auto"
  const std::string json = slurp(dir / "out" / "run_lru_qpsi_3.json");
  CHECK(json.find("\"memory.threshold_bytes\": \"auto\"") == std::string::npos);
}

TEST_CASE("compare writes the variant table") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = write_config(
      dir, std::string(kSmallRun) +
               "compare.workloads = lru\n"
               "compare.variants = q, qpsi\n"
               "compare.seeds = 1,2\n");
  const CommandResult r = run_command("compare --config " + cfg.string() +
                                      " --out " + (dir / "out").string());
  CHECK(r.exit_code == 0);
  const std::string table = slurp(dir / "out" / "table1.csv");
  CHECK(table.starts_with("workload,q,qpsi\nlru,"));
  const std::string detail = slurp(dir / "out" / "table1_detail.csv");
  CHECK(detail.find("lru,qpsi,2,") != std::string::npos);
}
