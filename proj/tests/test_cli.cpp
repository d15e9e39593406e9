#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <json.hpp>

#include "legtherm/config_io.hpp"
#include "legtherm/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LEGTHERM_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Run run_stdout(const std::string& args) {
  const std::string cmd = std::string(LEGTHERM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("legtherm_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("validate-config on the shipped file") {
  const Run r = run("validate-config --config " + std::string(LEGTHERM_SOURCE_DIR) + "/config/default.json");
  CHECK(r.status == 0);
  CHECK(r.output.find("config OK") != std::string::npos);
  CHECK(r.output.find("nodes: 14") != std::string::npos);
  CHECK(r.output.find("steady state") != std::string::npos);
}

TEST_CASE("reward-sweep tabulates both modes") {
  const Run r = run_stdout("reward-sweep --t-min 20 --t-max 80");
  CHECK(r.status == 0);
  CHECK(count_lines(r.output) == 62);
  CHECK(r.output.rfind("temperature,thermal_weight_smooth,thermal_weight_literal", 0) == 0);
}

TEST_CASE("batch summaries are reproducible") {
  const std::string args = "batch --agents 12 --duration 30 --mode governed --seed 7";
  const Run a = run_stdout(args + " --workers 1");
  const Run b = run_stdout(args + " --workers 1");
  const Run c = run_stdout(args + " --workers 3");
  CHECK(a.status == 0);
  CHECK(a.output == b.output);
  CHECK(a.output == c.output);
  CHECK(json::parse(a.output).at("agents").size() == 12);
}

TEST_CASE("output directory carries a manifest that reproduces the run") {
  const fs::path cfg_path = scratch("cfg.json");
  std::string cfg_text = legtherm::serialize_config(legtherm::default_sim_config());
  spit(cfg_path, cfg_text);
  const fs::path out1 = scratch("run1");
  const Run r = run("batch --agents 4 --duration 10 --seed 3 --config " + cfg_path.string() + " --out " + out1.string());
  REQUIRE(r.status == 0);
  const json m = json::parse(slurp(out1 / "manifest.json"));
  CHECK(m.at("format") == "legtherm-manifest/1");
  CHECK(m.at("subcommand") == "batch");
  CHECK(m.at("config_checksum") == "sha256:" + sha256_hex(cfg_text));
  CHECK(m.at("seed") == 3);
  CHECK(fs::exists(out1 / "summary.json"));
  CHECK(fs::exists(out1 / "scatter.csv"));

  // Re-run from the manifest alone: its embedded config and argument list.
  const fs::path cfg2 = scratch("cfg_from_manifest.json");
  spit(cfg2, m.at("config").dump());
  std::string args;
  const auto& list = m.at("arguments");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string a = list[i].get<std::string>();
    if (a == "--out" || a == "--config") {
      ++i;
      continue;
    }
    args += a + " ";
  }
  const fs::path out2 = scratch("run2");
  REQUIRE(run(args + "--config " + cfg2.string() + " --out " + out2.string()).status == 0);
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
  CHECK(slurp(out1 / "scatter.csv") == slurp(out2 / "scatter.csv"));
}

TEST_CASE("worker count falls back to the environment") {
  const fs::path out = scratch("env_workers");
  const std::string cmd = "LEGTHERM_WORKERS=2 " + std::string(LEGTHERM_CLI) +
                          " batch --agents 2 --duration 1 --out " + out.string() + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(json::parse(slurp(out / "manifest.json")).at("workers") == 2);
}

TEST_CASE("unknown flags print usage and exit 1") {
  const Run r = run("batch --agentz 3");
  CHECK(r.status == 1);
  CHECK(r.output.find("--agents") != std::string::npos);
  CHECK(run("no-such-command").status == 1);
}

TEST_CASE("config problems exit 1") {
  const fs::path bad = scratch("bad.json");
  spit(bad, R"({"rewards": {"sigma_th": -1}, "mystery": true})");
  const Run r = run("validate-config --config " + bad.string());
  CHECK(r.status == 1);
  CHECK(r.output.find("sigma_th") != std::string::npos);
  CHECK(r.output.find("mystery") != std::string::npos);
  CHECK(run("validate-config --config /nonexistent.json").status == 1);
}

TEST_CASE("simulate writes a trace and honours external actions") {
  const fs::path actions = scratch("actions.csv");
  std::ostringstream a;
  for (int k = 0; k < 50; ++k) {
    for (int j = 0; j < 12; ++j) a << (j ? "," : "") << 0.01 * ((k + j) % 5);
    a << '\n';
  }
  spit(actions, a.str());
  const Run r = run_stdout("simulate --mode external_residual --scenario standing --duration 1 --seed 5 --actions " +
                           actions.string());
  CHECK(r.status == 0);
  CHECK(count_lines(r.output) == 2 + 51);
  CHECK(r.output.rfind("# legtherm-trace/1", 0) == 0);

  const Run short_run = run("simulate --mode external_residual --duration 2 --actions " + actions.string());
  CHECK(short_run.status == 2);

  const Run scripted = run_stdout("simulate --mode governed --scenario long-horizon --duration 0.5 --seed 1");
  CHECK(scripted.status == 0);
  CHECK(count_lines(scripted.output) == 2 + 26);
}

TEST_CASE("layout export matches the library table") {
  const Run r = run_stdout("layout");
  std::ostringstream expected;
  legtherm::write_layout_csv(expected);
  CHECK(r.status == 0);
  CHECK(r.output == expected.str());
}

TEST_CASE("terrain-suite and steady-state run") {
  const Run t = run_stdout("terrain-suite --terrain slope --trials 2 --temps 30,58 --seed 2");
  CHECK(t.status == 0);
  CHECK(json::parse(t.output).at("levels").size() == 2);
  const Run s = run_stdout("steady-state --payload 3 --speed 1");
  CHECK(s.status == 0);
  CHECK(count_lines(s.output) == 15);
}
