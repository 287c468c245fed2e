#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rollbot/cli.hpp"
#include "rollbot/report.hpp"

using namespace rollbot;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rollbot_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string scenario(const char* name) {
  return std::string(ROLLBOT_SCENARIO_DIR) + "/" + name + ".cfg";
}

std::size_t count(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

}  // namespace

TEST_CASE("compare mode writes both traces and the metrics report") {
  const fs::path out = fresh_dir("compare");
  RunConfig rc;
  rc.config_path = scenario("case1_pd");
  rc.output_dir = out;
  rc.mode = "compare";
  std::ostringstream log;
  REQUIRE(run_command(rc, log) == 0);

  CHECK(fs::exists(out / "case1_pd_pd.csv"));
  CHECK(fs::exists(out / "case1_pd_pd_fnn.csv"));
  CHECK(count(out, ".svg") == 0);

  const std::string trace = slurp(out / "case1_pd_pd.csv");
  CHECK(trace.rfind(std::string(kTraceColumns) + "\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 15002);

  const std::string metrics = slurp(out / "case1_pd_metrics.csv");
  CHECK(metrics.rfind(std::string(kMetricsColumns) + "\n", 0) == 0);
  CHECK(metrics.find("case1_pd,PD,1,") != std::string::npos);
  CHECK(metrics.find("case1_pd,PD+FNN,3,") != std::string::npos);
  CHECK(fs::exists(out / "case1_pd_metrics.txt"));
  CHECK(log.str().find("PD+FNN") != std::string::npos);
}

TEST_CASE("plots and parameter snapshots on request") {
  const fs::path out = fresh_dir("plots");
  RunConfig rc;
  rc.config_path = scenario("case2_zeta_schedule");
  rc.output_dir = out;
  rc.mode = "compare";
  rc.plots = true;
  rc.snapshot_every = 1000;
  std::ostringstream log;
  REQUIRE(run_command(rc, log) == 0);
  CHECK(count(out, ".svg") == 3);
  const std::string torque = slurp(out / "case2_zeta_schedule_torque.svg");
  CHECK(torque.rfind("<svg", 0) == 0);
  CHECK(torque.find("-tau_n") != std::string::npos);
  const std::string params = slurp(out / "case2_zeta_schedule_pid_fnn_params.csv");
  CHECK(params.rfind("row,t,c_a0,", 0) == 0);
  CHECK(std::count(params.begin(), params.end(), '\n') == 17);  // header + rows 0, 1000, ..., 15000
  CHECK_FALSE(fs::exists(out / "case2_zeta_schedule_pid_params.csv"));
}

TEST_CASE("reruns are byte-identical") {
  const fs::path a = fresh_dir("rerun_a");
  const fs::path b = fresh_dir("rerun_b");
  for (const fs::path& dir : {a, b}) {
    RunConfig rc;
    rc.config_path = scenario("case2_noise");
    rc.output_dir = dir;
    std::ostringstream log;
    REQUIRE(run_command(rc, log) == 0);
  }
  CHECK(slurp(a / "case2_noise_pid_fnn.csv") == slurp(b / "case2_noise_pid_fnn.csv"));
  CHECK(slurp(a / "case2_noise_metrics.csv") == slurp(b / "case2_noise_metrics.csv"));
}

TEST_CASE("seed override changes the noisy trace") {
  const fs::path a = fresh_dir("seed_a");
  const fs::path b = fresh_dir("seed_b");
  RunConfig rc;
  rc.config_path = scenario("case2_noise");
  rc.mode = "PID";
  std::ostringstream log;
  rc.output_dir = a;
  REQUIRE(run_command(rc, log) == 0);
  rc.output_dir = b;
  rc.seed = 99;
  REQUIRE(run_command(rc, log) == 0);
  CHECK(slurp(a / "case2_noise_pid.csv") != slurp(b / "case2_noise_pid.csv"));
}

TEST_CASE("failures give a nonzero status") {
  const fs::path out = fresh_dir("fail");
  fs::create_directories(out);
  const fs::path bad = out / "bad.cfg";
  std::ofstream(bad) << "[fnn]\nwidths_a = 1, 0, 1\n";
  RunConfig rc;
  rc.config_path = bad;
  rc.output_dir = out;
  std::ostringstream log;
  CHECK(run_command(rc, log) == 1);
  CHECK(log.str().find("sigma") != std::string::npos);
  rc.config_path = scenario("case1_pd");
  rc.mode = "LQR";
  CHECK(run_command(rc, log) == 2);
}

TEST_CASE("command-line executable") {
  const fs::path out = fresh_dir("exe");
  const std::string exe = ROLLBOT_SIM_EXE;
  const std::string ok = "\"" + exe + "\" run \"" + scenario("case2_pid") + "\" --mode PID --out \"" +
                         out.string() + "\" > /dev/null";
  CHECK(std::system(ok.c_str()) == 0);
  CHECK(fs::exists(out / "case2_pid_pid.csv"));
  const std::string bad_mode = "\"" + exe + "\" run \"" + scenario("case2_pid") + "\" --mode XYZ > /dev/null 2>&1";
  CHECK(std::system(bad_mode.c_str()) != 0);
  const std::string missing = "\"" + exe + "\" run /nonexistent.cfg > /dev/null 2>&1";
  CHECK(std::system(missing.c_str()) != 0);
}
