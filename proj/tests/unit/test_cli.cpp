#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pcbf/commands.hpp"
#include "pcbf/io.hpp"

using namespace pcbf;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = PCBF_CONFIG_DIR;

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("pcbf_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string & name, const std::string & text) const
  {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static nlohmann::json read_json(const fs::path & p)
  {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
  }

  static std::string slurp(const fs::path & p)
  {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static int shell(const std::string & args)
  {
    const std::string cmd = std::string(PCBF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RunParallelCompletes)
{
  std::ostringstream log;
  EXPECT_EQ(cmd_run(kConfigDir / "fig1_parallel.yaml", dir_ / "p", {}, log), kExitOk);
  const auto j = read_json(dir_ / "p" / "summary.json");
  EXPECT_EQ(j["event"], "Completed");
  EXPECT_GE(j["min_h1"].get<double>(), -1e-6);
  EXPECT_GE(j["min_hbar1"].get<double>(), -1e-6);
  EXPECT_TRUE(fs::exists(dir_ / "p" / "trajectory.csv"));
  const auto traj = read_trajectory_csv(dir_ / "p" / "trajectory.csv");
  EXPECT_EQ(traj.samples.size(), j["samples"].get<std::size_t>());
}

TEST_F(CliTest, RunSingleBlowsUp)
{
  std::ostringstream log;
  EXPECT_EQ(cmd_run(kConfigDir / "fig1_single.yaml", dir_ / "s", {}, log), kExitEvent);
  const auto j = read_json(dir_ / "s" / "summary.json");
  EXPECT_EQ(j["event"], "ControlBlowUp");
  EXPECT_GE(j["t_event"].get<double>(), 2.0);
  EXPECT_LE(j["t_event"].get<double>(), 2.5);
}

TEST_F(CliTest, RunRejectsZeroDt)
{
  const auto cfg = write("zero_dt.yaml", "name: z\nsystem: double_integrator\nx0: [0, 0]\nsim:\n  dt: 0\n");
  std::ostringstream log;
  EXPECT_EQ(cmd_run(cfg, dir_ / "z", {}, log), kExitUsage);
  EXPECT_NE(log.str().find("zero_dt.yaml:5"), std::string::npos) << log.str();
  EXPECT_FALSE(fs::exists(dir_ / "z" / "summary.json"));
}

TEST_F(CliTest, RunRejectsBoundaryStart)
{
  std::ostringstream log;
  EXPECT_EQ(cmd_run(kConfigDir / "boundary_x0.yaml", dir_ / "b", {}, log), kExitUsage);
  EXPECT_EQ(cmd_run(dir_ / "missing.yaml", dir_ / "m", {}, log), kExitUsage);
}

TEST_F(CliTest, OverridesApply)
{
  Overrides o;
  o.horizon = 0.5;
  o.dt = 0.01;
  std::ostringstream log;
  EXPECT_EQ(cmd_run(kConfigDir / "fig1_parallel.yaml", dir_ / "o", o, log), kExitOk);
  EXPECT_EQ(read_json(dir_ / "o" / "summary.json")["samples"], 51);
}

TEST_F(CliTest, CompareFig1)
{
  std::ostringstream log;
  EXPECT_EQ(cmd_compare(kConfigDir / "fig1_parallel.yaml", kConfigDir / "fig1_single.yaml", dir_, {}, log), kExitEvent);
  const auto j = read_json(dir_ / "comparison.json");
  EXPECT_EQ(j["events"][0], "Completed");
  EXPECT_EQ(j["events"][1], "ControlBlowUp");
  EXPECT_TRUE(j["blow_up_times"][0].is_null());
  EXPECT_GE(j["blow_up_times"][1].get<double>(), 2.0);
  EXPECT_TRUE(fs::exists(dir_ / "a_fig1_parallel.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "b_fig1_single.csv"));
}

TEST_F(CliTest, CompareIdenticalConfigsGivesIdenticalOutputs)
{
  std::ostringstream log;
  Overrides o;
  o.horizon = 2.0;
  const auto cfg = kConfigDir / "di_parallel.yaml";
  EXPECT_EQ(cmd_compare(cfg, cfg, dir_, o, log), kExitOk);
  const auto name = load_config(cfg).scenario.name;
  EXPECT_EQ(slurp(dir_ / ("a_" + name + ".csv")), slurp(dir_ / ("b_" + name + ".csv")));
}

TEST_F(CliTest, SweepGainsAllComplete)
{
  SweepRequest req;
  req.config = kConfigDir / "fig1_parallel.yaml";
  req.out_dir = dir_;
  req.param = "c1";
  req.values = {0.5, 1.0, 2.0};
  std::ostringstream log;
  EXPECT_EQ(cmd_sweep(req, log), kExitOk);
  const auto j = read_json(dir_ / "sweep.json");
  ASSERT_EQ(j["runs"].size(), 3u);
  for (const auto & run : j["runs"]) {
    EXPECT_EQ(run["event"], "Completed");
    EXPECT_TRUE(fs::exists(dir_ / run["scenario"].get<std::string>() / "trajectory.csv"));
  }
  EXPECT_EQ(j["runs"][2]["gains"][0], 2.0);
}

TEST_F(CliTest, SweepErrors)
{
  SweepRequest req;
  req.config = kConfigDir / "di_parallel.yaml";
  req.out_dir = dir_;
  req.param = "nonsense";
  req.values = {1.0};
  std::ostringstream log;
  EXPECT_EQ(cmd_sweep(req, log), kExitUsage);
  req.param = "c1";
  req.values = {0.1};  // below the gain bound at x0 = (0, 0.5)
  EXPECT_EQ(cmd_sweep(req, log), kExitUsage);
  req.values = {};
  EXPECT_EQ(cmd_sweep(req, log), kExitUsage);
}

TEST_F(CliTest, ValidateExamples)
{
  std::ostringstream ok;
  EXPECT_EQ(cmd_validate(kConfigDir / "fig1_parallel.yaml", {}, ok), kExitOk);
  EXPECT_EQ(ok.str().find("FAIL"), std::string::npos) << ok.str();

  std::ostringstream single;
  EXPECT_EQ(cmd_validate(kConfigDir / "fig1_single.yaml", {}, single), kExitEvent);
  EXPECT_NE(single.str().find("FAIL gradient_nonzero"), std::string::npos) << single.str();

  std::ostringstream boundary;
  EXPECT_EQ(cmd_validate(kConfigDir / "boundary_x0.yaml", {}, boundary), kExitEvent);
  EXPECT_NE(boundary.str().find("FAIL gain_bound"), std::string::npos) << boundary.str();
}

TEST_F(CliTest, WorkersFromEnvironment)
{
  ::setenv("PCBF_WORKERS", "3", 1);
  EXPECT_EQ(workers_from_env(), 3);
  ::setenv("PCBF_WORKERS", "abc", 1);
  EXPECT_EQ(workers_from_env(), 0);
  ::unsetenv("PCBF_WORKERS");
  EXPECT_EQ(workers_from_env(), 0);
}

TEST_F(CliTest, BinaryExitCodes)
{
  const std::string cfg = kConfigDir.string();
  const std::string out = (dir_ / "bin").string();
  EXPECT_EQ(shell("run -c " + cfg + "/fig1_parallel.yaml -o " + out + " --horizon 1"), 0);
  EXPECT_EQ(shell("run -c " + cfg + "/fig1_single.yaml -o " + out), 2);
  EXPECT_EQ(shell("run -c " + cfg + "/di_unfiltered.yaml -o " + out), 2);
  EXPECT_EQ(shell("validate -c " + cfg + "/fig1_parallel.yaml"), 0);
  EXPECT_EQ(shell("sweep -c " + cfg + "/di_parallel.yaml -o " + out + " -p alpha -v 0.5,2 --horizon 1 -j 2"), 0);
  EXPECT_EQ(shell("compare -c " + cfg + "/fig1_parallel.yaml -b " + cfg + "/fig1_single.yaml -o " + out), 2);
  EXPECT_EQ(shell(""), 1);
  EXPECT_EQ(shell("run"), 1);
  EXPECT_EQ(shell("run -c /nonexistent.yaml"), 1);
  EXPECT_EQ(shell("run -c " + cfg + "/fig1_parallel.yaml --dt -1"), 1);
  EXPECT_EQ(shell("frobnicate"), 1);
  EXPECT_TRUE(fs::exists(dir_ / "bin" / "summary.json"));
}
