#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "schrocon/io.hpp"

namespace fs = std::filesystem;
using schrocon::Json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("schrocon_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const Json& cfg) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << cfg.dump(2);
    return p;
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(SCHROCON_CLI_PATH) + " " + args + " > " + (dir_ / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  std::string log() const { return slurp(dir_ / "log.txt"); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

  fs::path dir_;
};

Json small_config() {
  return Json{{"grid", {{"dim", 1}, {"N", 32}}},
              {"window", {{"omega", Json::array({Json::array({0.0, 0.3})})}, {"kind", "smooth"}, {"transition_width", 0.05}}},
              {"horizon", 1.0},
              {"seed", 3}};
}

}  // namespace

TEST_F(CliTest, FullWindowObservabilityIsOne) {
  Json cfg = small_config();
  cfg["grid"]["N"] = 64;
  cfg["window"] = Json{{"constant", 1.0}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("observability --config " + c.string() + " --out " + (dir_ / "o").string()), 0) << log();
  const Json rep = read_json(dir_ / "o" / "observability.json");
  EXPECT_EQ(rep["status"], "ok");
  EXPECT_EQ(rep["subcommand"], "observability");
  EXPECT_TRUE(rep.contains("config_echo"));
  EXPECT_TRUE(rep.contains("versions"));
  EXPECT_NEAR(rep["results"]["C_T"].get<double>(), 1.0, 1e-8);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "observability.csv"));
}

TEST_F(CliTest, FreeSimulationKeepsMass) {
  Json cfg = small_config();
  cfg["simulate"] = Json{{"model", "linear"}, {"record_points", 11}, {"control", false}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("simulate --config " + c.string() + " --out " + (dir_ / "o").string()), 0) << log();
  const Json rep = read_json(dir_ / "o" / "simulate.json");
  const double m0 = rep["results"]["mass_initial"].get<double>();
  EXPECT_NEAR(rep["results"]["mass_final"].get<double>() / m0, 1.0, 1e-12);
  const std::string csv = slurp(dir_ / "o" / "simulate.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,mass,observed_mass");
}

TEST_F(CliTest, ControlledSimulationReachesRest) {
  Json cfg = small_config();
  cfg["simulate"] = Json{{"control", true}};
  cfg["solver"] = Json{{"tol", 1e-12}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("simulate --config " + c.string() + " --out " + (dir_ / "o").string()), 0) << log();
  const Json rep = read_json(dir_ / "o" / "simulate.json");
  EXPECT_LE(rep["results"]["residual"].get<double>(), 1e-6);
}

TEST_F(CliTest, OutputsAreDeterministic) {
  Json cfg = small_config();
  cfg["simulate"] = Json{{"control", true}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("simulate --config " + c.string() + " --out " + (dir_ / "a").string()), 0) << log();
  ASSERT_EQ(run("simulate --config " + c.string() + " --out " + (dir_ / "b").string()), 0) << log();
  for (const char* f : {"simulate.csv"}) EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f));
  Json a = read_json(dir_ / "a" / "simulate.json"), b = read_json(dir_ / "b" / "simulate.json");
  a["config_echo"].erase("output");
  b["config_echo"].erase("output");
  EXPECT_EQ(a.dump(), b.dump());
  ASSERT_EQ(run("simulate --config " + c.string() + " --seed 4 --out " + (dir_ / "s").string()), 0) << log();
  EXPECT_NE(slurp(dir_ / "a" / "simulate.csv"), slurp(dir_ / "s" / "simulate.csv"));
}

TEST_F(CliTest, SweepThenObservabilityCrossCheck) {
  Json cfg = small_config();
  cfg["window"] = Json{{"omega", Json::array({Json::array({0.0, 0.25})})}, {"kind", "sharp"}};
  cfg["grid"]["N"] = 16;
  cfg["sweep"] = Json{{"n_points", 128}, {"adaptive", false}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("resolvent-sweep --config " + c.string() + " --out " + (dir_ / "sw").string()), 0) << log();
  const Json sw = read_json(dir_ / "sw" / "resolvent-sweep.json");
  EXPECT_GT(sw["results"]["M_sup"].get<double>(), 0.0);
  ASSERT_EQ(run("observability --config " + c.string() + " --out " + (dir_ / "ob").string() + " --sweep-report " +
                (dir_ / "sw" / "resolvent-sweep.json").string()),
            0)
      << log();
  const Json ob = read_json(dir_ / "ob" / "observability.json");
  EXPECT_TRUE(ob["results"]["miller"]["cross_check"].get<bool>());
  EXPECT_NEAR(ob["results"]["T"].get<double>(), 1.05 * ob["results"]["miller"]["miller_time"].get<double>(), 1e-12);
}

TEST_F(CliTest, TensorCheckAndFormatFlag) {
  Json cfg = small_config();
  cfg["grid"] = Json{{"dim", 2}, {"N", 8}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("tensor-check --config " + c.string() + " --format json --out " + (dir_ / "o").string()), 0) << log();
  const Json rep = read_json(dir_ / "o" / "tensor-check.json");
  EXPECT_LE(rep["results"]["relative_gap"].get<double>(), 1e-6);
  for (const auto& e : fs::directory_iterator(dir_ / "o")) EXPECT_EQ(e.path().extension(), ".json");
}

TEST_F(CliTest, UnknownSubcommandExits64) {
  const fs::path c = write_config("c.json", small_config());
  EXPECT_EQ(run("bogus --config " + c.string()), 64);
}

TEST_F(CliTest, InvalidConfigExits2WithoutArtifacts) {
  Json cfg = small_config();
  cfg["window"]["transition_width"] = 0.2;
  const fs::path c = write_config("c.json", cfg);
  EXPECT_EQ(run("observability --config " + c.string() + " --out " + (dir_ / "o").string()), 2);
  EXPECT_NE(log().find("config.window"), std::string::npos) << log();
  EXPECT_FALSE(fs::exists(dir_ / "o"));

  Json unknown = small_config();
  unknown["grid"]["M"] = 3;
  EXPECT_EQ(run("observability --config " + write_config("u.json", unknown).string() + " --out " + (dir_ / "o").string()), 2);
  EXPECT_NE(log().find("config.grid.M"), std::string::npos) << log();
  EXPECT_FALSE(fs::exists(dir_ / "o"));

  std::ofstream(dir_ / "bad.json") << "{ not json";
  EXPECT_EQ(run("observability --config " + (dir_ / "bad.json").string()), 2);
  EXPECT_EQ(run("observability --config " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run("observability --config " + c.string() + " --set /grid/N=7"), 2);
}

TEST_F(CliTest, NumericalFailureExits3WithStructuredError) {
  Json cfg = small_config();
  cfg["window"] = Json{{"constant", 0.0}};
  const fs::path c = write_config("c.json", cfg);
  EXPECT_EQ(run("observability --config " + c.string() + " --out " + (dir_ / "o").string()), 3);
  const Json rep = read_json(dir_ / "o" / "observability.json");
  EXPECT_EQ(rep["status"], "numerical_failure");
  EXPECT_TRUE(rep["error"].contains("message"));
}

TEST_F(CliTest, SetOverridesConfigFields) {
  Json cfg = small_config();
  cfg["window"] = Json{{"constant", 1.0}};
  const fs::path c = write_config("c.json", cfg);
  ASSERT_EQ(run("observability --config " + c.string() + " --set /horizon=2 --out " + (dir_ / "o").string()), 0) << log();
  EXPECT_NEAR(read_json(dir_ / "o" / "observability.json")["results"]["C_T"].get<double>(), 0.5, 1e-10);
}
