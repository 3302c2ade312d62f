#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "levdyn/cli.hpp"

namespace fs = std::filesystem;
using namespace levdyn;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("levdyn_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run invoke(const fs::path& dir, const std::string& args, const std::string& config = {}) {
  std::string cmd = std::string(LEVDYN_CLI_PATH) + " " + args;
  if (!config.empty()) {
    std::ofstream(dir / "config.json") << config;
    cmd += " --config " + (dir / "config.json").string();
  }
  cmd += " > " + (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout.txt"), slurp(dir / "stderr.txt")};
}

// CSV body rows (comment and header lines dropped), split on commas.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(p));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST(Config, EmptyDocumentTakesDefaults) {
  const auto c = config::parse_config_text("");
  EXPECT_EQ(c.setup.source, ParameterSource::derived);
  EXPECT_EQ(c.drive.units, Units::normalized);
  EXPECT_EQ(c.axis_1.count, 100u);
  EXPECT_EQ(c.workers, 1u);
  EXPECT_EQ(c.hash, config::parse_config_text("{}").hash);
  EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Config, HashTracksPhysicsNotPlumbing) {
  const auto base = config::parse_config_text("{}").hash;
  EXPECT_EQ(config::parse_config_text(R"({"output_dir": "elsewhere", "workers": 4})").hash, base);
  EXPECT_NE(config::parse_config_text(R"({"environment": {"pressure_pa": 2e-3}})").hash, base);
  config::CommandLineOverrides ov;
  ov.paper_formula = true;
  EXPECT_NE(config::parse_config_text("{}", ov).hash, base);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    config::parse_config_text(R"({"beam": {"wavelenght": 1.064e-6}})");
    FAIL() << "accepted an unknown key";
  } catch (const config::SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("beam.wavelenght"), std::string::npos) << e.what();
  }
  EXPECT_THROW(config::parse_config_text("{not json"), config::SchemaError);
  EXPECT_THROW(config::parse_config_text(R"({"drive": {"omega_1": "big"}})"), config::SchemaError);
}

TEST(Config, PhysicsViolationsAreSeparate) {
  EXPECT_THROW(config::parse_config_text(R"({"particle": {"r_b_m": 6e-8}})"), config::PhysicsError);
  EXPECT_THROW(config::parse_config_text(R"({"drive": {"omega_1": -1}})"), config::PhysicsError);
}

TEST(Config, HzRatesAreConverted) {
  const auto c = config::parse_config_text(
      R"({"units": "si", "parameters": {"source": "reported", "rate_unit": "hz", "eta_thetay_override": 1.0}})");
  EXPECT_DOUBLE_EQ(c.params.eta_thetay, kTwoPi);
}

TEST(Cli, DefaultsRunEverySubcommandQuickly) {
  const auto dir = scratch("defaults");
  for (const char* sub : {"derive", "steady", "cooling", "props"}) {
    const auto r = invoke(dir, std::string(sub) + " --out " + (dir / "out").string());
    EXPECT_EQ(r.code, 0) << sub << ": " << r.err;
  }
  for (const char* f : {"derive_report.json", "coefficients.csv", "steady.json", "cooling_report.json",
                        "cooling_xi_delta.csv", "props_report.txt"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const auto csv = slurp(dir / "out" / "coefficients.csv");
  EXPECT_EQ(csv.rfind("# config_hash=", 0), 0u);
  EXPECT_NE(csv.find("r_b_m,eta_theta,eta_y,eta_thetay,eta_1,eta_2,eta_3\n"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(invoke(dir, "derive", R"({"particle": {"r_b_m": 6e-8}})").code, cli::physics);
  const auto bad = invoke(dir, "derive", R"({"wavelenght": 1.064e-6})");
  EXPECT_EQ(bad.code, cli::schema);
  EXPECT_NE(bad.err.find("wavelenght"), std::string::npos);
  EXPECT_EQ(invoke(dir, "nonsense").code, cli::schema);
  EXPECT_EQ(invoke(dir, "derive --units imperial").code, cli::schema);
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(invoke(dir, "derive --out " + (dir / "blocker" / "sub").string()).code, cli::unwritable);
}

TEST(Cli, BlueBlueSweepIsEverywhereSingleBranch) {
  const auto dir = scratch("blue");
  const auto r = invoke(dir, "sweep --out " + (dir / "out").string(), R"({
    "drive": {"delta_1": -0.01, "delta_2": -0.01, "delta_2_reference": "none"},
    "sweep": {"axis_1": {"param": "omega_1", "min": 0.0015, "max": 0.15, "count": 15},
              "axis_2": {"param": "omega_2", "min": 0.0015, "max": 0.15, "count": 15}}})");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto body = rows(dir / "out" / "sweep.csv");
  ASSERT_EQ(body.size(), 225u);
  for (const auto& row : body) {
    ASSERT_EQ(row.size(), 7u);
    EXPECT_EQ(row[2], "1");
    EXPECT_EQ(row[6], "stable");
  }
}

TEST(Cli, NoCouplingMeansNoCooling) {
  const auto dir = scratch("nocouple");
  const auto r = invoke(dir, "cooling --out " + (dir / "out").string(), R"({
    "parameters": {"source": "reported", "eta_thetay_override": 0.0},
    "cooling": {"sweeps": [{"name": "d", "axis": "delta", "range": {"min": -1e-4, "max": 1e-4, "count": 9}}]}})");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto body = rows(dir / "out" / "cooling_d.csv");
  ASSERT_EQ(body.size(), 9u);
  for (const auto& row : body) EXPECT_EQ(std::stod(row.back()), 1.0);
}

TEST(Cli, PaperFormulaAndUnitsOverrides) {
  const auto dir = scratch("overrides");
  ASSERT_EQ(invoke(dir, "derive --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(invoke(dir, "derive --paper-formula --out " + (dir / "b").string()).code, 0);
  ASSERT_EQ(invoke(dir, "steady --units si --out " + (dir / "c").string()).code, 0);
  const auto a = nlohmann::json::parse(slurp(dir / "a" / "derive_report.json"));
  const auto b = nlohmann::json::parse(slurp(dir / "b" / "derive_report.json"));
  EXPECT_NE(a["mode_params"]["eta_thetay_rad_s"], b["mode_params"]["eta_thetay_rad_s"]);
  EXPECT_NE(a["config_hash"], b["config_hash"]);
  EXPECT_EQ(a["mode_params"]["eta_theta_rad_s"], b["mode_params"]["eta_theta_rad_s"]);
  const auto c = nlohmann::json::parse(slurp(dir / "c" / "steady.json"));
  EXPECT_EQ(c["drive"]["units"], "si");
}

TEST(Cli, OutputIsByteIdenticalAcrossWorkers) {
  const auto dir = scratch("workers");
  const std::string cfg = R"({"sweep": {"axis_1": {"count": 20}, "axis_2": {"count": 20}}})";
  ASSERT_EQ(invoke(dir, "sweep --workers 1 --out " + (dir / "w1").string(), cfg).code, 0);
  ASSERT_EQ(invoke(dir, "sweep --workers 4 --out " + (dir / "w4").string(), cfg).code, 0);
  ASSERT_EQ(invoke(dir, "sweep --workers 1 --out " + (dir / "again").string(), cfg).code, 0);
  const auto one = slurp(dir / "w1" / "sweep.csv");
  EXPECT_FALSE(one.empty());
  EXPECT_EQ(one, slurp(dir / "w4" / "sweep.csv"));
  EXPECT_EQ(one, slurp(dir / "again" / "sweep.csv"));
}

TEST(Cli, PropsSeedIsHonoured) {
  const auto dir = scratch("props");
  ASSERT_EQ(invoke(dir, "props --seed 7 --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(invoke(dir, "props --seed 7 --out " + (dir / "b").string()).code, 0);
  const auto a = slurp(dir / "a" / "props_report.txt");
  EXPECT_EQ(a, slurp(dir / "b" / "props_report.txt"));
  EXPECT_NE(a.find("7"), std::string::npos);
}
