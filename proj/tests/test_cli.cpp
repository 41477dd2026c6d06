#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cellpool/analytic.hpp"
#include "cli_app.hpp"

using namespace cellpool;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, AnalyticBaseline) {
  const Result r = invoke({"analytic", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["provenance"]["tool"], cli::kToolVersion);
  EXPECT_EQ(doc["provenance"]["config_hash"].get<std::string>().size(), 16u);
  std::map<std::string, double> kbps;
  for (const auto& row : doc["rows"]) kbps[row["strategy"].get<std::string>()] = row["throughput_kbps"].get<double>();
  EXPECT_NEAR(kbps["nocoop"], 193.3, 0.05);
  EXPECT_NEAR(kbps["flexroam"], 281.0, 0.05);
  EXPECT_NEAR(kbps["merger"], 387.4, 0.05);
}

TEST(Cli, CsvAndJsonAgree) {
  const Result c = invoke({"analytic", "--format", "csv", "--lambda2", "8e-8", "--w2", "5 MHz"});
  const Result j = invoke({"analytic", "--format", "json", "--lambda2", "8e-8", "--w2", "5 MHz"});
  ASSERT_EQ(c.code, 0);
  ASSERT_EQ(j.code, 0);
  const auto rows = csv_rows(c.out);
  const json doc = json::parse(j.out);
  ASSERT_EQ(rows.size(), doc["rows"].size() + 1);
  for (std::size_t i = 0; i < doc["columns"].size(); ++i) EXPECT_EQ(rows[0][i], doc["columns"][i]);
  for (std::size_t r = 0; r < doc["rows"].size(); ++r) {
    EXPECT_EQ(rows[r + 1][0], doc["rows"][r]["strategy"]);
    EXPECT_EQ(std::stod(rows[r + 1][3]), doc["rows"][r]["throughput_kbps"].get<double>());
  }
  EXPECT_NE(c.out.find("# tool=cellpool"), std::string::npos);
}

TEST(Cli, SeededRunsAreByteIdentical) {
  const std::vector<std::string> args{"verify", "--samples", "3000", "--distribution-samples", "2000", "--seed", "7",
                                      "--format", "csv"};
  const Result a = invoke(args), b = invoke(args);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, SeedFromEnvironment) {
  const std::vector<std::string> args{"verify", "--checks", "nocoop", "--samples", "2000", "--format", "csv"};
  ::setenv("CELLPOOL_SEED", "11", 1);
  const Result a = invoke(args);
  const Result b = invoke({"verify", "--checks", "nocoop", "--samples", "2000", "--format", "csv", "--seed", "11"});
  ::unsetenv("CELLPOOL_SEED");
  const Result c = invoke(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({"analytic", "--bogus"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"analytic", "--format", "xml"}).code, cli::kUsage);
  EXPECT_EQ(invoke({}).code, cli::kUsage);
}

TEST(Cli, ValidationErrors) {
  EXPECT_EQ(invoke({"analytic", "--alpha", "2"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"analytic", "--w1", "10 parsecs"}).code, cli::kValidation);
  EXPECT_EQ(invoke({"analytic", "--strategy", "monopoly"}).code, cli::kValidation);
}

TEST(Cli, NumericalFailure) {
  const Result r = invoke({"analytic", "--rel-tol", "1e-15", "--max-subdivisions", "1"});
  EXPECT_EQ(r.code, cli::kNumerical);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SweepSinglePointMatchesAnalytic) {
  const Result s = invoke({"sweep", "--axis", "user-density", "--grid", "1", "--format", "json"});
  const Result a = invoke({"analytic", "--format", "json"});
  ASSERT_EQ(s.code, 0);
  const json sd = json::parse(s.out), ad = json::parse(a.out);
  ASSERT_EQ(sd["rows"].size(), ad["rows"].size());
  for (std::size_t i = 0; i < sd["rows"].size(); ++i)
    EXPECT_EQ(sd["rows"][i]["throughput_kbps"], ad["rows"][i]["throughput_kbps"]);
}

TEST(Cli, SweepFlagsBadRowsAndContinues) {
  const Result r = invoke({"sweep", "--axis", "bs-density", "--grid", "0.5,-1,2", "--strategy", "nocoop", "--format", "csv"});
  EXPECT_EQ(r.code, cli::kValidation);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 7u);
  int ok = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) ok += rows[i][5] == "true";
  EXPECT_EQ(ok, 4);
}

TEST(Cli, VerifyPassesAndDetectsInjectedFault) {
  const std::vector<std::string> base{"verify", "--samples", "100000", "--distribution-samples", "20000"};
  const Result good = invoke(base);
  EXPECT_EQ(good.code, cli::kOk) << good.out << good.err;
  auto bad_args = base;
  bad_args.insert(bad_args.end(), {"--inject-alpha-error", "0.1"});
  const Result bad = invoke(bad_args);
  EXPECT_EQ(bad.code, cli::kCheckFailed) << bad.out;
}

TEST(Cli, SimulateSmokeRun) {
  const auto dir = std::filesystem::temp_directory_path() / "cellpool_cli_smoke";
  std::filesystem::remove_all(dir);
  const auto start = std::chrono::steady_clock::now();
  const Result r = invoke({"simulate", "--frames", "1", "--runs", "1", "--users-per-cell", "1", "--strategy", "compare",
                           "--out-dir", dir.string(), "--format", "json"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_LT(secs, 5.0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["rows"].size(), 9u);
  for (const char* f : {"summary.json", "users.csv", "cdf.csv"}) EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    EXPECT_EQ(e.path().extension().string().find("partial"), std::string::npos);

  std::ifstream cdf(dir / "cdf.csv");
  std::stringstream buf;
  buf << cdf.rdbuf();
  const auto rows = csv_rows(buf.str());
  ASSERT_GT(rows.size(), 2u);
  std::map<std::string, std::pair<double, double>> last;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x = std::stod(rows[i][1]), f = std::stod(rows[i][2]);
    auto it = last.find(rows[i][0]);
    if (it != last.end()) {
      EXPECT_LE(it->second.first, x);
      EXPECT_LE(it->second.second, f);
    }
    last[rows[i][0]] = {x, f};
  }
  for (const auto& [name, xf] : last) EXPECT_EQ(xf.second, 1.0) << name;
  std::filesystem::remove_all(dir);
}

TEST(Cli, SimulateSingleStrategyReportsMedian) {
  const Result r = invoke({"simulate", "--frames", "1", "--runs", "1", "--users-per-cell", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  for (const auto& row : doc["rows"]) {
    EXPECT_TRUE(row["median_kbps"].is_number());
    EXPECT_TRUE(row["gain_vs_nocoop_pct"].is_null());
  }
}

TEST(Cli, SimulateRejectsBadConfigAndMissingFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "cellpool_cli_cfg";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.yaml") << "ofdma: {frames: 0}\noperators:\n  - bandwidth: -1 MHz\n  - bandwidth: 1 MHz\n";
  const Result r = invoke({"simulate", "--config", (dir / "bad.yaml").string()});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("ofdma.frames"), std::string::npos);
  EXPECT_NE(r.err.find("operators[1].bandwidth"), std::string::npos);
  EXPECT_EQ(invoke({"simulate", "--config", (dir / "absent.yaml").string()}).code, cli::kRuntime);
  std::filesystem::remove_all(dir);
}

TEST(Cli, LayoutRoundTripsThroughSimulate) {
  const Result r = invoke({"layout", "--n1", "3", "--n2", "2", "--width", "5 km", "--height", "5 km", "--seed", "4"});
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"operator", "x_m", "y_m"}));
  const auto path = std::filesystem::temp_directory_path() / "cellpool_cli_layout.csv";
  std::ofstream(path) << r.out;
  const Result s = invoke({"simulate", "--layout", path.string(), "--frames", "1", "--runs", "1", "--users-per-cell", "2"});
  EXPECT_EQ(s.code, 0) << s.err;
  std::filesystem::remove(path);
}
