#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "app.hpp"

using namespace qmet;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qmet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = app::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = app::split(line, ',');
    if (csv.header.empty()) {
      csv.header = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    csv.rows.push_back(row);
  }
  return csv;
}

}  // namespace

TEST(Grid, Parsing) {
  const auto g = app::parse_grid("0:1:5", "--theta");
  EXPECT_EQ(g.count, 5u);
  EXPECT_DOUBLE_EQ(g.values()[1], 0.25);
  EXPECT_EQ(app::parse_grid("2.5", "--t").values(), std::vector<double>{2.5});
  EXPECT_THROW(app::parse_grid("0:1:0", "--t"), Error);
  EXPECT_THROW(app::parse_grid("0:1:200000", "--t"), Error);
  EXPECT_THROW(app::parse_grid("0:x:3", "--t"), Error);
  EXPECT_EQ(app::parse_int_list("4:6", "--n"), (std::vector<int>{4, 5, 6}));
  EXPECT_EQ(app::parse_int_list("1,2,4", "--m"), (std::vector<int>{1, 2, 4}));
}

TEST(Cli, QfiSweepMatchesReference) {
  const CliRun r = run_cli({"qfi", "--model", "direction", "--theta", "0.2:2.8:9", "--t", "0.5:2:4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 36u);
  for (const auto& row : csv.rows) {
    EXPECT_NEAR(row[csv.col("qfi")], row[csv.col("qfi_ref")], 1e-7);
    EXPECT_NEAR(row[csv.col("max_qfi")], row[csv.col("max_qfi_ref")], 1e-7);
  }
}

TEST(Cli, GboundColumns) {
  const CliRun r = run_cli({"gbound", "--model", "xcomponent", "--omega", "0.7", "--theta", "0.2:1.5:4", "--t", "1:3:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  for (const auto& row : csv.rows) {
    EXPECT_LT(row[csv.col("rel_err")], 1e-6);
    EXPECT_GE(row[csv.col("G")], row[csv.col("max_qfi")]);
    EXPECT_NEAR(row[csv.col("gamma")], row[csv.col("max_qfi")] / row[csv.col("G")], 1e-12);
    EXPECT_LE(row[csv.col("gamma")], 1.0);
  }
}

TEST(Cli, OutputIsByteIdenticalAcrossThreadCounts) {
  const std::vector<std::string> args{"gbound", "--model", "nv", "--theta", "0.1:1:7", "--t", "0.5:1.5:3"};
  setenv("QMET_THREADS", "1", 1);
  const CliRun one = run_cli(args);
  setenv("QMET_THREADS", "4", 1);
  const CliRun four = run_cli(args);
  const CliRun again = run_cli(args);
  unsetenv("QMET_THREADS");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(four.out, again.out);
}

TEST(Cli, HeaderCarriesConfigHash) {
  const CliRun a = run_cli({"qfi", "--theta", "1"});
  const CliRun b = run_cli({"qfi", "--theta", "1.1"});
  EXPECT_EQ(a.out.rfind("# qmet " + std::string(kVersion) + " command=qfi config-hash=", 0), 0u);
  EXPECT_NE(a.out.substr(0, a.out.find('\n')), b.out.substr(0, b.out.find('\n')));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"qfi", "--theta", "0:1:0"}).code, 2);
  EXPECT_EQ(run_cli({"qfi", "--model", "nonesuch"}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"qfi", "--diff-method", "spline"}).code, 2);
  const CliRun alias = run_cli({"phase-sim", "--theta", "1.0", "--t", "1.0", "--n", "3", "--m", "1", "--tau", "5"});
  EXPECT_EQ(alias.code, 3);
  EXPECT_NE(alias.err.find("tau"), std::string::npos);
}

TEST(Cli, OptimizeEmitsJson) {
  const CliRun r = run_cli({"optimize", "--theta", "1.0", "--t", "1.0", "--restarts", "2", "--iterations", "60"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("records"));
  ASSERT_EQ(j["records"].size(), 1u);
  const auto& rec = j["records"][0];
  EXPECT_TRUE(rec.contains("wall_time_s"));
  EXPECT_LE(rec["best"].get<double>(), rec["G"].get<double>() * (1 + 1e-6));
}

TEST(Cli, OscillatorGammaColumns) {
  const CliRun r = run_cli({"oscillator", "--omega", "1.0", "--mass", "1.0", "--t", "0.2:12:60"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  for (const auto& row : csv.rows) {
    EXPECT_NEAR(row[csv.col("gamma")], row[csv.col("gamma_ref")], 1e-9 * row[csv.col("gamma_ref")]);
    EXPECT_EQ(row[csv.col("gamma_gt1")], row[csv.col("region_ref")]);
  }
}

TEST(Cli, JcAgreesWithClosedForm) {
  const CliRun r = run_cli({"jc", "--kappa", "1.0", "--alpha0sq", "0.2", "--theta", "0.1:2:5", "--t", "0.2:6:5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 25u);
  for (const auto& row : csv.rows) EXPECT_LT(row[csv.col("abs_err")], 1e-6 * (1 + row[csv.col("fc_ref")]));
}

TEST(Cli, SelftestPasses) {
  const CliRun r = run_cli({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
