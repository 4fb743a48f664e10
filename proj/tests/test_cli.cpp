#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"

namespace {

struct CliRun {
  int code = -1;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "intmat");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  CliRun r;
  r.code = intmat::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string f; std::getline(is, f, sep);) out.push_back(f);
  return out;
}

// data rows only: no manifest/metadata comments, no header
std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  bool header = true;
  for (const auto& l : lines(csv)) {
    if (l.rfind("#", 0) == 0) continue;
    if (header) {
      header = false;
      continue;
    }
    out.push_back(split(l));
  }
  return out;
}

std::string header(const std::string& csv) {
  for (const auto& l : lines(csv))
    if (l.rfind("#", 0) != 0) return l;
  return {};
}

}  // namespace

TEST(Cli, CountFixture) {
  const CliRun r = run({"count", "--property", "singular", "--n", "2", "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(header(r.out), "property,n,k,count,total,probability");
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0], (std::vector<std::string>{"singular", "2", "1", "33", "81", "0.407407407407"}));
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  EXPECT_EQ(r.out.rfind("# manifest: {", 0), 0u);
}

TEST(Cli, CountLambdaOutOfRange) {
  const CliRun r = run({"count", "--property", "lambda-eig", "--lambda", "5", "--n", "2", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(r.out)[0][3], "0");
}

TEST(Cli, CountRealGridApproaches4972) {
  const CliRun r = run({"count", "--property", "real-eig", "--n", "2", "--k-grid", "10,100,1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 3u);
  double prev = 1.0;
  for (const auto& row : rs) {
    const double dev = std::abs(std::stod(row[5]) - 49.0 / 72.0);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
}

TEST(Cli, CountBruteForceForLargerN) {
  const CliRun r = run({"count", "--property", "singular", "--n", "3", "--k", "1", "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(r.out)[0][4], "19683");
  EXPECT_EQ(run({"count", "--property", "real-eig", "--n", "3", "--k", "1"}).code, 1);
}

TEST(Cli, CountJson) {
  const CliRun r = run({"--format", "json", "count", "--property", "integer-eig", "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = nlohmann::json::parse(r.out);
  EXPECT_EQ(d["schema"], "intmat-lab/1");
  EXPECT_EQ(d["manifest"]["subcommand"], "count");
  EXPECT_EQ(d["records"][0]["count"], "55");
  EXPECT_EQ(d["records"][0]["probability_exact"], "55/81");
}

TEST(Cli, UsageAndBudgetExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"nonsense"}).code, 1);
  EXPECT_EQ(run({"count", "--property", "bogus", "--k", "2"}).code, 1);
  EXPECT_EQ(run({"count", "--property", "singular"}).code, 1);
  EXPECT_EQ(run({"count", "--property", "singular", "--k", "2", "--k-grid", "3,4"}).code, 1);
  EXPECT_EQ(run({"count", "--property", "lambda-eig", "--k", "2"}).code, 1);
  EXPECT_EQ(run({"--format", "xml", "curve"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"count", "--help"}).code, 0);

  const CliRun budget = run({"count", "--property", "singular", "--k", "20000"});
  EXPECT_EQ(budget.code, 3);
  EXPECT_NE(budget.err.find("fast-2x2-k"), std::string::npos);
  EXPECT_EQ(run({"count", "--property", "singular", "--n", "3", "--k", "10"}).code, 3);
}

TEST(Cli, MemoryBudgetFromEnvironment) {
  ::setenv("INTMAT_BUDGET_MB", "1", 1);
  const CliRun r = run({"count", "--property", "integer-eig", "--k", "1000"});
  ::unsetenv("INTMAT_BUDGET_MB");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("memory"), std::string::npos);
}

TEST(Cli, EstimateNeedsSeed) {
  const CliRun r = run({"estimate", "--property", "singular", "--k", "5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
}

TEST(Cli, EstimateAlwaysAndDeterminism) {
  const CliRun a = run({"estimate", "--property", "always", "--n", "3", "--k", "4", "--samples", "2000", "--seed", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(header(a.out), "property,n,k,samples,hits,p_hat,stderr,ci_lo,ci_hi,interval,seed,workers,generator");
  const auto rs = rows(a.out);
  EXPECT_EQ(rs[0][4], "2000");
  EXPECT_EQ(rs[0][5], "1");

  const std::vector<std::string> args{"--workers", "3", "estimate", "--property", "singular", "--k",
                                      "10",        "--samples", "50000", "--seed", "42"};
  const CliRun x = run(args), y = run(args);
  EXPECT_EQ(x.out, y.out);
  EXPECT_EQ(rows(x.out)[0][11], "3");
}

TEST(Cli, TimestampIsOptIn) {
  EXPECT_EQ(run({"curve", "--step", "1"}).out.find("timestamp"), std::string::npos);
  EXPECT_NE(run({"--timestamp", "curve", "--step", "1"}).out.find("timestamp"), std::string::npos);
}

TEST(Cli, HistExactAreaAndSymmetry) {
  const CliRun r = run({"hist", "--mode", "integer", "--source", "exact", "--k", "50", "--bins", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(header(r.out), "delta_lo,delta_hi,density");
  const auto ls = lines(r.out);
  EXPECT_NE(ls.back().find("area=2.000000"), std::string::npos) << ls.back();
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 100u);
  double area = 0.0;
  for (const auto& row : rs) area += std::stod(row[2]) * 0.04;
  EXPECT_NEAR(area, 2.0, 1e-9);
}

TEST(Cli, HistSymmetricWhenNoEdgeHits) {
  // (lambda + 2k) * 7 = 4k * i has no interior solutions for k = 25
  const CliRun r = run({"hist", "--mode", "integer", "--source", "exact", "--k", "25", "--bins", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 7u);
  for (std::size_t i = 0; i < rs.size(); ++i) EXPECT_EQ(rs[i][2], rs[rs.size() - 1 - i][2]) << i;
}

TEST(Cli, HistUsageErrors) {
  EXPECT_EQ(run({"hist", "--mode", "integer", "--source", "exact", "--n", "3", "--k", "5"}).code, 1);
  EXPECT_EQ(run({"hist", "--mode", "real", "--source", "exact", "--k", "5"}).code, 1);
  EXPECT_EQ(run({"hist", "--mode", "real", "--source", "sampled", "--k", "5"}).code, 1);
  EXPECT_EQ(run({"hist", "--k", "5", "--bins", "10", "--bin-width", "0.4"}).code, 1);
  EXPECT_EQ(run({"hist", "--k", "5", "--bin-width", "0.3"}).code, 1);
}

TEST(Cli, HistSampledRealIsBimodal) {
  const CliRun r = run({"--workers", "2", "hist", "--mode", "real", "--source", "sampled", "--k", "1000", "--samples",
                     "400000", "--seed", "7", "--bins", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 40u);
  std::size_t best = 0;
  for (std::size_t i = 0; i < 20; ++i)
    if (std::stod(rs[i][2]) > std::stod(rs[best][2])) best = i;
  const double mid = 0.5 * (std::stod(rs[best][0]) + std::stod(rs[best][1]));
  EXPECT_NEAR(mid, -0.75, 0.11);
  EXPECT_LT(std::stod(rs[19][2]), std::stod(rs[best][2]));
}

TEST(Cli, CurveRows) {
  const CliRun r = run({"curve", "--step", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(header(r.out), "delta,u_z,u_r");
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 4001u);
  EXPECT_EQ(rs.front(), (std::vector<std::string>{"-2", "0", "0"}));
  EXPECT_EQ(rs.back(), (std::vector<std::string>{"2", "0", "0"}));
  EXPECT_EQ(rs[2000][0], "0");
  EXPECT_NEAR(std::stod(rs[2000][1]), 1.088034, 1e-6);
  EXPECT_NEAR(std::stod(rs[2000][2]), 0.816327, 1e-6);
  EXPECT_EQ(run({"curve", "--step", "0"}).code, 1);
  EXPECT_EQ(run({"curve", "--step", "-1"}).code, 1);
}

TEST(Cli, VerifySuites) {
  const CliRun id = run({"verify", "identity", "--n", "4", "--trials", "2000", "--seed", "1"});
  EXPECT_EQ(id.code, 0) << id.err;
  EXPECT_NE(id.err.find("PASS identity"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(id.out)["passed"].get<bool>());

  EXPECT_EQ(run({"verify", "oracle", "--k-max", "6"}).code, 0);
  EXPECT_EQ(run({"verify", "curves"}).code, 0);
  EXPECT_EQ(run({"verify", "gershgorin", "--trials", "300", "--seed", "2"}).code, 0);
  EXPECT_EQ(run({"verify", "identity"}).code, 1);  // seed required
  EXPECT_EQ(run({"verify", "everything"}).code, 1);
  EXPECT_EQ(run({"verify", "identity", "--n", "2", "--seed", "1"}).code, 1);
}

TEST(Cli, VerifyFailureExitCode) {
  intmat::cli::SuiteResult ok("fine"), bad("demo");
  ok.check(true, [] { return std::string("unused"); });
  bad.check(true, [] { return std::string("unused"); });
  bad.check(false, [] { return std::string("[[1, 2], [3, 4]]"); });
  EXPECT_FALSE(bad.passed());
  EXPECT_EQ(bad.counterexamples.size(), 1u);

  std::ostringstream out, err;
  EXPECT_EQ(intmat::cli::render_suites({ok}, nlohmann::ordered_json::object(), out, err), 0);
  out.str("");
  err.str("");
  EXPECT_EQ(intmat::cli::render_suites({ok, bad}, nlohmann::ordered_json::object(), out, err), 2);
  EXPECT_NE(err.str().find("FAIL demo: 1/2"), std::string::npos) << err.str();
  EXPECT_NE(err.str().find("counterexample: [[1, 2], [3, 4]]"), std::string::npos);
  const auto d = nlohmann::json::parse(out.str());
  EXPECT_FALSE(d["passed"].get<bool>());
  EXPECT_EQ(d["suites"][1]["counterexamples"][0], "[[1, 2], [3, 4]]");
}

TEST(Cli, Report) {
  const CliRun r = run({"report", "--target", "singular", "--k-grid", "100,1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = nlohmann::json::parse(r.out);
  EXPECT_EQ(d["schema"], "intmat-lab/1");
  EXPECT_EQ(d["manifest"]["subcommand"], "report");
  EXPECT_EQ(d["report"]["rows"].size(), 2u);
  EXPECT_TRUE(d["report"]["deviation_decreasing"].get<bool>());
  EXPECT_EQ(run({"report", "--target", "singular", "--k-grid", "100"}).code, 1);
  EXPECT_EQ(run({"report", "--target", "singular", "--k-grid", "100,50"}).code, 1);
  EXPECT_EQ(run({"report", "--target", "bogus", "--k-grid", "10,20"}).code, 1);

  const CliRun h = run({"report", "--target", "histogram", "--k-grid", "20,40", "--bins", "20"});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_EQ(nlohmann::json::parse(h.out)["report"]["rows"][0]["bins"].size(), 20u);
}
