#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "cli.hpp"

using gtmprod::cli::CliConfig;
using gtmprod::cli::OutputFormat;
using gtmprod::cli::parse_config;
using gtmprod::cli::run_cli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gtmprod");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("gtmprod_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    // Keep the user's config and cache out of the picture.
    ::setenv("GTMPROD_CONFIG", (dir_ / "absent.conf").c_str(), 1);
    ::unsetenv("GTMPROD_CACHE_DIR");
  }
  void TearDown() override {
    ::unsetenv("GTMPROD_CONFIG");
    std::filesystem::remove_all(dir_);
  }
  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, SequencePrefix) {
  auto r = run({"seq", "--seq", "gtm:3:011", "--count", "9"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "011100100\n");
  r = run({"seq", "--seq", "gtm:2:1", "--count", "8", "--signs"});
  EXPECT_EQ(r.out, "+--+-++-\n");
  r = run({"seq", "--seq", "gtm:2:1", "--count", "4", "--start", "4"});
  EXPECT_EQ(r.out, "1001\n");
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"seq", "--count", "3"}).code, 2);
  EXPECT_EQ(run({"seq", "--seq", "gtm:3:0101", "--count", "3"}).code, 2);
  EXPECT_EQ(run({"check", "--term", "(2n+1)/(2n+"}).code, 2);
  EXPECT_EQ(run({"check", "--term", "(2n+1)/(2n+2)", "--mode", "sideways"}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "seq", "--seq", "gtm:2:1", "--count", "3"}).code, 2);
  EXPECT_EQ(run({"verify", "--catalog", "/nonexistent", "--no-cache"}).code, 2);
  EXPECT_EQ(run({"eval", "--seq", "gtm:2:1", "--term", "(2n+1)/(2n+2)", "--tol", "-1", "--no-cache"}).code, 2);

  const auto rejected = run({"check", "--term", "(2n+1)/(2n+2)", "--mode", "theta"});
  EXPECT_EQ(rejected.code, 3);
  EXPECT_EQ(rejected.out.rfind("rejected: ", 0), 0u) << rejected.out;
  EXPECT_EQ(run({"eval", "--seq", "gtm:2:1", "--mode", "theta", "--term", "(2n+1)/(2n+2)", "--no-cache"}).code,
            3);
  EXPECT_EQ(run({"eval", "--seq", "gtm:2:1", "--term", "(2n+1)/(2n+2)", "--tol", "1e-30", "--no-cache"}).code,
            4);

  const auto ok = run({"check", "--term", "(2n+1)/(2n+2)"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "ok\n");
}

TEST_F(Cli, VerificationFailureExitCode) {
  const auto path = dir_ / "bad.txt";
  std::ofstream(path) << "wrong|x|gtm:2:1|delta|0|(2n+1)/(2n+2)|1/2|t\n";
  const auto r = run({"verify", "--catalog", path.string(), "--no-cache"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL wrong"), std::string::npos);
  EXPECT_NE(r.out.find("total 1 pass 0 fail 1"), std::string::npos);
}

TEST_F(Cli, EvalWoodsRobbins) {
  const auto r = run({"eval", "--seq", "gtm:2:1", "--term", "(2n+1)/(2n+2)", "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("value      0.707106781186548\n", 0), 0u) << r.out;
  const auto j = run({"--format", "json", "eval", "--seq", "gtm:2:1", "--term", "(2n+1)/(2n+2)", "--no-cache"});
  const auto parsed = json::parse(j.out);
  EXPECT_NEAR(parsed["value"].get<double>(), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_LE(parsed["est_error"].get<double>(), 1e-9);
  const auto d = run({"--format", "json", "eval", "--seq", "gtm:2:1", "--term", "(2n+1)/(2n+2)", "--method",
                      "direct", "--N", "65536", "--no-cache"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(json::parse(d.out)["terms_used"].get<std::uint64_t>(), 65536u);
}

TEST_F(Cli, SumAndDirichlet) {
  auto r = run({"--format", "json", "sum", "--seq", "gtm:3:01", "--n", "9", "27"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sums = json::parse(r.out);
  ASSERT_EQ(sums["values"].size(), 2u);
  EXPECT_EQ(sums["values"][0]["partial_sum"].get<long long>(), 1);
  EXPECT_EQ(sums["values"][1]["partial_sum"].get<long long>(), 1);

  r = run({"--format", "json", "dirichlet", "--seq", "gtm:2:1", "--s", "2", "--s-max", "4", "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["values"].size(), 3u);
}

TEST_F(Cli, VerifyJsonSummary) {
  const auto r = run({"--format", "json", "--no-cache", "verify", "--filter", "cor1.10.*"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["results"].size(), 16u);
  EXPECT_EQ(j["summary"]["total"].get<int>(), 16);
  EXPECT_EQ(j["summary"]["pass"].get<int>(), 16);
  EXPECT_EQ(j["summary"]["fail"].get<int>(), 0);
  for (const auto& row : j["results"]) {
    for (const char* key :
         {"id", "paper", "method", "lhs_value", "rhs_value", "abs_dlog", "est_error", "terms_used", "pass"}) {
      EXPECT_TRUE(row.contains(key)) << key;
    }
    EXPECT_LE(row["abs_dlog"].get<double>(), 1e-8);
  }
}

TEST_F(Cli, VerifyCsvHeader) {
  const auto r = run({"--format", "csv", "--no-cache", "verify", "--filter", "wr"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "id,paper,method,lhs_value,rhs_value,abs_dlog,est_error,terms_used,pass");
  EXPECT_NE(r.out.find("\nwr,Eq.(W-R),accel,"), std::string::npos) << r.out;
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> args = {"--format", "json", "--cache-dir", dir_.string(), "verify", "--filter",
                                         "ex1.6.*"};
  const auto cold = run(args);
  ASSERT_EQ(cold.code, 0) << cold.err;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "dirichlet.cache"));
  const auto warm = run(args);
  EXPECT_EQ(cold.out, warm.out);
  EXPECT_EQ(run({"--format", "json", "--no-cache", "verify", "--filter", "ex1.6.*"}).out, cold.out);
}

TEST_F(Cli, ConfigFile) {
  const CliConfig c = parse_config("# comment\ntol = 1e-7\nformat=csv  # trailing\n\nj_max=14\nn_max=200000\n");
  EXPECT_EQ(c.tol, 1e-7);
  EXPECT_EQ(c.format, OutputFormat::csv);
  EXPECT_EQ(c.j_max, 14);
  EXPECT_EQ(c.n_max, 200000u);
  EXPECT_FALSE(c.cache_dir);
  EXPECT_EQ(parse_config("cache_dir=/tmp/x").cache_dir, std::filesystem::path("/tmp/x"));
  EXPECT_ANY_THROW(parse_config("colour=blue"));
  EXPECT_ANY_THROW(parse_config("tol"));
  EXPECT_ANY_THROW(parse_config("tol=-1"));

  const auto path = dir_ / "gtmprod.conf";
  std::ofstream(path) << "format=json\n";
  auto r = run({"--config", path.string(), "seq", "--seq", "gtm:2:1", "--count", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["theta"], json::parse("[0,1,1,0]"));
  r = run({"--config", path.string(), "--format", "text", "seq", "--seq", "gtm:2:1", "--count", "4"});
  EXPECT_EQ(r.out, "0110\n");
  EXPECT_EQ(run({"--config", (dir_ / "missing.conf").string(), "seq", "--seq", "gtm:2:1", "--count", "1"}).code, 2);

  ::setenv("GTMPROD_CONFIG", path.c_str(), 1);
  r = run({"seq", "--seq", "gtm:2:1", "--count", "2"});
  EXPECT_EQ(json::parse(r.out)["theta"], json::parse("[0,1]"));
}

TEST_F(Cli, CacheDirectoryFromEnvironment) {
  ::setenv("GTMPROD_CACHE_DIR", dir_.c_str(), 1);
  const auto r = run({"dirichlet", "--seq", "gtm:3:11", "--s", "2"});
  ::unsetenv("GTMPROD_CACHE_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "dirichlet.cache"));
}
