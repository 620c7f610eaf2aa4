#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <unistd.h>

#include <bit>
#include <cstdlib>

#include "gtmprod/dirichlet.hpp"
#include "gtmprod/error.hpp"
#include "oracles.hpp"

using namespace gtmprod;

namespace {

const char* const kSequences[] = {"gtm:2:1",   "gtm:3:01",   "gtm:3:11",   "gtm:3:10",   "gtm:4:001",
                                  "gtm:4:111", "gtm:4:010",  "gtm:5:0110", "gtm:5:1111", "dcount:5:2"};

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gtmprod_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(PowerMoments, HandValues) {
  const auto tm = parse_sequence_spec("gtm:2:1");
  EXPECT_EQ(power_moments(tm, 0), 0);
  for (int i = 1; i < 10; ++i) EXPECT_EQ(power_moments(tm, i), -1);
  EXPECT_EQ(power_moments(parse_sequence_spec("gtm:3:01"), 0), 1);
  EXPECT_EQ(power_moments(parse_sequence_spec("gtm:3:01"), 3), 1 - 8);
  EXPECT_THROW(power_moments(tm, -1), DomainError);
}

TEST(PowerMoments, ZeroMomentIsDeltaQ) {
  for (int q = 2; q <= 6; ++q) {
    for (const auto& bits : gtmprod::testing::all_bits(q)) {
      const auto seq = make_sequence(SequenceKind::gtm, q, bits);
      EXPECT_EQ(power_moments(seq, 0), seq.partial_sum(q));
    }
  }
}

TEST(Dirichlet, ZetaValues) {
  const double pi = std::numbers::pi;
  const auto one = all_plus_sequence(2);
  const auto z2 = dirichlet_value(one, 2, 1e-12);
  EXPECT_NEAR(z2.value, pi * pi / 6, 1e-10);
  EXPECT_LE(z2.eps, 1e-12);
  EXPECT_NEAR(dirichlet_value(one, 4, 1e-12).value, std::pow(pi, 4) / 90, 1e-10);
  EXPECT_NEAR(dirichlet_value(all_plus_sequence(3), 2, 1e-12).value, pi * pi / 6, 1e-10);
  EXPECT_THROW(dirichlet_value(one, 1, 1e-6), DomainError);
  EXPECT_THROW(dirichlet_value(parse_sequence_spec("gtm:2:1"), 0, 1e-6), DomainError);
}

TEST(Dirichlet, LeadingTermDominance) {
  const auto v = dirichlet_value(parse_sequence_spec("gtm:2:1"), 40, 1e-12);
  EXPECT_NEAR(v.value, -1.0, std::ldexp(1.0, -39));
  EXPECT_EQ(v.method, "direct");
}

TEST(Dirichlet, DirectZeta3) {
  const auto v = dirichlet_direct(all_plus_sequence(3), 3, 10'000);
  EXPECT_NEAR(v.value, 1.2020569031595942, 1e-7);
  EXPECT_LE(std::fabs(v.value - 1.2020569031595942), v.eps);
}

TEST(Dirichlet, ThueMorseS2AgainstDirect) {
  const auto seq = parse_sequence_spec("gtm:2:1");
  const auto ladder = dirichlet_value(seq, 2, 1e-12);
  const auto direct = dirichlet_direct(seq, 2, 1'000'000);
  EXPECT_NEAR(ladder.value, direct.value, 1e-9);
}

TEST(Dirichlet, LadderAgainstAbelOracle) {
  for (const char* spec : kSequences) {
    const auto seq = parse_sequence_spec(spec);
    for (int s = 1; s <= 8; ++s) {
      const auto ladder = dirichlet_value(seq, s, 1e-10);
      const auto direct = dirichlet_direct(seq, s, s == 1 ? 4'000'000 : 200'000);
      EXPECT_LE(std::fabs(ladder.value - direct.value), ladder.eps + direct.eps) << spec << " s=" << s;
    }
  }
}

TEST(Dirichlet, Gtm3S1AtModestAccuracy) {
  const auto seq = parse_sequence_spec("gtm:3:01");
  const auto ladder = dirichlet_value(seq, 1, 1e-6);
  const auto direct = dirichlet_direct(seq, 1, 10'000'000);
  EXPECT_LE(ladder.eps, 1e-6);
  EXPECT_LE(std::fabs(ladder.value - direct.value), ladder.eps + direct.eps);
}

TEST(Dirichlet, RequestedAccuracyChangesValueWithinEps) {
  for (const char* spec : kSequences) {
    const auto seq = parse_sequence_spec(spec);
    for (int s = 1; s <= 6; ++s) {
      const auto coarse = dirichlet_value(seq, s, 1e-6);
      const auto fine = dirichlet_value(seq, s, 1e-12);
      EXPECT_LE(std::fabs(coarse.value - fine.value), coarse.eps) << spec << " s=" << s;
    }
  }
}

TEST(Dirichlet, UnreachableAccuracyIsNumericError) {
  EXPECT_THROW(dirichlet_value(parse_sequence_spec("gtm:5:1111"), 1, 1e-30), NumericError);
}

TEST(Dirichlet, DeterministicAcrossCalls) {
  const auto seq = parse_sequence_spec("gtm:4:010");
  for (int s = 1; s <= 5; ++s) EXPECT_EQ(dirichlet_value(seq, s, 1e-10), dirichlet_value(seq, s, 1e-10));
}

TEST(DirichletCache, LookupRespectsEps) {
  DirichletCache cache;
  cache.insert("gtm:2:1", 3, {0.5, 1e-8, "ladder"});
  EXPECT_TRUE(cache.lookup("gtm:2:1", 3, 1e-8));
  EXPECT_FALSE(cache.lookup("gtm:2:1", 3, 1e-9));
  EXPECT_FALSE(cache.lookup("gtm:2:1", 4, 1.0));
  cache.insert("gtm:2:1", 3, {0.6, 1e-7, "ladder"});
  EXPECT_EQ(cache.lookup("gtm:2:1", 3, 1.0)->value, 0.5);
  cache.insert("gtm:2:1", 3, {0.7, 1e-10, "ladder"});
  EXPECT_EQ(cache.lookup("gtm:2:1", 3, 1.0)->value, 0.7);
}

TEST(DirichletCache, RoundTripIsBitIdentical) {
  const auto dir = temp_dir("cache");
  const auto path = dir / "dirichlet.cache";
  std::vector<std::pair<int, DirichletValue>> values;
  {
    DirichletCache cache(path);
    const auto seq = parse_sequence_spec("gtm:3:11");
    for (int s = 1; s <= 6; ++s) values.emplace_back(s, dirichlet_value(seq, s, 1e-10, &cache));
    cache.save();
  }
  DirichletCache reloaded(path);
  EXPECT_GE(reloaded.size(), values.size());
  for (const auto& [s, v] : values) {
    const auto hit = reloaded.lookup("gtm:3:11", s, 1.0);
    ASSERT_TRUE(hit);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(hit->value), std::bit_cast<std::uint64_t>(v.value));
    EXPECT_EQ(hit->eps, v.eps);
    EXPECT_EQ(hit->method, v.method);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    EXPECT_EQ(entry.path().filename(), "dirichlet.cache");  // no temp files left behind
  }
  std::filesystem::remove_all(dir);
}

TEST(DirichletCache, IgnoresUnknownLines) {
  const auto dir = temp_dir("junk");
  const auto path = dir / "dirichlet.cache";
  {
    std::ofstream out(path);
    out << "garbage\n"
        << "gtm:2:1|2|zz|1e-9|ladder\n"
        << "gtm:2:1|2|3ff0000000000000|1e-9|ladder\n"
        << "a|b|c\n";
  }
  DirichletCache cache(path);
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(cache.lookup("gtm:2:1", 2, 1e-9)->value, 1.0);
  std::filesystem::remove_all(dir);
}

TEST(DirichletCache, DefaultPathHonoursEnvironment) {
  ::setenv("GTMPROD_CACHE_DIR", "/tmp/somewhere", 1);
  EXPECT_EQ(DirichletCache::default_path(), std::filesystem::path("/tmp/somewhere/dirichlet.cache"));
  ::unsetenv("GTMPROD_CACHE_DIR");
  EXPECT_EQ(DirichletCache::default_path().filename(), "dirichlet.cache");
}
