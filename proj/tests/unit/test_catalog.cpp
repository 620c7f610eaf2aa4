#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "gtmprod/catalog.hpp"
#include "gtmprod/error.hpp"
#include "gtmprod/expr.hpp"

using namespace gtmprod;

TEST(Expr, ClosedFormConstants) {
  EXPECT_NEAR(eval_expr(parse_expr("1/sqrt(3)")), 0.5773502691896258, 1e-16);
  EXPECT_NEAR(eval_expr(parse_expr("gamma(1/4)/(sqrt(2)*pi^(3/4))")),
              std::tgamma(0.25) / (std::sqrt(2.0) * std::pow(std::numbers::pi, 0.75)), 1e-14);
  EXPECT_NEAR(eval_expr(parse_expr("sqrt(2*sqrt(2)-2)")), std::sqrt(2 * std::sqrt(2.0) - 2), 1e-15);
  EXPECT_NEAR(eval_expr(parse_expr("sqrt(2*sqrt(2)-2)")), 0.9102, 1e-4);
  EXPECT_EQ(eval_expr(parse_expr("pi")), std::numbers::pi);
  EXPECT_NEAR(eval_expr(parse_expr("2^(2/3)")), 1.5874010519681994, 1e-15);
  EXPECT_NEAR(eval_expr(parse_expr("(sqrt(5)-1)/2^(2/5)")), (std::sqrt(5.0) - 1) / std::pow(2.0, 0.4), 1e-15);
  EXPECT_NEAR(eval_expr(parse_expr("cos(pi/3)")), 0.5, 1e-15);
}

TEST(Expr, Precedence) {
  EXPECT_EQ(eval_expr(parse_expr("1+2*3")), 7.0);
  EXPECT_EQ(eval_expr(parse_expr("2^3^2")), 512.0);
  EXPECT_EQ(eval_expr(parse_expr("-2^2")), -4.0);
  EXPECT_EQ(eval_expr(parse_expr("2^-1")), 0.5);
  EXPECT_EQ(eval_expr(parse_expr("8-3-2")), 3.0);
  EXPECT_EQ(eval_expr(parse_expr("12 / 3 / 2")), 2.0);
  EXPECT_DOUBLE_EQ(eval_expr(parse_expr("3*2^-5 / 3")), std::pow(2.0, -5));
  EXPECT_DOUBLE_EQ(eval_expr(parse_expr("3*2^-5/3")), 3 * std::pow(2.0, -5.0 / 3));
  // A tight rational literal binds as one number.
  EXPECT_EQ(eval_expr(parse_expr("2^1/2")), std::sqrt(2.0));
  EXPECT_EQ(eval_expr(parse_expr("2^1 / 2")), 1.0);
  EXPECT_EQ(eval_expr(parse_expr("0.25")), 0.25);
}

TEST(Expr, Errors) {
  for (const char* bad : {"", "1+", "sqrt 2", "gamma(1", "foo(2)", "1/0/", "()", "2**3", "1 2", "--1", "1/0"}) {
    EXPECT_THROW(parse_expr(bad), ParseError) << bad;
  }
  EXPECT_THROW(eval_expr(parse_expr("gamma(0)")), DomainError);
  EXPECT_THROW(eval_expr(parse_expr("gamma(-2)")), DomainError);
  EXPECT_THROW(eval_expr(parse_expr("sqrt(-1)")), DomainError);
  EXPECT_THROW(eval_expr(parse_expr("1 / 0")), DomainError);
}

TEST(Expr, PrintParseRoundTrip) {
  for (const auto& r : load_catalog("builtin")) {
    const Expr e = parse_expr(r.rhs);
    const std::string printed = format_expr(e);
    EXPECT_TRUE(same_expr(parse_expr(printed), e)) << r.rhs << " -> " << printed;
    EXPECT_EQ(format_expr(parse_expr(printed)), printed);
  }
  for (const char* s : {"-(1+2)^3", "(-2)^2", "2^(1/2)^3", "(2^3)^2", "1-(2-3)", "1/(2*3)", "-pi", "-(-1)", "2^-3^2",
                        "(1/3)^2", "1.50*2"}) {
    const Expr e = parse_expr(s);
    EXPECT_TRUE(same_expr(parse_expr(format_expr(e)), e)) << s << " -> " << format_expr(e);
    EXPECT_EQ(eval_expr(parse_expr(format_expr(e))), eval_expr(e)) << s;
  }
}

TEST(Catalog, BuiltinContents) {
  const auto records = load_catalog("builtin");
  EXPECT_GE(records.size(), 79u);
  std::map<std::string, int> by_tag;
  for (const auto& r : records) {
    for (const auto& t : r.tags) ++by_tag[t];
  }
  EXPECT_EQ(by_tag["ex1.5"], 16);
  EXPECT_EQ(by_tag["ex1.6"], 16);
  EXPECT_EQ(by_tag["ex1.7"], 16);
  EXPECT_EQ(by_tag["cor1.10"], 16);
  EXPECT_EQ(by_tag["g1"], 10);
  EXPECT_EQ(by_tag["g2"], 4);
  EXPECT_EQ(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.id == "wr"; }), 1);
}

TEST(Catalog, RecordFormatRoundTrip) {
  for (const auto& r : load_catalog("builtin")) {
    const auto again = parse_catalog(format_record(r));
    ASSERT_EQ(again.size(), 1u);
    EXPECT_EQ(format_record(again[0]), format_record(r));
  }
}

TEST(Catalog, ParseErrors) {
  EXPECT_TRUE(parse_catalog("").empty());
  EXPECT_TRUE(parse_catalog("# comment\n\n").empty());
  const char* good = "wr|Eq.(W-R)|gtm:2:1|delta|0|(2n+1)/(2n+2)|1/sqrt(2)|classic";
  EXPECT_EQ(parse_catalog(good).size(), 1u);
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_catalog(text, "t");
    } catch (const CatalogError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of(std::string(good) + "\n" + good), 2u);  // duplicate id
  EXPECT_EQ(line_of("\nx|p|gtm:2:1|theta|0|(2n+1)/(2n+2)|1|t"), 2u);
  EXPECT_EQ(line_of("x|p|gtm:2:1|delta|0|(2n+1)/(2n+2)|1"), 1u);
  EXPECT_EQ(line_of("x|p|gtm:2:9|delta|0|(2n+1)/(2n+2)|1|t"), 1u);
  EXPECT_EQ(line_of("x|p|gtm:2:1|delta|zero|(2n+1)/(2n+2)|1|t"), 1u);
  EXPECT_EQ(line_of("x|p|gtm:2:1|delta|0|(2n+1)/(2n+2)|sqrt(|t"), 1u);
  EXPECT_EQ(line_of("x|p|gtm:2:1|sigma|0|(2n+1)/(2n+2)|1|t"), 1u);
  EXPECT_THROW(load_catalog("/nonexistent/catalog.txt"), Error);
}

TEST(Catalog, Glob) {
  EXPECT_TRUE(glob_match("cor1.10.*", "cor1.10.01"));
  EXPECT_FALSE(glob_match("cor1.10.*", "cor1.1"));
  EXPECT_TRUE(glob_match("*", ""));
  EXPECT_TRUE(glob_match("g?.q2*", "g1.q2k1"));
  EXPECT_FALSE(glob_match("wr", "wrx"));
}

TEST(Catalog, RunSelectedRecords) {
  const auto records = load_catalog("builtin");
  DirichletCache cache;
  CatalogRunOptions opts;
  const auto ex = run_catalog(records, "ex1.5.*", opts, &cache);
  EXPECT_EQ(ex.total, 16u);
  EXPECT_EQ(ex.passed, 16u);
  for (std::size_t i = 1; i < ex.results.size(); ++i) EXPECT_LT(ex.results[i - 1].id, ex.results[i].id);

  opts.method = CatalogMethod::both;
  opts.direct_power = 18;
  const auto wr = run_catalog(records, "wr", opts, &cache);
  ASSERT_EQ(wr.total, 2u);
  EXPECT_EQ(wr.results[0].method, "accel");
  EXPECT_EQ(wr.results[1].method, "direct");
  for (const auto& r : wr.results) {
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.lhs_value, 1 / std::sqrt(2.0), 1e-5);
  }

  const auto none = run_catalog(records, "nothing-matches", opts, &cache);
  EXPECT_EQ(none.total, 0u);
  EXPECT_EQ(none.passed, 0u);
}

TEST(Catalog, ParallelRunMatchesSerial) {
  const auto records = load_catalog("builtin");
  CatalogRunOptions serial;
  CatalogRunOptions parallel = serial;
  parallel.threads = 4;
  DirichletCache c1, c2;
  const auto a = run_catalog(records, "cor1.10.*", serial, &c1);
  const auto b = run_catalog(records, "cor1.10.*", parallel, &c2);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].id, b.results[i].id);
    EXPECT_EQ(a.results[i].lhs_value, b.results[i].lhs_value);
    EXPECT_EQ(a.results[i].pass, b.results[i].pass);
  }
}

TEST(Catalog, SameSequenceSameValue) {
  const auto records = load_catalog("builtin");
  auto find = [&](const std::string& id) {
    for (const auto& r : records) {
      if (r.id == id) return r;
    }
    throw std::runtime_error("missing " + id);
  };
  const auto wr = evaluate_product(find("wr").spec(), 1e-12);
  const auto g1 = evaluate_product(find("g1.q2k1").spec(), 1e-12);
  EXPECT_NEAR(wr.value, g1.value, 1e-12);
}

TEST(Catalog, AlternatingRepresentationsAgree) {
  const auto via_gtm = parse_sequence_spec("gtm:3:010");
  const auto via_parity = parse_sequence_spec("dparity:3");
  for (std::uint64_t n = 0; n < 100'000; ++n) ASSERT_EQ(via_gtm.sign_at(n), via_parity.sign_at(n));
  for (const auto& r : load_catalog("builtin")) {
    if (r.seq != "gtm:3:010") continue;
    IdentityRecord alt = r;
    alt.seq = "dparity:3";
    const auto a = evaluate_product(r.spec(), 1e-12);
    const auto b = evaluate_product(alt.spec(), 1e-12);
    EXPECT_NEAR(a.log_value, b.log_value, 1e-13) << r.id;
  }
}
