#include <cctype>
#include <charconv>
#include <limits>

#include "gtmprod/error.hpp"
#include "gtmprod/ratfun.hpp"

namespace gtmprod {

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  FactorList parse() {
    FactorList out;
    skip_ws();
    parse_part(out, +1);
    skip_ws();
    if (peek() == '/') {
      ++pos_;
      parse_part(out, -1);
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("product term: " + message, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::int64_t parse_uint() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits");
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("integer out of range");
    }
    return value;
  }

  std::int64_t parse_int() {
    skip_ws();
    bool negative = false;
    if (peek() == '+' || peek() == '-') {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    const std::int64_t v = parse_uint();
    return negative ? -v : v;
  }

  // A part is either the literal 1, a parenthesized factor sequence, or a
  // bare factor sequence.
  void parse_part(FactorList& out, int sign) {
    if (peek() == '1') {
      const std::size_t save = pos_;
      ++pos_;
      const char next = peek();
      if (next == '\0' || next == '/') return;
      pos_ = save;
    }
    if (peek() != '(') fail("expected '('");
    // Distinguish '((...)...)' grouping from a single factor '(...)'.
    const std::size_t save = pos_;
    ++pos_;
    if (peek() == '(') {
      parse_factorseq(out, sign);
      expect(')');
      return;
    }
    pos_ = save;
    parse_factorseq(out, sign);
  }

  void parse_factorseq(FactorList& out, int sign) {
    if (peek() != '(') fail("expected a factor");
    while (peek() == '(') parse_factor(out, sign);
  }

  void parse_factor(FactorList& out, int sign) {
    const std::size_t factor_start = pos_;
    expect('(');
    Factor f;
    f.alpha = 0;
    bool has_n = false;
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    std::int64_t lead = 1;
    if (std::isdigit(static_cast<unsigned char>(peek()))) lead = parse_uint();
    if (peek() == 'n') {
      ++pos_;
      has_n = true;
      f.alpha = negative ? -lead : lead;
      if (peek() == '+' || peek() == '-') {
        const bool minus = text_[pos_] == '-';
        ++pos_;
        Rational beta(parse_uint());
        if (peek() == '/') {
          ++pos_;
          const std::int64_t den = parse_uint();
          if (den == 0) fail("zero denominator");
          beta /= den;
        }
        f.beta = GaussRational(minus ? Rational(-beta) : beta);
      }
    } else {
      f.beta = GaussRational(Rational(negative ? -lead : lead));
    }
    expect(')');
    if (!has_n || f.alpha <= 0) {
      pos_ = factor_start;
      fail("factor slope must be a positive integer");
    }
    int exponent = 1;
    if (peek() == '^') {
      ++pos_;
      const std::int64_t e = parse_int();
      if (e == 0 || e > std::numeric_limits<int>::max() / 2 || e < -std::numeric_limits<int>::max() / 2) {
        fail("exponent must be a nonzero integer of moderate size");
      }
      exponent = static_cast<int>(e);
    }
    f.exponent = exponent * sign;
    out.factors.push_back(std::move(f));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FactorList parse_product_term(std::string_view text) { return TermParser(text).parse(); }

std::string format_factor(const Factor& f) {
  std::string s = "(";
  if (f.alpha != 1) s += std::to_string(f.alpha);
  s += "n";
  if (!f.beta.is_real()) {
    s += "+" + to_string(f.beta);
  } else if (f.beta.re > 0) {
    s += "+" + to_string(f.beta.re);
  } else if (f.beta.re < 0) {
    s += "-" + to_string(Rational(-f.beta.re));
  }
  s += ")";
  const int e = f.exponent < 0 ? -f.exponent : f.exponent;
  if (e != 1) s += "^" + std::to_string(e);
  return s;
}

std::string format_product_term(const FactorList& f) {
  const FactorList n = normalize(f);
  std::string top;
  std::string bottom;
  int bottom_count = 0;
  for (const auto& factor : n.factors) {
    if (factor.exponent > 0) {
      top += format_factor(factor);
    } else {
      bottom += format_factor(factor);
      ++bottom_count;
    }
  }
  if (top.empty()) top = "1";
  if (bottom.empty()) return top;
  return top + "/" + (bottom_count > 1 ? "(" + bottom + ")" : bottom);
}

}  // namespace gtmprod
