#pragma once

// Exact rational functions with Gaussian-rational coefficients, the linear
// factor surface syntax used for product terms, the convergence criteria for
// delta/theta products, and the 1/n expansion of ln R(n).

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gtmprod {

using BigInt = boost::multiprecision::cpp_int;
/// Always in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// re + i*im with exact rational parts.
struct GaussRational {
  Rational re;
  Rational im;

  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long long v) : re(v) {}  // NOLINT(google-explicit-constructor)

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  GaussRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  GaussRational& operator*=(const GaussRational& o);
  /// Throws DomainError on division by zero.
  GaussRational& operator/=(const GaussRational& o);

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

std::string to_string(const GaussRational& z);
GaussRational pow(const GaussRational& z, int exponent);

/// Polynomial in n, constant term first. The zero polynomial is empty, and
/// otherwise the leading coefficient is nonzero.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<GaussRational> coefficients);
  static Poly constant(GaussRational c);
  /// alpha*n + beta
  static Poly linear(GaussRational alpha, GaussRational beta);

  const std::vector<GaussRational>& coefficients() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const GaussRational& leading() const;
  const GaussRational& operator[](std::size_t i) const { return coeffs_[i]; }

  GaussRational evaluate(const GaussRational& n) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  void trim();
  std::vector<GaussRational> coeffs_;
};

/// (alpha*n + beta)^exponent with alpha >= 1 and a nonzero exponent.
struct Factor {
  std::int64_t alpha = 1;
  GaussRational beta;
  int exponent = 1;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// A product of linear factors; the surface form of every product term.
struct FactorList {
  std::vector<Factor> factors;

  bool empty() const noexcept { return factors.empty(); }
  friend bool operator==(const FactorList&, const FactorList&) = default;
};

/// Merges equal (alpha, beta) pairs, drops zero exponents, and orders
/// numerator factors before denominator factors (each in first-seen order).
FactorList normalize(const FactorList& f);

/// num/den; no common factors are cancelled.
struct RationalFunction {
  Poly num;
  Poly den;
};

/// Grammar (whitespace ignored):
///   product   := part ('/' part)?
///   part      := '(' factorseq ')' | factorseq
///   factorseq := factor+
///   factor    := '(' linear ')' ('^' int)?
///   linear    := [int] 'n' (('+'|'-') uint ['/' uint])? | int
/// The literal `1` denotes the empty product. Throws ParseError.
FactorList parse_product_term(std::string_view text);

/// Prints a normalized list in a form parse_product_term reads back.
std::string format_product_term(const FactorList& f);
std::string format_factor(const Factor& f);

RationalFunction to_rational_function(const FactorList& f);

enum class ExponentMode { delta, theta };
std::string_view to_string(ExponentMode mode);
ExponentMode parse_mode(std::string_view text);

struct ConvergenceVerdict {
  bool pass = true;
  std::string reason;  // "degree", "leading-coefficient" or "sum-of-roots"
  std::string detail;
};

ConvergenceVerdict convergence_check(const RationalFunction& r, ExponentMode mode);
ConvergenceVerdict convergence_check(const FactorList& f, ExponentMode mode);

/// Integers n >= n_start at which num or den vanishes, ascending.
std::vector<std::int64_t> integer_zeros_poles(const RationalFunction& r, std::int64_t n_start);
/// Same set computed from the explicit factor roots -beta/alpha.
std::vector<std::int64_t> integer_zeros_poles(const FactorList& f, std::int64_t n_start);

/// beta_1..beta_J (result[j-1] = beta_j) with
/// ln R(n) = sum_j beta_j n^{-j} + O(n^{-J-1}). Requires equal degree and
/// leading coefficient; throws ConvergenceError otherwise.
std::vector<GaussRational> log_expansion(const RationalFunction& r, int order);
/// Factor-wise route: each (alpha n + beta)^e contributes
/// e (-1)^{j+1} (beta/alpha)^j / j.
std::vector<GaussRational> log_expansion(const FactorList& f, int order);

/// Exact value. Throws DomainError at a zero or pole.
GaussRational evaluate_at(const RationalFunction& r, std::int64_t n);
GaussRational evaluate_at(const FactorList& f, std::int64_t n);
/// Exact value converted to binary64; throws NumericError unless the value
/// is a positive real.
double evaluate_real(const FactorList& f, std::int64_t n);

}  // namespace gtmprod
