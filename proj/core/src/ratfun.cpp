#include "gtmprod/ratfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gtmprod/error.hpp"

namespace gtmprod {

namespace mp = boost::multiprecision;

double to_double(const Rational& r) {
  const BigInt& num = mp::numerator(r);
  const BigInt& den = mp::denominator(r);
  if (num == 0) return 0.0;
  BigInt a = mp::abs(num);
  BigInt b = den;
  // Scale so the integer quotient carries 64+ significant bits.
  const long shift = static_cast<long>(mp::msb(b)) - static_cast<long>(mp::msb(a)) + 66;
  if (shift > 0) {
    a <<= static_cast<unsigned>(shift);
  } else if (shift < 0) {
    b <<= static_cast<unsigned>(-shift);
  }
  BigInt quotient = a / b;
  if (quotient * b != a) quotient |= 1;  // sticky bit for correct rounding
  const double mantissa = quotient.convert_to<double>();
  const double value = std::ldexp(mantissa, static_cast<int>(-shift));
  return num < 0 ? -value : value;
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << mp::numerator(r);
  if (mp::denominator(r) != 1) os << '/' << mp::denominator(r);
  return os.str();
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  if (im == 0 && o.im == 0) {
    re *= o.re;
    return *this;
  }
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  if (o.im == 0) {
    re /= o.re;
    im /= o.re;
    return *this;
  }
  const Rational norm = o.re * o.re + o.im * o.im;
  Rational r = (re * o.re + im * o.im) / norm;
  Rational i = (im * o.re - re * o.im) / norm;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string to_string(const GaussRational& z) {
  if (z.im == 0) return to_string(z.re);
  if (z.re == 0) return to_string(z.im) + "i";
  return "(" + to_string(z.re) + (z.im > 0 ? "+" : "-") + to_string(mp::abs(z.im)) + "i)";
}

GaussRational pow(const GaussRational& z, int exponent) {
  if (exponent < 0) return GaussRational(1) / pow(z, -exponent);
  GaussRational result(1);
  GaussRational base = z;
  for (unsigned e = static_cast<unsigned>(exponent); e != 0; e >>= 1) {
    if (e & 1u) result *= base;
    if (e > 1) base *= base;
  }
  return result;
}

// ---------------------------------------------------------------- Poly

Poly::Poly(std::vector<GaussRational> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

Poly Poly::constant(GaussRational c) { return Poly({std::move(c)}); }

Poly Poly::linear(GaussRational alpha, GaussRational beta) {
  return Poly({std::move(beta), std::move(alpha)});
}

void Poly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

const GaussRational& Poly::leading() const {
  if (coeffs_.empty()) throw DomainError("zero polynomial has no leading coefficient");
  return coeffs_.back();
}

GaussRational Poly::evaluate(const GaussRational& n) const {
  GaussRational acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= n;
    acc += *it;
  }
  return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<GaussRational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) {
  std::vector<GaussRational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
  return Poly(std::move(c));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<GaussRational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Poly(std::move(c));
}

// ---------------------------------------------------------------- factors

FactorList normalize(const FactorList& f) {
  struct Slot {
    std::int64_t alpha;
    GaussRational beta;
    long exponent;
  };
  std::vector<Slot> slots;
  for (const auto& factor : f.factors) {
    auto it = std::find_if(slots.begin(), slots.end(), [&](const Slot& s) {
      return s.alpha == factor.alpha && s.beta == factor.beta;
    });
    if (it == slots.end()) {
      slots.push_back({factor.alpha, factor.beta, factor.exponent});
    } else {
      it->exponent += factor.exponent;
    }
  }
  FactorList out;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& s : slots) {
      if ((pass == 0 && s.exponent > 0) || (pass == 1 && s.exponent < 0)) {
        out.factors.push_back({s.alpha, s.beta, static_cast<int>(s.exponent)});
      }
    }
  }
  return out;
}

RationalFunction to_rational_function(const FactorList& f) {
  RationalFunction r{Poly::constant(1), Poly::constant(1)};
  for (const auto& factor : f.factors) {
    const Poly lin = Poly::linear(GaussRational(factor.alpha), factor.beta);
    Poly& side = factor.exponent > 0 ? r.num : r.den;
    for (int i = 0; i < std::abs(factor.exponent); ++i) side = side * lin;
  }
  return r;
}

std::string_view to_string(ExponentMode mode) {
  return mode == ExponentMode::delta ? "delta" : "theta";
}

ExponentMode parse_mode(std::string_view text) {
  if (text == "delta") return ExponentMode::delta;
  if (text == "theta") return ExponentMode::theta;
  throw ParseError("mode must be 'delta' or 'theta', got '" + std::string(text) + "'", 0);
}

// ---------------------------------------------------------------- convergence

namespace {

GaussRational root_sum(const Poly& p) {
  if (p.degree() < 1) return {};
  return -(p[static_cast<std::size_t>(p.degree() - 1)] / p.leading());
}

}  // namespace

ConvergenceVerdict convergence_check(const RationalFunction& r, ExponentMode mode) {
  if (r.num.is_zero() || r.den.is_zero()) {
    return {false, "degree", "numerator or denominator is the zero polynomial"};
  }
  if (r.num.degree() != r.den.degree()) {
    return {false, "degree",
            "degrees differ (" + std::to_string(r.num.degree()) + " vs " +
                std::to_string(r.den.degree()) + ")"};
  }
  if (!(r.num.leading() == r.den.leading())) {
    return {false, "leading-coefficient",
            "leading coefficients differ (" + to_string(r.num.leading()) + " vs " +
                to_string(r.den.leading()) + ")"};
  }
  if (mode == ExponentMode::theta) {
    const GaussRational a = root_sum(r.num);
    const GaussRational b = root_sum(r.den);
    if (!(a == b)) {
      return {false, "sum-of-roots",
              "sums of roots differ (" + to_string(a) + " vs " + to_string(b) + ")"};
    }
  }
  return {};
}

ConvergenceVerdict convergence_check(const FactorList& f, ExponentMode mode) {
  return convergence_check(to_rational_function(f), mode);
}

// ---------------------------------------------------------------- integer roots

namespace {

// Integer-coefficient multiple of a rational polynomial.
std::vector<BigInt> clear_denominators(const std::vector<Rational>& coeffs) {
  BigInt l = 1;
  for (const auto& c : coeffs) {
    const BigInt& d = mp::denominator(c);
    l = l / mp::gcd(l, d) * d;
  }
  std::vector<BigInt> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(mp::numerator(c) * (l / mp::denominator(c)));
  return out;
}

// Fujiwara bound on the modulus of the roots.
double root_bound(const std::vector<BigInt>& c) {
  const std::size_t d = c.size() - 1;
  const double lead = std::abs(c[d].convert_to<double>());
  double best = 0.0;
  for (std::size_t i = 1; i <= d; ++i) {
    const double ratio = std::abs(c[d - i].convert_to<double>()) / lead;
    if (ratio == 0.0) continue;
    const double scale = (i == d) ? 0.5 : 1.0;
    best = std::max(best, std::pow(ratio * scale, 1.0 / static_cast<double>(i)));
  }
  return 2.0 * best;
}

void integer_roots_into(const Poly& p, std::int64_t n_start, std::set<std::int64_t>& out) {
  if (p.degree() < 1) return;
  std::vector<Rational> re, im;
  for (const auto& c : p.coefficients()) {
    re.push_back(c.re);
    im.push_back(c.im);
  }
  const bool use_re = std::any_of(re.begin(), re.end(), [](const Rational& r) { return r != 0; });
  std::vector<BigInt> c = clear_denominators(use_re ? re : im);
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (c.size() < 2) return;

  // Strip n^m; n = 0 is then a root.
  std::size_t m = 0;
  while (c[m] == 0) ++m;
  if (m > 0 && n_start <= 0 && p.evaluate(GaussRational(0)).is_zero()) out.insert(0);
  const std::vector<BigInt> stripped(c.begin() + static_cast<std::ptrdiff_t>(m), c.end());
  if (stripped.size() < 2) return;
  const BigInt& constant = stripped.front();

  const double bound = std::ceil(root_bound(stripped)) + 1.0;
  if (bound > 1e7) throw DomainError("integer root search range too large");
  const auto hi = static_cast<std::int64_t>(bound);
  for (std::int64_t n = std::max<std::int64_t>(n_start, -hi); n <= hi; ++n) {
    if (n == 0) continue;
    if (constant % BigInt(n) != 0) continue;
    if (p.evaluate(GaussRational(n)).is_zero()) out.insert(n);
  }
}

}  // namespace

std::vector<std::int64_t> integer_zeros_poles(const RationalFunction& r, std::int64_t n_start) {
  std::set<std::int64_t> roots;
  integer_roots_into(r.num, n_start, roots);
  integer_roots_into(r.den, n_start, roots);
  return {roots.begin(), roots.end()};
}

std::vector<std::int64_t> integer_zeros_poles(const FactorList& f, std::int64_t n_start) {
  std::set<std::int64_t> roots;
  for (const auto& factor : f.factors) {
    if (!factor.beta.is_real()) continue;
    const Rational root = -factor.beta.re / factor.alpha;
    if (mp::denominator(root) != 1) continue;
    const BigInt& value = mp::numerator(root);
    if (value >= n_start) roots.insert(value.convert_to<std::int64_t>());
  }
  return {roots.begin(), roots.end()};
}

// ---------------------------------------------------------------- log expansion

namespace {

using Series = std::vector<GaussRational>;  // coefficients of x^0..x^J

Series multiply_truncated(const Series& a, const Series& b, int order) {
  Series c(static_cast<std::size_t>(order + 1));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(order); ++j) {
      if (!b[j].is_zero()) c[i + j] += a[i] * b[j];
    }
  }
  return c;
}

// ln(P(n)/(c_d n^d)) as a series in x = 1/n.
Series log_of_reversed(const Poly& p, int order) {
  const int d = p.degree();
  Series u(static_cast<std::size_t>(order + 1));
  for (int i = 1; i <= std::min(d, order); ++i) {
    u[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(d - i)] / p.leading();
  }
  Series result(static_cast<std::size_t>(order + 1));
  Series power = u;
  for (int k = 1; k <= order; ++k) {
    const GaussRational weight(Rational(k % 2 == 1 ? 1 : -1, k));
    for (int i = k; i <= order; ++i) {
      if (!power[static_cast<std::size_t>(i)].is_zero()) {
        result[static_cast<std::size_t>(i)] += weight * power[static_cast<std::size_t>(i)];
      }
    }
    if (k < order) power = multiply_truncated(power, u, order);
  }
  return result;
}

}  // namespace

std::vector<GaussRational> log_expansion(const RationalFunction& r, int order) {
  if (order < 1) throw DomainError("expansion order must be positive");
  const auto verdict = convergence_check(r, ExponentMode::delta);
  if (!verdict.pass) {
    throw ConvergenceError("log expansion needs equal degree and leading coefficient: " +
                           verdict.detail);
  }
  const Series a = log_of_reversed(r.num, order);
  const Series b = log_of_reversed(r.den, order);
  std::vector<GaussRational> beta;
  beta.reserve(static_cast<std::size_t>(order));
  for (int j = 1; j <= order; ++j) {
    beta.push_back(a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)]);
  }
  return beta;
}

std::vector<GaussRational> log_expansion(const FactorList& f, int order) {
  if (order < 1) throw DomainError("expansion order must be positive");
  const auto verdict = convergence_check(f, ExponentMode::delta);
  if (!verdict.pass) {
    throw ConvergenceError("log expansion needs equal degree and leading coefficient: " +
                           verdict.detail);
  }
  std::vector<GaussRational> beta(static_cast<std::size_t>(order));
  for (const auto& factor : f.factors) {
    const GaussRational ratio = factor.beta / GaussRational(factor.alpha);
    GaussRational power(1);
    for (int j = 1; j <= order; ++j) {
      power *= ratio;
      const Rational weight(j % 2 == 1 ? factor.exponent : -factor.exponent, j);
      beta[static_cast<std::size_t>(j - 1)] += GaussRational(weight) * power;
    }
  }
  return beta;
}

// ---------------------------------------------------------------- evaluation

GaussRational evaluate_at(const RationalFunction& r, std::int64_t n) {
  const GaussRational x(n);
  const GaussRational top = r.num.evaluate(x);
  const GaussRational bottom = r.den.evaluate(x);
  if (bottom.is_zero()) throw DomainError("pole at n=" + std::to_string(n));
  if (top.is_zero()) throw DomainError("zero factor at n=" + std::to_string(n));
  return top / bottom;
}

GaussRational evaluate_at(const FactorList& f, std::int64_t n) {
  GaussRational result(1);
  for (const auto& factor : f.factors) {
    const GaussRational value = GaussRational(factor.alpha * n) + factor.beta;
    if (value.is_zero()) {
      throw DomainError(std::string(factor.exponent > 0 ? "zero factor" : "pole") + " " +
                        format_factor(factor) + " at n=" + std::to_string(n));
    }
    result *= pow(value, factor.exponent);
  }
  return result;
}

double evaluate_real(const FactorList& f, std::int64_t n) {
  const GaussRational value = evaluate_at(f, n);
  if (!value.is_real() || value.re <= 0) {
    throw NumericError("term value " + to_string(value) + " at n=" + std::to_string(n) +
                       " is not a positive real");
  }
  return to_double(value.re);
}

}  // namespace gtmprod
