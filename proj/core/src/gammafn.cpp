#include "gtmprod/gammafn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gtmprod/error.hpp"

namespace gtmprod {

namespace {

using std::numbers::pi;

constexpr double kShiftTarget = 10.0;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * pi);

// B_{2k} / (2k (2k-1)), k = 1..8.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,       1.0 / 1260.0,        -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,  1.0 / 156.0,         -3617.0 / 122400.0,
};

void require_finite(ComplexDouble z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("log_gamma: non-finite argument");
  }
}

void require_not_pole(ComplexDouble z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw DomainError("log_gamma: pole at nonpositive integer " + std::to_string(z.real()));
  }
}

ComplexDouble stirling(ComplexDouble z) {
  const ComplexDouble inv = 1.0 / z;
  const ComplexDouble inv2 = inv * inv;
  ComplexDouble series = 0.0;
  for (auto it = kStirling.rbegin(); it != kStirling.rend(); ++it) series = series * inv2 + *it;
  return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + series * inv;
}

// Valid for any z off the nonpositive integers; shifts Re z up to the
// Stirling region.
ComplexDouble shifted(ComplexDouble z) {
  ComplexDouble logs = 0.0;
  while (z.real() < kShiftTarget || std::abs(z) < kShiftTarget) {
    logs += std::log(z);
    z += 1.0;
  }
  return stirling(z) - logs;
}

// ln sin(pi z) modulo 2 pi i.
ComplexDouble log_sinpi(ComplexDouble z) {
  const double x = z.real();
  const double y = z.imag();
  if (y < 0.0) return std::conj(log_sinpi(std::conj(z)));
  const double n = std::round(x);
  const double r = x - n;
  const double parity = std::fmod(std::abs(n), 2.0) == 1.0 ? pi : 0.0;
  if (y > 20.0) {
    // sin(pi w) = (i/2) e^{-i pi w} (1 - e^{2 i pi w}), w = r + i y
    const ComplexDouble w(r, y);
    const ComplexDouble i(0.0, 1.0);
    return std::log(i / 2.0) - i * pi * w + std::log(1.0 - std::exp(2.0 * i * pi * w)) +
           ComplexDouble(0.0, parity);
  }
  const ComplexDouble s(std::sin(pi * r) * std::cosh(pi * y), std::cos(pi * r) * std::sinh(pi * y));
  return std::log(s) + ComplexDouble(0.0, parity);
}

}  // namespace

ComplexDouble log_gamma(ComplexDouble z) {
  require_finite(z);
  require_not_pole(z);
  if (z.real() < 0.5) {
    return std::log(pi) - log_sinpi(z) - shifted(1.0 - z);
  }
  return shifted(z);
}

double log_gamma(double x) {
  const ComplexDouble v = log_gamma(ComplexDouble(x, 0.0));
  return v.real();
}

ComplexDouble gamma(ComplexDouble z) { return std::exp(log_gamma(z)); }

ComplexDouble log_gamma_by_recurrence(ComplexDouble z) {
  require_finite(z);
  require_not_pole(z);
  return shifted(z);
}

ComplexDouble log_gamma_product_closed_form(const std::vector<GaussRational>& a,
                                            const std::vector<GaussRational>& b) {
  if (a.size() != b.size()) throw DomainError("closed form needs equally many a and b parameters");
  GaussRational sa, sb;
  for (const auto& x : a) sa += x;
  for (const auto& x : b) sb += x;
  if (!(sa == sb)) throw DomainError("closed form needs sum(a) == sum(b) exactly");
  auto check = [](const GaussRational& x) {
    if (x.is_real() && x.re <= 0 && boost::multiprecision::denominator(x.re) == 1) {
      throw DomainError("closed form parameter " + to_string(x) + " is a nonpositive integer");
    }
  };
  ComplexDouble total = 0.0;
  for (const auto& x : b) {
    check(x);
    total += log_gamma(x.to_complex());
  }
  for (const auto& x : a) {
    check(x);
    total -= log_gamma(x.to_complex());
  }
  return total;
}

ComplexDouble gamma_product_closed_form(const std::vector<GaussRational>& a,
                                        const std::vector<GaussRational>& b) {
  return std::exp(log_gamma_product_closed_form(a, b));
}

double check_gamma_identity(GammaIdentity id, ComplexDouble z, int order) {
  auto residual = [](ComplexDouble lhs_log, ComplexDouble rhs_log) {
    return std::abs(std::exp(lhs_log - rhs_log) - 1.0);
  };
  switch (id) {
    case GammaIdentity::multiplication: {
      if (order < 1) throw DomainError("multiplication order must be positive");
      const double n = order;
      ComplexDouble lhs = 0.0;
      for (int k = 0; k < order; ++k) lhs += log_gamma(z + static_cast<double>(k) / n);
      const ComplexDouble rhs = 0.5 * (n - 1.0) * std::log(2.0 * pi) +
                                (0.5 - n * z) * std::log(n) + log_gamma(n * z);
      return residual(lhs, rhs);
    }
    case GammaIdentity::recurrence:
      return residual(log_gamma(z + 1.0), std::log(z) + log_gamma(z));
    case GammaIdentity::duplication: {
      const ComplexDouble lhs = log_gamma(z) + log_gamma(z + 0.5);
      const ComplexDouble rhs = (1.0 - 2.0 * z) * std::log(2.0) + 0.5 * std::log(pi) + log_gamma(2.0 * z);
      return residual(lhs, rhs);
    }
    case GammaIdentity::reflection: {
      const ComplexDouble lhs = log_gamma_by_recurrence(z) + log_gamma_by_recurrence(1.0 - z);
      return residual(lhs, std::log(pi / std::sin(pi * z)));
    }
    case GammaIdentity::special: {
      const double sqrt_pi = std::sqrt(pi);
      const double worst = std::max({
          residual(log_gamma(ComplexDouble(0.5)), std::log(sqrt_pi)),
          residual(log_gamma(ComplexDouble(1.0)), 0.0),
          residual(log_gamma(ComplexDouble(2.0)), 0.0),
          residual(log_gamma(ComplexDouble(1.5)), std::log(sqrt_pi / 2.0)),
      });
      return worst;
    }
  }
  throw DomainError("unknown gamma identity");
}

}  // namespace gtmprod
