#include "gtmprod/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "gtmprod/error.hpp"
#include "gtmprod/gammafn.hpp"

namespace gtmprod {

namespace {

namespace mp = boost::multiprecision;

constexpr double kUnitRoundoff = 0x1p-53;
constexpr std::size_t kMaxDecimatedFactors = 2048;
constexpr std::int64_t kMaxSignScan = 10'000'000;

// Internal accuracy requested from the Dirichlet module; the value is
// independent of it, only the acceptance threshold changes.
constexpr double kDirichletEps = 1e-12;

class Neumaier {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Largest real root -beta/alpha over all factors, or -inf.
Rational max_root(const FactorList& f) {
  Rational best = 0;
  bool any = false;
  for (const auto& factor : f.factors) {
    const Rational root = -factor.beta.re / factor.alpha;
    if (!any || root > best) best = root;
    any = true;
  }
  return any ? best : Rational(-1);
}

// Sign of R(n) from factor signs; every factor is assumed nonzero at n.
int term_sign(const FactorList& f, std::int64_t n) {
  int sign = 1;
  for (const auto& factor : f.factors) {
    if (Rational(factor.alpha * n) + factor.beta.re < 0 && (factor.exponent % 2 != 0)) sign = -sign;
  }
  return sign;
}

double ln_term_exact(const FactorList& f, std::int64_t n) {
  return std::log(evaluate_real(f, n));
}

struct DecimatedTerm {
  int depth = 0;                 // D
  std::uint64_t block = 1;       // q^D
  std::vector<double> ratio;     // r = B/A of each factor ln(1 + r/m)
  std::vector<double> weight;    // integer weight E
  std::vector<double> beta;      // b_1..b_J
  double beta_abs_sum = 0.0;
};

// Factors of G(m) = sum_{t<q^D} w_t ln R(m q^D + t) with w = delta or 1,
// written as sum E ln(1 + r/m) (the constant and ln m parts cancel).
DecimatedTerm decimate(const FactorList& f, const SignPattern& pattern, bool signed_weights,
                       int order) {
  const int q = pattern.q();
  Rational r_max = 0;
  for (const auto& factor : f.factors) {
    r_max = std::max(r_max, Rational(mp::abs(factor.beta.re / factor.alpha)));
  }
  const Rational root = max_root(f);

  DecimatedTerm out;
  // Smallest D with (q^D - 1 + r_max)/q^D <= 3/2 and every factor positive
  // for n >= q^D.
  while (true) {
    const Rational block(static_cast<long long>(out.block));
    const bool small_ratio = (block - 1 + r_max) / block <= Rational(3, 2);
    const bool positive = block > root;
    const bool capped = f.factors.size() * out.block * static_cast<std::uint64_t>(q) > kMaxDecimatedFactors;
    if ((small_ratio && positive) || (capped && positive)) break;
    out.block *= static_cast<std::uint64_t>(q);
    ++out.depth;
  }

  std::map<Rational, long> merged;
  SignStream stream(pattern, 0);
  for (std::uint64_t t = 0; t < out.block; ++t, stream.advance()) {
    const int w = signed_weights ? stream.sign() : 1;
    for (const auto& factor : f.factors) {
      const Rational a(static_cast<long long>(factor.alpha) * static_cast<long long>(out.block));
      const Rational r = (Rational(factor.alpha * static_cast<std::int64_t>(t)) + factor.beta.re) / a;
      merged[r] += static_cast<long>(w) * factor.exponent;
    }
  }
  std::vector<std::pair<Rational, long>> live;
  for (const auto& [r, e] : merged) {
    if (e != 0) live.emplace_back(r, e);
  }
  for (const auto& [r, e] : live) {
    out.ratio.push_back(to_double(r));
    out.weight.push_back(static_cast<double>(e));
  }
  // b_j = sum E (-1)^{j+1} r^j / j, exactly.
  std::vector<Rational> powers;
  powers.reserve(live.size());
  for (const auto& entry : live) powers.push_back(entry.first);
  for (int j = 1; j <= order; ++j) {
    Rational total = 0;
    for (std::size_t i = 0; i < live.size(); ++i) {
      total += live[i].second * powers[i];
      powers[i] *= live[i].first;
    }
    total /= j;
    if (j % 2 == 0) total = -total;
    out.beta.push_back(to_double(total));
    out.beta_abs_sum += std::abs(out.beta.back());
  }
  return out;
}

struct PartialLog {
  double value = 0.0;
  double error = 0.0;
};

// sum_{n>=1} w_n ln R(n) with w = delta (signed) or 1, plus the number of
// remainder terms used.
PartialLog accelerated_sum(const FactorList& term, const SignPattern& pattern, bool signed_weights,
                           const std::vector<DirichletValue>& constants, int J, std::uint64_t N) {
  const DecimatedTerm dec = decimate(term, pattern, signed_weights, J);

  // Head n = 1 .. q^D - 1, exact terms.
  Neumaier head;
  double head_mass = 0.0;
  {
    SignStream stream(pattern, 1);
    for (std::uint64_t n = 1; n < dec.block; ++n, stream.advance()) {
      const double w = signed_weights ? stream.sign() : 1.0;
      const double g = ln_term_exact(term, static_cast<std::int64_t>(n));
      head.add(w * g);
      head_mass += std::abs(g);
    }
  }

  // sum_j b_j F(j); b_1 vanishes in the unsigned case.
  Neumaier anchored;
  double propagated = 0.0;
  for (int j = signed_weights ? 1 : 2; j <= J; ++j) {
    const double b = dec.beta[static_cast<std::size_t>(j - 1)];
    const DirichletValue& F = constants[static_cast<std::size_t>(j)];
    anchored.add(b * F.value);
    propagated += std::abs(b) * F.eps;
  }
  if (!signed_weights && dec.beta[0] != 0.0) {
    throw DomainError("unsigned expansion has a nonzero 1/m coefficient");
  }

  // sum_m w_m rho(m), rho the literal remainder.
  Neumaier remainder;
  double remainder_mass = 0.0;
  double last_rho = 0.0;
  SignStream stream(pattern, 1);
  for (std::uint64_t m = 1; m <= N; ++m, stream.advance()) {
    const double x = 1.0 / static_cast<double>(m);
    double g = 0.0;
    double g_mass = 0.0;
    for (std::size_t i = 0; i < dec.ratio.size(); ++i) {
      const double v = dec.weight[i] * std::log1p(dec.ratio[i] * x);
      g += v;
      g_mass += std::abs(v);
    }
    double poly = 0.0;
    for (int j = J; j >= 1; --j) poly = (poly + dec.beta[static_cast<std::size_t>(j - 1)]) * x;
    const double rho = g - poly;
    const double w = signed_weights ? stream.sign() : 1.0;
    remainder.add(w * rho);
    remainder_mass += g_mass + std::abs(poly);
    last_rho = rho;
  }

  const double tail = 4.0 * static_cast<double>(N) * std::abs(last_rho);
  const double value = head.value() + anchored.value() + remainder.value();
  double anchored_mass = 0.0;
  for (int j = 1; j <= J; ++j) {
    anchored_mass += std::abs(dec.beta[static_cast<std::size_t>(j - 1)] *
                              constants[static_cast<std::size_t>(j)].value);
  }
  const double rounding =
      4.0 * kUnitRoundoff * (4.0 * head_mass + anchored_mass + 8.0 * remainder_mass) +
      kUnitRoundoff * std::abs(value);
  return {value, tail + propagated + rounding};
}

std::vector<DirichletValue> dirichlet_table(const MultiplicativeSequence& seq, int J, bool zeta,
                                            DirichletCache* cache) {
  std::vector<DirichletValue> table(static_cast<std::size_t>(J + 1));
  for (int j = zeta ? 2 : 1; j <= J; ++j) {
    table[static_cast<std::size_t>(j)] = dirichlet_value(seq, j, kDirichletEps, cache);
  }
  return table;
}

void require_evaluable(const ProductSpec& spec) {
  const CheckVerdict verdict = check_product(spec);
  if (verdict.ok) return;
  const std::string message = "product rejected: " + verdict.reason +
                              (verdict.detail.empty() ? "" : " (" + verdict.detail + ")");
  if (verdict.reason == "non-positive" || verdict.reason == "complex") throw NumericError(message);
  throw ConvergenceError(message);
}

EvalResult finish(double log_value, double est_error, std::string method, std::uint64_t terms,
                  int orders) {
  EvalResult r;
  r.log_value = log_value;
  r.value = std::exp(log_value);
  r.est_error = est_error;
  r.method = std::move(method);
  r.terms_used = terms;
  r.dirichlet_orders = orders;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- checks

CheckVerdict check_product(const ProductSpec& spec) {
  if (!spec.seq.nontrivial()) {
    return {false, "trivial-pattern", "the all-plus pattern " + spec.seq.spec() + " is excluded"};
  }
  if (spec.from != 0 && spec.from != 1) {
    return {false, "from", "products must start at n=0 or n=1"};
  }
  const FactorList term = normalize(spec.term);
  const ConvergenceVerdict conv = convergence_check(term, spec.mode);
  if (!conv.pass) return {false, conv.reason, conv.detail};
  for (const auto& factor : term.factors) {
    if (!factor.beta.is_real()) {
      return {false, "complex", "factor " + format_factor(factor) + " has a non-real constant"};
    }
  }
  const auto bad = integer_zeros_poles(term, spec.from);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "term vanishes or has a pole at n=" << bad.front();
    return {false, "zero-or-pole", os.str()};
  }
  // Beyond the largest root every factor is positive.
  const Rational root = max_root(term);
  const BigInt last = mp::numerator(root) / mp::denominator(root);
  if (last > kMaxSignScan) return {false, "non-positive", "positivity scan range too large"};
  const std::int64_t scan_end = std::max<std::int64_t>(last.convert_to<std::int64_t>(), spec.from + 64);
  for (std::int64_t n = spec.from; n <= scan_end; ++n) {
    if (term_sign(term, n) < 0) {
      return {false, "non-positive", "term is negative at n=" + std::to_string(n)};
    }
  }
  return {};
}

// ---------------------------------------------------------------- accelerated

EvalResult evaluate_product(const ProductSpec& spec, double eps, DirichletCache* cache,
                            const EvalOptions& options) {
  require_evaluable(spec);
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const FactorList term = normalize(spec.term);
  if (term.empty()) return finish(0.0, 0.0, "exact", 0, 0);

  DirichletCache local;
  if (cache == nullptr) cache = &local;

  const bool theta = spec.mode == ExponentMode::theta;
  double head = 0.0;
  if (!theta && spec.from == 0) head = ln_term_exact(term, 0);

  int J = options.J;
  std::uint64_t N = options.N;
  while (true) {
    const auto signed_table = dirichlet_table(spec.seq, J, false, cache);
    const PartialLog ld = accelerated_sum(term, spec.seq.pattern(), true, signed_table, J, N);
    double log_value = 0.0;
    double error = 0.0;
    if (theta) {
      const auto zeta_table = dirichlet_table(all_plus_sequence(2), J, true, cache);
      const PartialLog lp = accelerated_sum(term, spec.seq.pattern(), false, zeta_table, J, N);
      log_value = 0.5 * (lp.value - ld.value);
      error = 0.5 * (lp.error + ld.error);
    } else {
      log_value = head + ld.value;
      error = ld.error + 2.0 * kUnitRoundoff * std::abs(head);
    }
    if (error <= eps) return finish(log_value, error, "accel", N, J);
    if (N * 2 <= options.N_max) {
      N *= 2;
    } else if (J < options.J_max) {
      ++J;
    } else {
      std::ostringstream os;
      os << "accelerated evaluation reaches only " << error << " (requested " << eps << ")";
      throw NumericError(os.str());
    }
  }
}

// ---------------------------------------------------------------- baseline

EvalResult evaluate_direct(const ProductSpec& spec, std::uint64_t N) {
  require_evaluable(spec);
  const FactorList term = normalize(spec.term);
  if (term.empty()) return finish(0.0, 0.0, "exact", 0, 0);
  const int q = spec.seq.q();
  if (N < static_cast<std::uint64_t>(q)) throw DomainError("direct evaluation needs N >= q");
  std::uint64_t block = 1;  // q^K
  while (block <= N / static_cast<std::uint64_t>(q)) block *= static_cast<std::uint64_t>(q);
  const std::uint64_t sub = block / static_cast<std::uint64_t>(q);

  const bool theta = spec.mode == ExponentMode::theta;
  // ln R(n) = log1p((num - den)(n)/den(n)) with the difference expanded exactly.
  const RationalFunction rf = to_rational_function(term);
  const Poly diff = rf.num - rf.den;
  std::vector<double> diff_c, den_c;
  for (const auto& c : diff.coefficients()) diff_c.push_back(to_double(c.re));
  for (const auto& c : rf.den.coefficients()) den_c.push_back(to_double(c.re));
  auto horner = [](const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  const Rational root = max_root(term);
  const std::int64_t exact_limit =
      std::max<std::int64_t>(64, (mp::numerator(root) / mp::denominator(root)).convert_to<std::int64_t>() + 2);

  Neumaier sum;
  double mass = 0.0;
  std::vector<double> boundary;  // partial sums at j * q^{K-1}, j = 1..q
  SignStream stream(spec.seq.pattern(), static_cast<std::uint64_t>(spec.from));
  for (std::uint64_t n = static_cast<std::uint64_t>(spec.from); n < block; ++n, stream.advance()) {
    if (n % sub == 0 && n > 0) boundary.push_back(sum.value());
    const int d = stream.sign();
    const double w = theta ? (d < 0 ? 1.0 : 0.0) : static_cast<double>(d);
    if (w == 0.0) continue;
    double g = 0.0;
    if (static_cast<std::int64_t>(n) < exact_limit) {
      g = ln_term_exact(term, static_cast<std::int64_t>(n));
    } else {
      const double x = static_cast<double>(n);
      g = std::log1p(horner(diff_c, x) / horner(den_c, x));
    }
    sum.add(w * g);
    mass += std::abs(g);
  }
  const double total = sum.value();
  boundary.push_back(total);

  const double lo = *std::min_element(boundary.begin(), boundary.end());
  const double hi = *std::max_element(boundary.begin(), boundary.end());
  const double lambda = std::abs(static_cast<double>(spec.seq.partial_sum(static_cast<std::uint64_t>(q)))) / q;
  const double scale = std::max(1.0, lambda / (1.0 - lambda));
  const double error = 2.0 * (hi - lo) * scale + 8.0 * kUnitRoundoff * mass +
                       kUnitRoundoff * std::abs(total);
  return finish(total, error, "direct", block - static_cast<std::uint64_t>(spec.from), 0);
}

// ---------------------------------------------------------------- verification

IdentityReport verify_identity(const ProductSpec& spec, double rhs_value, double tol,
                               DirichletCache* cache, EvalMethod method,
                               std::uint64_t direct_N) {
  IdentityReport report;
  report.rhs = rhs_value;
  if (!(rhs_value > 0.0) || !std::isfinite(rhs_value)) {
    report.reason = "right-hand side is not a positive finite number";
    return report;
  }
  try {
    EvalResult r;
    if (method == EvalMethod::accel) {
      r = evaluate_product(spec, std::max(tol, 1e-12), cache);
    } else {
      const std::uint64_t q = static_cast<std::uint64_t>(spec.seq.q());
      std::uint64_t n = direct_N;
      if (n == 0) {
        n = 1;
        for (int i = 0; i < 12; ++i) n *= q;
      }
      r = evaluate_direct(spec, n);
    }
    report.lhs = r.value;
    report.est_error = r.est_error;
    report.terms_used = r.terms_used;
    report.abs_dlog = std::abs(r.log_value - std::log(rhs_value));
    report.pass = report.abs_dlog <= tol + r.est_error;
  } catch (const Error& e) {
    report.reason = e.what();
  }
  return report;
}

ProductSpec functional_equation_spec(FunctionalEquation kind, const MultiplicativeSequence& seq,
                                     const std::vector<Rational>& a,
                                     const std::vector<Rational>& b) {
  const int q = seq.q();
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("functional equation needs equally many a and b parameters");
  }
  if (kind == FunctionalEquation::thm_f && a.size() != 1) {
    throw DomainError("thm_f takes exactly one a and one b");
  }
  Rational sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0 || b[i] <= 0) throw DomainError("functional equation parameters must be positive");
    sa += a[i];
    sb += b[i];
  }
  if (kind == FunctionalEquation::thm_frak && sa != sb) {
    throw DomainError("thm_frak needs sum(a) == sum(b)");
  }
  FactorList f;
  for (std::size_t i = 0; i < a.size(); ++i) {
    f.factors.push_back({1, GaussRational(a[i]), 1});
    f.factors.push_back({1, GaussRational(b[i]), -1});
    for (int k = 0; k < q; ++k) {
      const int d = seq.pattern()[k];
      f.factors.push_back({q, GaussRational(b[i] + k), d});
      f.factors.push_back({q, GaussRational(a[i] + k), -d});
    }
  }
  const ExponentMode mode =
      kind == FunctionalEquation::thm_f ? ExponentMode::delta : ExponentMode::theta;
  return {seq, mode, 1, normalize(f)};
}

double functional_equation_rhs_log(FunctionalEquation kind, const MultiplicativeSequence& seq,
                                   const std::vector<Rational>& a,
                                   const std::vector<Rational>& b) {
  const int q = seq.q();
  if (kind == FunctionalEquation::thm_f) {
    Rational product = 1;
    for (int k = 1; k < q; ++k) {
      const Rational ratio = (a[0] + k) / (b[0] + k);
      product *= seq.pattern()[k] > 0 ? ratio : Rational(1 / ratio);
    }
    return std::log(to_double(product));
  }
  double total = 0.0;
  for (int k = 1; k < q; ++k) {
    if (seq.pattern()[k] > 0) continue;
    for (std::size_t i = 0; i < a.size(); ++i) {
      total += log_gamma(to_double((b[i] + k) / q)) - log_gamma(to_double((a[i] + k) / q));
    }
  }
  return total;
}

FunctionalEquationReport verify_functional_equation(FunctionalEquation kind, int q,
                                                    std::string_view theta_bits,
                                                    const std::vector<Rational>& a,
                                                    const std::vector<Rational>& b, double tol,
                                                    DirichletCache* cache) {
  const MultiplicativeSequence seq = make_sequence(SequenceKind::gtm, q, theta_bits);
  FunctionalEquationReport report{false, 0.0, 0.0, 0.0, 0.0,
                                  functional_equation_spec(kind, seq, a, b)};
  const double rhs_log = functional_equation_rhs_log(kind, seq, a, b);
  const EvalResult r = evaluate_product(report.spec, std::max(tol, 1e-12), cache);
  report.lhs = r.value;
  report.rhs = std::exp(rhs_log);
  report.abs_dlog = std::abs(r.log_value - rhs_log);
  report.est_error = r.est_error;
  report.pass = report.abs_dlog <= tol + r.est_error;
  return report;
}

// ---------------------------------------------------------------- telescoping

double telescoping_limit(int q, const Rational& a, std::uint64_t N) {
  if (q < 2 || a <= 0) throw DomainError("telescoping product needs q >= 2 and a > 0");
  const double qa = to_double(a * q);
  const double ad = to_double(a);
  const double qd = q;
  Neumaier sum;
  for (std::uint64_t n = 0; n <= N; ++n) {
    const double base = qd * static_cast<double>(n);
    const double g = std::log((base + ad) / (base + qa)) + std::log((base + ad + qd) / (base + qa + qd));
    sum.add(n % 2 == 0 ? g : -g);
  }
  return std::exp(sum.value());
}

Rational telescoping_exact(int q, const Rational& a, std::uint64_t N) {
  if (q < 2 || a <= 0) throw DomainError("telescoping product needs q >= 2 and a > 0");
  const Rational m(static_cast<long long>(N + 1) * q);
  const Rational u = (a + m) / (a * q + m);
  const Rational head = Rational(1, q);
  return N % 2 == 0 ? Rational(head * u) : Rational(head / u);
}

// ---------------------------------------------------------------- consistency

ModeConsistency mode_consistency(const ProductSpec& theta_spec, DirichletCache* cache) {
  if (theta_spec.mode != ExponentMode::theta) throw DomainError("mode consistency needs a theta spec");
  DirichletCache local;
  if (cache == nullptr) cache = &local;
  ProductSpec theta = theta_spec;
  theta.from = 1;
  ProductSpec delta = theta;
  delta.mode = ExponentMode::delta;
  const EvalResult lt = evaluate_product(theta, 1e-9, cache);
  const EvalResult ld = evaluate_product(delta, 1e-9, cache);

  // prod_{n>=1} prod (alpha n + beta)^e = prod_{n>=0} prod (n + 1 + beta/alpha)^e.
  std::vector<GaussRational> as, bs;
  for (const auto& f : normalize(theta_spec.term).factors) {
    const GaussRational shift = GaussRational(1) + f.beta / GaussRational(f.alpha);
    auto& side = f.exponent > 0 ? as : bs;
    for (int i = 0; i < std::abs(f.exponent); ++i) side.push_back(shift);
  }
  const double closed = as.empty() ? 0.0 : log_gamma_product_closed_form(as, bs).real();
  ModeConsistency out;
  out.combined_log = 2.0 * lt.log_value + ld.log_value;
  out.closed_form_log = closed;
  out.combined_error = 2.0 * lt.est_error + ld.est_error +
                       1e-13 * (1.0 + static_cast<double>(as.size()) + std::abs(closed));
  return out;
}

}  // namespace gtmprod
