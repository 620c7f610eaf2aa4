#pragma once

// Infinite products prod_{n>=from} R(n)^{w_n} with w_n = delta_n or theta_n.
//
// The accelerated method writes L = ln(product) as
//   sum_{j<=J} b_j F(j) + sum_{m<=N} delta_m rho(m) + tail
// after decimating n = m q^D + t so that every factor (A m + B) has
// |B/A| <= 3/2. F are Dirichlet constants of the sequence, b_j the exact
// 1/m expansion coefficients of the decimated term, and rho the literal
// remainder. Theta products use theta_n = (1 - delta_n)/2 and the same
// machinery without signs, anchored on zeta values.

#include <cstdint>
#include <string>
#include <vector>

#include "gtmprod/dirichlet.hpp"
#include "gtmprod/ratfun.hpp"
#include "gtmprod/seqcore.hpp"

namespace gtmprod {

struct ProductSpec {
  MultiplicativeSequence seq;
  ExponentMode mode = ExponentMode::delta;
  int from = 1;  // 0 or 1
  FactorList term;
};

/// `reason` is one of: trivial-pattern, from, degree, leading-coefficient,
/// sum-of-roots, zero-or-pole, complex, non-positive.
struct CheckVerdict {
  bool ok = true;
  std::string reason;
  std::string detail;
};

CheckVerdict check_product(const ProductSpec& spec);

struct EvalOptions {
  int J = 12;
  std::uint64_t N = 20'000;
  int J_max = 16;
  std::uint64_t N_max = 1'000'000;
};

struct EvalResult {
  double value = 1.0;
  double log_value = 0.0;
  double est_error = 0.0;  // absolute, on log_value
  std::string method;
  std::uint64_t terms_used = 0;
  int dirichlet_orders = 0;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Throws ConvergenceError if check_product rejects the spec (NumericError
/// for the positivity reasons), and NumericError if `eps` is out of reach at
/// the caps. A null cache uses a private in-memory one.
EvalResult evaluate_product(const ProductSpec& spec, double eps, DirichletCache* cache = nullptr,
                            const EvalOptions& options = {});

/// Baseline: the partial log-sum over from <= n < q^K with q^K <= N the
/// largest power. The error estimate is twice the spread of the partial sums
/// at the last q sub-block boundaries, scaled by max(1, |l|/(1-|l|)) with
/// l = Delta_q / q, plus a rounding bound.
EvalResult evaluate_direct(const ProductSpec& spec, std::uint64_t N);

enum class EvalMethod { accel, direct };

struct IdentityReport {
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_dlog = 0.0;
  double est_error = 0.0;
  std::uint64_t terms_used = 0;
  std::string reason;  // empty on a completed comparison
};

/// Passes iff |ln lhs - ln rhs| <= tol + est_error. Evaluation errors are
/// reported as failures with a reason.
IdentityReport verify_identity(const ProductSpec& spec, double rhs_value, double tol,
                               DirichletCache* cache = nullptr,
                               EvalMethod method = EvalMethod::accel,
                               std::uint64_t direct_N = 0);

enum class FunctionalEquation { thm_f, thm_frak };

/// thm_f: a.size() == b.size() == 1, a, b > 0. Term
///   (n+a)/(n+b) (qn+b)/(qn+a) prod_{k<q} ((qn+b+k)/(qn+a+k))^{delta_k}
/// against prod_k ((a+k)/(b+k))^{delta_k}.
/// thm_frak: a_i, b_i > 0 with sum a = sum b. Term
///   prod_i (n+a_i)/(n+b_i) prod_{k<q} ((qn+b_i+k)/(qn+a_i+k))^{delta_k}
/// in theta mode against prod_k prod_i (Gamma((b_i+k)/q)/Gamma((a_i+k)/q))^{theta_k}.
struct FunctionalEquationReport {
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_dlog = 0.0;
  double est_error = 0.0;
  ProductSpec spec;
};

ProductSpec functional_equation_spec(FunctionalEquation kind, const MultiplicativeSequence& seq,
                                     const std::vector<Rational>& a,
                                     const std::vector<Rational>& b);
/// Closed-form right-hand side, as a logarithm.
double functional_equation_rhs_log(FunctionalEquation kind, const MultiplicativeSequence& seq,
                                   const std::vector<Rational>& a,
                                   const std::vector<Rational>& b);
FunctionalEquationReport verify_functional_equation(FunctionalEquation kind, int q,
                                                    std::string_view theta_bits,
                                                    const std::vector<Rational>& a,
                                                    const std::vector<Rational>& b, double tol,
                                                    DirichletCache* cache = nullptr);

/// Partial product prod_{n=0}^{N} ((qn+a)(qn+a+q)/((qn+qa)(qn+qa+q)))^{(-1)^n},
/// which tends to 1/q.
double telescoping_limit(int q, const Rational& a, std::uint64_t N = 100'000);
/// Exact value of the same partial product: (1/q) u_{N+1}^{(-1)^N} with
/// u_n = (a+nq)/(qa+nq).
Rational telescoping_exact(int q, const Rational& a, std::uint64_t N);

/// For a theta spec, 2 L_theta + L_delta (both over n >= 1) against the
/// closed form of prod_{n>=1} R(n).
struct ModeConsistency {
  double combined_log = 0.0;
  double closed_form_log = 0.0;
  double combined_error = 0.0;
};
ModeConsistency mode_consistency(const ProductSpec& theta_spec, DirichletCache* cache = nullptr);

}  // namespace gtmprod
