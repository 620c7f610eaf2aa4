#pragma once

// Complex Gamma and log-Gamma, the classical Gamma identities as residual
// checks, and the closed form of prod_{n>=0} prod_i (n+a_i)/(n+b_i).

#include <complex>
#include <vector>

#include "gtmprod/ratfun.hpp"

namespace gtmprod {

using ComplexDouble = std::complex<double>;

/// Branch with log_gamma(z+1) = log_gamma(z) + log(z) on the right half-plane.
/// Throws DomainError at nonpositive integers or on non-finite input.
ComplexDouble log_gamma(ComplexDouble z);
ComplexDouble gamma(ComplexDouble z);
double log_gamma(double x);

/// ln Gamma by upward recurrence and Stirling only (no reflection). Slower
/// for large negative Re z; used as the independent side of identity checks.
ComplexDouble log_gamma_by_recurrence(ComplexDouble z);

/// sum ln Gamma(b_i) - sum ln Gamma(a_i). Requires equal lengths, exactly
/// equal sums, and no entry in {0, -1, -2, ...}; throws DomainError.
ComplexDouble log_gamma_product_closed_form(const std::vector<GaussRational>& a,
                                            const std::vector<GaussRational>& b);
ComplexDouble gamma_product_closed_form(const std::vector<GaussRational>& a,
                                        const std::vector<GaussRational>& b);

enum class GammaIdentity { multiplication, recurrence, duplication, reflection, special };

/// |exp(ln LHS - ln RHS) - 1|. `order` is the n of the multiplication
/// formula. `special` ignores z and reports the worst of Gamma(1/2) = sqrt(pi),
/// Gamma(1) = Gamma(2) = 1, Gamma(3/2) = sqrt(pi)/2.
double check_gamma_identity(GammaIdentity id, ComplexDouble z, int order = 2);

}  // namespace gtmprod
