#pragma once

// Strongly q-multiplicative +-1 sequences: generalized Thue-Morse,
// digit-count parity and digit-sum parity. A sequence is stored as its first
// q signs; every element and partial sum is computed from base-q digits.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gtmprod {

/// The first q signs delta_0..delta_{q-1} of a strongly q-multiplicative
/// sequence. delta_0 is always +1.
class SignPattern {
 public:
  /// Throws DomainError if q < 2, signs.size() != q, signs[0] != +1 or an
  /// entry is not +-1.
  SignPattern(int q, std::vector<int> signs);

  int q() const noexcept { return q_; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  int operator[](int k) const { return signs_[static_cast<std::size_t>(k)]; }

  /// False for the all-plus pattern, whose sequence is identically +1.
  bool nontrivial() const noexcept { return nontrivial_; }

  friend bool operator==(const SignPattern&, const SignPattern&) = default;

 private:
  int q_;
  std::vector<int> signs_;
  bool nontrivial_;
};

enum class SequenceKind { gtm, digit_count, digit_parity };

/// Immutable strongly q-multiplicative sequence with a display tag.
class MultiplicativeSequence {
 public:
  MultiplicativeSequence(SignPattern pattern, SequenceKind kind,
                         std::string param);

  const SignPattern& pattern() const noexcept { return pattern_; }
  int q() const noexcept { return pattern_.q(); }
  SequenceKind kind() const noexcept { return kind_; }
  bool nontrivial() const noexcept { return pattern_.nontrivial(); }

  /// Canonical spec string: `gtm:<q>:<bits>`, `dcount:<q>:<k>`,
  /// `dparity:<q>`.
  std::string spec() const;

  /// delta_n, the product of the signs of the base-q digits of n.
  int sign_at(std::uint64_t n) const noexcept;
  int theta_at(std::uint64_t n) const noexcept {
    return (1 - sign_at(n)) / 2;
  }

  /// Delta_n = delta_0 + ... + delta_{n-1}, in O(log n).
  std::int64_t partial_sum(std::uint64_t n) const noexcept;

 private:
  SignPattern pattern_;
  SequenceKind kind_;
  std::string param_;
};

/// `params` is the bit string theta_1..theta_{q-1} for gtm, the digit k for
/// digit_count and ignored for digit_parity.
MultiplicativeSequence make_sequence(SequenceKind kind, int q,
                                     std::string_view params = {});

/// Parses `gtm:3:001`, `dcount:3:2`, `dparity:5`. Throws ParseError.
MultiplicativeSequence parse_sequence_spec(std::string_view spec);

/// The all-plus sequence in base q (used for zeta values).
MultiplicativeSequence all_plus_sequence(int q = 2);

inline int sign_at(const MultiplicativeSequence& seq, std::uint64_t n) noexcept {
  return seq.sign_at(n);
}
inline int theta_at(const MultiplicativeSequence& seq, std::uint64_t n) noexcept {
  return seq.theta_at(n);
}
inline std::int64_t partial_sum(const MultiplicativeSequence& seq,
                                std::uint64_t n) noexcept {
  return seq.partial_sum(n);
}

inline constexpr std::size_t kDefaultMorphismCap = 10'000'000;

/// First `length` letters of the fixed point of 0 -> 0 theta_1..theta_{q-1},
/// 1 -> complement, obtained by iterating the substitution. Independent of
/// the digit-based access path; used as a test oracle and by `seq`.
std::vector<int> morphism_prefix(int q, std::string_view theta_bits,
                                 std::size_t length,
                                 std::size_t cap = kDefaultMorphismCap);

struct ExtremalSums {
  std::int64_t max_abs_at_power;     // max |Delta_{q^k}|
  std::int64_t max_abs_up_to_power;  // max |Delta_n|, 0 <= n <= q^k
  std::vector<int> witness;          // a pattern attaining the second maximum
};

/// Brute force over every nontrivial pattern (q <= 6, k <= 6).
ExtremalSums extremal_partial_sums(int q, int k);

struct DigitStats {
  std::vector<std::int64_t> counts;  // counts[k-1] = N_{k,q}(n), k = 1..q-1
  std::int64_t digit_sum = 0;        // s_q(n)
};

DigitStats digit_stats(int q, std::uint64_t n);

/// 1 + (q-2) + ... + (q-2)^k with 0^0 = 1.
std::int64_t geometric_bound(int q, int k);

/// Smallest k with geometric_bound(q, k+1) <= (q-1)^k. From q^k on,
/// |Delta_n| <= n^{log_q(q-1)} holds for every nontrivial pattern.
int asymptotic_threshold(int q);

/// Integer power with 0^0 = 1.
std::int64_t ipow(std::int64_t base, int exp) noexcept;

/// Sequential delta_n for n = start, start+1, ... in amortized O(1) per step.
class SignStream {
 public:
  SignStream(const SignPattern& pattern, std::uint64_t start = 0);

  std::uint64_t index() const noexcept { return n_; }
  int sign() const noexcept { return sign_; }
  void advance() noexcept;

 private:
  std::vector<int> signs_;
  std::vector<int> digits_;
  std::uint64_t n_;
  int sign_;
};

}  // namespace gtmprod
