#include "gtmprod/seqcore.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "gtmprod/error.hpp"

namespace gtmprod {

namespace {

void require_q(int q) {
  if (q < 2) throw DomainError("base q must be at least 2, got " + std::to_string(q));
}

// Accepts theta_1..theta_{q-1}, or the full word theta_0..theta_{q-1} with theta_0 = 0.
std::string_view theta_tail(int q, std::string_view bits) {
  const auto n = static_cast<std::size_t>(q - 1);
  if (bits.size() == n + 1 && bits.front() == '0') return bits.substr(1);
  if (bits.size() != n) {
    throw DomainError("expected " + std::to_string(q - 1) + " theta bits (or " +
                      std::to_string(q) + " starting with 0) for q=" + std::to_string(q) +
                      ", got '" + std::string(bits) + "'");
  }
  return bits;
}

std::vector<int> signs_from_bits(int q, std::string_view bits) {
  bits = theta_tail(q, bits);
  std::vector<int> signs{1};
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw DomainError("theta bits must be 0 or 1, got '" + std::string(bits) + "'");
    }
    signs.push_back(c == '1' ? -1 : 1);
  }
  return signs;
}

int parse_int_field(std::string_view text, std::string_view whole, std::size_t offset) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("bad integer '" + std::string(text) + "' in sequence spec '" +
                         std::string(whole) + "'",
                     offset);
  }
  return value;
}

}  // namespace

SignPattern::SignPattern(int q, std::vector<int> signs) : q_(q), signs_(std::move(signs)) {
  require_q(q);
  if (signs_.size() != static_cast<std::size_t>(q)) {
    throw DomainError("sign pattern needs exactly q entries");
  }
  if (signs_[0] != 1) throw DomainError("delta_0 must be +1");
  for (int s : signs_) {
    if (s != 1 && s != -1) throw DomainError("signs must be +1 or -1");
  }
  nontrivial_ = std::any_of(signs_.begin(), signs_.end(), [](int s) { return s < 0; });
}

MultiplicativeSequence::MultiplicativeSequence(SignPattern pattern, SequenceKind kind,
                                               std::string param)
    : pattern_(std::move(pattern)), kind_(kind), param_(std::move(param)) {}

std::string MultiplicativeSequence::spec() const {
  const std::string q = std::to_string(pattern_.q());
  switch (kind_) {
    case SequenceKind::gtm:
      return "gtm:" + q + ":" + param_;
    case SequenceKind::digit_count:
      return "dcount:" + q + ":" + param_;
    case SequenceKind::digit_parity:
      return "dparity:" + q;
  }
  return {};
}

int MultiplicativeSequence::sign_at(std::uint64_t n) const noexcept {
  const auto q = static_cast<std::uint64_t>(pattern_.q());
  int s = 1;
  while (n != 0) {
    s *= pattern_[static_cast<int>(n % q)];
    n /= q;
  }
  return s;
}

std::int64_t MultiplicativeSequence::partial_sum(std::uint64_t n) const noexcept {
  const auto q = static_cast<std::uint64_t>(pattern_.q());
  // Delta_d for single digits d, and Delta_q.
  std::vector<std::int64_t> digit_sums(q + 1, 0);
  for (std::uint64_t d = 0; d < q; ++d) digit_sums[d + 1] = digit_sums[d] + pattern_[static_cast<int>(d)];
  const std::int64_t delta_q = digit_sums[q];

  std::vector<int> digits;
  while (n != 0) {
    digits.push_back(static_cast<int>(n % q));
    n /= q;
  }
  // Scan from the most significant digit: Delta_{pq+d} = Delta_p Delta_q + delta_p Delta_d.
  std::int64_t prefix_sum = 0;
  int prefix_sign = 1;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    prefix_sum = prefix_sum * delta_q + prefix_sign * digit_sums[static_cast<std::size_t>(*it)];
    prefix_sign *= pattern_[*it];
  }
  return prefix_sum;
}

MultiplicativeSequence make_sequence(SequenceKind kind, int q, std::string_view params) {
  require_q(q);
  switch (kind) {
    case SequenceKind::gtm:
      return {SignPattern(q, signs_from_bits(q, params)), kind, std::string(params)};
    case SequenceKind::digit_count: {
      int k = 0;
      auto [ptr, ec] = std::from_chars(params.data(), params.data() + params.size(), k);
      if (ec != std::errc{} || ptr != params.data() + params.size() || params.empty()) {
        throw DomainError("digit_count needs an integer digit, got '" + std::string(params) + "'");
      }
      if (k < 1 || k > q - 1) {
        throw DomainError("digit k must lie in 1.." + std::to_string(q - 1) + ", got " +
                          std::to_string(k));
      }
      std::vector<int> signs(static_cast<std::size_t>(q), 1);
      signs[static_cast<std::size_t>(k)] = -1;
      return {SignPattern(q, std::move(signs)), kind, std::to_string(k)};
    }
    case SequenceKind::digit_parity: {
      std::vector<int> signs(static_cast<std::size_t>(q));
      for (int j = 0; j < q; ++j) signs[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1 : -1;
      return {SignPattern(q, std::move(signs)), kind, {}};
    }
  }
  throw DomainError("unknown sequence kind");
}

MultiplicativeSequence parse_sequence_spec(std::string_view spec) {
  std::vector<std::string_view> fields;
  std::vector<std::size_t> offsets;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    fields.push_back(spec.substr(start, colon - start));
    offsets.push_back(start);
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const auto kind = fields[0];
  try {
    if (kind == "gtm" && fields.size() == 3) {
      return make_sequence(SequenceKind::gtm, parse_int_field(fields[1], spec, offsets[1]), fields[2]);
    }
    if (kind == "dcount" && fields.size() == 3) {
      return make_sequence(SequenceKind::digit_count, parse_int_field(fields[1], spec, offsets[1]),
                           fields[2]);
    }
    if (kind == "dparity" && fields.size() == 2) {
      return make_sequence(SequenceKind::digit_parity, parse_int_field(fields[1], spec, offsets[1]));
    }
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid sequence spec '") + std::string(spec) + "': " + e.what(), 0);
  }
  throw ParseError("unrecognized sequence spec '" + std::string(spec) +
                       "' (expected gtm:<q>:<bits>, dcount:<q>:<k> or dparity:<q>)",
                   0);
}

MultiplicativeSequence all_plus_sequence(int q) {
  require_q(q);
  return make_sequence(SequenceKind::gtm, q, std::string(static_cast<std::size_t>(q - 1), '0'));
}

std::vector<int> morphism_prefix(int q, std::string_view theta_bits, std::size_t length,
                                 std::size_t cap) {
  require_q(q);
  if (length > cap) {
    throw DomainError("morphism prefix length " + std::to_string(length) + " exceeds cap " +
                      std::to_string(cap));
  }
  signs_from_bits(q, theta_bits);  // validates the bit string
  theta_bits = theta_tail(q, theta_bits);
  std::vector<int> image0{0};
  for (char c : theta_bits) image0.push_back(c == '1' ? 1 : 0);
  std::vector<int> word{0};
  while (word.size() < length) {
    std::vector<int> next;
    next.reserve(word.size() * static_cast<std::size_t>(q));
    for (int letter : word) {
      for (int b : image0) next.push_back(letter ^ b);
    }
    word = std::move(next);
  }
  word.resize(length);
  return word;
}

std::int64_t ipow(std::int64_t base, int exp) noexcept {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::int64_t geometric_bound(int q, int k) {
  require_q(q);
  std::int64_t total = 0;
  for (int i = 0; i <= k; ++i) total += ipow(q - 2, i);
  return total;
}

int asymptotic_threshold(int q) {
  require_q(q);
  for (int k = 0; k < 64; ++k) {
    if (geometric_bound(q, k + 1) <= ipow(q - 1, k)) return k;
  }
  throw DomainError("no asymptotic threshold found for q=" + std::to_string(q));
}

ExtremalSums extremal_partial_sums(int q, int k) {
  require_q(q);
  if (q > 6 || k < 0 || k > 6) {
    throw DomainError("extremal_partial_sums is limited to q <= 6, 0 <= k <= 6");
  }
  const auto qk = static_cast<std::uint64_t>(ipow(q, k));
  ExtremalSums result{0, -1, {}};
  const unsigned tuples = 1u << (q - 1);
  for (unsigned mask = 1; mask < tuples; ++mask) {
    std::vector<int> signs{1};
    for (int j = 0; j < q - 1; ++j) signs.push_back((mask >> j) & 1u ? -1 : 1);
    const SignPattern pattern(q, signs);
    SignStream stream(pattern);
    std::int64_t running = 0;  // Delta_n, n = stream.index()
    std::int64_t best = 0;
    for (std::uint64_t n = 0;; ++n) {
      best = std::max(best, std::abs(running));
      if (n == qk) break;
      running += stream.sign();
      stream.advance();
    }
    result.max_abs_at_power = std::max(result.max_abs_at_power, std::abs(running));
    if (best > result.max_abs_up_to_power) {
      result.max_abs_up_to_power = best;
      result.witness = signs;
    }
  }
  return result;
}

DigitStats digit_stats(int q, std::uint64_t n) {
  require_q(q);
  DigitStats stats;
  stats.counts.assign(static_cast<std::size_t>(q - 1), 0);
  const auto uq = static_cast<std::uint64_t>(q);
  while (n != 0) {
    const auto d = static_cast<int>(n % uq);
    if (d > 0) ++stats.counts[static_cast<std::size_t>(d - 1)];
    stats.digit_sum += d;
    n /= uq;
  }
  return stats;
}

SignStream::SignStream(const SignPattern& pattern, std::uint64_t start)
    : signs_(pattern.signs()), n_(start), sign_(1) {
  const auto q = static_cast<std::uint64_t>(signs_.size());
  for (std::uint64_t m = start; m != 0; m /= q) {
    digits_.push_back(static_cast<int>(m % q));
    sign_ *= signs_[static_cast<std::size_t>(digits_.back())];
  }
}

void SignStream::advance() noexcept {
  const int q = static_cast<int>(signs_.size());
  ++n_;
  for (std::size_t i = 0;; ++i) {
    if (i == digits_.size()) {
      digits_.push_back(1);
      sign_ *= signs_[1];
      return;
    }
    const int old = digits_[i];
    if (old + 1 < q) {
      digits_[i] = old + 1;
      sign_ *= signs_[static_cast<std::size_t>(old)] * signs_[static_cast<std::size_t>(old + 1)];
      return;
    }
    digits_[i] = 0;
    sign_ *= signs_[static_cast<std::size_t>(old)] * signs_[0];
  }
}

}  // namespace gtmprod
