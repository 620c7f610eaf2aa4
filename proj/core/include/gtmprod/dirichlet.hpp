#pragma once

// F(s) = sum_{n>=1} delta_n n^{-s} at positive integers s. Values come from
// a downward ladder: splitting n = qm + k and expanding (qm+k)^{-s}
// binomially gives
//   F(s) (1 - c_0 q^{-s}) = P(s) + q^{-s} sum_{i>=1} C(-s,i) q^{-i} c_i F(s+i)
// with c_i = sum_k delta_k k^i and P(s) = sum_{k=1}^{q-1} delta_k k^{-s}.
// Orders s >= 16 are summed directly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "gtmprod/ratfun.hpp"
#include "gtmprod/seqcore.hpp"

namespace gtmprod {

/// c_i = sum_{k<q} delta_k k^i with 0^0 = 1.
BigInt power_moments(const MultiplicativeSequence& seq, int i);

struct DirichletValue {
  double value = 0.0;
  double eps = 0.0;  // absolute error bound on value
  std::string method;

  friend bool operator==(const DirichletValue&, const DirichletValue&) = default;
};

/// Thread-safe map (spec, s) -> value with optional file persistence.
class DirichletCache {
 public:
  /// In-memory only.
  DirichletCache() = default;
  /// Loads `file` if it exists; save() writes it back.
  explicit DirichletCache(std::filesystem::path file);

  /// $GTMPROD_CACHE_DIR/dirichlet.cache, else ~/.cache/gtmprod/dirichlet.cache.
  static std::filesystem::path default_path();

  /// Entry whose eps is at most `max_eps`.
  std::optional<DirichletValue> lookup(const std::string& spec, int s, double max_eps) const;
  /// Keeps the entry with the smaller eps when the key already exists.
  void insert(const std::string& spec, int s, const DirichletValue& v);
  std::size_t size() const;

  /// Atomic rewrite (temporary file plus rename). No-op without a path.
  void save() const;
  const std::optional<std::filesystem::path>& path() const noexcept { return file_; }

 private:
  void load();

  std::optional<std::filesystem::path> file_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::string, int>, DirichletValue> entries_;
};

/// Requires s >= 1, and s >= 2 for the all-plus pattern. The value is always
/// computed to the same internal accuracy, so results do not depend on `eps`;
/// throws NumericError if the achieved bound exceeds `eps`.
DirichletValue dirichlet_value(const MultiplicativeSequence& seq, int s, double eps,
                               DirichletCache* cache = nullptr);

/// Oracle by Abel summation over the first N terms with a rigorous tail
/// bound from |Delta_n| <= 1 + (q-2) + ... + (q-2)^k for n <= q^k. For the
/// all-plus pattern, plain summation with tail N^{1-s}/(s-1).
DirichletValue dirichlet_direct(const MultiplicativeSequence& seq, int s, std::uint64_t N);

}  // namespace gtmprod
