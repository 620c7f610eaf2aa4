#pragma once

// Identity records and the batch verifier. One record per line:
//   id|paper|seqspec|mode|from|lhs|rhs|tags
// Blank lines and lines starting with '#' are skipped.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gtmprod/dirichlet.hpp"
#include "gtmprod/error.hpp"
#include "gtmprod/evaluator.hpp"
#include "gtmprod/expr.hpp"

namespace gtmprod {

class CatalogError : public Error {
 public:
  CatalogError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct IdentityRecord {
  std::string id;
  std::string paper;
  std::string seq;
  ExponentMode mode = ExponentMode::delta;
  int from = 0;
  std::string lhs;
  std::string rhs;
  std::vector<std::string> tags;

  ProductSpec spec() const;
  Expr rhs_expr() const;
};

/// Validates every record (sequence, product term, expression, check_product)
/// and rejects duplicate ids. Throws CatalogError.
std::vector<IdentityRecord> parse_catalog(std::string_view text, const std::string& source = "catalog");
/// "builtin" selects the embedded catalog.
std::vector<IdentityRecord> load_catalog(const std::string& path_or_builtin);
std::string_view builtin_catalog_text();
std::string format_record(const IdentityRecord& r);

/// Shell-style glob with '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view text);
/// Empty filter matches everything; otherwise the id or any tag must match.
bool record_matches(const IdentityRecord& r, std::string_view filter);

enum class CatalogMethod { accel, direct, both };

struct CatalogResult {
  std::string id;
  std::string paper;
  std::string method;  // "accel" or "direct"
  double lhs_value = 0.0;
  double rhs_value = 0.0;
  double abs_dlog = 0.0;
  double est_error = 0.0;
  std::uint64_t terms_used = 0;
  bool pass = false;
  std::string reason;
};

struct CatalogReport {
  std::vector<CatalogResult> results;  // by id, accel before direct
  std::size_t total = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct CatalogRunOptions {
  double tol = 1e-8;
  CatalogMethod method = CatalogMethod::accel;
  std::uint64_t direct_power = 12;  // direct method sums up to q^direct_power
  unsigned threads = 1;
};

CatalogReport run_catalog(const std::vector<IdentityRecord>& records, std::string_view filter,
                          const CatalogRunOptions& options, DirichletCache* cache = nullptr);

}  // namespace gtmprod
