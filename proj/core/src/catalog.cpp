#include "gtmprod/catalog.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace gtmprod {

namespace detail {
extern const char* const kBuiltinCatalog;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    out.emplace_back(s.substr(start, at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ProductSpec IdentityRecord::spec() const {
  return {parse_sequence_spec(seq), mode, from, parse_product_term(lhs)};
}

Expr IdentityRecord::rhs_expr() const { return parse_expr(rhs); }

std::string_view builtin_catalog_text() { return detail::kBuiltinCatalog; }

std::vector<IdentityRecord> parse_catalog(std::string_view text, const std::string& source) {
  std::vector<IdentityRecord> records;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split(line, '|');
    if (fields.size() != 8) {
      throw CatalogError(source, line_no,
                         "expected 8 '|'-separated fields, found " + std::to_string(fields.size()));
    }
    IdentityRecord r;
    r.id = trim(fields[0]);
    r.paper = trim(fields[1]);
    r.seq = trim(fields[2]);
    r.lhs = trim(fields[5]);
    r.rhs = trim(fields[6]);
    if (r.id.empty()) throw CatalogError(source, line_no, "empty id");
    try {
      r.mode = parse_mode(trim(fields[3]));
      const std::string from = trim(fields[4]);
      auto [p, ec] = std::from_chars(from.data(), from.data() + from.size(), r.from);
      if (ec != std::errc{} || p != from.data() + from.size()) {
        throw CatalogError(source, line_no, "bad start index '" + from + "'");
      }
      for (const auto& tag : split(fields[7], ',')) {
        const std::string t = trim(tag);
        if (!t.empty()) r.tags.push_back(t);
      }
      const ProductSpec spec = r.spec();
      r.rhs_expr();
      const CheckVerdict verdict = check_product(spec);
      if (!verdict.ok) {
        throw CatalogError(source, line_no,
                           "record '" + r.id + "' rejected: " + verdict.reason +
                               (verdict.detail.empty() ? "" : " (" + verdict.detail + ")"));
      }
    } catch (const CatalogError&) {
      throw;
    } catch (const Error& e) {
      throw CatalogError(source, line_no, "record '" + r.id + "': " + e.what());
    }
    if (!ids.insert(r.id).second) throw CatalogError(source, line_no, "duplicate id '" + r.id + "'");
    records.push_back(std::move(r));
    if (end == text.size()) break;
  }
  return records;
}

std::vector<IdentityRecord> load_catalog(const std::string& path_or_builtin) {
  if (path_or_builtin == "builtin") return parse_catalog(builtin_catalog_text(), "builtin");
  std::ifstream in(path_or_builtin);
  if (!in) throw CatalogError(path_or_builtin, 0, "cannot open catalog file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str(), path_or_builtin);
}

std::string format_record(const IdentityRecord& r) {
  return r.id + '|' + r.paper + '|' + r.seq + '|' + std::string(to_string(r.mode)) + '|' +
         std::to_string(r.from) + '|' + r.lhs + '|' + r.rhs + '|' + join(r.tags, ',');
}

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

bool record_matches(const IdentityRecord& r, std::string_view filter) {
  if (filter.empty()) return true;
  if (glob_match(filter, r.id)) return true;
  return std::any_of(r.tags.begin(), r.tags.end(),
                     [&](const std::string& tag) { return glob_match(filter, tag); });
}

CatalogReport run_catalog(const std::vector<IdentityRecord>& records, std::string_view filter,
                          const CatalogRunOptions& options, DirichletCache* cache) {
  std::vector<const IdentityRecord*> selected;
  for (const auto& r : records) {
    if (record_matches(r, filter)) selected.push_back(&r);
  }
  std::sort(selected.begin(), selected.end(),
            [](const IdentityRecord* a, const IdentityRecord* b) { return a->id < b->id; });

  std::vector<EvalMethod> methods;
  if (options.method != CatalogMethod::direct) methods.push_back(EvalMethod::accel);
  if (options.method != CatalogMethod::accel) methods.push_back(EvalMethod::direct);

  DirichletCache local;
  if (cache == nullptr) cache = &local;

  CatalogReport report;
  report.results.resize(selected.size() * methods.size());
  auto work = [&](std::size_t index) {
    const IdentityRecord& r = *selected[index / methods.size()];
    const EvalMethod method = methods[index % methods.size()];
    CatalogResult& out = report.results[index];
    out.id = r.id;
    out.paper = r.paper;
    out.method = method == EvalMethod::accel ? "accel" : "direct";
    try {
      const ProductSpec spec = r.spec();
      out.rhs_value = eval_expr(r.rhs_expr());
      std::uint64_t n = 1;
      for (std::uint64_t i = 0; i < options.direct_power; ++i) n *= static_cast<std::uint64_t>(spec.seq.q());
      const IdentityReport ir = verify_identity(spec, out.rhs_value, options.tol, cache, method, n);
      out.lhs_value = ir.lhs;
      out.abs_dlog = ir.abs_dlog;
      out.est_error = ir.est_error;
      out.terms_used = ir.terms_used;
      out.pass = ir.pass;
      out.reason = ir.reason;
    } catch (const Error& e) {
      out.pass = false;
      out.reason = e.what();
    }
  };

  const std::size_t jobs = report.results.size();
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(jobs)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs; i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  report.total = report.results.size();
  for (const auto& r : report.results) (r.pass ? report.passed : report.failed)++;
  return report;
}

}  // namespace gtmprod
