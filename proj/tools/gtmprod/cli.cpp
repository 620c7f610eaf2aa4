#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtmprod/catalog.hpp"
#include "gtmprod/dirichlet.hpp"
#include "gtmprod/error.hpp"
#include "gtmprod/evaluator.hpp"
#include "gtmprod/seqcore.hpp"

namespace gtmprod::cli {

namespace {

using nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fmt15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Rounded to 15 significant digits so JSON matches the text output.
double round15(double v) { return std::strtod(fmt15(v).c_str(), nullptr); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

OutputFormat parse_format(const std::string& s) {
  if (s == "text") return OutputFormat::text;
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw UsageError("unknown format '" + s + "' (expected text, json or csv)");
}

double parse_positive(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw UsageError("config key '" + key + "' needs a positive number, got '" + value + "'");
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Session {
  CliConfig config;
  std::ostream& out;
  std::ostream& err;
  std::unique_ptr<DirichletCache> cache;
  std::size_t cache_size_at_start = 0;

  DirichletCache* open_cache(bool enabled) {
    if (!enabled) {
      cache = std::make_unique<DirichletCache>();
    } else {
      const auto path = config.cache_dir ? *config.cache_dir / "dirichlet.cache"
                                         : DirichletCache::default_path();
      cache = std::make_unique<DirichletCache>(path);
    }
    cache_size_at_start = cache->size();
    return cache.get();
  }

  void close_cache() {
    if (!cache || cache->size() == cache_size_at_start) return;
    try {
      cache->save();
    } catch (const Error& e) {
      err << "warning: " << e.what() << '\n';
    }
  }
};

EvalOptions eval_options(const CliConfig& c) {
  EvalOptions o;
  o.J_max = std::max(o.J, c.j_max);
  o.N_max = std::max<unsigned long long>(o.N, c.n_max);
  return o;
}

// ---------------------------------------------------------------- commands

int cmd_seq(Session& s, const std::string& spec, std::uint64_t count, std::uint64_t start,
            bool signs) {
  const MultiplicativeSequence seq = parse_sequence_spec(spec);
  std::string line;
  std::vector<int> values;
  for (std::uint64_t n = start; n < start + count; ++n) {
    const int v = signs ? seq.sign_at(n) : seq.theta_at(n);
    values.push_back(v);
    line += signs ? (v > 0 ? '+' : '-') : static_cast<char>('0' + v);
  }
  switch (s.config.format) {
    case OutputFormat::text:
      s.out << line << '\n';
      break;
    case OutputFormat::json:
      s.out << json{{"seq", seq.spec()}, {"start", start}, {"count", count},
                    {signs ? "delta" : "theta", values}}
                   .dump()
            << '\n';
      break;
    case OutputFormat::csv:
      s.out << "n," << (signs ? "delta" : "theta") << '\n';
      for (std::uint64_t i = 0; i < count; ++i) s.out << start + i << ',' << values[i] << '\n';
      break;
  }
  return kOk;
}

int cmd_sum(Session& s, const std::string& spec, const std::vector<std::uint64_t>& ns) {
  const MultiplicativeSequence seq = parse_sequence_spec(spec);
  switch (s.config.format) {
    case OutputFormat::text:
      for (auto n : ns) s.out << "Delta_" << n << " = " << seq.partial_sum(n) << '\n';
      break;
    case OutputFormat::json: {
      json rows = json::array();
      for (auto n : ns) rows.push_back({{"n", n}, {"partial_sum", seq.partial_sum(n)}});
      s.out << json{{"seq", seq.spec()}, {"values", rows}}.dump() << '\n';
      break;
    }
    case OutputFormat::csv:
      s.out << "n,partial_sum\n";
      for (auto n : ns) s.out << n << ',' << seq.partial_sum(n) << '\n';
      break;
  }
  return kOk;
}

int cmd_check(Session& s, const std::string& term_text, const std::string& mode_text,
              const std::string& spec, int from) {
  const FactorList term = parse_product_term(term_text);
  const ExponentMode mode = parse_mode(mode_text);
  std::string reason, detail;
  if (spec.empty()) {
    const ConvergenceVerdict v = convergence_check(term, mode);
    if (!v.pass) {
      reason = v.reason;
      detail = v.detail;
    } else if (const auto bad = integer_zeros_poles(term, from); !bad.empty()) {
      reason = "zero-or-pole";
      detail = "term vanishes or has a pole at n=" + std::to_string(bad.front());
    }
  } else {
    const CheckVerdict v = check_product({parse_sequence_spec(spec), mode, from, term});
    if (!v.ok) {
      reason = v.reason;
      detail = v.detail;
    }
  }
  const bool ok = reason.empty();
  switch (s.config.format) {
    case OutputFormat::text:
      s.out << (ok ? std::string("ok") : "rejected: " + reason) << '\n';
      if (!ok && !detail.empty()) s.err << detail << '\n';
      break;
    case OutputFormat::json:
      s.out << json{{"term", format_product_term(term)}, {"mode", to_string(mode)}, {"ok", ok},
                    {"reason", reason}, {"detail", detail}}
                   .dump()
            << '\n';
      break;
    case OutputFormat::csv:
      s.out << "term,mode,ok,reason\n"
            << csv_field(format_product_term(term)) << ',' << to_string(mode) << ','
            << (ok ? "true" : "false") << ',' << reason << '\n';
      break;
  }
  return ok ? kOk : kRejected;
}

int cmd_eval(Session& s, const std::string& spec_text, const std::string& mode_text, int from,
             const std::string& term_text, const std::string& method, std::uint64_t direct_n,
             bool use_cache) {
  const ProductSpec spec{parse_sequence_spec(spec_text), parse_mode(mode_text), from,
                         parse_product_term(term_text)};
  const CheckVerdict v = check_product(spec);
  if (!v.ok) {
    s.err << "rejected: " << v.reason << (v.detail.empty() ? "" : " (" + v.detail + ")") << '\n';
    return v.reason == "non-positive" || v.reason == "complex" ? kNumeric : kRejected;
  }
  EvalResult r;
  if (method == "direct") {
    std::uint64_t n = direct_n;
    if (n == 0) {
      n = 1;
      for (int i = 0; i < 12; ++i) n *= static_cast<std::uint64_t>(spec.seq.q());
    }
    r = evaluate_direct(spec, n);
  } else if (method == "accel") {
    DirichletCache* cache = s.open_cache(use_cache);
    r = evaluate_product(spec, s.config.tol, cache, eval_options(s.config));
  } else {
    throw UsageError("unknown method '" + method + "' (expected accel or direct)");
  }
  switch (s.config.format) {
    case OutputFormat::text:
      s.out << "value      " << fmt15(r.value) << '\n'
            << "log_value  " << fmt15(r.log_value) << '\n'
            << "est_error  " << fmt15(r.est_error) << '\n'
            << "method     " << r.method << '\n'
            << "terms_used " << r.terms_used << '\n';
      if (r.dirichlet_orders > 0) s.out << "orders     " << r.dirichlet_orders << '\n';
      break;
    case OutputFormat::json:
      s.out << json{{"value", round15(r.value)},         {"log_value", round15(r.log_value)},
                    {"est_error", round15(r.est_error)}, {"method", r.method},
                    {"terms_used", r.terms_used},        {"dirichlet_orders", r.dirichlet_orders}}
                   .dump()
            << '\n';
      break;
    case OutputFormat::csv:
      s.out << "value,log_value,est_error,method,terms_used,dirichlet_orders\n"
            << fmt15(r.value) << ',' << fmt15(r.log_value) << ',' << fmt15(r.est_error) << ','
            << r.method << ',' << r.terms_used << ',' << r.dirichlet_orders << '\n';
      break;
  }
  return kOk;
}

int cmd_dirichlet(Session& s, const std::string& spec_text, int s_min, int s_max, double eps,
                  bool use_cache) {
  if (s_max < s_min) s_max = s_min;
  const MultiplicativeSequence seq = parse_sequence_spec(spec_text);
  DirichletCache* cache = s.open_cache(use_cache);
  std::vector<std::pair<int, DirichletValue>> rows;
  for (int k = s_min; k <= s_max; ++k) rows.emplace_back(k, dirichlet_value(seq, k, eps, cache));
  switch (s.config.format) {
    case OutputFormat::text:
      for (const auto& [k, v] : rows) {
        s.out << "F(" << k << ") = " << fmt15(v.value) << "  eps " << fmt15(v.eps) << "  "
              << v.method << '\n';
      }
      break;
    case OutputFormat::json: {
      json arr = json::array();
      for (const auto& [k, v] : rows) {
        arr.push_back({{"s", k}, {"value", round15(v.value)}, {"eps", round15(v.eps)},
                       {"method", v.method}});
      }
      s.out << json{{"seq", seq.spec()}, {"values", arr}}.dump() << '\n';
      break;
    }
    case OutputFormat::csv:
      s.out << "s,value,eps,method\n";
      for (const auto& [k, v] : rows) {
        s.out << k << ',' << fmt15(v.value) << ',' << fmt15(v.eps) << ',' << v.method << '\n';
      }
      break;
  }
  return kOk;
}

int cmd_verify(Session& s, const std::string& catalog, const std::string& filter,
               const std::string& method, unsigned threads, bool use_cache) {
  const auto records = load_catalog(catalog);
  CatalogRunOptions opts;
  opts.tol = s.config.tol;
  opts.threads = threads;
  if (method == "accel") {
    opts.method = CatalogMethod::accel;
  } else if (method == "direct") {
    opts.method = CatalogMethod::direct;
  } else if (method == "both") {
    opts.method = CatalogMethod::both;
  } else {
    throw UsageError("unknown method '" + method + "' (expected accel, direct or both)");
  }
  DirichletCache* cache = s.open_cache(use_cache);
  const CatalogReport report = run_catalog(records, filter, opts, cache);
  switch (s.config.format) {
    case OutputFormat::text:
      for (const auto& r : report.results) {
        s.out << (r.pass ? "PASS " : "FAIL ") << r.id << " [" << r.method << "] lhs "
              << fmt15(r.lhs_value) << " rhs " << fmt15(r.rhs_value) << " |dlog| "
              << fmt15(r.abs_dlog) << " est " << fmt15(r.est_error) << " terms " << r.terms_used;
        if (!r.reason.empty()) s.out << " (" << r.reason << ")";
        s.out << '\n';
      }
      s.out << "total " << report.total << " pass " << report.passed << " fail " << report.failed
            << '\n';
      break;
    case OutputFormat::json: {
      json arr = json::array();
      for (const auto& r : report.results) {
        json row{{"id", r.id},
                 {"paper", r.paper},
                 {"method", r.method},
                 {"lhs_value", round15(r.lhs_value)},
                 {"rhs_value", round15(r.rhs_value)},
                 {"abs_dlog", round15(r.abs_dlog)},
                 {"est_error", round15(r.est_error)},
                 {"terms_used", r.terms_used},
                 {"pass", r.pass}};
        if (!r.reason.empty()) row["reason"] = r.reason;
        arr.push_back(std::move(row));
      }
      s.out << json{{"results", arr},
                    {"summary",
                     {{"total", report.total}, {"pass", report.passed}, {"fail", report.failed}}}}
                   .dump(2)
            << '\n';
      break;
    }
    case OutputFormat::csv:
      s.out << "id,paper,method,lhs_value,rhs_value,abs_dlog,est_error,terms_used,pass\n";
      for (const auto& r : report.results) {
        s.out << csv_field(r.id) << ',' << csv_field(r.paper) << ',' << r.method << ','
              << fmt15(r.lhs_value) << ',' << fmt15(r.rhs_value) << ',' << fmt15(r.abs_dlog)
              << ',' << fmt15(r.est_error) << ',' << r.terms_used << ','
              << (r.pass ? "true" : "false") << '\n';
      }
      break;
  }
  return report.failed == 0 ? kOk : kVerificationFailed;
}

}  // namespace

// ---------------------------------------------------------------- config

CliConfig parse_config(const std::string& text, CliConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "tol") {
      base.tol = parse_positive(key, value);
    } else if (key == "cache_dir") {
      base.cache_dir = value;
    } else if (key == "format") {
      base.format = parse_format(value);
    } else if (key == "j_max") {
      base.j_max = static_cast<int>(parse_positive(key, value));
    } else if (key == "n_max") {
      base.n_max = static_cast<unsigned long long>(parse_positive(key, value));
    } else {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

std::filesystem::path default_config_path() {
  if (const char* p = std::getenv("GTMPROD_CONFIG"); p != nullptr && *p != '\0') return p;
  if (const char* x = std::getenv("XDG_CONFIG_HOME"); x != nullptr && *x != '\0') {
    return std::filesystem::path(x) / "gtmprod" / "config";
  }
  const char* home = std::getenv("HOME");
  return std::filesystem::path(home != nullptr ? home : ".") / ".config" / "gtmprod" / "config";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thue-Morse weighted infinite products: sequences, convergence, evaluation and "
               "identity verification"};
  app.name("gtmprod");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_file, format_flag, cache_dir_flag;
  double tol_flag = 0.0;
  bool no_cache = false;
  app.add_option("--config", config_file, "key=value config file");
  app.add_option("--format", format_flag, "text, json or csv");
  app.add_option("--cache-dir", cache_dir_flag, "directory of the Dirichlet cache");
  app.add_flag("--no-cache", no_cache, "keep Dirichlet values in memory only");

  std::string seq_spec, term, mode = "delta", method = "accel", catalog = "builtin", filter;
  std::uint64_t count = 0, start = 0, direct_n = 0;
  std::vector<std::uint64_t> ns;
  bool signs = false;
  int from = 0, s_min = 1, s_max = 0;
  double eps = 1e-10;
  unsigned threads = 1;

  auto* seq_cmd = app.add_subcommand("seq", "print theta_n (or delta_n) for a range of n");
  seq_cmd->add_option("--seq", seq_spec, "gtm:<q>:<bits>, dcount:<q>:<k> or dparity:<q>")->required();
  seq_cmd->add_option("--count", count, "number of terms")->required();
  seq_cmd->add_option("--start", start, "first index");
  seq_cmd->add_flag("--signs", signs, "print delta_n as +/- instead of theta_n");

  auto* sum_cmd = app.add_subcommand("sum", "partial sums Delta_n = delta_0 + ... + delta_{n-1}");
  sum_cmd->add_option("--seq", seq_spec, "sequence spec")->required();
  sum_cmd->add_option("--n", ns, "one or more n")->required();

  auto* check_cmd = app.add_subcommand("check", "convergence criteria for a product term");
  check_cmd->add_option("--term", term, "product term, e.g. (2n+1)/(2n+2)")->required();
  check_cmd->add_option("--mode", mode, "delta or theta");
  check_cmd->add_option("--seq", seq_spec, "also run the full product check for this sequence");
  check_cmd->add_option("--from", from, "first index (0 or 1)");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate an infinite product");
  eval_cmd->add_option("--seq", seq_spec, "sequence spec")->required();
  eval_cmd->add_option("--mode", mode, "delta or theta");
  eval_cmd->add_option("--from", from, "first index (0 or 1)");
  eval_cmd->add_option("--term", term, "product term")->required();
  eval_cmd->add_option("--tol", tol_flag, "target absolute error on the logarithm");
  eval_cmd->add_option("--method", method, "accel or direct");
  eval_cmd->add_option("--N", direct_n, "summation bound for the direct method");

  auto* dir_cmd = app.add_subcommand("dirichlet", "F(s) = sum delta_n n^-s at integer s");
  dir_cmd->add_option("--seq", seq_spec, "sequence spec")->required();
  dir_cmd->add_option("--s", s_min, "order s")->required();
  dir_cmd->add_option("--s-max", s_max, "print orders s..s-max");
  dir_cmd->add_option("--eps", eps, "required accuracy");

  auto* verify_cmd = app.add_subcommand("verify", "verify catalog identities");
  verify_cmd->add_option("--catalog", catalog, "'builtin' or a catalog file");
  verify_cmd->add_option("--filter", filter, "glob on record id or tag");
  verify_cmd->add_option("--tol", tol_flag, "tolerance on |ln lhs - ln rhs|");
  verify_cmd->add_option("--method", method, "accel, direct or both");
  verify_cmd->add_option("--threads", threads, "worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  Session session{CliConfig{}, out, err, nullptr, 0};
  try {
    std::filesystem::path config_path = config_file.empty() ? default_config_path() : std::filesystem::path(config_file);
    std::ifstream cfg(config_path);
    if (cfg) {
      std::stringstream buf;
      buf << cfg.rdbuf();
      session.config = parse_config(buf.str());
    } else if (!config_file.empty()) {
      throw UsageError("cannot read config file " + config_file);
    }
    if (const char* dir = std::getenv("GTMPROD_CACHE_DIR"); dir != nullptr && *dir != '\0') {
      session.config.cache_dir = dir;
    }
    if (!format_flag.empty()) session.config.format = parse_format(format_flag);
    if (!cache_dir_flag.empty()) session.config.cache_dir = cache_dir_flag;
    if (tol_flag != 0.0) {
      if (!(tol_flag > 0.0)) throw UsageError("--tol must be positive");
      session.config.tol = tol_flag;
    } else if (*verify_cmd && session.config.tol == CliConfig{}.tol) {
      session.config.tol = 1e-8;
    }

    int code = kOk;
    if (*seq_cmd) {
      code = cmd_seq(session, seq_spec, count, start, signs);
    } else if (*sum_cmd) {
      code = cmd_sum(session, seq_spec, ns);
    } else if (*check_cmd) {
      code = cmd_check(session, term, mode, seq_spec, from);
    } else if (*eval_cmd) {
      code = cmd_eval(session, seq_spec, mode, from, term, method, direct_n, !no_cache);
    } else if (*dir_cmd) {
      code = cmd_dirichlet(session, seq_spec, s_min, s_max, eps, !no_cache);
    } else if (*verify_cmd) {
      code = cmd_verify(session, catalog, filter, method, threads, !no_cache);
    }
    session.close_cache();
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CatalogError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "rejected: " << e.what() << '\n';
    return kRejected;
  } catch (const NumericError& e) {
    session.close_cache();
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace gtmprod::cli
