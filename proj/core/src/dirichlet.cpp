#include "gtmprod/dirichlet.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "gtmprod/error.hpp"

namespace gtmprod {

namespace {

constexpr int kDirectThreshold = 16;
constexpr double kTailTarget = 1e-19;
constexpr double kUnitRoundoff = 0x1p-53;
constexpr double kSafetyFactor = 4.0;
const double kZeta2 = 1.6449340668482264;

struct Level {
  double value;
  double err;  // unscaled first-order bound
};

// |F| bound: sum_{n<=N} |n^{-s}| plus rigorous tail.
Level direct_high_order(const MultiplicativeSequence& seq, int s) {
  // Smallest N with N^{1-s}/(s-1) < kTailTarget.
  std::uint64_t n_max = 1;
  while (std::pow(static_cast<double>(n_max), 1.0 - s) / (s - 1) >= kTailTarget) ++n_max;
  double sum = 0.0;
  double abs_sum = 0.0;
  // Largest terms last would be optimal; terms decay fast, so sum backwards.
  for (std::uint64_t n = n_max; n >= 1; --n) {
    const double term = std::pow(static_cast<double>(n), -s);
    sum += seq.sign_at(n) * term;
    abs_sum += term;
  }
  const double tail = std::pow(static_cast<double>(n_max), 1.0 - s) / (s - 1);
  return {sum, tail + 2.0 * kUnitRoundoff * static_cast<double>(n_max) * abs_sum};
}

class Ladder {
 public:
  explicit Ladder(const MultiplicativeSequence& seq) : seq_(seq), q_(seq.q()) {
    c0_ = power_moments(seq, 0);
  }

  const Level& at(int s) {
    auto it = levels_.find(s);
    if (it != levels_.end()) return it->second;
    // Fill from the top so recursion depth stays bounded.
    if (s < kDirectThreshold) {
      for (int t = kDirectThreshold - 1; t > s; --t) {
        if (!levels_.count(t)) levels_.emplace(t, compute(t));
      }
    }
    return levels_.emplace(s, s >= kDirectThreshold ? direct_high_order(seq_, s) : compute(s))
        .first->second;
  }

 private:
  const BigInt& moment(int i) {
    while (static_cast<int>(moments_.size()) <= i) {
      moments_.push_back(power_moments(seq_, static_cast<int>(moments_.size())));
    }
    return moments_[static_cast<std::size_t>(i)];
  }

  Level compute(int s) {
    const BigInt q(q_);
    const Rational denom_factor = Rational(1) - Rational(c0_, boost::multiprecision::pow(q, static_cast<unsigned>(s)));
    if (denom_factor == 0) {
      throw DomainError("ladder is singular at s=" + std::to_string(s) + " for " + seq_.spec());
    }
    double p = 0.0;
    double rounding_mass = 0.0;
    for (int k = 1; k < q_; ++k) {
      const double term = seq_.pattern()[k] * std::pow(static_cast<double>(k), -s);
      p += term;
      rounding_mass += std::abs(term);
    }

    const double q_inv_s = std::pow(static_cast<double>(q_), -s);
    BigInt binom = 1;
    BigInt q_power = boost::multiprecision::pow(q, static_cast<unsigned>(s));
    double series = 0.0;
    double propagated = 0.0;
    double tail = 0.0;
    for (int i = 1;; ++i) {
      binom = binom * (-s - i + 1) / i;
      q_power *= q;
      const double w = to_double(Rational(binom * moment(i), q_power));
      const Level& next = at(s + i);
      const double contribution = w * next.value;
      series += contribution;
      rounding_mass += std::abs(contribution);
      propagated += std::abs(w) * next.err;

      // Bound on |w_j F(s+j)| for j = i+1, then a geometric tail.
      double moment_ratio = 0.0;
      for (int k = 1; k < q_; ++k) moment_ratio += std::pow(static_cast<double>(k) / q_, i + 1);
      const double binom_next = std::abs(binom.convert_to<double>()) * (s + i) / (i + 1);
      const double u_next = binom_next * moment_ratio * q_inv_s * kZeta2;
      const double r = static_cast<double>(s + i + 1) / (i + 2) * (q_ - 1) / q_;
      if (r < 1.0 && u_next / (1.0 - r) < kTailTarget) {
        tail = u_next / (1.0 - r);
        break;
      }
      if (i > 5000) throw NumericError("ladder series failed to converge at s=" + std::to_string(s));
    }
    const double scale = to_double(denom_factor);
    const double value = (p + series) / scale;
    const double err =
        (propagated + tail + 4.0 * kUnitRoundoff * rounding_mass) / std::abs(scale) +
        2.0 * kUnitRoundoff * std::abs(value);
    return {value, err};
  }

  const MultiplicativeSequence& seq_;
  int q_;
  BigInt c0_;
  std::vector<BigInt> moments_;
  std::map<int, Level> levels_;

 public:
  const std::map<int, Level>& levels() const noexcept { return levels_; }
};

std::string hex_bits(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

std::vector<std::string> split_bar(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    out.push_back(line.substr(start, bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

}  // namespace

BigInt power_moments(const MultiplicativeSequence& seq, int i) {
  if (i < 0) throw DomainError("moment order must be nonnegative");
  BigInt total = 0;
  for (int k = 0; k < seq.q(); ++k) {
    total += seq.pattern()[k] * boost::multiprecision::pow(BigInt(k), static_cast<unsigned>(i));
  }
  return total;
}

// ---------------------------------------------------------------- cache

DirichletCache::DirichletCache(std::filesystem::path file) : file_(std::move(file)) { load(); }

std::filesystem::path DirichletCache::default_path() {
  if (const char* dir = std::getenv("GTMPROD_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / "dirichlet.cache";
  }
  const char* home = std::getenv("HOME");
  const std::filesystem::path base = home != nullptr ? home : ".";
  return base / ".cache" / "gtmprod" / "dirichlet.cache";
}

void DirichletCache::load() {
  std::ifstream in(*file_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_bar(line);
    if (fields.size() != 5) continue;
    int s = 0;
    std::uint64_t bits = 0;
    {
      auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), s);
      if (ec != std::errc{} || p != fields[1].data() + fields[1].size()) continue;
    }
    {
      auto [p, ec] =
          std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), bits, 16);
      if (ec != std::errc{} || p != fields[2].data() + fields[2].size() || fields[2].size() != 16) {
        continue;
      }
    }
    char* end = nullptr;
    const double eps = std::strtod(fields[3].c_str(), &end);
    if (end == fields[3].c_str() || *end != '\0' || !(eps >= 0.0)) continue;
    const double value = std::bit_cast<double>(bits);
    if (!std::isfinite(value)) continue;
    entries_[{fields[0], s}] = {value, eps, fields[4]};
  }
}

std::optional<DirichletValue> DirichletCache::lookup(const std::string& spec, int s,
                                                     double max_eps) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find({spec, s});
  if (it == entries_.end() || it->second.eps > max_eps) return std::nullopt;
  return it->second;
}

void DirichletCache::insert(const std::string& spec, int s, const DirichletValue& v) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.try_emplace({spec, s}, v);
  if (!inserted && v.eps < it->second.eps) it->second = v;
}

std::size_t DirichletCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void DirichletCache::save() const {
  if (!file_) return;
  std::shared_lock lock(mutex_);
  std::error_code ec;
  if (file_->has_parent_path()) std::filesystem::create_directories(file_->parent_path(), ec);
  std::filesystem::path tmp = *file_;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    for (const auto& [key, v] : entries_) {
      char eps[40];
      std::snprintf(eps, sizeof eps, "%.17g", v.eps);
      out << key.first << '|' << key.second << '|' << hex_bits(v.value) << '|' << eps << '|'
          << v.method << '\n';
    }
    if (!out) throw Error("failed writing cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, *file_, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace cache file " + file_->string());
  }
}

// ---------------------------------------------------------------- values

DirichletValue dirichlet_value(const MultiplicativeSequence& seq, int s, double eps,
                               DirichletCache* cache) {
  if (s < 1) throw DomainError("dirichlet_value needs s >= 1");
  if (!seq.nontrivial() && s < 2) throw DomainError("zeta has a pole at s=1");
  const std::string spec = seq.spec();
  if (cache != nullptr) {
    if (auto hit = cache->lookup(spec, s, eps)) return *hit;
  }
  Ladder ladder(seq);
  const Level& level = ladder.at(s);
  const DirichletValue result{level.value, kSafetyFactor * level.err,
                              s >= kDirectThreshold ? "direct" : "ladder"};
  if (cache != nullptr) {
    for (const auto& [t, lv] : ladder.levels()) {
      if (t < kDirectThreshold) cache->insert(spec, t, {lv.value, kSafetyFactor * lv.err, "ladder"});
    }
    cache->insert(spec, s, result);
  }
  if (!(result.eps <= eps)) {
    std::ostringstream os;
    os << "F(" << s << ") for " << spec << " reaches only eps=" << result.eps
       << ", requested " << eps;
    throw NumericError(os.str());
  }
  return result;
}

DirichletValue dirichlet_direct(const MultiplicativeSequence& seq, int s, std::uint64_t N) {
  if (s < 1 || N < 1) throw DomainError("dirichlet_direct needs s >= 1 and N >= 1");
  if (!seq.nontrivial()) {
    if (s < 2) throw DomainError("zeta has a pole at s=1");
    double sum = 0.0;
    for (std::uint64_t n = N; n >= 1; --n) sum += std::pow(static_cast<double>(n), -s);
    const double tail = std::pow(static_cast<double>(N), 1.0 - s) / (s - 1);
    return {sum, tail + 2.0 * kUnitRoundoff * static_cast<double>(N) * sum, "direct"};
  }

  // F(s) = sum_{n>=1} A_n (n^{-s} - (n+1)^{-s}), A_n = delta_1 + ... + delta_n.
  SignStream stream(seq.pattern(), 1);
  std::int64_t a = 0;
  double sum = 0.0;
  double compensation = 0.0;
  double abs_mass = 0.0;
  double current = 1.0;  // n^{-s}
  for (std::uint64_t n = 1; n <= N; ++n) {
    a += stream.sign();
    stream.advance();
    const double next = std::pow(static_cast<double>(n + 1), -s);
    const double term = static_cast<double>(a) * (current - next);
    const double t = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    abs_mass += std::abs(term);
    current = next;
  }
  sum += compensation;

  // Tail over n > N, grouped by the q-block of n+1: for n+1 <= q^k,
  // |A_n| <= geometric_bound(q,k) + 1, and the differences telescope.
  const double q = seq.q();
  int k = 0;
  double qk = 1.0;
  while (qk < static_cast<double>(N) + 2.0) {
    qk *= q;
    ++k;
  }
  double g = 0.0;
  for (int i = 0; i <= k; ++i) g += std::pow(q - 2.0, i);
  double tail = 0.0;
  double start = static_cast<double>(N) + 1.0;  // first n of the block
  for (int guard = 0; guard < 4000; ++guard) {
    const double contribution = (g + 1.0) * std::pow(start, -s);
    tail += contribution;
    if (contribution < 1e-6 * tail || contribution < 1e-300) break;
    start = qk;  // next block: n+1 in (q^k, q^{k+1}]
    qk *= q;
    ++k;
    g += std::pow(q - 2.0, k);
  }
  return {sum, tail + 4.0 * kUnitRoundoff * abs_mass + kUnitRoundoff * std::abs(sum), "abel"};
}

}  // namespace gtmprod
