#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gtmprod::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kRejected = 3,
  kNumeric = 4,
};

enum class OutputFormat { text, json, csv };

struct CliConfig {
  double tol = 1e-9;
  std::optional<std::filesystem::path> cache_dir;
  OutputFormat format = OutputFormat::text;
  int j_max = 16;
  unsigned long long n_max = 1'000'000;
};

/// key=value lines; '#' starts a comment. Unknown keys are errors.
CliConfig parse_config(const std::string& text, CliConfig base = {});
/// $GTMPROD_CONFIG, else $XDG_CONFIG_HOME/gtmprod/config, else
/// ~/.config/gtmprod/config.
std::filesystem::path default_config_path();

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gtmprod::cli
