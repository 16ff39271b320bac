#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "sslp/io.hpp"

namespace sslp {

struct CliOptions {
  std::string command;
  std::string instance = "-";
  std::uint64_t seed = 0;
  /// Worker-count hint; every command currently runs on one thread.
  unsigned threads = 1;
  std::optional<long> precision_bits;
  int max_n = 10;
  /// First-stage point as comma-separated rationals; falls back to
  /// metadata.x of the instance.
  std::optional<std::string> x;
  std::string epsilon = "1/1000000";
  std::uint64_t samples = 100000;
  /// count-is: area | brute | both
  std::string mode = "area";
  /// bisect-expectation: envelope | program
  std::string oracle = "envelope";
  /// expected-recourse: automatic | volume-dp | triangulation
  std::string backend = "automatic";
  /// Dyadic precision of the rationalized gadget program (0: 4n + 40).
  int rational_bits = 0;
  bool timings = false;

  // generate
  /// graph | integer-system | newsvendor | graph-sslp
  std::string type = "graph";
  int n = 4;
  std::string edge_probability = "1/2";
  std::size_t m = 2;
  std::size_t d = 2;
  long bound = 3;
  std::string cost = "1/4";
};

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_domain = 1, exit_malformed = 2, exit_schema = 3 };

/// Runs one command and returns its report. Library errors propagate.
Json execute(const CliOptions& options, const InstanceFile& instance);

/// Seeded instance generators behind `generate`.
InstanceFile generate(const CliOptions& options);

/// Parses argv, runs the command and prints the report (or an error
/// object) as JSON on `out`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace sslp
