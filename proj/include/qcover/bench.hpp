#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qcover/covercheck.hpp"
#include "qcover/instance.hpp"

namespace qcover {

inline constexpr std::string_view kVersion = "0.3.0";

enum class Algorithm { backward, qcover, trapcegar, qreach_only };

std::string to_string(Algorithm a);
/// Throws std::invalid_argument on an unknown name.
Algorithm parse_algorithm(std::string_view name);

struct CheckOptions {
  Config config;  // c, k, minbottle, timeout; prune is set from the algorithm
};

struct Report {
  std::string name;
  Algorithm algorithm = Algorithm::qcover;
  /// "safe", "unsafe", "unknown" or, in bench rows only, "error".
  std::string verdict;
  std::string detail;  // unknown reason or error message
  RunStats stats;
};

/// Runs one algorithm on one instance. trapcegar answers safe only when the
/// trap-refined state equation refutes every target and unknown otherwise;
/// qreach-only answers safe when no target is Q-coverable and unknown otherwise.
Report check(const Instance& inst, Algorithm algo, const CheckOptions& options = {});

/// Process exit code for a verdict: 0 safe, 2 unsafe, 3 unknown.
int exit_code(const Report& r);

/// "qcover-report/1". Timing fields are omitted when include_timing is false.
nlohmann::ordered_json to_json(const Report& r, bool include_timing = true);

/// Cover query of the net at m0 conjoined with "x equals one of the targets",
/// as an SMT-LIB2 script.
std::string emit_query(const Instance& inst);

struct BenchOptions {
  std::vector<Algorithm> algorithms{Algorithm::backward, Algorithm::qcover};
  CheckOptions check;
  std::size_t jobs = 1;
};

/// Expands directories (non-recursively) and sorts, giving the row order.
std::vector<std::string> collect_instances(const std::vector<std::string>& inputs);

/// One report per (file, algorithm), files outermost, in input order.
/// Unreadable or malformed files yield rows with verdict "error".
std::vector<Report> bench(const std::vector<std::string>& files, const BenchOptions& options);

std::string csv_header();
/// name,algo,verdict,wall_ms,solver_ms,iterations,pruned_total,pruned_pct.
/// Without timing the two time columns are left empty; error rows leave
/// every numeric column empty.
std::string csv_row(const Report& r, bool include_timing = true);
/// "qcover-bench/1" document wrapping every row report.
nlohmann::ordered_json bench_json(const std::vector<Report>& rows, bool include_timing = true);

}  // namespace qcover
