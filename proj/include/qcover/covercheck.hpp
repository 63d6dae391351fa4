#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcover/instance.hpp"
#include "qcover/upward.hpp"

namespace qcover {

enum class Rounding { floor, ceil };

struct Config {
  bool use_minbottle = true;
  Natural c = 10;
  Natural k = 5;  // must be >= 1
  Rounding rounding = Rounding::floor;
  std::optional<std::size_t> max_iterations;
  std::optional<std::chrono::milliseconds> timeout;
  /// Only read by run(): selects backward_cover_q over backward_cover.
  bool prune = true;
  /// Re-check every pruned element with the Q-coverability procedure and
  /// count disagreements in RunStats::audit_failures.
  bool audit_pruned = false;
  /// Called with M after every completed iteration.
  std::function<void(const Basis&)> observer;
};

/// Throws std::invalid_argument when k = 0.
void validate(const Config& cfg);

enum class VerdictKind { safe, unsafe, unknown };

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  std::string reason;  // "timeout" or "iteration-cap" when unknown

  static Verdict safe() { return {VerdictKind::safe, {}}; }
  static Verdict unsafe() { return {VerdictKind::unsafe, {}}; }
  static Verdict unknown(std::string why) { return {VerdictKind::unknown, std::move(why)}; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string to_string(VerdictKind kind);

struct IterationStats {
  std::size_t before = 0;    // |B| before pruning
  std::size_t pruned = 0;    // |D|
  std::size_t deferred = 0;  // held back by minbottle
  std::size_t basis = 0;     // |M| after minimization
};

struct RunStats {
  std::string algorithm;
  Verdict verdict;
  std::size_t iterations = 0;
  std::vector<IterationStats> per_iteration;
  bool rejected_upfront = false;  // decided by the Q-coverability check alone
  std::size_t solver_queries = 0;
  std::size_t blocking_clauses = 0;
  std::size_t audited = 0;
  std::size_t audit_failures = 0;
  double solver_seconds = 0;
  double wall_seconds = 0;

  std::size_t pruned_total() const;
  std::size_t before_total() const;
  /// 100·Σ|D| / Σ|B|, 0 when nothing was examined.
  double pruned_pct() const;
};

/// Schema "qcover-stats/1". Timing fields are left out when include_timing
/// is false so that reports of repeated runs compare equal byte for byte.
nlohmann::ordered_json to_json(const RunStats& stats, bool include_timing = true);

struct RunResult {
  Verdict verdict;
  RunStats stats;
  Basis basis;  // M when the loop stopped
};

/// Classical backward coverability. Unsafe iff some target is coverable.
RunResult backward_cover(const PetriNet& net, const DiscreteMarking& m0,
                         std::span<const DiscreteMarking> targets, const Config& cfg = {});
/// Backward coverability where every new basis element that is not
/// Q-coverable is discarded before it enters M.
RunResult backward_cover_q(const PetriNet& net, const DiscreteMarking& m0,
                           std::span<const DiscreteMarking> targets, const Config& cfg = {});

RunResult backward_cover(const Instance& inst, const Config& cfg = {});
RunResult backward_cover_q(const Instance& inst, const Config& cfg = {});
/// Dispatches on cfg.prune.
RunResult run(const Instance& inst, const Config& cfg = {});

/// The min(|B|, c + |B|/k) elements of B with the smallest sum-norm, ties
/// broken lexicographically. Output is sorted by (sum-norm, lex).
std::vector<DiscreteMarking> minbottle(std::span<const DiscreteMarking> b, Natural c, Natural k,
                                       Rounding rounding = Rounding::floor);

}  // namespace qcover
