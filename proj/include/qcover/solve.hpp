#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "qcover/formula.hpp"
#include "qcover/smt.hpp"

namespace qcover {

enum class SolveStatus { sat, unsat, unknown };

struct SolveResult {
  SolveStatus status = SolveStatus::unknown;
  /// Exact model on sat, checked against the formula by substitution. Order
  /// variables are renumbered to small integers when that keeps it a model.
  std::map<Var, Rational> model;
};

struct SolveStats {
  std::size_t queries = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unknown = 0;
  std::size_t blocking_clauses = 0;
  smt::Stats core;
  double seconds = 0;
};

/// A formula plus a stack of blocking clauses, answering queries that fix
/// every free variable.
class SolveContext {
 public:
  explicit SolveContext(Formula base);

  /// Throws std::invalid_argument when a free variable is unbound or a
  /// binding names a variable that is not free.
  SolveResult solve(const std::map<Var, Rational>& bindings);

  /// Conjoins ∨_p x(p) < v(p), excluding every x ≥ v.
  void add_blocking(const DiscreteMarking& v);

  /// Scopes for blocking clauses; pop discards those added since the matching
  /// push and rebuilds the search state.
  void push();
  void pop();

  void set_deadline(std::optional<smt::Clock::time_point> deadline) { deadline_ = deadline; }

  /// The base formula conjoined with the active blocking clauses.
  Formula current() const;
  SolveStats stats() const;
  std::size_t scope_depth() const { return marks_.size(); }

 private:
  void rebuild();

  Formula base_;
  std::vector<Var> free_;
  std::vector<Formula> blocking_;
  std::vector<std::size_t> marks_;
  std::unique_ptr<smt::Solver> solver_;
  smt::Stats retired_;  // counters of solvers discarded by pop
  SolveStats stats_;
  std::optional<smt::Clock::time_point> deadline_;
};

/// Renumbers each order-variable family to 0 and consecutive positive
/// integers, preserving the order between variables of the same family.
std::map<Var, Rational> normalize_order_vars(std::map<Var, Rational> model);

}  // namespace qcover
