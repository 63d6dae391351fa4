#pragma once

// Clause-learning search over linear rational arithmetic. Atoms become bound
// literals on simplex variables; Boolean structure is clausified with one-sided
// gates. Assumptions let the same instance answer many queries, so learnt
// clauses carry over between them.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qcover/formula.hpp"
#include "qcover/simplex.hpp"

namespace qcover::smt {

using Clock = std::chrono::steady_clock;

struct Stats {
  std::size_t solves = 0;
  std::size_t decisions = 0;
  std::size_t conflicts = 0;
  std::size_t theory_checks = 0;
  std::size_t theory_conflicts = 0;
  std::size_t learnt = 0;
};

enum class Status { sat, unsat, unknown };

/// Process-wide count of theory conflicts re-checked as Farkas combinations
/// of the bounds they name.
struct CertificateCounters {
  std::size_t checked = 0;
  std::size_t failed = 0;
};
CertificateCounters certificate_counters();

class Solver {
 public:
  Solver();

  /// Adds f as a permanent constraint. Binders must occur positively.
  void assert_formula(const Formula& f);

  /// Decides the asserted constraints together with var = value for every
  /// assumption. Returns unknown once the deadline passes.
  Status solve(const std::map<Var, Rational>& assumptions,
               std::optional<Clock::time_point> deadline = std::nullopt);

  /// Values of every arithmetic variable after a sat answer.
  std::map<Var, Rational> model() const;

  const Stats& stats() const { return stats_; }

 private:
  using Lit = std::uint32_t;  // 2*var + negated
  static Lit mk(std::uint32_t v, bool neg) { return 2 * v + (neg ? 1 : 0); }
  static std::uint32_t var(Lit l) { return l >> 1; }
  static bool sign(Lit l) { return l & 1; }
  static Lit neg(Lit l) { return l ^ 1; }

  enum class Value : std::int8_t { f = 0, t = 1, u = 2 };

  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
  };

  struct Reason {
    enum class Kind : std::uint8_t { none, clause, implied } kind = Kind::none;
    std::uint32_t index = 0;  // clause index or the implying literal
  };

  struct AtomInfo {
    simplex::Var column;
    DeltaRational threshold;  // the atom is column >= threshold
  };

  using Tableau = simplex::Simplex<simplex::SparseRow>;

  std::uint32_t new_bool();
  Lit atom_lit(const Atom& a);
  Lit bound_lit(simplex::Var column, const DeltaRational& threshold);
  simplex::Var column_of(const Var& v);
  Lit encode(const Formula& f, bool negated);
  void assert_top(const Formula& f, bool negated);
  void add_clause(std::vector<Lit> lits, bool learnt);

  Value value(Lit l) const;
  std::size_t level() const { return level_marks_.size(); }
  void assign(Lit l, Reason r);
  void new_level();
  void backtrack(std::size_t target);
  std::optional<std::vector<Lit>> propagate();
  std::optional<std::vector<Lit>> theory_lits(const simplex::Explanation& e) const;
  bool valid_farkas(const simplex::Explanation& e) const;
  std::vector<Lit> reason_lits(std::uint32_t v) const;
  std::vector<Lit> analyze(std::vector<Lit> conflict, std::size_t& backjump);
  bool locked(std::size_t c) const;
  void reduce_learnts();

  // Decision order.
  void bump(std::uint32_t v);
  void heap_insert(std::uint32_t v);
  std::optional<std::uint32_t> heap_pop();
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  bool heap_less(std::uint32_t a, std::uint32_t b) const;

  Tableau tableau_;
  std::map<Var, simplex::Var> columns_;
  std::map<std::vector<std::pair<simplex::Var, Rational>>, simplex::Var> rows_;
  std::unordered_map<simplex::Var, std::vector<std::pair<simplex::Var, Rational>>> slack_def_;
  std::map<std::pair<simplex::Var, DeltaRational>, std::uint32_t> atoms_by_bound_;
  std::vector<std::vector<std::uint32_t>> atoms_of_column_;
  std::unordered_map<const void*, Lit> gate_cache_[2];

  std::vector<Clause> clauses_;
  std::vector<std::vector<std::uint32_t>> watches_;  // per literal
  std::vector<Value> assigns_;
  std::vector<std::size_t> levels_;
  std::vector<Reason> reasons_;
  std::vector<std::optional<AtomInfo>> atom_info_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::vector<std::size_t> heap_index_;
  std::vector<std::uint32_t> heap_;
  double bump_amount_ = 1;
  double clause_bump_ = 1;

  std::vector<Lit> trail_;
  std::vector<std::size_t> level_marks_;   // trail size when each level opened
  std::vector<std::size_t> tableau_marks_;  // tableau checkpoint per level
  std::size_t qhead_ = 0;
  bool inconsistent_ = false;
  Lit true_lit_ = 0;
  std::size_t learnt_count_ = 0;
  Stats stats_;
};

}  // namespace qcover::smt
