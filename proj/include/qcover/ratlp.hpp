#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcover/rational.hpp"
#include "qcover/simplex.hpp"

namespace qcover {

enum class Relation { eq, ge, gt };

struct LinearRow {
  std::vector<std::pair<std::size_t, Rational>> coeffs;
  Relation relation = Relation::ge;
  Rational rhs;
};

/// Rows over non-negative variables 0..num_variables-1.
class LinearSystem {
 public:
  LinearSystem() = default;
  explicit LinearSystem(std::size_t num_variables) : num_variables_(num_variables) {}

  std::size_t num_variables() const { return num_variables_; }
  std::size_t add_variable() { return num_variables_++; }
  const std::vector<LinearRow>& rows() const { return rows_; }

  /// Merges repeated ids, drops zero coefficients, canonicalizes rationals.
  /// Throws std::invalid_argument on an unknown variable id.
  void add_row(std::vector<std::pair<std::size_t, Rational>> coeffs, Relation relation,
               Rational rhs);

 private:
  std::size_t num_variables_ = 0;
  std::vector<LinearRow> rows_;
};

/// Either a witness over the variables or Farkas multipliers over the rows.
struct Feasibility {
  bool feasible = false;
  std::vector<Rational> witness;
  std::vector<Rational> certificate;
};

enum class TableauKind { automatic, dense, sparse };

struct LpOptions {
  simplex::PivotRule pivot = simplex::PivotRule::bland;
  TableauKind tableau = TableauKind::automatic;
  /// Verify every answer with check_certificate and throw std::logic_error on
  /// a failure.
  bool audit = true;
};

/// Largest total variable count (structural + slack) handled densely.
inline constexpr std::size_t kDenseTableauLimit = 64;

Feasibility feasible(const LinearSystem& sys, const LpOptions& options = {});

/// x(var) relation value, for a structural variable.
struct VariableBound {
  std::size_t var;
  Relation relation;
  Rational value;
};

/// A fixed system queried repeatedly with extra variable bounds. The tableau
/// is built once and stays warm between queries, so a query that only adds a
/// bound usually needs a handful of pivots. Answers are audited like
/// feasible(); certificates index the base rows followed by the extra bounds.
class IncrementalLp {
 public:
  explicit IncrementalLp(LinearSystem base, const LpOptions& options = {});
  ~IncrementalLp();
  IncrementalLp(IncrementalLp&&) noexcept;
  IncrementalLp& operator=(IncrementalLp&&) noexcept;

  Feasibility feasible_with(std::span<const VariableBound> extra = {});
  const LinearSystem& base() const { return base_; }

 private:
  struct Engine;
  LinearSystem base_;
  LpOptions options_;
  std::unique_ptr<Engine> engine_;
};

/// True iff the witness satisfies every row (strict rows strictly) or the
/// certificate combines the rows into 0 >= positive / 0 > 0. Throws
/// std::invalid_argument on a dimension mismatch.
bool check_certificate(const LinearSystem& sys, const Feasibility& f);

struct AuditCounters {
  std::size_t checked = 0;
  std::size_t failed = 0;
};
/// Process-wide count of self-audits performed by feasible().
AuditCounters audit_counters();

}  // namespace qcover
