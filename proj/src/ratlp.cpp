#include "qcover/ratlp.hpp"

#include <atomic>
#include <map>
#include <optional>
#include <stdexcept>

namespace qcover {

namespace {

std::atomic<std::size_t> g_checked{0};
std::atomic<std::size_t> g_failed{0};

template <class Row>
std::optional<simplex::Explanation> assert_relation(simplex::Simplex<Row>& lp, simplex::Var v,
                                                    Relation rel, const Rational& rhs,
                                                    std::int64_t reason) {
  switch (rel) {
    case Relation::eq:
      if (auto c = lp.assert_lower(v, DeltaRational(rhs), reason)) return c;
      return lp.assert_upper(v, DeltaRational(rhs), reason);
    case Relation::ge:
      return lp.assert_lower(v, DeltaRational(rhs), reason);
    case Relation::gt:
      return lp.assert_lower(v, DeltaRational(rhs, 1), reason);
  }
  return std::nullopt;
}

/// Structural variables with x >= 0, then one slack per row carrying the
/// row's bound. Returns a conflict found while asserting.
template <class Row>
std::optional<simplex::Explanation> load(simplex::Simplex<Row>& lp, const LinearSystem& sys) {
  for (std::size_t j = 0; j < sys.num_variables(); ++j) {
    auto v = lp.add_variable();
    lp.assert_lower(v, DeltaRational(0), simplex::kNoReason);
  }
  std::optional<simplex::Explanation> conflict;
  for (std::size_t k = 0; k < sys.rows().size(); ++k) {
    const LinearRow& row = sys.rows()[k];
    simplex::Var s = lp.add_row(row.coeffs);
    auto c = assert_relation(lp, s, row.relation, row.rhs, static_cast<std::int64_t>(k));
    if (c && !conflict) conflict = std::move(c);
  }
  return conflict;
}

template <class Row>
Feasibility read_out(simplex::Simplex<Row>& lp, std::size_t num_variables, std::size_t num_rows,
                     const std::optional<simplex::Explanation>& conflict) {
  Feasibility out;
  if (!conflict) {
    out.feasible = true;
    const Rational delta = lp.concrete_delta();
    out.witness.reserve(num_variables);
    for (std::size_t j = 0; j < num_variables; ++j) out.witness.push_back(lp.value(j).at(delta));
    return out;
  }
  out.certificate.assign(num_rows, Rational(0));
  for (const auto& e : *conflict) {
    if (e.reason == simplex::kNoReason) continue;  // x >= 0
    Rational& lambda = out.certificate[static_cast<std::size_t>(e.reason)];
    if (e.upper)
      lambda -= e.weight;
    else
      lambda += e.weight;
  }
  return out;
}

template <class Row>
Feasibility solve_with(const LinearSystem& sys, simplex::PivotRule rule) {
  simplex::Simplex<Row> lp(rule);
  auto conflict = load(lp, sys);
  if (!conflict) conflict = lp.check();
  return read_out(lp, sys.num_variables(), sys.rows().size(), conflict);
}

void audit(const LinearSystem& sys, const Feasibility& f) {
  ++g_checked;
  if (!check_certificate(sys, f)) {
    ++g_failed;
    throw std::logic_error(f.feasible ? "LP witness failed substitution check"
                                      : "LP infeasibility certificate failed validation");
  }
}

Rational evaluate(const LinearRow& row, const std::vector<Rational>& x) {
  Rational sum = 0;
  for (const auto& [j, q] : row.coeffs) sum += q * x[j];
  return sum;
}

}  // namespace

void LinearSystem::add_row(std::vector<std::pair<std::size_t, Rational>> coeffs,
                           Relation relation, Rational rhs) {
  std::map<std::size_t, Rational> merged;
  for (auto& [j, q] : coeffs) {
    if (j >= num_variables_) throw std::invalid_argument("row references unknown variable");
    merged[j] += q;
  }
  LinearRow row;
  row.relation = relation;
  rhs.canonicalize();
  row.rhs = std::move(rhs);
  for (auto& [j, q] : merged) {
    q.canonicalize();
    if (q != 0) row.coeffs.emplace_back(j, q);
  }
  rows_.push_back(std::move(row));
}

Feasibility feasible(const LinearSystem& sys, const LpOptions& options) {
  TableauKind kind = options.tableau;
  if (kind == TableauKind::automatic)
    kind = sys.num_variables() + sys.rows().size() <= kDenseTableauLimit ? TableauKind::dense
                                                                          : TableauKind::sparse;
  Feasibility f = kind == TableauKind::dense
                      ? solve_with<simplex::DenseRow>(sys, options.pivot)
                      : solve_with<simplex::SparseRow>(sys, options.pivot);
  if (options.audit) audit(sys, f);
  return f;
}

struct IncrementalLp::Engine {
  explicit Engine(simplex::PivotRule rule) : lp(rule) {}
  simplex::Simplex<simplex::SparseRow> lp;
  std::optional<simplex::Explanation> base_conflict;
};

IncrementalLp::IncrementalLp(LinearSystem base, const LpOptions& options)
    : base_(std::move(base)), options_(options), engine_(std::make_unique<Engine>(options.pivot)) {
  engine_->base_conflict = load(engine_->lp, base_);
}

IncrementalLp::~IncrementalLp() = default;
IncrementalLp::IncrementalLp(IncrementalLp&&) noexcept = default;
IncrementalLp& IncrementalLp::operator=(IncrementalLp&&) noexcept = default;

Feasibility IncrementalLp::feasible_with(std::span<const VariableBound> extra) {
  auto& lp = engine_->lp;
  const std::size_t rows = base_.rows().size();
  const std::size_t mark = lp.checkpoint();
  std::optional<simplex::Explanation> conflict = engine_->base_conflict;
  for (std::size_t i = 0; i < extra.size() && !conflict; ++i) {
    if (extra[i].var >= base_.num_variables())
      throw std::invalid_argument("bound references unknown variable");
    Rational value = extra[i].value;
    value.canonicalize();
    conflict = assert_relation(lp, extra[i].var, extra[i].relation, value,
                               static_cast<std::int64_t>(rows + i));
  }
  if (!conflict) conflict = lp.check();
  Feasibility f = read_out(lp, base_.num_variables(), rows + extra.size(), conflict);
  lp.rollback(mark);
  if (options_.audit) {
    LinearSystem full = base_;
    for (const auto& b : extra) full.add_row({{b.var, Rational(1)}}, b.relation, b.value);
    audit(full, f);
  }
  return f;
}

bool check_certificate(const LinearSystem& sys, const Feasibility& f) {
  const auto& rows = sys.rows();
  if (f.feasible) {
    if (f.witness.size() != sys.num_variables())
      throw std::invalid_argument("witness dimension mismatch");
    for (const auto& x : f.witness)
      if (x < 0) return false;
    for (const auto& row : rows) {
      Rational lhs = evaluate(row, f.witness);
      switch (row.relation) {
        case Relation::eq:
          if (lhs != row.rhs) return false;
          break;
        case Relation::ge:
          if (lhs < row.rhs) return false;
          break;
        case Relation::gt:
          if (lhs <= row.rhs) return false;
          break;
      }
    }
    return true;
  }

  if (f.certificate.size() != rows.size())
    throw std::invalid_argument("certificate dimension mismatch");
  std::vector<Rational> combined(sys.num_variables());
  Rational rhs = 0;
  bool strict = false;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Rational& lambda = f.certificate[k];
    if (lambda == 0) continue;
    if (rows[k].relation != Relation::eq && lambda < 0) return false;
    if (rows[k].relation == Relation::gt) strict = true;
    for (const auto& [j, q] : rows[k].coeffs) combined[j] += lambda * q;
    rhs += lambda * rows[k].rhs;
  }
  // With x >= 0 the combined left-hand side is <= 0.
  for (const auto& c : combined)
    if (c > 0) return false;
  return rhs > 0 || (rhs == 0 && strict);
}

AuditCounters audit_counters() { return {g_checked.load(), g_failed.load()}; }

}  // namespace qcover
