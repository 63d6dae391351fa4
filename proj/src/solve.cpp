#include "qcover/solve.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qcover {

SolveContext::SolveContext(Formula base) : base_(std::move(base)), free_(base_.free_vars()) { rebuild(); }

void SolveContext::rebuild() {
  if (solver_) {
    const auto& s = solver_->stats();
    retired_.solves += s.solves;
    retired_.decisions += s.decisions;
    retired_.conflicts += s.conflicts;
    retired_.theory_checks += s.theory_checks;
    retired_.theory_conflicts += s.theory_conflicts;
    retired_.learnt += s.learnt;
  }
  solver_ = std::make_unique<smt::Solver>();
  solver_->assert_formula(base_);
  for (const auto& b : blocking_) solver_->assert_formula(b);
}

void SolveContext::add_blocking(const DiscreteMarking& v) {
  std::vector<Formula> options;
  for (PlaceIndex p = 0; p < v.size(); ++p) {
    // x(p) < 0 can never hold.
    if (v[p] == 0) continue;
    options.push_back(Formula::atom({{{Var{VarKind::x, p}, Rational(1)}}, Cmp::lt, to_rational(v[p])}));
  }
  Formula clause = Formula::disj(std::move(options));
  blocking_.push_back(clause);
  ++stats_.blocking_clauses;
  solver_->assert_formula(clause);
}

void SolveContext::push() { marks_.push_back(blocking_.size()); }

void SolveContext::pop() {
  if (marks_.empty()) throw std::logic_error("SolveContext::pop without push");
  blocking_.erase(blocking_.begin() + static_cast<std::ptrdiff_t>(marks_.back()), blocking_.end());
  marks_.pop_back();
  rebuild();
}

Formula SolveContext::current() const {
  if (blocking_.empty()) return base_;
  std::vector<Formula> parts{base_};
  parts.insert(parts.end(), blocking_.begin(), blocking_.end());
  return Formula::conj(std::move(parts));
}

SolveStats SolveContext::stats() const {
  SolveStats out = stats_;
  const auto& s = solver_->stats();
  out.core = retired_;
  out.core.solves += s.solves;
  out.core.decisions += s.decisions;
  out.core.conflicts += s.conflicts;
  out.core.theory_checks += s.theory_checks;
  out.core.theory_conflicts += s.theory_conflicts;
  out.core.learnt += s.learnt;
  return out;
}

std::map<Var, Rational> normalize_order_vars(std::map<Var, Rational> model) {
  for (VarKind family : {VarKind::zf, VarKind::zb}) {
    std::set<Rational> values;
    for (const auto& [v, q] : model)
      if (v.kind == family && q > 0) values.insert(q);
    std::map<Rational, long> rank;
    long next = 1;
    for (const auto& q : values) rank[q] = next++;
    for (auto& [v, q] : model)
      if (v.kind == family && q > 0) q = rank[q];
  }
  return model;
}

SolveResult SolveContext::solve(const std::map<Var, Rational>& bindings) {
  for (const auto& v : free_)
    if (!bindings.contains(v)) throw std::invalid_argument("SolveContext::solve: unbound free variable");
  for (const auto& [v, q] : bindings) {
    if (!std::binary_search(free_.begin(), free_.end(), v))
      throw std::invalid_argument("SolveContext::solve: binding for a variable that is not free");
    if (q < 0) throw std::invalid_argument("SolveContext::solve: negative binding");
  }

  const auto start = smt::Clock::now();
  ++stats_.queries;
  SolveResult result;
  switch (solver_->solve(bindings, deadline_)) {
    case smt::Status::unsat:
      result.status = SolveStatus::unsat;
      ++stats_.unsat;
      break;
    case smt::Status::unknown:
      result.status = SolveStatus::unknown;
      ++stats_.unknown;
      break;
    case smt::Status::sat: {
      result.status = SolveStatus::sat;
      ++stats_.sat;
      std::map<Var, Rational> model = solver_->model();
      for (const auto& v : current().all_vars()) model.try_emplace(v, 0);
      const Formula f = current();
      std::map<Var, Rational> tidy = normalize_order_vars(model);
      if (holds(f, tidy))
        result.model = std::move(tidy);
      else if (holds(f, model))
        result.model = std::move(model);
      else
        throw std::logic_error("SolveContext::solve: model fails substitution check");
      break;
    }
  }
  stats_.seconds += std::chrono::duration<double>(smt::Clock::now() - start).count();
  return result;
}

}  // namespace qcover
