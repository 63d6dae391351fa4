#include "qcover/smt.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

namespace qcover::smt {

namespace {

constexpr std::size_t kNotInHeap = static_cast<std::size_t>(-1);

std::atomic<std::size_t> g_checked{0};
std::atomic<std::size_t> g_failed{0};

// 1,1,2,1,1,2,4,1,1,2,1,1,2,4,8,...
double luby(std::size_t i) {
  std::size_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i = i % size;
  }
  return static_cast<double>(std::size_t{1} << seq);
}

Cmp negate(Cmp c) {
  switch (c) {
    case Cmp::ge: return Cmp::lt;
    case Cmp::gt: return Cmp::le;
    case Cmp::le: return Cmp::gt;
    case Cmp::lt: return Cmp::ge;
    case Cmp::eq: return Cmp::eq;  // handled by the caller
  }
  return c;
}

Cmp flip(Cmp c) {
  switch (c) {
    case Cmp::ge: return Cmp::le;
    case Cmp::gt: return Cmp::lt;
    case Cmp::le: return Cmp::ge;
    case Cmp::lt: return Cmp::gt;
    case Cmp::eq: return Cmp::eq;
  }
  return c;
}

bool compare(const Rational& lhs, Cmp c, const Rational& rhs) {
  switch (c) {
    case Cmp::eq: return lhs == rhs;
    case Cmp::ge: return lhs >= rhs;
    case Cmp::gt: return lhs > rhs;
    case Cmp::le: return lhs <= rhs;
    case Cmp::lt: return lhs < rhs;
  }
  return false;
}

}  // namespace

Solver::Solver() {
  true_lit_ = mk(new_bool(), false);
  assign(true_lit_, {});
}

std::uint32_t Solver::new_bool() {
  auto v = static_cast<std::uint32_t>(assigns_.size());
  assigns_.push_back(Value::u);
  levels_.push_back(0);
  reasons_.emplace_back();
  atom_info_.emplace_back();
  phase_.push_back(false);
  activity_.push_back(0);
  heap_index_.push_back(kNotInHeap);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

simplex::Var Solver::column_of(const Var& v) {
  auto it = columns_.find(v);
  if (it != columns_.end()) return it->second;
  simplex::Var c = tableau_.add_variable();
  tableau_.assert_lower(c, DeltaRational{}, simplex::kNoReason);
  columns_.emplace(v, c);
  if (atoms_of_column_.size() <= c) atoms_of_column_.resize(c + 1);
  return c;
}

Solver::Lit Solver::bound_lit(simplex::Var column, const DeltaRational& threshold) {
  auto key = std::make_pair(column, threshold);
  auto it = atoms_by_bound_.find(key);
  if (it != atoms_by_bound_.end()) return mk(it->second, false);
  std::uint32_t v = new_bool();
  atom_info_[v] = AtomInfo{column, threshold};
  if (atoms_of_column_.size() <= column) atoms_of_column_.resize(column + 1);
  atoms_of_column_[column].push_back(v);
  atoms_by_bound_.emplace(std::move(key), v);
  return mk(v, false);
}

// Literal for sum(terms) cmp rhs with cmp != eq.
Solver::Lit Solver::atom_lit(const Atom& a) {
  std::map<Var, Rational> merged;
  for (const auto& t : a.terms) merged[t.var] += t.coeff;
  std::vector<std::pair<Var, Rational>> terms;
  for (auto& [v, q] : merged)
    if (q != 0) terms.emplace_back(v, q);
  if (terms.empty()) return compare(Rational(0), a.cmp, a.rhs) ? true_lit_ : neg(true_lit_);

  // Normalize so the leading coefficient is 1.
  const Rational lead = terms.front().second;
  Cmp cmp = lead < 0 ? flip(a.cmp) : a.cmp;
  const Rational k = a.rhs / lead;
  simplex::Var column;
  if (terms.size() == 1) {
    column = column_of(terms.front().first);
  } else {
    std::vector<std::pair<simplex::Var, Rational>> key;
    for (auto& [v, q] : terms) key.emplace_back(column_of(v), Rational(q / lead));
    std::sort(key.begin(), key.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    auto it = rows_.find(key);
    if (it == rows_.end()) {
      simplex::Var slack = tableau_.add_row(key);
      slack_def_.emplace(slack, key);
      if (atoms_of_column_.size() <= slack) atoms_of_column_.resize(slack + 1);
      it = rows_.emplace(std::move(key), slack).first;
    }
    column = it->second;
  }
  switch (cmp) {
    case Cmp::ge: return bound_lit(column, {k, 0});
    case Cmp::gt: return bound_lit(column, {k, 1});
    case Cmp::le: return neg(bound_lit(column, {k, 1}));
    case Cmp::lt: return neg(bound_lit(column, {k, 0}));
    case Cmp::eq: break;
  }
  throw std::logic_error("atom_lit: equality must be split");
}

Solver::Lit Solver::encode(const Formula& f, bool negated) {
  auto& cache = gate_cache_[negated ? 1 : 0];
  if (auto it = cache.find(f.id()); it != cache.end()) return it->second;

  auto gate = [&](std::vector<Lit> lits, bool conjunction) -> Lit {
    const Lit absorbing = conjunction ? neg(true_lit_) : true_lit_;
    const Lit neutral = conjunction ? true_lit_ : neg(true_lit_);
    std::vector<Lit> kept;
    for (Lit l : lits) {
      if (l == absorbing) return absorbing;
      if (l != neutral) kept.push_back(l);
    }
    if (kept.empty()) return neutral;
    if (kept.size() == 1) return kept.front();
    Lit g = mk(new_bool(), false);
    if (conjunction) {
      for (Lit l : kept) add_clause({neg(g), l}, false);
    } else {
      kept.insert(kept.begin(), neg(g));
      add_clause(std::move(kept), false);
    }
    return g;
  };

  Lit out = true_lit_;
  switch (f.kind()) {
    case Formula::Kind::top:
      out = negated ? neg(true_lit_) : true_lit_;
      break;
    case Formula::Kind::bottom:
      out = negated ? true_lit_ : neg(true_lit_);
      break;
    case Formula::Kind::atom: {
      Atom a = f.as_atom();
      if (a.cmp == Cmp::eq) {
        Atom lo = a, hi = a;
        lo.cmp = negated ? Cmp::lt : Cmp::ge;
        hi.cmp = negated ? Cmp::gt : Cmp::le;
        out = gate({atom_lit(lo), atom_lit(hi)}, !negated);
      } else {
        if (negated) a.cmp = negate(a.cmp);
        out = atom_lit(a);
      }
      break;
    }
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      std::vector<Lit> lits;
      for (const auto& c : f.children()) lits.push_back(encode(c, negated));
      out = gate(std::move(lits), (f.kind() == Formula::Kind::conj) != negated);
      break;
    }
    case Formula::Kind::implies: {
      Lit a = encode(f.children()[0], !negated);
      Lit b = encode(f.children()[1], negated);
      out = gate({a, b}, negated);
      break;
    }
    case Formula::Kind::exists:
      if (negated) throw std::invalid_argument("smt: existential under negation");
      out = encode(f.children()[0], false);
      break;
  }
  cache.emplace(f.id(), out);
  return out;
}

void Solver::assert_top(const Formula& f, bool negated) {
  switch (f.kind()) {
    case Formula::Kind::conj:
    case Formula::Kind::disj:
      if ((f.kind() == Formula::Kind::conj) != negated) {
        for (const auto& c : f.children()) assert_top(c, negated);
        return;
      }
      break;
    case Formula::Kind::implies:
      if (negated) {
        assert_top(f.children()[0], false);
        assert_top(f.children()[1], true);
        return;
      }
      break;
    case Formula::Kind::exists:
      if (!negated) {
        assert_top(f.children()[0], false);
        return;
      }
      break;
    default:
      break;
  }
  add_clause({encode(f, negated)}, false);
}

void Solver::assert_formula(const Formula& f) {
  backtrack(0);
  assert_top(f, false);
}

void Solver::add_clause(std::vector<Lit> lits, bool learnt) {
  if (!learnt) {
    // Only called at level 0: simplify against fixed literals.
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i]) && !sign(lits[i])) return;
      if (value(lits[i]) == Value::t) return;
      if (value(lits[i]) == Value::u) kept.push_back(lits[i]);
    }
    lits = std::move(kept);
    if (lits.empty()) {
      inconsistent_ = true;
      return;
    }
    if (lits.size() == 1) {
      assign(lits[0], {});
      return;
    }
  }
  auto index = static_cast<std::uint32_t>(clauses_.size());
  watches_[lits[0]].push_back(index);
  watches_[lits[1]].push_back(index);
  clauses_.push_back(Clause{std::move(lits), learnt, false, 0});
  if (learnt) {
    ++learnt_count_;
    ++stats_.learnt;
  }
}

Solver::Value Solver::value(Lit l) const {
  Value v = assigns_[var(l)];
  if (v == Value::u) return v;
  return (v == Value::t) != sign(l) ? Value::t : Value::f;
}

void Solver::assign(Lit l, Reason r) {
  const std::uint32_t v = var(l);
  assigns_[v] = sign(l) ? Value::f : Value::t;
  levels_[v] = level();
  reasons_[v] = r;
  trail_.push_back(l);
}

void Solver::new_level() {
  level_marks_.push_back(trail_.size());
  tableau_marks_.push_back(tableau_.checkpoint());
}

void Solver::backtrack(std::size_t target) {
  if (level() <= target) return;
  for (std::size_t i = trail_.size(); i-- > level_marks_[target];) {
    const std::uint32_t v = var(trail_[i]);
    phase_[v] = !sign(trail_[i]);
    assigns_[v] = Value::u;
    reasons_[v] = {};
    if (heap_index_[v] == kNotInHeap) heap_insert(v);
  }
  trail_.resize(level_marks_[target]);
  qhead_ = trail_.size();
  tableau_.rollback(tableau_marks_[target]);
  level_marks_.resize(target);
  tableau_marks_.resize(target);
}

// Each entry names a bound: a literal's threshold, or x >= 0 for an original
// column. Their weighted sum, with slack rows expanded, must cancel every
// column and leave 0 >= something positive.
bool Solver::valid_farkas(const simplex::Explanation& e) const {
  std::map<simplex::Var, Rational> combined;
  DeltaRational rhs;
  for (const auto& entry : e) {
    if (entry.weight <= 0) return false;
    DeltaRational bound;
    if (entry.reason == simplex::kNoReason) {
      if (entry.upper || slack_def_.contains(entry.var)) return false;
    } else {
      const Lit p = static_cast<Lit>(entry.reason);
      const auto& info = atom_info_[var(p)];
      if (!info || info->column != entry.var || sign(p) != entry.upper) return false;
      bound = entry.upper ? info->threshold - DeltaRational{0, 1} : info->threshold;
    }
    const Rational s = entry.upper ? Rational(-entry.weight) : entry.weight;
    if (auto it = slack_def_.find(entry.var); it != slack_def_.end())
      for (const auto& [c, q] : it->second) combined[c] += s * q;
    else
      combined[entry.var] += s;
    rhs += s * bound;
  }
  for (const auto& [c, q] : combined)
    if (q != 0) return false;
  return rhs > DeltaRational{};
}

std::optional<std::vector<Solver::Lit>> Solver::theory_lits(const simplex::Explanation& e) const {
  ++g_checked;
  if (!valid_farkas(e)) {
    ++g_failed;
    throw std::logic_error("theory conflict is not a valid Farkas combination");
  }
  std::vector<Lit> out;
  for (const auto& entry : e)
    if (entry.reason != simplex::kNoReason) out.push_back(neg(static_cast<Lit>(entry.reason)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<std::vector<Solver::Lit>> Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const std::uint32_t pv = var(p);

    if (atom_info_[pv]) {
      const AtomInfo& info = *atom_info_[pv];
      const bool lower = !sign(p);
      auto clash = lower ? tableau_.assert_lower(info.column, info.threshold, p)
                         : tableau_.assert_upper(info.column, info.threshold - DeltaRational{0, 1}, p);
      if (clash) {
        ++stats_.theory_conflicts;
        return theory_lits(*clash);
      }
      // Other atoms on the same column that this bound decides.
      for (std::uint32_t b : atoms_of_column_[info.column]) {
        if (b == pv || assigns_[b] != Value::u) continue;
        const DeltaRational& tb = atom_info_[b]->threshold;
        if (lower && tb <= info.threshold)
          assign(mk(b, false), {Reason::Kind::implied, p});
        else if (!lower && tb >= info.threshold)
          assign(mk(b, true), {Reason::Kind::implied, p});
      }
    }

    const Lit falsified = neg(p);
    auto& ws = watches_[falsified];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      const std::uint32_t ci = ws[i++];
      Clause& c = clauses_[ci];
      if (c.deleted) continue;
      if (c.lits[0] == falsified) std::swap(c.lits[0], c.lits[1]);
      if (value(c.lits[0]) == Value::t) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != Value::f) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[c.lits[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c.lits[0]) == Value::f) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return c.lits;
      }
      assign(c.lits[0], {Reason::Kind::clause, ci});
    }
    ws.resize(j);
  }
  return std::nullopt;
}

std::vector<Solver::Lit> Solver::reason_lits(std::uint32_t v) const {
  const Reason& r = reasons_[v];
  if (r.kind == Reason::Kind::clause) return clauses_[r.index].lits;
  if (r.kind == Reason::Kind::implied) return {mk(v, assigns_[v] == Value::f), neg(r.index)};
  return {};
}

std::vector<Solver::Lit> Solver::analyze(std::vector<Lit> conflict, std::size_t& backjump) {
  std::vector<char> seen(assigns_.size(), 0);
  std::vector<Lit> out{0};
  std::size_t pending = 0;
  std::size_t index = trail_.size();
  std::optional<Lit> p;
  std::vector<Lit> lits = std::move(conflict);
  while (true) {
    for (Lit q : lits) {
      const std::uint32_t v = var(q);
      if (p && v == var(*p)) continue;
      if (seen[v] || levels_[v] == 0) continue;
      seen[v] = 1;
      bump(v);
      if (levels_[v] >= level())
        ++pending;
      else
        out.push_back(q);
    }
    do --index;
    while (!seen[var(trail_[index])]);
    p = trail_[index];
    seen[var(*p)] = 0;
    if (--pending == 0) break;
    const Reason& r = reasons_[var(*p)];
    if (r.kind == Reason::Kind::clause) clauses_[r.index].activity += clause_bump_;
    lits = reason_lits(var(*p));
  }
  out[0] = neg(*p);
  backjump = 0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (levels_[var(out[k])] > backjump) {
      backjump = levels_[var(out[k])];
      std::swap(out[1], out[k]);
    }
  }
  return out;
}

bool Solver::locked(std::size_t c) const {
  const Clause& cl = clauses_[c];
  const std::uint32_t v = var(cl.lits[0]);
  return assigns_[v] != Value::u && reasons_[v].kind == Reason::Kind::clause && reasons_[v].index == c;
}

void Solver::reduce_learnts() {
  std::vector<std::uint32_t> learnt;
  for (std::uint32_t c = 0; c < clauses_.size(); ++c)
    if (clauses_[c].learnt && !clauses_[c].deleted) learnt.push_back(c);
  std::sort(learnt.begin(), learnt.end(), [&](auto a, auto b) {
    return clauses_[a].activity < clauses_[b].activity || (clauses_[a].activity == clauses_[b].activity && a < b);
  });
  for (std::size_t i = 0; i < learnt.size() / 2; ++i) {
    Clause& c = clauses_[learnt[i]];
    if (c.lits.size() <= 2 || locked(learnt[i])) continue;
    c.deleted = true;
    c.lits.shrink_to_fit();
    --learnt_count_;
  }
}

Status Solver::solve(const std::map<Var, Rational>& assumptions,
                     std::optional<Clock::time_point> deadline) {
  ++stats_.solves;
  backtrack(0);
  if (inconsistent_) return Status::unsat;

  std::vector<Lit> assume;
  for (const auto& [v, k] : assumptions) {
    simplex::Var c = column_of(v);
    assume.push_back(bound_lit(c, {k, 0}));
    assume.push_back(neg(bound_lit(c, {k, 1})));
  }

  std::size_t restarts = 0, since_restart = 0, steps = 0;
  double restart_limit = 64 * luby(0);
  auto expired = [&] { return deadline && Clock::now() > *deadline; };

  while (true) {
    auto conflict = propagate();
    if (!conflict) {
      ++stats_.theory_checks;
      if (auto e = tableau_.check()) {
        ++stats_.theory_conflicts;
        conflict = theory_lits(*e);
      }
    }
    if (conflict) {
      ++stats_.conflicts;
      std::size_t top = 0;
      for (Lit l : *conflict) top = std::max(top, levels_[var(l)]);
      if (top == 0) {
        inconsistent_ = true;
        backtrack(0);
        return Status::unsat;
      }
      if (!assume.empty() && top <= 1) {
        backtrack(0);
        return Status::unsat;
      }
      if (top < level()) backtrack(top);
      std::size_t backjump = 0;
      std::vector<Lit> learnt = analyze(std::move(*conflict), backjump);
      backtrack(backjump);
      if (learnt.size() == 1) {
        assign(learnt[0], {});
      } else {
        auto index = static_cast<std::uint32_t>(clauses_.size());
        Lit asserting = learnt[0];
        add_clause(std::move(learnt), true);
        clauses_[index].activity = clause_bump_;
        assign(asserting, {Reason::Kind::clause, index});
      }
      bump_amount_ /= 0.95;
      clause_bump_ /= 0.999;
      if (++steps % 32 == 0 && expired()) {
        backtrack(0);
        return Status::unknown;
      }
      if (++since_restart >= restart_limit) {
        backtrack(0);
        since_restart = 0;
        restart_limit = 64 * luby(++restarts);
        if (learnt_count_ > 2000 + clauses_.size() / 2) reduce_learnts();
      }
      continue;
    }

    if (level() == 0 && !assume.empty()) {
      new_level();
      for (Lit a : assume) {
        if (value(a) == Value::f) {
          backtrack(0);
          return Status::unsat;
        }
        if (value(a) == Value::u) assign(a, {});
      }
      continue;
    }

    std::optional<std::uint32_t> next;
    while ((next = heap_pop()))
      if (assigns_[*next] == Value::u) break;
    if (!next) return Status::sat;
    ++stats_.decisions;
    if (++steps % 32 == 0 && expired()) {
      backtrack(0);
      return Status::unknown;
    }
    new_level();
    assign(mk(*next, !phase_[*next]), {});
  }
}

std::map<Var, Rational> Solver::model() const {
  const Rational delta = tableau_.concrete_delta();
  std::map<Var, Rational> out;
  for (const auto& [v, c] : columns_) out.emplace(v, tableau_.value(c).at(delta));
  return out;
}

void Solver::bump(std::uint32_t v) {
  activity_[v] += bump_amount_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    bump_amount_ *= 1e-100;
  }
  if (heap_index_[v] != kNotInHeap) heap_up(heap_index_[v]);
}

bool Solver::heap_less(std::uint32_t a, std::uint32_t b) const {
  return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
}

void Solver::heap_insert(std::uint32_t v) {
  heap_index_[v] = heap_.size();
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

std::optional<std::uint32_t> Solver::heap_pop() {
  if (heap_.empty()) return std::nullopt;
  std::uint32_t top = heap_.front();
  heap_index_[top] = kNotInHeap;
  heap_.front() = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_index_[heap_.front()] = 0;
    heap_down(0);
  }
  return top;
}

void Solver::heap_up(std::size_t i) {
  const std::uint32_t v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

void Solver::heap_down(std::size_t i) {
  const std::uint32_t v = heap_[i];
  while (true) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

CertificateCounters certificate_counters() { return {g_checked.load(), g_failed.load()}; }

}  // namespace qcover::smt
