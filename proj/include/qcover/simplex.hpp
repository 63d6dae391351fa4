#pragma once

// Bound-based exact simplex over DeltaRational values. Every row defines a
// basic variable as a linear combination of non-basic ones; feasibility is a
// question of bounds. Bounds can be tightened incrementally and rolled back to
// a checkpoint, which is what both the one-shot LP front end and the formula
// solver need.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qcover/rational.hpp"

namespace qcover::simplex {

using Var = std::size_t;
inline constexpr std::int64_t kNoReason = -1;

struct Bound {
  DeltaRational value;
  std::int64_t reason = kNoReason;
};

/// One bound taking part in an infeasibility explanation. Summing
/// weight * (x >= lower) resp. weight * (-x >= -upper) over all entries yields
/// 0 >= positive once the row identity is substituted.
struct ExplanationEntry {
  Var var;
  bool upper;
  Rational weight;
  std::int64_t reason;
};

using Explanation = std::vector<ExplanationEntry>;

enum class PivotRule { bland, greedy };

class DenseRow {
 public:
  const Rational* find(Var j) const {
    return (j < v_.size() && v_[j] != 0) ? &v_[j] : nullptr;
  }
  void set(Var j, Rational q) {
    if (j >= v_.size()) {
      if (q == 0) return;
      v_.resize(j + 1);
    }
    v_[j] = std::move(q);
  }
  template <class F>
  void for_each(F&& f) const {
    for (Var j = 0; j < v_.size(); ++j)
      if (v_[j] != 0) f(j, v_[j]);
  }
  void add_scaled(const DenseRow& o, const Rational& k) {
    if (o.v_.size() > v_.size()) v_.resize(o.v_.size());
    for (Var j = 0; j < o.v_.size(); ++j)
      if (o.v_[j] != 0) v_[j] += k * o.v_[j];
  }
  void scale(const Rational& k) {
    for (auto& q : v_)
      if (q != 0) q *= k;
  }

 private:
  std::vector<Rational> v_;
};

class SparseRow {
 public:
  const Rational* find(Var j) const {
    auto it = lower(j);
    return (it != e_.end() && it->first == j) ? &it->second : nullptr;
  }
  void set(Var j, Rational q) {
    auto it = lower(j);
    if (it != e_.end() && it->first == j) {
      if (q == 0)
        e_.erase(it);
      else
        it->second = std::move(q);
    } else if (q != 0) {
      e_.insert(it, {j, std::move(q)});
    }
  }
  template <class F>
  void for_each(F&& f) const {
    for (const auto& [j, q] : e_) f(j, q);
  }
  void add_scaled(const SparseRow& o, const Rational& k) {
    std::vector<std::pair<Var, Rational>> out;
    out.reserve(e_.size() + o.e_.size());
    auto a = e_.begin();
    auto b = o.e_.begin();
    while (a != e_.end() || b != o.e_.end()) {
      if (b == o.e_.end() || (a != e_.end() && a->first < b->first)) {
        out.push_back(std::move(*a++));
      } else if (a == e_.end() || b->first < a->first) {
        out.emplace_back(b->first, k * b->second);
        ++b;
      } else {
        Rational q = a->second + k * b->second;
        if (q != 0) out.emplace_back(a->first, std::move(q));
        ++a;
        ++b;
      }
    }
    e_ = std::move(out);
  }
  void scale(const Rational& k) {
    for (auto& [j, q] : e_) q *= k;
  }

 private:
  using Entries = std::vector<std::pair<Var, Rational>>;
  Entries::iterator lower(Var j) {
    return std::lower_bound(e_.begin(), e_.end(), j,
                            [](const auto& e, Var v) { return e.first < v; });
  }
  Entries::const_iterator lower(Var j) const {
    return std::lower_bound(e_.begin(), e_.end(), j,
                            [](const auto& e, Var v) { return e.first < v; });
  }
  Entries e_;
};

template <class Row>
class Simplex {
 public:
  explicit Simplex(PivotRule rule = PivotRule::bland) : rule_(rule) {}

  /// New non-basic, unbounded variable with value 0.
  Var add_variable() {
    Var v = values_.size();
    values_.emplace_back();
    lower_.emplace_back();
    upper_.emplace_back();
    row_of_.push_back(kNonBasic);
    return v;
  }

  /// New basic variable defined as sum(coeff * var) over existing variables.
  Var add_row(const std::vector<std::pair<Var, Rational>>& expr) {
    Row row;
    DeltaRational value;
    for (const auto& [v, q] : expr) {
      if (q == 0) continue;
      if (row_of_[v] == kNonBasic) {
        Rational old = row.find(v) ? *row.find(v) : Rational(0);
        row.set(v, old + q);
      } else {
        row.add_scaled(rows_[row_of_[v]], q);
      }
    }
    row.for_each([&](Var j, const Rational& q) { value += q * values_[j]; });
    Var b = add_variable();
    values_[b] = value;
    row_of_[b] = rows_.size();
    rows_.push_back(std::move(row));
    basic_.push_back(b);
    return b;
  }

  std::size_t num_variables() const { return values_.size(); }
  const DeltaRational& value(Var v) const { return values_[v]; }
  const std::optional<Bound>& lower(Var v) const { return lower_[v]; }
  const std::optional<Bound>& upper(Var v) const { return upper_[v]; }

  /// Tightens the lower bound (looser bounds are ignored). On an immediate
  /// clash with the upper bound the two-entry explanation is returned.
  std::optional<Explanation> assert_lower(Var v, const DeltaRational& c, std::int64_t reason) {
    if (lower_[v] && lower_[v]->value >= c) return std::nullopt;
    if (upper_[v] && upper_[v]->value < c)
      return Explanation{{v, false, Rational(1), reason}, {v, true, Rational(1), upper_[v]->reason}};
    trail_.push_back({v, false, lower_[v]});
    lower_[v] = Bound{c, reason};
    if (row_of_[v] == kNonBasic && values_[v] < c) update(v, c);
    return std::nullopt;
  }

  std::optional<Explanation> assert_upper(Var v, const DeltaRational& c, std::int64_t reason) {
    if (upper_[v] && upper_[v]->value <= c) return std::nullopt;
    if (lower_[v] && lower_[v]->value > c)
      return Explanation{{v, true, Rational(1), reason}, {v, false, Rational(1), lower_[v]->reason}};
    trail_.push_back({v, true, upper_[v]});
    upper_[v] = Bound{c, reason};
    if (row_of_[v] == kNonBasic && values_[v] > c) update(v, c);
    return std::nullopt;
  }

  std::size_t checkpoint() const { return trail_.size(); }

  /// Restores bounds to a checkpoint. The assignment stays valid since
  /// bounds only become looser.
  void rollback(std::size_t mark) {
    while (trail_.size() > mark) {
      auto& e = trail_.back();
      (e.upper ? upper_ : lower_)[e.var] = std::move(e.previous);
      trail_.pop_back();
    }
  }

  /// Repairs the assignment. Returns an explanation when the bounds are
  /// jointly infeasible.
  std::optional<Explanation> check() {
    std::size_t budget = rule_ == PivotRule::greedy ? 4 * (values_.size() + 1) : 0;
    while (true) {
      const bool bland = budget == 0;
      std::optional<Var> violated = pick_violated(bland);
      if (!violated) return std::nullopt;
      const Var bi = *violated;
      const Row& row = rows_[row_of_[bi]];
      const bool below = lower_[bi] && values_[bi] < lower_[bi]->value;
      std::optional<Var> entering;
      row.for_each([&](Var j, const Rational& a) {
        if (entering) return;
        bool increase = below ? (a > 0) : (a < 0);
        bool can = increase ? (!upper_[j] || values_[j] < upper_[j]->value)
                            : (!lower_[j] || values_[j] > lower_[j]->value);
        if (can) entering = j;
      });
      if (!entering) return explain(bi, below);
      ++pivots_;
      if (budget > 0) --budget;
      pivot_and_update(bi, *entering, below ? lower_[bi]->value : upper_[bi]->value);
    }
  }

  std::size_t pivots() const { return pivots_; }

  /// A rational delta under which every variable's concrete value respects
  /// its bounds.
  Rational concrete_delta() const {
    Rational delta = 1;
    auto tighten = [&](const DeltaRational& small, const DeltaRational& big) {
      // need small.at(d) <= big.at(d)
      Rational ds = big.standard - small.standard;
      Rational dk = small.infinitesimal - big.infinitesimal;
      if (ds > 0 && dk > 0) {
        Rational limit = ds / dk;
        if (limit < delta) delta = limit;
      }
    };
    for (Var v = 0; v < values_.size(); ++v) {
      if (lower_[v]) tighten(lower_[v]->value, values_[v]);
      if (upper_[v]) tighten(values_[v], upper_[v]->value);
    }
    return delta;
  }

 private:
  static constexpr std::size_t kNonBasic = static_cast<std::size_t>(-1);

  struct TrailEntry {
    Var var;
    bool upper;
    std::optional<Bound> previous;
  };

  bool violates(Var v) const {
    return (lower_[v] && values_[v] < lower_[v]->value) ||
           (upper_[v] && values_[v] > upper_[v]->value);
  }

  std::optional<Var> pick_violated(bool bland) const {
    std::optional<Var> best;
    Rational best_gap;
    for (Var b : basic_) {
      if (!violates(b)) continue;
      if (bland) {
        if (!best || b < *best) best = b;
        continue;
      }
      Rational gap = lower_[b] && values_[b] < lower_[b]->value
                         ? Rational(lower_[b]->value.standard - values_[b].standard)
                         : Rational(values_[b].standard - upper_[b]->value.standard);
      if (!best || gap > best_gap || (gap == best_gap && b < *best)) {
        best = b;
        best_gap = gap;
      }
    }
    return best;
  }

  void update(Var nonbasic, const DeltaRational& target) {
    DeltaRational diff = target - values_[nonbasic];
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (const Rational* a = rows_[r].find(nonbasic)) values_[basic_[r]] += *a * diff;
    values_[nonbasic] = target;
  }

  void pivot_and_update(Var bi, Var nj, const DeltaRational& target) {
    const std::size_t ri = row_of_[bi];
    const Rational a_ij = *rows_[ri].find(nj);
    DeltaRational theta = Rational(1 / a_ij) * (target - values_[bi]);
    values_[bi] = target;
    values_[nj] += theta;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (r == ri) continue;
      if (const Rational* a = rows_[r].find(nj)) values_[basic_[r]] += *a * theta;
    }
    pivot(ri, bi, nj, a_ij);
  }

  void pivot(std::size_t ri, Var bi, Var nj, const Rational& a_ij) {
    // bi = a_ij nj + rest  =>  nj = (bi - rest) / a_ij
    Row fresh = std::move(rows_[ri]);
    fresh.set(nj, 0);
    fresh.scale(Rational(-1 / a_ij));
    fresh.set(bi, Rational(1 / a_ij));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (r == ri) continue;
      const Rational* a = rows_[r].find(nj);
      if (!a) continue;
      Rational k = *a;
      rows_[r].set(nj, 0);
      rows_[r].add_scaled(fresh, k);
    }
    rows_[ri] = std::move(fresh);
    basic_[ri] = nj;
    row_of_[nj] = ri;
    row_of_[bi] = kNonBasic;
  }

  Explanation explain(Var bi, bool below) const {
    Explanation out;
    const Row& row = rows_[row_of_[bi]];
    if (below) {
      out.push_back({bi, false, Rational(1), lower_[bi]->reason});
      row.for_each([&](Var j, const Rational& a) {
        if (a > 0)
          out.push_back({j, true, a, upper_[j]->reason});
        else
          out.push_back({j, false, Rational(-a), lower_[j]->reason});
      });
    } else {
      out.push_back({bi, true, Rational(1), upper_[bi]->reason});
      row.for_each([&](Var j, const Rational& a) {
        if (a > 0)
          out.push_back({j, false, a, lower_[j]->reason});
        else
          out.push_back({j, true, Rational(-a), upper_[j]->reason});
      });
    }
    return out;
  }

  PivotRule rule_;
  std::vector<Row> rows_;
  std::vector<Var> basic_;
  std::vector<std::size_t> row_of_;
  std::vector<DeltaRational> values_;
  std::vector<std::optional<Bound>> lower_;
  std::vector<std::optional<Bound>> upper_;
  std::vector<TrailEntry> trail_;
  std::size_t pivots_ = 0;
};

}  // namespace qcover::simplex
