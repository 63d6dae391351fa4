#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "qcover/petri.hpp"

namespace qcover {

/// Minimal basis of an upward-closed set of discrete markings: a finite
/// antichain under componentwise <=. Elements are kept in lexicographic order.
class Basis {
 public:
  Basis() = default;
  explicit Basis(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const std::vector<DiscreteMarking>& elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  /// True iff some element is <= m.
  bool contains_up(const DiscreteMarking& m) const;

  /// Adds m unless it is already dominated; evicts the elements m dominates.
  /// Returns false when m was dominated.
  bool insert(const DiscreteMarking& m);

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<DiscreteMarking> elements_;
};

/// The <=-minimal elements of ms. All markings must share one dimension.
Basis minimize(std::span<const DiscreteMarking> ms);

bool member_up(const Basis& b, const DiscreteMarking& m);

/// pb(M): for every m' in M and t in T the marking
/// m'_t(p) = max{Pre(p,t), m'(p) - C(p,t)}. Duplicates removed, sorted.
std::vector<DiscreteMarking> pre_basis(const PetriNet& net, const Basis& basis);

/// m'_t for a single (m', t).
DiscreteMarking predecessor(const PetriNet& net, const DiscreteMarking& m, TransitionIndex t);

/// Dominance index bucketing markings by sum-norm: v <= m requires
/// |v| <= |m|, so queries only scan buckets with a smaller norm. Answers are
/// identical to a linear scan.
class NormIndex {
 public:
  void add(const DiscreteMarking& m);
  bool dominated(const DiscreteMarking& m) const;
  std::size_t size() const { return count_; }

 private:
  std::map<Natural, std::vector<DiscreteMarking>> buckets_;
  std::size_t count_ = 0;
};

}  // namespace qcover
