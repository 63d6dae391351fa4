#include "qcover/upward.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace qcover {

bool Basis::contains_up(const DiscreteMarking& m) const {
  if (m.size() != dimension_) throw NetError("basis/marking dimension mismatch");
  return std::any_of(elements_.begin(), elements_.end(),
                     [&](const DiscreteMarking& v) { return v.covered_by(m); });
}

bool Basis::insert(const DiscreteMarking& m) {
  if (elements_.empty() && dimension_ == 0) dimension_ = m.size();
  if (m.size() != dimension_) throw NetError("basis/marking dimension mismatch");
  if (contains_up(m)) return false;
  std::erase_if(elements_, [&](const DiscreteMarking& v) { return m.covered_by(v); });
  elements_.insert(std::lower_bound(elements_.begin(), elements_.end(), m), m);
  return true;
}

Basis minimize(std::span<const DiscreteMarking> ms) {
  if (ms.empty()) return Basis();
  const std::size_t dim = ms.front().size();
  for (const auto& m : ms)
    if (m.size() != dim) throw NetError("minimize: mixed dimensions");
  // Inserting by increasing sum-norm means nothing inserted later can
  // dominate an earlier element, except for duplicates.
  std::vector<DiscreteMarking> sorted(ms.begin(), ms.end());
  std::sort(sorted.begin(), sorted.end(), [](const DiscreteMarking& a, const DiscreteMarking& b) {
    auto na = a.sum_norm(), nb = b.sum_norm();
    return na != nb ? na < nb : a < b;
  });
  Basis b(dim);
  for (const auto& m : sorted) b.insert(m);
  return b;
}

bool member_up(const Basis& b, const DiscreteMarking& m) {
  if (b.empty()) return false;
  return b.contains_up(m);
}

DiscreteMarking predecessor(const PetriNet& net, const DiscreteMarking& m, TransitionIndex t) {
  check_dimension(net, m.size());
  DiscreteMarking out = m;
  // m(p) - C(p,t) = m(p) + Pre(p,t) - Post(p,t); clamp below by Pre(p,t).
  for (const auto& a : net.post_arcs(t)) {
    Natural pre = net.pre(a.place, t);
    Natural raw = m[a.place] + pre;
    out[a.place] = raw > a.weight ? std::max(pre, raw - a.weight) : pre;
  }
  for (const auto& a : net.pre_arcs(t)) {
    if (net.post(a.place, t) != 0) continue;
    if (m[a.place] > std::numeric_limits<Natural>::max() - a.weight)
      throw NetError("token count overflow in predecessor");
    out[a.place] = m[a.place] + a.weight;
  }
  return out;
}

std::vector<DiscreteMarking> pre_basis(const PetriNet& net, const Basis& basis) {
  std::set<DiscreteMarking> out;
  for (const auto& m : basis)
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) out.insert(predecessor(net, m, t));
  return {out.begin(), out.end()};
}

void NormIndex::add(const DiscreteMarking& m) {
  buckets_[m.sum_norm()].push_back(m);
  ++count_;
}

bool NormIndex::dominated(const DiscreteMarking& m) const {
  const auto limit = buckets_.upper_bound(m.sum_norm());
  for (auto it = buckets_.begin(); it != limit; ++it)
    for (const auto& v : it->second)
      if (v.covered_by(m)) return true;
  return false;
}

}  // namespace qcover
