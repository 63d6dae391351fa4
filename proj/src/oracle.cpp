#include "qcover/oracle.hpp"

#include <deque>
#include <functional>
#include <set>
#include <unordered_set>

#include "qcover/ratlp.hpp"

namespace qcover::oracle {

namespace {

struct MarkingHash {
  std::size_t operator()(const DiscreteMarking& m) const {
    std::size_t h = 1469598103934665603ull;
    for (Natural v : m.values()) h = (h ^ std::hash<Natural>{}(v)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

Answer forward_cover_bounded(const PetriNet& net, const DiscreteMarking& m0,
                             const DiscreteMarking& target, const Budget& budget) {
  check_dimension(net, m0.size());
  check_dimension(net, target.size());
  std::unordered_set<DiscreteMarking, MarkingHash> seen{m0};
  std::deque<DiscreteMarking> frontier{m0};
  bool cut = false;
  while (!frontier.empty()) {
    DiscreteMarking m = std::move(frontier.front());
    frontier.pop_front();
    if (target.covered_by(m)) return Answer::yes;
    if (m.sum_norm() > budget.max_token_sum) {
      cut = true;
      continue;
    }
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      if (!enabled(net, m, t)) continue;
      DiscreteMarking next = fire_discrete(net, m, t);
      if (seen.contains(next)) continue;
      if (seen.size() >= budget.max_markings_explored) return Answer::unknown;
      seen.insert(next);
      frontier.push_back(std::move(next));
    }
  }
  return cut ? Answer::unknown : Answer::no;
}

bool firable_support(const PetriNet& net, const RationalMarking& m,
                     std::span<const TransitionIndex> support) {
  check_dimension(net, m.size());
  std::set<TransitionIndex> pending(support.begin(), support.end());
  for (TransitionIndex t : pending)
    if (t >= net.num_transitions()) throw NetError("firable_support: unknown transition");
  RationalMarking current = m;
  std::vector<FiringStep> steps;
  bool progress = true;
  while (progress && !pending.empty()) {
    progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      EnablingDegree d = enabling_degree(net, current, *it);
      if (!d.is_infinite() && d.value() == 0) {
        ++it;
        continue;
      }
      Rational amount = d.is_infinite() ? Rational(1) : Rational(d.value() / 2);
      current = fire_continuous(net, current, *it, amount);
      steps.push_back({amount, *it});
      it = pending.erase(it);
      progress = true;
    }
  }
  if (!pending.empty()) return false;
  // Replay validates every step against the enabling degree again.
  return FiringSequence(steps).replay(net, m) == current;
}

bool q_reachable_bruteforce(const PetriNet& net, const RationalMarking& m0,
                            const RationalMarking& m) {
  check_dimension(net, m0.size());
  check_dimension(net, m.size());
  const std::size_t n = net.num_transitions();
  if (n > 20) throw std::length_error("q_reachable_bruteforce: more than 20 transitions");
  const PetriNet reversed = reverse_net(net);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<TransitionIndex> ts;
    for (TransitionIndex t = 0; t < n; ++t)
      if (mask & (1u << t)) ts.push_back(t);
    if (!firable_support(net, m0, ts) || !firable_support(reversed, m, ts)) continue;
    LinearSystem sys(ts.size());
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
      std::vector<std::pair<std::size_t, Rational>> row;
      for (std::size_t j = 0; j < ts.size(); ++j) {
        Rational c = Rational(to_rational(net.post(p, ts[j]))) - to_rational(net.pre(p, ts[j]));
        if (c != 0) row.emplace_back(j, c);
      }
      sys.add_row(std::move(row), Relation::eq, m[p] - m0[p]);
    }
    for (std::size_t j = 0; j < ts.size(); ++j) sys.add_row({{j, Rational(1)}}, Relation::gt, 0);
    if (feasible(sys).feasible) return true;
  }
  return false;
}

bool is_q_witness(const PetriNet& net, const RationalMarking& m0, const RationalMarking& m,
                  std::span<const Rational> x) {
  check_dimension(net, m0.size());
  check_dimension(net, m.size());
  if (x.size() != net.num_transitions()) return false;
  std::vector<TransitionIndex> supp;
  for (TransitionIndex t = 0; t < x.size(); ++t) {
    if (x[t] < 0) return false;
    if (x[t] != 0) supp.push_back(t);
  }
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    Rational v = m0[p];
    for (TransitionIndex t : supp)
      v += (Rational(to_rational(net.post(p, t))) - to_rational(net.pre(p, t))) * x[t];
    if (v != m[p]) return false;
  }
  return firable_support(net, m0, supp) && firable_support(reverse_net(net), m, supp);
}

}  // namespace qcover::oracle
