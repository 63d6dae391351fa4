#include "qcover/qreach.hpp"

#include <algorithm>
#include <stdexcept>

#include "qcover/ratlp.hpp"

namespace qcover {

Saturation saturate_firing(const PetriNet& net, const RationalMarking& m) {
  check_dimension(net, m.size());
  std::vector<bool> marked(net.num_places(), false);
  for (PlaceIndex p = 0; p < net.num_places(); ++p) marked[p] = m[p] != 0;
  std::vector<bool> in_set(net.num_transitions(), false);

  Saturation out;
  while (true) {
    std::vector<TransitionIndex> added;
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      if (in_set[t]) continue;
      auto arcs = net.pre_arcs(t);
      if (std::all_of(arcs.begin(), arcs.end(), [&](const auto& a) { return marked[a.place]; }))
        added.push_back(t);
    }
    if (added.empty()) break;
    ++out.rounds;
    for (TransitionIndex t : added) {
      in_set[t] = true;
      for (const auto& a : net.post_arcs(t)) marked[a.place] = true;
    }
  }
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
    if (in_set[t]) out.transitions.push_back(t);
  return out;
}

namespace {

RationalMarking restrict(const RationalMarking& m, const std::vector<PlaceIndex>& places) {
  std::vector<Rational> out;
  out.reserve(places.size());
  for (PlaceIndex p : places) out.push_back(m[p]);
  return RationalMarking(std::move(out));
}

// maxFS of the sub-net under m, mapped back to parent transition indices.
std::vector<TransitionIndex> max_firing_set(const Subnet& sub, const PetriNet& local,
                                            const RationalMarking& m) {
  auto sat = saturate_firing(local, restrict(m, sub.places));
  std::vector<TransitionIndex> out;
  out.reserve(sat.transitions.size());
  for (TransitionIndex t : sat.transitions) out.push_back(sub.transitions[t]);
  return out;
}

// C_{P×T'} x = m - m0 over variables indexed like `columns`.
LinearSystem state_equation(const IncidenceMatrix& c, const std::vector<TransitionIndex>& columns,
                            const RationalMarking& m0, const RationalMarking& m) {
  LinearSystem sys(columns.size());
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows(c.num_places());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (const auto& e : c.column(columns[j])) rows[e.place].emplace_back(j, to_rational(e.delta));
  for (PlaceIndex p = 0; p < c.num_places(); ++p)
    sys.add_row(std::move(rows[p]), Relation::eq, m[p] - m0[p]);
  return sys;
}

}  // namespace

bool in_firing_set(const PetriNet& net, const RationalMarking& m,
                   std::span<const TransitionIndex> transitions) {
  check_dimension(net, m.size());
  Subnet sub = subnet(net, transitions);
  auto sat = saturate_firing(sub.net, restrict(m, sub.places));
  return sat.transitions.size() == sub.net.num_transitions();
}

QVerdict q_reachable(const PetriNet& net, const RationalMarking& m0, const RationalMarking& m) {
  check_dimension(net, m0.size());
  check_dimension(net, m.size());
  QVerdict verdict;
  if (m == m0) {
    verdict.reachable = true;
    verdict.parikh = std::vector<Rational>(net.num_transitions());
    return verdict;
  }

  const IncidenceMatrix c = incidence(net);
  std::vector<TransitionIndex> candidates(net.num_transitions());
  for (TransitionIndex t = 0; t < candidates.size(); ++t) candidates[t] = t;

  while (!candidates.empty()) {
    QIteration step;
    step.candidates = candidates;
    IncrementalLp lp(state_equation(c, candidates, m0, m));
    std::vector<bool> in_support(candidates.size(), false);
    // Without any positivity bound first: if that fails, every t fails.
    ++step.lp_calls;
    Feasibility plain = lp.feasible_with();
    for (std::size_t j = 0; j < candidates.size() && plain.feasible; ++j) {
      if (plain.witness[j] != 0) in_support[j] = true;
      // A solution found for an earlier t already proves t can be positive.
      if (in_support[j]) continue;
      const VariableBound positive{j, Relation::gt, Rational(0)};
      ++step.lp_calls;
      Feasibility f = lp.feasible_with(std::span(&positive, 1));
      if (!f.feasible) continue;
      for (std::size_t i = 0; i < candidates.size(); ++i)
        if (f.witness[i] != 0) in_support[i] = true;
    }
    for (std::size_t j = 0; j < candidates.size(); ++j)
      if (in_support[j]) step.support.push_back(candidates[j]);
    verdict.trace.push_back(step);
    if (step.support.empty()) return verdict;

    const Subnet sub = subnet(net, step.support);
    const PetriNet reversed = reverse_net(sub.net);
    auto forward = max_firing_set(sub, sub.net, m0);
    auto backward = max_firing_set(sub, reversed, m);
    std::vector<TransitionIndex> next;
    std::set_intersection(forward.begin(), forward.end(), backward.begin(), backward.end(),
                          std::back_inserter(next));
    if (next == step.support) {
      // Every transition of S can be made positive simultaneously (the
      // average of the per-transition solutions does it).
      LinearSystem sys = state_equation(c, next, m0, m);
      for (std::size_t j = 0; j < next.size(); ++j) sys.add_row({{j, Rational(1)}}, Relation::gt, 0);
      Feasibility f = feasible(sys);
      if (!f.feasible) throw std::logic_error("q_reachable: witness system unexpectedly infeasible");
      std::vector<Rational> x(net.num_transitions());
      for (std::size_t j = 0; j < next.size(); ++j) x[next[j]] = f.witness[j];
      verdict.reachable = true;
      verdict.support = next;
      verdict.parikh = std::move(x);
      return verdict;
    }
    candidates = std::move(next);
  }
  return verdict;
}

PetriNet drain_augmented(const PetriNet& net) {
  PetriNet::Builder b;
  for (const auto& n : net.place_names()) b.add_place(n);
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    b.add_transition(net.transition_name(t));
    for (const auto& a : net.pre_arcs(t)) b.pre(a.place, t, a.weight);
    for (const auto& a : net.post_arcs(t)) b.post(a.place, t, a.weight);
  }
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    std::string name = "drain_" + net.place_name(p);
    while (net.find_transition(name) || net.find_place(name)) name += "'";
    TransitionIndex t = b.add_transition(name);
    b.pre(p, t, 1);
  }
  return b.build();
}

QVerdict q_coverable(const PetriNet& net, const RationalMarking& m0, const RationalMarking& m) {
  return q_reachable(drain_augmented(net), m0, m);
}

}  // namespace qcover
