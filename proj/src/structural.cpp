#include "qcover/structural.hpp"

#include <algorithm>

#include "qcover/ratlp.hpp"

namespace qcover {

namespace {

std::vector<bool> membership(const PetriNet& net, std::span<const PlaceIndex> places) {
  std::vector<bool> in(net.num_places(), false);
  for (PlaceIndex p : places) {
    if (p >= net.num_places()) throw NetError("unknown place index " + std::to_string(p));
    in[p] = true;
  }
  return in;
}

bool touches(std::span<const PetriNet::Arc> arcs, const std::vector<bool>& in) {
  return std::any_of(arcs.begin(), arcs.end(), [&](const auto& a) { return in[a.place]; });
}

}  // namespace

Classification classify(const PetriNet& net, std::span<const PlaceIndex> places) {
  if (places.empty()) throw NetError("classify: empty place set");
  const auto in = membership(net, places);
  Classification c{true, true};
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    const bool consumes = touches(net.pre_arcs(t), in);
    const bool produces = touches(net.post_arcs(t), in);
    if (consumes && !produces) c.is_trap = false;
    if (produces && !consumes) c.is_siphon = false;
  }
  return c;
}

bool marked(std::span<const PlaceIndex> places, const DiscreteMarking& m) {
  return std::any_of(places.begin(), places.end(), [&](PlaceIndex p) { return m[p] > 0; });
}

bool marked(std::span<const PlaceIndex> places, const RationalMarking& m) {
  return std::any_of(places.begin(), places.end(), [&](PlaceIndex p) { return m[p] > 0; });
}

PlaceSet max_trap_within(const PetriNet& net, std::span<const PlaceIndex> region) {
  auto in = membership(net, region);
  bool changed = true;
  while (changed) {
    changed = false;
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      if (touches(net.post_arcs(t), in)) continue;
      // t empties the set without refilling it: its input places cannot stay.
      for (const auto& a : net.pre_arcs(t)) {
        if (in[a.place]) {
          in[a.place] = false;
          changed = true;
        }
      }
    }
  }
  PlaceSet out;
  for (PlaceIndex p = 0; p < net.num_places(); ++p)
    if (in[p]) out.push_back(p);
  return out;
}

TrapResult trap_safety_check(const PetriNet& net, const DiscreteMarking& m0,
                             const DiscreteMarking& m, TrapMode mode, std::size_t max_rounds) {
  check_dimension(net, m0.size());
  check_dimension(net, m.size());
  const IncidenceMatrix c = incidence(net);
  const std::size_t n = net.num_transitions();

  // Row p of m' - m0 = C·x as coefficients over x.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> effect(net.num_places());
  for (TransitionIndex t = 0; t < n; ++t)
    for (const auto& e : c.column(t)) effect[e.place].emplace_back(t, to_rational(e.delta));

  LinearSystem sys(n);
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    Rational target = to_rational(m[p]) - to_rational(m0[p]);
    sys.add_row(effect[p], mode == TrapMode::reach ? Relation::eq : Relation::ge, target);
  }

  TrapResult result;
  while (true) {
    Feasibility f = feasible(sys);
    if (!f.feasible) {
      result.outcome = TrapOutcome::safe;
      return result;
    }
    if (result.rounds == max_rounds) return result;
    std::vector<PlaceIndex> empty;
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
      Rational v = to_rational(m0[p]);
      for (const auto& [t, q] : effect[p]) v += q * f.witness[t];
      if (v == 0) empty.push_back(p);
    }
    PlaceSet trap = max_trap_within(net, empty);
    if (trap.empty() || !marked(trap, m0)) return result;
    // Σ_{p∈Q} m'(p) ≥ 1, i.e. Σ_{p∈Q} (C·x)(p) ≥ 1 - Σ_{p∈Q} m0(p).
    std::vector<std::pair<std::size_t, Rational>> cut;
    Rational rhs = 1;
    for (PlaceIndex p : trap) {
      cut.insert(cut.end(), effect[p].begin(), effect[p].end());
      rhs -= to_rational(m0[p]);
    }
    sys.add_row(std::move(cut), Relation::ge, rhs);
    result.traps.push_back(std::move(trap));
    ++result.rounds;
  }
}

}  // namespace qcover
