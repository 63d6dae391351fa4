#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qcover/petri.hpp"

namespace qcover {

struct Saturation {
  std::vector<TransitionIndex> transitions;  // ascending
  std::size_t rounds = 0;                    // incfs applications that grew the set
};

/// Least fixed point of S -> S ∪ {t : •t ⊆ ⟦m⟧ ∪ S•}, starting from ∅. This is
/// the maximal firing set of (net, m).
Saturation saturate_firing(const PetriNet& net, const RationalMarking& m);

/// Membership of S in the firing set of (net, m): S is exactly the saturation
/// of the sub-net N_S under m restricted to •S•.
bool in_firing_set(const PetriNet& net, const RationalMarking& m,
                   std::span<const TransitionIndex> transitions);

struct QIteration {
  std::vector<TransitionIndex> candidates;  // T' at loop entry
  std::vector<TransitionIndex> support;     // S
  std::size_t lp_calls = 0;
};

struct QVerdict {
  bool reachable = false;
  /// On success: a Parikh vector x over the net's transitions with
  /// m = m0 + C x whose support lies in both firing sets.
  std::optional<std::vector<Rational>> parikh;
  std::vector<TransitionIndex> support;
  std::vector<QIteration> trace;
};

/// Decides m0 ->*_Q m with the greatest-fixed-point iteration over candidate
/// supports: solve the state equation with x(t) > 0 for every candidate t,
/// collect the supports, and shrink the candidates to the transitions
/// firable both forward from m0 and backward from m inside the sub-net.
QVerdict q_reachable(const PetriNet& net, const RationalMarking& m0, const RationalMarking& m);

/// The net with one extra transition per place that consumes one token of
/// it and produces nothing. Drain transitions follow the originals.
PetriNet drain_augmented(const PetriNet& net);

/// Q-coverability of m, answered as Q-reachability of m in the
/// drain-augmented net. The witness is indexed by the augmented transitions.
QVerdict q_coverable(const PetriNet& net, const RationalMarking& m0, const RationalMarking& m);

}  // namespace qcover
