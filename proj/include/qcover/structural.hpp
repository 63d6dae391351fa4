#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcover/petri.hpp"

namespace qcover {

using PlaceSet = std::vector<PlaceIndex>;  // ascending, no duplicates

struct Classification {
  bool is_trap = false;    // Q• ⊆ •Q
  bool is_siphon = false;  // •Q ⊆ Q•
};

/// Throws NetError on an empty or out-of-range Q.
Classification classify(const PetriNet& net, std::span<const PlaceIndex> places);

bool marked(std::span<const PlaceIndex> places, const DiscreteMarking& m);
bool marked(std::span<const PlaceIndex> places, const RationalMarking& m);

/// Largest trap contained in R, possibly empty.
PlaceSet max_trap_within(const PetriNet& net, std::span<const PlaceIndex> region);

enum class TrapMode { reach, cover };
enum class TrapOutcome { safe, inconclusive };

struct TrapResult {
  TrapOutcome outcome = TrapOutcome::inconclusive;
  std::size_t rounds = 0;
  std::vector<PlaceSet> traps;  // cuts added, in order
};

/// State equation refined by trap constraints. Each round solves
/// m' = m0 + C·x (m' = m, or m' ≥ m in cover mode); an infeasible system
/// proves safety. Otherwise the largest trap among the places empty in m' is
/// taken, and if it is marked at m0 the cut "this trap stays marked" is
/// added. With no such trap, or after max_rounds cuts, the answer is
/// inconclusive.
TrapResult trap_safety_check(const PetriNet& net, const DiscreteMarking& m0,
                             const DiscreteMarking& m, TrapMode mode = TrapMode::reach,
                             std::size_t max_rounds = 64);

}  // namespace qcover
