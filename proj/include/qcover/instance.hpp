#pragma once

#include <string>
#include <vector>

#include "qcover/petri.hpp"

namespace qcover {

/// A coverability question: can some marking reachable from `initial` cover
/// one of `targets`?
struct Instance {
  PetriNet net;
  DiscreteMarking initial;
  std::vector<DiscreteMarking> targets;
  std::string name;

  friend bool operator==(const Instance&, const Instance&) = default;
};

}  // namespace qcover
