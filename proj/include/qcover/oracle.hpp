#pragma once

// Brute-force reference procedures for tests. Nothing on the production path
// calls into this header.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "qcover/petri.hpp"

namespace qcover::oracle {

struct Budget {
  std::size_t max_markings_explored = 10000;
  Natural max_token_sum = 64;
};

enum class Answer { no, yes, unknown };

/// Breadth-first exploration of the discrete reachability graph. Answers no
/// only when the reachable set was exhausted without a cutoff.
Answer forward_cover_bounded(const PetriNet& net, const DiscreteMarking& m0,
                             const DiscreteMarking& target, const Budget& budget = {});

/// Whether the transitions in `support` can all be fired, in some order and
/// by positive amounts, from m. Builds the run explicitly: each round fires
/// every not-yet-fired enabled transition by half its enabling degree (or by
/// one when the degree is unbounded), which keeps marked places marked, and
/// replays it with fire_continuous.
bool firable_support(const PetriNet& net, const RationalMarking& m,
                     std::span<const TransitionIndex> support);

/// Reachability under the continuous semantics by enumerating every support
/// T' ⊆ T. Throws std::length_error when |T| exceeds 20.
bool q_reachable_bruteforce(const PetriNet& net, const RationalMarking& m0,
                            const RationalMarking& m);

/// Independent re-check of a claimed witness x: m = m0 + C x, and the support
/// of x is firable forward from m0 and backward from m.
bool is_q_witness(const PetriNet& net, const RationalMarking& m0, const RationalMarking& m,
                  std::span<const Rational> x);

}  // namespace qcover::oracle
