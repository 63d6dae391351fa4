#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qcover/petri.hpp"

namespace fixtures {

using namespace qcover;

// p0 --2--> t1 --> p0, p1 ; p0 --> t2. Starting from (1,0), p1 is never marked.
inline PetriNet net_f() {
  PetriNet::Builder b;
  auto p0 = b.add_place("p0");
  auto p1 = b.add_place("p1");
  auto t1 = b.add_transition("t1");
  auto t2 = b.add_transition("t2");
  b.pre(p0, t1, 2).post(p0, t1, 1).post(p1, t1, 1);
  b.pre(p0, t2, 1);
  return b.build();
}
inline DiscreteMarking m0_f() { return {1, 0}; }

// A single generator transition.
inline PetriNet net_g() {
  PetriNet::Builder b;
  auto p = b.add_place("p");
  auto t = b.add_transition("t");
  b.post(p, t, 1);
  return b.build();
}

// t needs two tokens and returns one; {p} is a trap marked initially.
inline PetriNet net_k() {
  PetriNet::Builder b;
  auto p = b.add_place("p");
  auto t = b.add_transition("t");
  b.pre(p, t, 2).post(p, t, 1);
  return b.build();
}

/// Small random net for property tests; deterministic per seed.
inline PetriNet random_net(std::mt19937_64& rng, std::size_t places, std::size_t transitions,
                           Natural max_weight, unsigned density_percent = 40) {
  PetriNet::Builder b;
  for (std::size_t p = 0; p < places; ++p) b.add_place("p" + std::to_string(p));
  for (std::size_t t = 0; t < transitions; ++t) {
    b.add_transition("t" + std::to_string(t + 1));
    for (std::size_t p = 0; p < places; ++p) {
      if (rng() % 100 < density_percent) b.pre(p, t, 1 + rng() % max_weight);
      if (rng() % 100 < density_percent) b.post(p, t, 1 + rng() % max_weight);
    }
  }
  return b.build();
}

inline DiscreteMarking random_marking(std::mt19937_64& rng, std::size_t places, Natural max) {
  DiscreteMarking m(places);
  for (std::size_t p = 0; p < places; ++p) m[p] = rng() % (max + 1);
  return m;
}

}  // namespace fixtures
