#include "doctest.h"
#include "qcover/generate.hpp"
#include "qcover/mist.hpp"
#include "qcover/qreach.hpp"

using namespace qcover;

TEST_CASE("same parameters, same instance") {
  GenParams g;
  g.seed = 42;
  CHECK(generate(g) == generate(g));
  CHECK(generate(g).name == "gen-3x4-s42");
  auto other = g;
  other.seed = 43;
  CHECK_FALSE(generate(g) == generate(other));
}

TEST_CASE("bad parameters are rejected") {
  GenParams g;
  g.places = 0;
  CHECK_THROWS_AS(generate(g), std::invalid_argument);
  g = {};
  g.max_weight = 0;
  CHECK_THROWS_AS(generate(g), std::invalid_argument);
  g = {};
  g.density_percent = 101;
  CHECK_THROWS_AS(generate(g), std::invalid_argument);
  g = {};
  g.places = 1;
  g.guarded_percent = 10;
  CHECK_THROWS_AS(generate(g), std::invalid_argument);
}

TEST_CASE("property: bounds hold and every transition consumes") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    GenParams g;
    g.seed = seed;
    g.places = 1 + seed % 7;
    g.transitions = 1 + seed % 9;
    g.max_weight = 1 + seed % 3;
    g.density_percent = static_cast<unsigned>(seed % 101);
    g.read_percent = static_cast<unsigned>((seed * 7) % 101);
    const auto inst = generate(g);
    const auto& net = inst.net;
    REQUIRE(net.num_places() == g.places);
    REQUIRE(net.num_transitions() == g.transitions);
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      CHECK_FALSE(net.pre_arcs(t).empty());
      for (PlaceIndex p = 0; p < net.num_places(); ++p) {
        CHECK(net.pre(p, t) <= g.max_weight);
        CHECK(net.post(p, t) <= g.max_weight);
      }
    }
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
      CHECK(inst.initial[p] <= g.max_initial);
      CHECK(inst.targets.at(0)[p] <= g.max_target);
    }
    CHECK(inst.targets[0].sum_norm() > 0);
    CHECK(parse(serialize(inst, Format::mist), Format::mist, inst.name) == inst);
  }
}

TEST_CASE("property: guarded family keeps p0 at one token and targets Q-coverable") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenParams g;
    g.seed = seed;
    g.places = 2 + seed % 5;
    g.transitions = 2 + seed % 6;
    g.guarded_percent = 30;
    const auto inst = generate(g);
    const auto& net = inst.net;
    CHECK(inst.initial[0] == 1);
    CHECK(inst.targets[0][0] == 0);
    CHECK(net.pre(0, 0) == 2);
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      CHECK(net.pre(0, t) == net.post(0, t));
      CHECK((net.pre(0, t) == 0 || net.pre(0, t) == 2));
    }
    // t1 alone moves the source into the target at degree 1/2 steps, unless
    // source and goal coincide.
    const auto& target = inst.targets[0];
    PlaceIndex goal = 1;
    while (target[goal] == 0) ++goal;
    if (net.post(goal, 0) > 0)
      CHECK(q_coverable(net, RationalMarking(inst.initial), RationalMarking(target)).reachable);
  }
}
