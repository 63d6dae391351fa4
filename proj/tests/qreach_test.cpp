#include "doctest.h"
#include "fixtures.hpp"
#include "qcover/oracle.hpp"
#include "qcover/qreach.hpp"

using namespace qcover;
using fixtures::net_f;
using fixtures::net_g;

namespace {

std::vector<TransitionIndex> ts(std::initializer_list<TransitionIndex> l) { return l; }

RationalMarking random_rational_marking(std::mt19937_64& rng, std::size_t places) {
  std::vector<Rational> v(places);
  for (auto& q : v) q = rng() % 3 == 0 ? Rational(0) : Rational(static_cast<long>(rng() % 5), 1 + rng() % 3);
  return RationalMarking(v);
}

}  // namespace

TEST_CASE("saturate_firing on the fixtures") {
  auto f = net_f();
  auto all = saturate_firing(f, RationalMarking{1, 0});
  CHECK(all.transitions == ts({0, 1}));
  CHECK(all.rounds == 1);

  auto sub = subnet(f, ts({0}));
  CHECK(saturate_firing(reverse_net(sub.net), RationalMarking{0, 1}).transitions.empty());

  CHECK(saturate_firing(net_g(), RationalMarking{0}).transitions == ts({0}));
}

TEST_CASE("saturate_firing agrees with explicit runs") {
  auto f = net_f();
  auto sat = saturate_firing(f, RationalMarking{1, 0});
  CHECK(oracle::firable_support(f, RationalMarking{1, 0}, sat.transitions));
}

TEST_CASE("in_firing_set") {
  auto f = net_f();
  CHECK(in_firing_set(f, RationalMarking{1, 0}, ts({0})));
  CHECK(oracle::firable_support(f, RationalMarking{1, 0}, ts({0})));
  CHECK_FALSE(in_firing_set(reverse_net(f), RationalMarking{0, 1}, ts({0})));
  CHECK(in_firing_set(f, RationalMarking{0, 0}, ts({})));
  CHECK_THROWS_AS(in_firing_set(f, RationalMarking{1, 0}, ts({4})), NetError);
}

TEST_CASE("q_reachable on the fixtures") {
  auto f = net_f();
  auto no = q_reachable(f, RationalMarking{1, 0}, RationalMarking{0, 1});
  CHECK_FALSE(no.reachable);
  REQUIRE(no.trace.size() == 1);
  CHECK(no.trace[0].candidates == ts({0, 1}));
  CHECK(no.trace[0].support == ts({0}));

  RationalMarking half{Rational(1, 2), Rational(1, 2)};
  auto yes = q_reachable(f, RationalMarking{1, 0}, half);
  REQUIRE(yes.reachable);
  REQUIRE(yes.parikh);
  CHECK(*yes.parikh == std::vector<Rational>{Rational(1, 2), 0});
  CHECK(yes.support == ts({0}));
  CHECK(fire_continuous(f, RationalMarking{1, 0}, 0, Rational(1, 2)) == half);

  auto same = q_reachable(f, RationalMarking{1, 0}, RationalMarking{1, 0});
  CHECK(same.reachable);
  CHECK(same.support.empty());
  CHECK(same.trace.empty());
}

TEST_CASE("q_coverable on the fixtures") {
  auto f = net_f();
  CHECK_FALSE(q_coverable(f, RationalMarking{1, 0}, RationalMarking{0, 1}).reachable);
  CHECK_FALSE(oracle::q_reachable_bruteforce(drain_augmented(f), RationalMarking{1, 0},
                                              RationalMarking{0, 1}));
  CHECK(q_coverable(f, RationalMarking{1, 0}, RationalMarking{0, 0}).reachable);

  auto g5 = q_coverable(net_g(), RationalMarking{0}, RationalMarking{5});
  REQUIRE(g5.reachable);
  // The witness may mix generator and drain; replaying it must land on (5).
  auto aug = drain_augmented(net_g());
  CHECK(oracle::is_q_witness(aug, RationalMarking{0}, RationalMarking{5}, *g5.parikh));
  CHECK(fire_continuous(net_g(), RationalMarking{0}, 0, 5) == RationalMarking{5});
}

TEST_CASE("drain names avoid clashes") {
  PetriNet::Builder b;
  b.add_place("a");
  b.add_transition("drain_a");
  auto aug = drain_augmented(b.build());
  REQUIRE(aug.num_transitions() == 2);
  CHECK(aug.transition_name(1) != "drain_a");
  CHECK(aug.pre(0, 1) == 1);
}

TEST_CASE("property: q_reachable agrees with the support enumeration") {
  std::mt19937_64 rng(41);
  int positive = 0;
  for (int round = 0; round < 300; ++round) {
    auto net = fixtures::random_net(rng, 1 + rng() % 4, 1 + rng() % 6, 2);
    RationalMarking m0(fixtures::random_marking(rng, net.num_places(), 3));
    // Half the targets are reached by an explicit continuous run.
    RationalMarking m = random_rational_marking(rng, net.num_places());
    if (round % 2 == 0) {
      m = m0;
      for (int k = 0; k < 4; ++k) {
        TransitionIndex t = rng() % net.num_transitions();
        auto d = enabling_degree(net, m, t);
        Rational cap = d.is_infinite() ? Rational(1) : d.value();
        if (cap != 0) m = fire_continuous(net, m, t, cap * Rational(1 + rng() % 2, 2));
      }
    }
    auto v = q_reachable(net, m0, m);
    CHECK(v.reachable == oracle::q_reachable_bruteforce(net, m0, m));
    if (round % 2 == 0) CHECK(v.reachable);
    if (v.reachable) {
      ++positive;
      REQUIRE(v.parikh);
      CHECK(oracle::is_q_witness(net, m0, m, *v.parikh));
    }
  }
  CHECK(positive > 150);
}

TEST_CASE("property: saturation is monotone and bounded by |T| rounds") {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 300; ++round) {
    auto net = fixtures::random_net(rng, 1 + rng() % 5, 1 + rng() % 6, 2);
    auto m = fixtures::random_marking(rng, net.num_places(), 2);
    auto bigger = m;
    for (PlaceIndex p = 0; p < net.num_places(); ++p)
      if (rng() % 3 == 0) bigger[p] += 1;
    auto a = saturate_firing(net, RationalMarking(m));
    auto b = saturate_firing(net, RationalMarking(bigger));
    CHECK(a.rounds <= net.num_transitions());
    CHECK(std::includes(b.transitions.begin(), b.transitions.end(), a.transitions.begin(),
                        a.transitions.end()));
    CHECK(oracle::firable_support(net, RationalMarking(m), a.transitions));
    CHECK(in_firing_set(net, RationalMarking(m), a.transitions));
  }
}

TEST_CASE("property: Q-coverability over-approximates coverability") {
  std::mt19937_64 rng(43);
  int coverable = 0;
  for (int round = 0; round < 300; ++round) {
    auto net = fixtures::random_net(rng, 1 + rng() % 4, 1 + rng() % 5, 2);
    auto m0 = fixtures::random_marking(rng, net.num_places(), 3);
    auto target = fixtures::random_marking(rng, net.num_places(), 3);
    if (oracle::forward_cover_bounded(net, m0, target) != oracle::Answer::yes) continue;
    ++coverable;
    CHECK(q_coverable(net, RationalMarking(m0), RationalMarking(target)).reachable);
  }
  CHECK(coverable > 50);
}
