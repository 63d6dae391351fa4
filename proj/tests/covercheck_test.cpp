#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcover/covercheck.hpp"
#include "qcover/oracle.hpp"
#include "qcover/qreach.hpp"

using namespace qcover;
using fixtures::net_f;
using fixtures::net_g;

namespace {

std::vector<DiscreteMarking> one(DiscreteMarking m) { return {std::move(m)}; }

// Every element of a is above some element of b.
bool up_included(const Basis& a, const Basis& b) {
  for (const auto& v : a)
    if (!b.contains_up(v)) return false;
  return true;
}

bool is_antichain(const Basis& m) {
  const auto& e = m.elements();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j)
      if (i != j && e[i].covered_by(e[j])) return false;
  return true;
}

struct RandomInstance {
  PetriNet net;
  DiscreteMarking m0;
  DiscreteMarking target;
};

RandomInstance random_instance(std::mt19937_64& rng) {
  auto net = fixtures::random_net(rng, 1 + rng() % 6, 1 + rng() % 8, 2);
  auto m0 = fixtures::random_marking(rng, net.num_places(), 3);
  auto target = fixtures::random_marking(rng, net.num_places(), 3);
  return {std::move(net), std::move(m0), std::move(target)};
}

}  // namespace

TEST_CASE("backward_cover on the fixtures") {
  auto f = net_f();
  auto r = backward_cover(f, fixtures::m0_f(), one({0, 1}));
  CHECK(r.verdict == Verdict::safe());
  CHECK(r.stats.iterations == 2);
  // (1,1) is listed in some hand executions but is dominated by (0,1).
  std::vector<DiscreteMarking> hand{{0, 1}, {2, 0}, {1, 1}};
  CHECK(r.basis == minimize(hand));
  CHECK(r.basis.elements() == std::vector<DiscreteMarking>{{0, 1}, {2, 0}});

  r = backward_cover(f, fixtures::m0_f(), one({1, 0}));
  CHECK(r.verdict == Verdict::unsafe());
  CHECK(r.stats.iterations == 0);

  r = backward_cover(net_g(), {0}, one({5}));
  CHECK(r.verdict == Verdict::unsafe());
  CHECK(r.stats.iterations == 5);
  CHECK(r.basis.elements() == std::vector<DiscreteMarking>{{0}});
  CHECK(oracle::forward_cover_bounded(net_g(), {0}, {5}) == oracle::Answer::yes);
}

TEST_CASE("backward_cover_q on the fixtures") {
  auto f = net_f();
  auto r = backward_cover_q(f, fixtures::m0_f(), one({0, 1}));
  CHECK(r.verdict == Verdict::safe());
  CHECK(r.stats.iterations == 0);
  CHECK(r.stats.rejected_upfront);
  CHECK_FALSE(q_coverable(f, RationalMarking{1, 0}, RationalMarking{0, 1}).reachable);

  r = backward_cover_q(net_g(), {0}, one({5}));
  CHECK(r.verdict == backward_cover(net_g(), {0}, one({5})).verdict);
  CHECK(r.verdict == Verdict::unsafe());

  r = backward_cover_q(f, fixtures::m0_f(), one({1, 0}));
  CHECK(r.verdict == Verdict::unsafe());
  CHECK(r.stats.iterations == 0);
}

TEST_CASE("several targets form a disjunction") {
  auto f = net_f();
  std::vector<DiscreteMarking> targets{{0, 1}, {1, 0}};
  CHECK(backward_cover(f, fixtures::m0_f(), targets).verdict == Verdict::unsafe());
  CHECK(backward_cover_q(f, fixtures::m0_f(), targets).verdict == Verdict::unsafe());
  CHECK(backward_cover(f, fixtures::m0_f(), {}).verdict == Verdict::safe());
  CHECK(backward_cover_q(f, fixtures::m0_f(), {}).verdict == Verdict::safe());
}

TEST_CASE("minbottle") {
  std::vector<DiscreteMarking> b;
  for (Natural i = 0; i < 20; ++i) b.push_back({i, 20 - i, i % 3});
  CHECK(minbottle(b, 10, 5).size() == 14);
  CHECK(minbottle(std::span(b).first(5), 10, 5).size() == 5);

  std::vector<DiscreteMarking> small{{0, 3}, {1, 1}, {2, 2}};
  CHECK(minbottle(small, 0, 3) == std::vector<DiscreteMarking>{{1, 1}});
  // ceil rounding keeps one more element when |B| is not a multiple of k
  CHECK(minbottle(std::span(b).first(7), 0, 5, Rounding::floor).size() == 1);
  CHECK(minbottle(std::span(b).first(7), 0, 5, Rounding::ceil).size() == 2);

  std::vector<DiscreteMarking> ties{{2, 0}, {0, 2}, {1, 1}, {0, 1}};
  CHECK(minbottle(ties, 2, 100) == std::vector<DiscreteMarking>{{0, 1}, {0, 2}});
  CHECK_THROWS_AS(minbottle(ties, 1, 0), std::invalid_argument);
  Config bad;
  bad.k = 0;
  CHECK_THROWS_AS(backward_cover(net_f(), {1, 0}, one({0, 1}), bad), std::invalid_argument);
}

TEST_CASE("caps yield unknown") {
  Config cfg;
  cfg.max_iterations = 2;
  auto r = backward_cover(net_g(), {0}, one({5}), cfg);
  CHECK(r.verdict == Verdict::unknown("iteration-cap"));
  CHECK(r.stats.iterations == 2);
  r = backward_cover_q(net_g(), {0}, one({5}), cfg);
  CHECK(r.verdict == Verdict::unknown("iteration-cap"));

  Config none;
  none.timeout = std::chrono::milliseconds(0);
  CHECK(backward_cover(net_g(), {0}, one({5}), none).verdict == Verdict::unknown("timeout"));
  CHECK(backward_cover_q(net_g(), {0}, one({5}), none).verdict == Verdict::unknown("timeout"));
  // A decision reached before the first iteration is still returned.
  CHECK(backward_cover(net_g(), {7}, one({5}), none).verdict == Verdict::unsafe());
}

TEST_CASE("stats json") {
  auto r = backward_cover(net_g(), {0}, one({5}));
  auto j = to_json(r.stats, false);
  CHECK(j["schema"] == "qcover-stats/1");
  CHECK(j["verdict"] == "unsafe");
  CHECK(j["iterations"] == 5);
  CHECK(j["per_iteration"].size() == 5);
  CHECK_FALSE(j.contains("wall_ms"));
  CHECK(to_json(r.stats).contains("solver_ms"));
  CHECK(j.dump() == to_json(backward_cover(net_g(), {0}, one({5})).stats, false).dump());

  RunStats s;
  s.per_iteration = {{10, 4, 0, 3}, {10, 1, 0, 5}};
  CHECK(s.pruned_total() == 5);
  CHECK(s.pruned_pct() == doctest::Approx(25.0));
  CHECK(RunStats{}.pruned_pct() == 0.0);
}

TEST_CASE("property: both procedures agree with each other and with the forward oracle") {
  std::mt19937_64 rng(71);
  Config plain;
  plain.use_minbottle = false;
  Config tight;  // defers almost everything, to exercise the side pool
  tight.c = 0;
  tight.k = 4;
  int deferred = 0, definitive = 0;
  for (int round = 0; round < 200; ++round) {
    auto inst = random_instance(rng);
    auto targets = one(inst.target);
    auto base = backward_cover(inst.net, inst.m0, targets);
    REQUIRE(base.verdict.kind != VerdictKind::unknown);
    CHECK(backward_cover_q(inst.net, inst.m0, targets).verdict == base.verdict);
    CHECK(backward_cover_q(inst.net, inst.m0, targets, plain).verdict == base.verdict);
    auto t = backward_cover_q(inst.net, inst.m0, targets, tight);
    CHECK(t.verdict == base.verdict);
    for (const auto& it : t.stats.per_iteration) deferred += it.deferred > 0;

    auto fwd = oracle::forward_cover_bounded(inst.net, inst.m0, inst.target);
    if (fwd == oracle::Answer::unknown) continue;
    ++definitive;
    CHECK((fwd == oracle::Answer::yes) == (base.verdict.kind == VerdictKind::unsafe));
  }
  CHECK(deferred > 0);
  CHECK(definitive > 100);
}

TEST_CASE("property: pruned elements are never Q-coverable") {
  std::mt19937_64 rng(72);
  Config cfg;
  cfg.audit_pruned = true;
  std::size_t audited = 0;
  for (int round = 0; round < 150; ++round) {
    auto inst = random_instance(rng);
    auto r = backward_cover_q(inst.net, inst.m0, one(inst.target), cfg);
    CHECK(r.stats.audit_failures == 0);
    audited += r.stats.audited;
    for (const auto& it : r.stats.per_iteration) CHECK(it.pruned <= it.before);
  }
  CHECK(audited > 0);
}

TEST_CASE("property: M stays an antichain and its upward closure grows") {
  std::mt19937_64 rng(73);
  for (int round = 0; round < 150; ++round) {
    auto inst = random_instance(rng);
    for (bool prune : {false, true}) {
      std::vector<Basis> history;
      Config cfg;
      cfg.prune = prune;
      cfg.c = 1;
      cfg.k = 3;
      cfg.observer = [&](const Basis& m) { history.push_back(m); };
      Instance i{inst.net, inst.m0, one(inst.target), "random"};
      auto r = run(i, cfg);
      CHECK(history.size() == r.stats.iterations);
      for (std::size_t n = 0; n < history.size(); ++n) {
        CHECK(is_antichain(history[n]));
        if (n > 0) CHECK(up_included(history[n - 1], history[n]));
      }
    }
  }
}

TEST_CASE("property: pruning never enlarges the per-iteration basis") {
  std::mt19937_64 rng(74);
  Config plain;
  plain.use_minbottle = false;
  for (int round = 0; round < 200; ++round) {
    auto inst = random_instance(rng);
    auto targets = one(inst.target);
    auto a = backward_cover(inst.net, inst.m0, targets);
    for (const Config& cfg : {Config{}, plain}) {
      auto q = backward_cover_q(inst.net, inst.m0, targets, cfg);
      const auto n = std::min(a.stats.per_iteration.size(), q.stats.per_iteration.size());
      for (std::size_t i = 0; i < n; ++i)
        CHECK(q.stats.per_iteration[i].basis <= a.stats.per_iteration[i].basis);
    }
  }
}
