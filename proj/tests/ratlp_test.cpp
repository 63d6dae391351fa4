#include "doctest.h"
#include "qcover/ratlp.hpp"

#include <optional>
#include <random>
#include <set>

using namespace qcover;

namespace {

// Fourier–Motzkin elimination over x >= 0; decides feasibility of >=, > and =
// rows independently of the simplex.
struct FmRow {
  std::vector<Rational> a;
  bool strict;
  Rational b;  // a.x (>= | >) b
};

std::optional<bool> fourier_motzkin(const LinearSystem& sys) {
  const std::size_t n = sys.num_variables();
  std::vector<FmRow> rows;
  for (const auto& r : sys.rows()) {
    std::vector<Rational> a(n);
    for (const auto& [j, q] : r.coeffs) a[j] = q;
    rows.push_back({a, r.relation == Relation::gt, r.rhs});
    if (r.relation == Relation::eq) {
      std::vector<Rational> neg(n);
      for (std::size_t j = 0; j < n; ++j) neg[j] = -a[j];
      rows.push_back({neg, false, -r.rhs});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> e(n);
    e[j] = 1;
    rows.push_back({e, false, 0});
  }
  std::vector<bool> eliminated(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    // Eliminate the variable producing the fewest combinations.
    std::size_t j = n, best = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      std::size_t np = 0, nn = 0;
      for (const auto& r : rows) {
        np += r.a[v] > 0;
        nn += r.a[v] < 0;
      }
      if (j == n || np * nn < best) {
        j = v;
        best = np * nn;
      }
    }
    eliminated[j] = true;
    if (best > 200000) return std::nullopt;
    std::vector<FmRow> pos, neg, rest;
    for (auto& r : rows) {
      if (r.a[j] > 0)
        pos.push_back(r);
      else if (r.a[j] < 0)
        neg.push_back(r);
      else
        rest.push_back(r);
    }
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        Rational kp = -q.a[j], kq = p.a[j];
        FmRow c{std::vector<Rational>(n), p.strict || q.strict, kp * p.b + kq * q.b};
        for (std::size_t i = 0; i < n; ++i) c.a[i] = kp * p.a[i] + kq * q.a[i];
        rest.push_back(std::move(c));
      }
    }
    // Normalize and deduplicate to keep the elimination tractable.
    rows.clear();
    std::set<std::pair<std::vector<Rational>, std::pair<bool, Rational>>> seen;
    for (auto& r : rest) {
      Rational scale = 0;
      for (const auto& q : r.a)
        if (q != 0) {
          scale = abs(q);
          break;
        }
      if (scale == 0) {
        if (r.strict ? !(0 > r.b) : !(0 >= r.b)) return false;
        continue;
      }
      for (auto& q : r.a) q /= scale;
      r.b /= scale;
      if (seen.insert({r.a, {r.strict, r.b}}).second) rows.push_back(std::move(r));
    }
  }
  for (const auto& r : rows) {
    if (r.strict ? !(0 > r.b) : !(0 >= r.b)) return false;
  }
  return true;
}

LinearSystem random_system(std::mt19937_64& rng) {
  std::size_t n = 1 + rng() % 5;
  LinearSystem sys(n);
  std::size_t m = rng() % 9;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::pair<std::size_t, Rational>> coeffs;
    for (std::size_t j = 0; j < n; ++j)
      if (rng() % 3 != 0) coeffs.emplace_back(j, Rational(static_cast<long>(rng() % 7) - 3));
    auto rel = static_cast<Relation>(rng() % 3);
    sys.add_row(coeffs, rel, Rational(static_cast<long>(rng() % 9) - 4, 1 + rng() % 2));
  }
  return sys;
}

}  // namespace

TEST_CASE("state equation of the two-place net at (0,1)") {
  LinearSystem sys(2);
  sys.add_row({{0, -1}, {1, -1}}, Relation::eq, -1);
  sys.add_row({{0, 1}}, Relation::eq, 1);
  auto f = feasible(sys);
  REQUIRE(f.feasible);
  CHECK(f.witness == std::vector<Rational>{1, 0});
  CHECK(check_certificate(sys, f));
  Feasibility perturbed{true, {1, Rational(1, 2)}, {}};
  CHECK_FALSE(check_certificate(sys, perturbed));
}

TEST_CASE("strict row forcing infeasibility yields a certificate") {
  LinearSystem sys(2);
  sys.add_row({{0, 1}}, Relation::eq, 1);
  sys.add_row({{0, 1}, {1, 1}}, Relation::eq, 1);
  sys.add_row({{1, 1}}, Relation::gt, 0);
  auto f = feasible(sys);
  REQUIRE_FALSE(f.feasible);
  CHECK(check_certificate(sys, f));
  // Independent arithmetic check of the combination.
  Rational x0 = f.certificate[0] + f.certificate[1];
  Rational x1 = f.certificate[1] + f.certificate[2];
  Rational rhs = f.certificate[0] + f.certificate[1];
  CHECK(x0 <= 0);
  CHECK(x1 <= 0);
  CHECK(f.certificate[2] >= 0);
  CHECK((rhs > 0 || (rhs == 0 && f.certificate[2] > 0)));
}

TEST_CASE("empty system") {
  LinearSystem sys;
  auto f = feasible(sys);
  CHECK(f.feasible);
  CHECK(f.witness.empty());
  CHECK(check_certificate(sys, f));
}

TEST_CASE("certificate checks reject wrong dimensions and bogus multipliers") {
  LinearSystem sys(1);
  sys.add_row({{0, 1}}, Relation::ge, 2);
  CHECK_THROWS_AS(check_certificate(sys, Feasibility{true, {1, 2}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(check_certificate(sys, Feasibility{false, {}, {1, 1}}), std::invalid_argument);
  CHECK_FALSE(check_certificate(sys, Feasibility{false, {}, {Rational(-1)}}));
  CHECK_THROWS_AS(sys.add_row({{3, 1}}, Relation::ge, 0), std::invalid_argument);
}

TEST_CASE("strict rows get strict witnesses") {
  LinearSystem sys(2);
  sys.add_row({{0, 1}, {1, -1}}, Relation::gt, 0);
  sys.add_row({{1, 1}}, Relation::gt, 0);
  sys.add_row({{0, 1}}, Relation::eq, 1);
  auto f = feasible(sys);
  REQUIRE(f.feasible);
  CHECK(f.witness[0] == 1);
  CHECK(f.witness[1] > 0);
  CHECK(f.witness[1] < 1);
}

TEST_CASE("degenerate cycling-prone system terminates") {
  // Beale's classic cycling example rewritten as a feasibility problem with an
  // objective cut; Bland's rule must terminate.
  LinearSystem sys(4);
  sys.add_row({{0, Rational(-1, 4)}, {1, 60}, {2, Rational(1, 25)}, {3, -9}}, Relation::ge, 0);
  sys.add_row({{0, Rational(-1, 2)}, {1, 90}, {2, Rational(1, 50)}, {3, -3}}, Relation::ge, 0);
  sys.add_row({{2, -1}}, Relation::ge, -1);
  sys.add_row({{0, Rational(3, 4)}, {1, -150}, {2, Rational(1, 50)}, {3, -6}}, Relation::gt,
              Rational(1, 20));
  for (auto rule : {simplex::PivotRule::bland, simplex::PivotRule::greedy}) {
    LpOptions opt;
    opt.pivot = rule;
    auto f = feasible(sys, opt);
    CHECK(check_certificate(sys, f));
    CHECK(f.feasible == fourier_motzkin(sys).value());
  }
}

TEST_CASE("property: agreement with Fourier–Motzkin") {
  std::mt19937_64 rng(31);
  int sat = 0, decided = 0;
  for (int round = 0; round < 2000; ++round) {
    auto sys = random_system(rng);
    auto f = feasible(sys);
    CHECK(check_certificate(sys, f));
    auto oracle = fourier_motzkin(sys);
    if (!oracle) continue;
    ++decided;
    CHECK(f.feasible == *oracle);
    sat += f.feasible;
  }
  CHECK(decided > 1900);
  // Both outcomes must be well represented.
  CHECK(sat > 300);
  CHECK(sat < 1700);
}

TEST_CASE("property: dense, sparse and greedy tableaus agree") {
  std::mt19937_64 rng(32);
  for (int round = 0; round < 500; ++round) {
    auto sys = random_system(rng);
    LpOptions dense, sparse, greedy;
    dense.tableau = TableauKind::dense;
    sparse.tableau = TableauKind::sparse;
    greedy.pivot = simplex::PivotRule::greedy;
    auto a = feasible(sys, dense);
    auto b = feasible(sys, sparse);
    auto c = feasible(sys, greedy);
    CHECK(a.feasible == b.feasible);
    CHECK(a.witness == b.witness);
    CHECK(a.certificate == b.certificate);
    CHECK(a.feasible == c.feasible);
  }
}

TEST_CASE("larger systems take the sparse path") {
  // 40 chained equalities x_{i+1} = x_i + 1 with x_0 = 0, plus x_40 <= 39.5.
  LinearSystem sys(41);
  sys.add_row({{0, 1}}, Relation::eq, 0);
  for (std::size_t i = 0; i < 40; ++i) sys.add_row({{i + 1, 1}, {i, -1}}, Relation::eq, 1);
  auto ok = feasible(sys);
  REQUIRE(ok.feasible);
  CHECK(ok.witness[40] == 40);
  sys.add_row({{40, -1}}, Relation::ge, Rational(-79, 2));
  auto bad = feasible(sys);
  CHECK_FALSE(bad.feasible);
  CHECK(check_certificate(sys, bad));
}

TEST_CASE("audit counters advance") {
  auto before = audit_counters();
  LinearSystem sys(1);
  sys.add_row({{0, 1}}, Relation::ge, 1);
  feasible(sys);
  auto after = audit_counters();
  CHECK(after.checked == before.checked + 1);
  CHECK(after.failed == 0);
}

TEST_CASE("property: incremental queries agree with one-shot solving") {
  std::mt19937_64 rng(33);
  for (int round = 0; round < 300; ++round) {
    auto sys = random_system(rng);
    IncrementalLp lp(sys);
    // Several queries against the same tableau, in random order.
    for (int q = 0; q < 5; ++q) {
      std::vector<VariableBound> extra;
      const std::size_t k = rng() % 3;
      for (std::size_t i = 0; i < k; ++i)
        extra.push_back({rng() % sys.num_variables(), static_cast<Relation>(rng() % 3),
                         Rational(static_cast<long>(rng() % 5), 1 + rng() % 2)});
      LinearSystem full = sys;
      for (const auto& b : extra) full.add_row({{b.var, Rational(1)}}, b.relation, b.value);
      auto inc = lp.feasible_with(extra);
      CHECK(inc.feasible == feasible(full).feasible);
      CHECK(check_certificate(full, inc));
    }
  }
  LinearSystem one(1);
  IncrementalLp lp(one);
  VariableBound bad{3, Relation::ge, Rational(0)};
  CHECK_THROWS_AS(lp.feasible_with(std::span(&bad, 1)), std::invalid_argument);
}
