#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcover/mist.hpp"

using namespace qcover;

namespace {

const char* kNetF = R"(# two places, one of them never marked
vars
  p0 p1

rules
  p0 >= 2 -> p0' = p0 - 1, p1' = p1 + 1;
  p0 >= 1 -> p0' = p0 - 1;

init
  p0 = 1, p1 = 0

target
  p1 >= 1
)";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ParseError parse_error(const std::string& text, Format f = Format::mist) {
  try {
    parse(text, f);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for: " << text);
  return ParseError("", 0, 0);
}

Instance random_instance(std::mt19937_64& rng) {
  const std::size_t places = 1 + rng() % 5;
  Instance inst{fixtures::random_net(rng, places, rng() % 5, 3),
                fixtures::random_marking(rng, places, 4),
                {},
                "random"};
  const std::size_t n = 1 + rng() % 3;
  for (std::size_t i = 0; i < n; ++i) inst.targets.push_back(fixtures::random_marking(rng, places, 2));
  return inst;
}

}  // namespace

TEST_CASE("parse the two-place net") {
  auto inst = parse(kNetF, Format::mist, "f");
  const auto& net = inst.net;
  REQUIRE(net.num_places() == 2);
  REQUIRE(net.num_transitions() == 2);
  CHECK(net.place_names() == std::vector<std::string>{"p0", "p1"});
  CHECK(net.transition_names() == std::vector<std::string>{"t1", "t2"});
  CHECK(net.pre(0, 0) == 2);
  CHECK(net.post(0, 0) == 1);
  CHECK(net.post(1, 0) == 1);
  CHECK(net.pre(1, 0) == 0);
  CHECK(net.pre(0, 1) == 1);
  CHECK(net.post(0, 1) == 0);
  CHECK(inst.initial == DiscreteMarking{1, 0});
  CHECK(inst.targets == std::vector<DiscreteMarking>{{0, 1}});
  CHECK(inst.name == "f");
  CHECK(net == fixtures::net_f());
}

TEST_CASE("optional pieces of the grammar") {
  auto inst = parse("vars x y\ninit x = 3\ntarget\n y >= 2\n x >= 1, y >= 1\n", Format::mist);
  CHECK(inst.net.num_transitions() == 0);
  CHECK(inst.initial == DiscreteMarking{3, 0});
  CHECK(inst.targets == std::vector<DiscreteMarking>{{0, 2}, {1, 1}});

  // Empty guard, unchanged variable, identity update, rule over two lines.
  inst = parse("vars a b\nrules\n -> a' = a + 2;\n b >= 1,\n a >= 1 -> b' = b;\ninit\ntarget a >= 0\n",
               Format::mist);
  REQUIRE(inst.net.num_transitions() == 2);
  CHECK(inst.net.pre_arcs(0).empty());
  CHECK(inst.net.post(0, 0) == 2);
  CHECK(inst.net.pre(0, 1) == 1);
  CHECK(inst.net.post(0, 1) == 1);
  CHECK(inst.net.post(1, 1) == 1);
  CHECK(inst.initial == DiscreteMarking{0, 0});
  CHECK(inst.targets == std::vector<DiscreteMarking>{{0, 0}});
}

TEST_CASE("located errors") {
  auto e = parse_error("vars p0\nrules\n  p0 >= 1 -> p0' = p0 - 2;\ninit\ntarget p0 >= 1\n");
  CHECK(e.line() == 3);
  CHECK(e.column() == 14);
  CHECK(e.message().find("< 0") != std::string::npos);

  e = parse_error("vars p\ninit q = 1\ntarget p >= 1\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 6);
  CHECK(e.message().find("unknown variable") != std::string::npos);

  e = parse_error("vars p\ntarget p >= 1\n");
  CHECK(e.line() == 2);
  CHECK(e.message().find("'init'") != std::string::npos);

  e = parse_error("vars p\ninit p = 1\n");
  CHECK(e.message().find("'target'") != std::string::npos);

  e = parse_error("vars p\ninit p >= 1\ntarget p >= 1\n");
  CHECK(e.message().find("interval") != std::string::npos);

  e = parse_error("vars p\ninit p = 1\ninvariants\n p = 1\ntarget p >= 1\n");
  CHECK(e.line() == 3);
  CHECK(e.message().find("invariants") != std::string::npos);

  e = parse_error("vars p\ninit p = 1\ntarget p >= 1 & p >= 2\n");
  CHECK(e.line() == 3);
  CHECK(e.column() == 15);

  e = parse_error("vars p t1\nrules p >= 1 -> ;\ninit\ntarget p >= 1\n");
  CHECK(e.line() == 1);
  CHECK(e.column() == 8);

  e = parse_error("vars p q\nrules p >= 1 -> p' = q + 1;\ninit\ntarget p >= 1\n");
  CHECK(e.message().find("must read") != std::string::npos);

  e = parse_error("vars p\nrules p >= 1 -> p' = p - 1\ninit\ntarget p >= 1\n");
  CHECK(e.message().find("';'") != std::string::npos);

  CHECK(parse_error("vars\ninit\ntarget\n").message().find("variable") != std::string::npos);
  CHECK(parse_error("vars p\ninit\ntarget\n").message().find("target") != std::string::npos);
  CHECK(parse_error("vars p p\ninit\ntarget p >= 1").message().find("twice") != std::string::npos);
}

TEST_CASE("serialize round trips") {
  auto inst = parse(kNetF, Format::mist, "f");
  auto text = serialize(inst, Format::mist);
  CHECK(parse(text, Format::mist, "f") == inst);
  CHECK(parse(serialize(inst, Format::json), Format::json) == inst);

  PetriNet::Builder b;
  b.add_place("p");
  Instance idle{b.build(), {0}, {{0}}, "idle"};
  text = serialize(idle, Format::mist);
  CHECK(text.find("rules\n") != std::string::npos);
  CHECK(text.find("p >= 0") != std::string::npos);
  CHECK(parse(text, Format::mist, "idle") == idle);

  PetriNet::Builder odd;
  odd.add_place("needs quoting");
  Instance bad{odd.build(), {0}, {{1}}, "x"};
  CHECK_THROWS_AS(serialize(bad, Format::mist), std::invalid_argument);
  CHECK(parse(serialize(bad, Format::json), Format::json) == bad);
}

TEST_CASE("json emission of the two-place net is pinned") {
  auto inst = parse(kNetF, Format::mist, "f");
  const std::string golden = read_file(std::string(QCOVER_TEST_DATA) + "/f.json");
  REQUIRE_FALSE(golden.empty());
  CHECK(serialize(inst, Format::json) == golden);
  CHECK(parse(golden, Format::json) == inst);
}

TEST_CASE("json errors") {
  auto e = parse_error("{\n  \"places\": [\"p\",\n  ]\n}", Format::json);
  CHECK(e.line() == 3);

  e = parse_error(R"({"places": ["p"], "transitions": [], "init": {"q": 1}, "targets": [{}]})",
                  Format::json);
  CHECK(e.message().find("unknown place 'q'") != std::string::npos);
  CHECK(e.line() == 1);
  CHECK(e.column() == 47);

  e = parse_error(R"({"places": ["p"], "transitions": [], "init": {"p": -1}, "targets": [{}]})",
                  Format::json);
  CHECK(e.message().find("natural") != std::string::npos);
  e = parse_error(R"({"places": ["p"], "transitions": [], "init": {}})", Format::json);
  CHECK(e.message().find("targets") != std::string::npos);
  e = parse_error(R"({"places": ["p"], "transitions": [{"name": "p"}], "init": {}, "targets": [{}]})",
                  Format::json);
  CHECK(e.message().find("duplicate") != std::string::npos);
}

TEST_CASE("format by extension") {
  CHECK(format_for("a/b.json") == Format::json);
  CHECK(format_for("a/b.spec") == Format::mist);
  CHECK(format_for("noext") == Format::mist);
}

TEST_CASE("property: parse inverts serialize in both formats") {
  std::mt19937_64 rng(81);
  for (int round = 0; round < 300; ++round) {
    auto inst = random_instance(rng);
    CHECK(parse(serialize(inst, Format::json), Format::json) == inst);
    // MIST keeps neither the instance name nor transition names (they are t1..tn anyway).
    CHECK(parse(serialize(inst, Format::mist), Format::mist, inst.name) == inst);
    auto text = serialize(inst, Format::mist);
    CHECK(serialize(parse(text, Format::mist, inst.name), Format::mist) == text);
  }
}
