#include "qcover/generate.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace qcover {

namespace {

// std::uniform_int_distribution differs between library vendors, so draws are
// taken straight from the engine, whose output sequence is fixed by the standard.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return rng_() % n; }
  Natural in(Natural lo, Natural hi) { return lo + below(hi - lo + 1); }
  bool percent(unsigned p) { return below(100) < p; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

Instance generate(const GenParams& g) {
  if (g.places == 0 || g.transitions == 0)
    throw std::invalid_argument("places and transitions must be at least 1");
  if (g.max_weight == 0) throw std::invalid_argument("max weight must be at least 1");
  if (g.density_percent > 100 || g.read_percent > 100 || g.guarded_percent > 100)
    throw std::invalid_argument("density and read share are percentages");

  Draw draw(g.seed);
  PetriNet::Builder b;
  for (std::size_t p = 0; p < g.places; ++p) b.add_place("p" + std::to_string(p));
  const bool guarded = g.guarded_percent > 0;
  if (guarded && g.places < 2) throw std::invalid_argument("a guarded family needs two places");
  const std::size_t first = guarded ? 1 : 0;
  const std::size_t free = g.places - first;

  // Guarded family: t1 relays one token of a marked source into the target
  // place, so the target is always coverable in the continuous semantics.
  std::size_t source = 0, goal = 0;
  Natural goal_value = 0;
  if (guarded) {
    source = first + draw.below(free);
    goal = first + draw.below(free);
    goal_value = g.max_target == 0 ? 0 : draw.in(1, g.max_target);
    b.add_transition("t1");
    b.pre(0, 0, 2).post(0, 0, 2).pre(source, 0, 1);
    if (goal != source) b.post(goal, 0, goal_value);
  }

  for (std::size_t t = guarded ? 1 : 0; t < g.transitions; ++t) {
    b.add_transition("t" + std::to_string(t + 1));
    if (guarded && draw.percent(g.guarded_percent)) b.pre(0, t, 2).post(0, t, 2);
    bool consumes = false;
    for (std::size_t p = first; p < g.places; ++p) {
      Natural pre = 0;
      if (draw.percent(g.density_percent)) {
        pre = draw.in(1, g.max_weight);
        b.pre(p, t, pre);
        consumes = true;
      }
      if (pre > 0 && draw.percent(g.read_percent))
        b.post(p, t, pre);
      else if (draw.percent(g.density_percent))
        b.post(p, t, draw.in(1, g.max_weight));
    }
    if (!consumes) b.pre(first + draw.below(free), t, draw.in(1, g.max_weight));
  }

  Instance inst;
  inst.net = b.build();
  inst.initial = DiscreteMarking(g.places);
  for (std::size_t p = first; p < g.places; ++p)
    if (draw.percent(g.density_percent)) inst.initial[p] = draw.in(0, g.max_initial);
  DiscreteMarking target(g.places);
  if (guarded) {
    inst.initial[0] = 1;
    inst.initial[source] = std::max<Natural>(inst.initial[source], 1);
    target[goal] = goal_value;
  } else {
    target[draw.below(g.places)] = g.max_target == 0 ? 0 : draw.in(1, g.max_target);
    if (g.places > 1 && draw.percent(50)) {
      Natural& extra = target[draw.below(g.places)];
      extra = std::max(extra, draw.in(0, g.max_target));
    }
  }
  inst.targets.push_back(std::move(target));
  inst.name = "gen-" + std::to_string(g.places) + "x" + std::to_string(g.transitions) + "-s" +
              std::to_string(g.seed);
  return inst;
}

}  // namespace qcover
