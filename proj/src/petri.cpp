#include "qcover/petri.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace qcover {

Natural DiscreteMarking::sum_norm() const {
  return std::accumulate(tokens_.begin(), tokens_.end(), Natural{0});
}

bool DiscreteMarking::covered_by(const DiscreteMarking& other) const {
  if (other.size() != size()) throw NetError("marking dimension mismatch");
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i] > other.tokens_[i]) return false;
  return true;
}

std::string to_string(const DiscreteMarking& m) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m[i];
  out << ')';
  return out.str();
}

RationalMarking::RationalMarking(std::vector<Rational> values) : tokens_(std::move(values)) {
  for (auto& q : tokens_) {
    q.canonicalize();
    if (q < 0) throw NetError("negative marking entry " + q.get_str());
  }
}

RationalMarking::RationalMarking(std::initializer_list<Rational> values)
    : RationalMarking(std::vector<Rational>(values)) {}

RationalMarking::RationalMarking(const DiscreteMarking& m) {
  tokens_.reserve(m.size());
  for (Natural n : m.values()) tokens_.push_back(to_rational(n));
}

std::string to_string(const RationalMarking& m) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m[i].get_str();
  out << ')';
  return out.str();
}

// ---------------------------------------------------------------------------

PetriNet::PetriNet(std::vector<std::string> places, std::vector<std::string> transitions,
                   std::vector<std::vector<Arc>> pre, std::vector<std::vector<Arc>> post)
    : place_names_(std::move(places)),
      transition_names_(std::move(transitions)),
      pre_(std::move(pre)),
      post_(std::move(post)),
      producers_(place_names_.size()),
      consumers_(place_names_.size()) {
  for (TransitionIndex t = 0; t < transition_names_.size(); ++t) {
    for (const Arc& a : pre_[t]) consumers_[a.place].push_back(t);
    for (const Arc& a : post_[t]) producers_[a.place].push_back(t);
  }
}

namespace {

Natural lookup(std::span<const PetriNet::Arc> column, PlaceIndex p) {
  auto it = std::lower_bound(column.begin(), column.end(), p,
                             [](const PetriNet::Arc& a, PlaceIndex q) { return a.place < q; });
  return (it != column.end() && it->place == p) ? it->weight : 0;
}

template <class Names>
std::optional<std::size_t> find_name(const Names& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

std::optional<PlaceIndex> PetriNet::find_place(std::string_view name) const {
  return find_name(place_names_, name);
}

std::optional<TransitionIndex> PetriNet::find_transition(std::string_view name) const {
  return find_name(transition_names_, name);
}

Natural PetriNet::pre(PlaceIndex p, TransitionIndex t) const { return lookup(pre_.at(t), p); }
Natural PetriNet::post(PlaceIndex p, TransitionIndex t) const { return lookup(post_.at(t), p); }

std::size_t PetriNet::nonzeros() const {
  std::size_t n = 0;
  for (TransitionIndex t = 0; t < num_transitions(); ++t) n += pre_[t].size() + post_[t].size();
  return n;
}

PlaceIndex PetriNet::Builder::add_place(std::string name) {
  places_.push_back(std::move(name));
  return places_.size() - 1;
}

TransitionIndex PetriNet::Builder::add_transition(std::string name) {
  transitions_.push_back(std::move(name));
  pre_.emplace_back();
  post_.emplace_back();
  return transitions_.size() - 1;
}

namespace {

void set_arc(std::vector<PetriNet::Arc>& column, PlaceIndex p, Natural w) {
  auto it = std::lower_bound(column.begin(), column.end(), p,
                             [](const PetriNet::Arc& a, PlaceIndex q) { return a.place < q; });
  if (it != column.end() && it->place == p) {
    if (w == 0)
      column.erase(it);
    else
      it->weight = w;
  } else if (w != 0) {
    column.insert(it, PetriNet::Arc{p, w});
  }
}

}  // namespace

PetriNet::Builder& PetriNet::Builder::pre(PlaceIndex p, TransitionIndex t, Natural w) {
  if (p >= places_.size() || t >= transitions_.size()) throw NetError("arc endpoint out of range");
  set_arc(pre_[t], p, w);
  return *this;
}

PetriNet::Builder& PetriNet::Builder::post(PlaceIndex p, TransitionIndex t, Natural w) {
  if (p >= places_.size() || t >= transitions_.size()) throw NetError("arc endpoint out of range");
  set_arc(post_[t], p, w);
  return *this;
}

PetriNet PetriNet::Builder::build() const {
  std::unordered_set<std::string> seen;
  for (const auto* names : {&places_, &transitions_}) {
    for (const auto& n : *names) {
      if (n.empty()) throw NetError("empty place/transition name");
      if (!seen.insert(n).second) throw NetError("duplicate name '" + n + "'");
    }
  }
  return PetriNet(places_, transitions_, pre_, post_);
}

// ---------------------------------------------------------------------------

std::int64_t IncidenceMatrix::operator()(PlaceIndex p, TransitionIndex t) const {
  for (const Entry& e : columns_.at(t))
    if (e.place == p) return e.delta;
  return 0;
}

IncidenceMatrix incidence(const PetriNet& net) {
  std::vector<std::vector<IncidenceMatrix::Entry>> columns(net.num_transitions());
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    auto pre = net.pre_arcs(t);
    auto post = net.post_arcs(t);
    std::size_t i = 0, j = 0;
    while (i < pre.size() || j < post.size()) {
      PlaceIndex p;
      std::int64_t delta = 0;
      if (j == post.size() || (i < pre.size() && pre[i].place < post[j].place)) {
        p = pre[i].place;
        delta = -static_cast<std::int64_t>(pre[i++].weight);
      } else if (i == pre.size() || post[j].place < pre[i].place) {
        p = post[j].place;
        delta = static_cast<std::int64_t>(post[j++].weight);
      } else {
        p = pre[i].place;
        delta = static_cast<std::int64_t>(post[j++].weight) -
                static_cast<std::int64_t>(pre[i++].weight);
      }
      if (delta != 0) columns[t].push_back({p, delta});
    }
  }
  return IncidenceMatrix(net.num_places(), std::move(columns));
}

PetriNet reverse_net(const PetriNet& net) {
  PetriNet::Builder b;
  for (const auto& n : net.place_names()) b.add_place(n);
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    b.add_transition(net.transition_name(t));
    for (const auto& a : net.pre_arcs(t)) b.post(a.place, t, a.weight);
    for (const auto& a : net.post_arcs(t)) b.pre(a.place, t, a.weight);
  }
  return b.build();
}

Subnet subnet(const PetriNet& net, std::span<const TransitionIndex> transitions) {
  std::set<TransitionIndex> ts;
  for (TransitionIndex t : transitions) {
    if (t >= net.num_transitions()) throw NetError("unknown transition index " + std::to_string(t));
    ts.insert(t);
  }
  Subnet result;
  result.transitions.assign(ts.begin(), ts.end());
  result.places = adjacency_of_transitions(net, result.transitions, Side::both);

  std::vector<std::size_t> local(net.num_places(), 0);
  PetriNet::Builder b;
  for (std::size_t i = 0; i < result.places.size(); ++i) {
    local[result.places[i]] = i;
    b.add_place(net.place_name(result.places[i]));
  }
  for (TransitionIndex t : result.transitions) {
    TransitionIndex lt = b.add_transition(net.transition_name(t));
    for (const auto& a : net.pre_arcs(t)) b.pre(local[a.place], lt, a.weight);
    for (const auto& a : net.post_arcs(t)) b.post(local[a.place], lt, a.weight);
  }
  result.net = b.build();
  return result;
}

std::vector<TransitionIndex> adjacency_of_places(const PetriNet& net,
                                                 std::span<const PlaceIndex> places, Side side) {
  std::set<TransitionIndex> out;
  for (PlaceIndex p : places) {
    if (p >= net.num_places()) throw NetError("unknown place index " + std::to_string(p));
    if (side != Side::post) out.insert(net.producers(p).begin(), net.producers(p).end());
    if (side != Side::pre) out.insert(net.consumers(p).begin(), net.consumers(p).end());
  }
  return {out.begin(), out.end()};
}

std::vector<PlaceIndex> adjacency_of_transitions(const PetriNet& net,
                                                 std::span<const TransitionIndex> transitions,
                                                 Side side) {
  std::set<PlaceIndex> out;
  for (TransitionIndex t : transitions) {
    if (t >= net.num_transitions()) throw NetError("unknown transition index " + std::to_string(t));
    if (side != Side::post)
      for (const auto& a : net.pre_arcs(t)) out.insert(a.place);
    if (side != Side::pre)
      for (const auto& a : net.post_arcs(t)) out.insert(a.place);
  }
  return {out.begin(), out.end()};
}

std::vector<NodeRef> adjacency(const PetriNet& net, std::span<const NodeRef> nodes, Side side) {
  if (nodes.empty()) return {};
  const auto kind = nodes.front().kind;
  std::vector<std::size_t> ids;
  for (const NodeRef& n : nodes) {
    if (n.kind != kind) throw NetError("adjacency of a mixed place/transition set");
    ids.push_back(n.index);
  }
  std::vector<NodeRef> out;
  if (kind == NodeRef::Kind::place) {
    for (auto t : adjacency_of_places(net, ids, side)) out.push_back({NodeRef::Kind::transition, t});
  } else {
    for (auto p : adjacency_of_transitions(net, ids, side)) out.push_back({NodeRef::Kind::place, p});
  }
  return out;
}

void check_dimension(const PetriNet& net, std::size_t marking_size) {
  if (marking_size != net.num_places())
    throw NetError("marking has " + std::to_string(marking_size) + " entries, net has " +
                   std::to_string(net.num_places()) + " places");
}

namespace {

void check_transition(const PetriNet& net, TransitionIndex t) {
  if (t >= net.num_transitions()) throw NetError("unknown transition index " + std::to_string(t));
}

}  // namespace

bool enabled(const PetriNet& net, const DiscreteMarking& m, TransitionIndex t) {
  check_dimension(net, m.size());
  check_transition(net, t);
  for (const auto& a : net.pre_arcs(t))
    if (m[a.place] < a.weight) return false;
  return true;
}

EnablingDegree enabling_degree(const PetriNet& net, const RationalMarking& m, TransitionIndex t) {
  check_dimension(net, m.size());
  check_transition(net, t);
  auto arcs = net.pre_arcs(t);
  if (arcs.empty()) return EnablingDegree::infinite();
  Rational best = m[arcs[0].place] / to_rational(arcs[0].weight);
  for (const auto& a : arcs.subspan(1)) {
    Rational q = m[a.place] / to_rational(a.weight);
    if (q < best) best = q;
  }
  return EnablingDegree::finite(best);
}

DiscreteMarking fire_discrete(const PetriNet& net, const DiscreteMarking& m, TransitionIndex t) {
  if (!enabled(net, m, t))
    throw FiringError("transition " + net.transition_name(t) + " not enabled at " + to_string(m));
  DiscreteMarking out = m;
  for (const auto& a : net.pre_arcs(t)) out[a.place] -= a.weight;
  for (const auto& a : net.post_arcs(t)) out[a.place] += a.weight;
  return out;
}

RationalMarking fire_continuous(const PetriNet& net, const RationalMarking& m, TransitionIndex t,
                                const Rational& amount) {
  if (amount < 0) throw FiringError("negative firing amount " + amount.get_str());
  EnablingDegree degree = enabling_degree(net, m, t);
  if (!degree.admits(amount))
    throw FiringError("amount " + amount.get_str() + " exceeds enabling degree " +
                      degree.value().get_str() + " of " + net.transition_name(t));
  std::vector<Rational> out = m.values();
  for (const auto& a : net.pre_arcs(t)) out[a.place] -= amount * to_rational(a.weight);
  for (const auto& a : net.post_arcs(t)) out[a.place] += amount * to_rational(a.weight);
  return RationalMarking(std::move(out));
}

FiringSequence::FiringSequence(std::vector<FiringStep> steps) : steps_(std::move(steps)) {
  for (auto& s : steps_) {
    s.amount.canonicalize();
    if (s.amount <= 0) throw FiringError("firing amounts must be positive");
  }
}

RationalMarking FiringSequence::replay(const PetriNet& net, RationalMarking start) const {
  for (const auto& s : steps_) start = fire_continuous(net, start, s.transition, s.amount);
  return start;
}

std::vector<Rational> parikh(const FiringSequence& seq, std::size_t num_transitions) {
  std::vector<Rational> out(num_transitions);
  for (const auto& s : seq.steps()) {
    if (s.transition >= num_transitions) throw NetError("step transition out of range");
    out[s.transition] += s.amount;
  }
  return out;
}

std::vector<std::size_t> support(std::span<const Rational> vector) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vector.size(); ++i)
    if (vector[i] != 0) out.push_back(i);
  return out;
}

}  // namespace qcover
