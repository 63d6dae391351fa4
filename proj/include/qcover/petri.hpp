#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcover/rational.hpp"

namespace qcover {

using PlaceIndex = std::size_t;
using TransitionIndex = std::size_t;

/// Raised when a transition is fired outside its enabling condition.
class FiringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for ill-formed nets, unknown ids, dimension mismatches.
class NetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A vector of naturals indexed by places.
class DiscreteMarking {
 public:
  DiscreteMarking() = default;
  explicit DiscreteMarking(std::size_t n) : tokens_(n, 0) {}
  DiscreteMarking(std::initializer_list<Natural> values) : tokens_(values) {}
  explicit DiscreteMarking(std::vector<Natural> values) : tokens_(std::move(values)) {}

  std::size_t size() const { return tokens_.size(); }
  Natural operator[](PlaceIndex p) const { return tokens_[p]; }
  Natural& operator[](PlaceIndex p) { return tokens_[p]; }
  const std::vector<Natural>& values() const { return tokens_; }

  Natural sum_norm() const;
  /// Componentwise <=.
  bool covered_by(const DiscreteMarking& other) const;

  friend bool operator==(const DiscreteMarking&, const DiscreteMarking&) = default;
  friend auto operator<=>(const DiscreteMarking& a, const DiscreteMarking& b) {
    return a.tokens_ <=> b.tokens_;
  }

 private:
  std::vector<Natural> tokens_;
};

std::string to_string(const DiscreteMarking& m);

/// A vector of non-negative exact rationals indexed by places.
class RationalMarking {
 public:
  RationalMarking() = default;
  explicit RationalMarking(std::size_t n) : tokens_(n) {}
  explicit RationalMarking(std::vector<Rational> values);
  RationalMarking(std::initializer_list<Rational> values);
  explicit RationalMarking(const DiscreteMarking& m);

  std::size_t size() const { return tokens_.size(); }
  const Rational& operator[](PlaceIndex p) const { return tokens_[p]; }
  const std::vector<Rational>& values() const { return tokens_; }

  friend bool operator==(const RationalMarking&, const RationalMarking&) = default;

 private:
  std::vector<Rational> tokens_;
};

std::string to_string(const RationalMarking& m);

/// Enabling degree: a non-negative rational or +infinity (empty pre-set).
class EnablingDegree {
 public:
  static EnablingDegree infinite() { return EnablingDegree(); }
  static EnablingDegree finite(Rational q) { return EnablingDegree(std::move(q)); }

  bool is_infinite() const { return !value_.has_value(); }
  /// Only valid when finite.
  const Rational& value() const { return *value_; }
  bool admits(const Rational& q) const { return is_infinite() || q <= *value_; }

  friend bool operator==(const EnablingDegree&, const EnablingDegree&) = default;

 private:
  EnablingDegree() = default;
  explicit EnablingDegree(Rational q) : value_(std::move(q)) {}
  std::optional<Rational> value_;
};

/// Petri net (P, T, Pre, Post). Matrices are stored column-wise (per
/// transition) as sorted sparse arc lists; absent entries are 0.
class PetriNet {
 public:
  struct Arc {
    PlaceIndex place;
    Natural weight;
    friend bool operator==(const Arc&, const Arc&) = default;
  };

  class Builder;

  PetriNet() = default;

  std::size_t num_places() const { return place_names_.size(); }
  std::size_t num_transitions() const { return transition_names_.size(); }

  const std::string& place_name(PlaceIndex p) const { return place_names_.at(p); }
  const std::string& transition_name(TransitionIndex t) const { return transition_names_.at(t); }
  const std::vector<std::string>& place_names() const { return place_names_; }
  const std::vector<std::string>& transition_names() const { return transition_names_; }
  std::optional<PlaceIndex> find_place(std::string_view name) const;
  std::optional<TransitionIndex> find_transition(std::string_view name) const;

  Natural pre(PlaceIndex p, TransitionIndex t) const;
  Natural post(PlaceIndex p, TransitionIndex t) const;
  std::span<const Arc> pre_arcs(TransitionIndex t) const { return pre_.at(t); }
  std::span<const Arc> post_arcs(TransitionIndex t) const { return post_.at(t); }

  /// Transitions with Post(p,t) > 0, ascending.
  std::span<const TransitionIndex> producers(PlaceIndex p) const { return producers_.at(p); }
  /// Transitions with Pre(p,t) > 0, ascending.
  std::span<const TransitionIndex> consumers(PlaceIndex p) const { return consumers_.at(p); }

  std::size_t nonzeros() const;

  friend bool operator==(const PetriNet& a, const PetriNet& b) {
    return a.place_names_ == b.place_names_ && a.transition_names_ == b.transition_names_ &&
           a.pre_ == b.pre_ && a.post_ == b.post_;
  }

 private:
  friend class Builder;
  PetriNet(std::vector<std::string> places, std::vector<std::string> transitions,
           std::vector<std::vector<Arc>> pre, std::vector<std::vector<Arc>> post);

  std::vector<std::string> place_names_;
  std::vector<std::string> transition_names_;
  std::vector<std::vector<Arc>> pre_;
  std::vector<std::vector<Arc>> post_;
  std::vector<std::vector<TransitionIndex>> producers_;
  std::vector<std::vector<TransitionIndex>> consumers_;
};

class PetriNet::Builder {
 public:
  PlaceIndex add_place(std::string name);
  TransitionIndex add_transition(std::string name);
  Builder& pre(PlaceIndex p, TransitionIndex t, Natural w);
  Builder& post(PlaceIndex p, TransitionIndex t, Natural w);
  /// Validates names (non-empty, unique across P and T) and freezes the net.
  PetriNet build() const;

 private:
  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::vector<std::vector<Arc>> pre_;
  std::vector<std::vector<Arc>> post_;
};

/// Integer incidence matrix C = Post - Pre, column-wise sparse.
class IncidenceMatrix {
 public:
  struct Entry {
    PlaceIndex place;
    std::int64_t delta;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  IncidenceMatrix(std::size_t places, std::vector<std::vector<Entry>> columns)
      : places_(places), columns_(std::move(columns)) {}

  std::size_t num_places() const { return places_; }
  std::size_t num_transitions() const { return columns_.size(); }
  std::int64_t operator()(PlaceIndex p, TransitionIndex t) const;
  std::span<const Entry> column(TransitionIndex t) const { return columns_.at(t); }

 private:
  std::size_t places_;
  std::vector<std::vector<Entry>> columns_;
};

IncidenceMatrix incidence(const PetriNet& net);

/// (P, T, Post, Pre).
PetriNet reverse_net(const PetriNet& net);

/// Sub-net N_S over the neighbours of S, together with the index maps back
/// into the parent net. Places and transitions keep ascending parent order.
struct Subnet {
  PetriNet net;
  std::vector<PlaceIndex> places;
  std::vector<TransitionIndex> transitions;
};

Subnet subnet(const PetriNet& net, std::span<const TransitionIndex> transitions);

enum class Side { pre, post, both };

/// Lifted pre-set / post-set / neighbourhood of a set of places (result are
/// transitions) or of a set of transitions (result are places). Sorted.
std::vector<TransitionIndex> adjacency_of_places(const PetriNet& net,
                                                 std::span<const PlaceIndex> places, Side side);
std::vector<PlaceIndex> adjacency_of_transitions(const PetriNet& net,
                                                 std::span<const TransitionIndex> transitions,
                                                 Side side);

/// A node id in P ∪ T, for the homogeneous-set adjacency entry point.
struct NodeRef {
  enum class Kind { place, transition } kind;
  std::size_t index;
};
/// Rejects mixed-kind input with NetError.
std::vector<NodeRef> adjacency(const PetriNet& net, std::span<const NodeRef> nodes, Side side);

bool enabled(const PetriNet& net, const DiscreteMarking& m, TransitionIndex t);
EnablingDegree enabling_degree(const PetriNet& net, const RationalMarking& m, TransitionIndex t);
DiscreteMarking fire_discrete(const PetriNet& net, const DiscreteMarking& m, TransitionIndex t);
RationalMarking fire_continuous(const PetriNet& net, const RationalMarking& m, TransitionIndex t,
                                const Rational& amount);

struct FiringStep {
  Rational amount;
  TransitionIndex transition;
};

/// A Q-firing sequence; amounts are strictly positive.
class FiringSequence {
 public:
  FiringSequence() = default;
  explicit FiringSequence(std::vector<FiringStep> steps);

  const std::vector<FiringStep>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }
  /// Fires every step in order; throws FiringError on the first violation.
  RationalMarking replay(const PetriNet& net, RationalMarking start) const;

 private:
  std::vector<FiringStep> steps_;
};

/// Q-Parikh image over T.
std::vector<Rational> parikh(const FiringSequence& seq, std::size_t num_transitions);

/// Indices with non-zero value.
std::vector<std::size_t> support(std::span<const Rational> vector);

void check_dimension(const PetriNet& net, std::size_t marking_size);

}  // namespace qcover
