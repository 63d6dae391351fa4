#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcover/petri.hpp"

namespace qcover {

/// Variable families. w and x are the initial and final markings of the
/// reachability relation, y the Parikh vector, zf/zb the order variables of
/// the forward and backward firing-set constraints (indexed over P then T),
/// and r the reached marking inside a cover query, whose free variables are x.
enum class VarKind { w, x, y, zf, zb, r };

struct Var {
  VarKind kind = VarKind::w;
  std::size_t index = 0;
  friend auto operator<=>(const Var&, const Var&) = default;
};

struct Term {
  Var var;
  Rational coeff;
};

enum class Cmp { eq, ge, gt, le, lt };

/// sum(terms) cmp rhs
struct Atom {
  std::vector<Term> terms;
  Cmp cmp = Cmp::ge;
  Rational rhs;
};

class Formula {
 public:
  enum class Kind { top, bottom, atom, conj, disj, implies, exists };

  static Formula truth();
  static Formula falsity();
  static Formula atom(Atom a);
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula implies(Formula premise, Formula conclusion);
  static Formula exists(std::vector<Var> bound, Formula body);

  Kind kind() const;
  const Atom& as_atom() const;
  /// Operands; implies has (premise, conclusion), exists has its body.
  const std::vector<Formula>& children() const;
  const std::vector<Var>& bound() const;

  /// Number of tree nodes (connectives, binders and atoms).
  std::size_t node_count() const;
  /// Sum of atom lengths, counted in linear terms.
  std::size_t term_count() const;
  /// Variables occurring outside every binder that captures them, sorted.
  std::vector<Var> free_vars() const;
  /// Every variable occurring anywhere, sorted.
  std::vector<Var> all_vars() const;

  /// Identity of the shared node, for memoization.
  const void* id() const { return node_.get(); }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Atoms and connectives under a total assignment. Binders are transparent:
/// the assignment must also supply the witnesses of bound variables. Throws
/// std::invalid_argument on an unassigned variable.
bool holds(const Formula& f, const std::map<Var, Rational>& assignment);

enum class Direction { forward, backward };

/// Order variable of a place or transition for one direction.
Var z_place(Direction d, PlaceIndex p);
Var z_transition(Direction d, const PetriNet& net, TransitionIndex t);

/// The marking argument of a firing-set constraint: a variable family or
/// constants (which fold the "initially marked" disjuncts away).
using MarkingArg = std::variant<VarKind, RationalMarking>;

/// Firing-set constraint of `net` for marking `marking` and Parikh vector y:
/// ∃z. dt ∧ mk with the z family selected by `direction`. For the backward
/// constraint pass the reverse net.
Formula build_fs_formula(const PetriNet& net, const MarkingArg& marking, Direction direction);

/// ∃y. x = C·y + w ∧ fs(net, w, y) ∧ fs(net⁻¹, x, y), free in w and x.
Formula build_reach_formula(const PetriNet& net);

/// ∃r. reach(m0, r) ∧ r ≥ x with m0 folded in as constants; free in x.
Formula build_cover_query(const PetriNet& net, const DiscreteMarking& m0);

/// SMT-LIB2 script (QF_LRA) for the formula with binders flattened into
/// top-level declarations. Names come from the net.
std::string emit_smtlib(const Formula& f, const PetriNet& net);

std::string var_name(const Var& v, const PetriNet& net);

}  // namespace qcover
