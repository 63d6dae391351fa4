#include "qcover/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qcover {

struct Formula::Node {
  Kind kind;
  Atom atom;
  std::vector<Formula> children;
  std::vector<Var> bound;
  std::size_t nodes = 1;
  std::size_t terms = 0;
};

Formula Formula::truth() { return Formula(std::make_shared<const Node>(Node{Kind::top, {}, {}, {}})); }
Formula Formula::falsity() {
  return Formula(std::make_shared<const Node>(Node{Kind::bottom, {}, {}, {}}));
}

Formula Formula::atom(Atom a) {
  Node n{Kind::atom, std::move(a), {}, {}};
  n.terms = n.atom.terms.size();
  return Formula(std::make_shared<const Node>(std::move(n)));
}

namespace {

template <class N>
void sum_sizes(N& n) {
  for (const auto& c : n.children) {
    n.nodes += c.node_count();
    n.terms += c.term_count();
  }
}

}  // namespace

Formula Formula::conj(std::vector<Formula> children) {
  Node n{Kind::conj, {}, std::move(children), {}};
  sum_sizes(n);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::disj(std::vector<Formula> children) {
  Node n{Kind::disj, {}, std::move(children), {}};
  sum_sizes(n);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::implies(Formula premise, Formula conclusion) {
  Node n{Kind::implies, {}, {std::move(premise), std::move(conclusion)}, {}};
  sum_sizes(n);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::exists(std::vector<Var> bound, Formula body) {
  std::sort(bound.begin(), bound.end());
  bound.erase(std::unique(bound.begin(), bound.end()), bound.end());
  Node n{Kind::exists, {}, {std::move(body)}, std::move(bound)};
  sum_sizes(n);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const Atom& Formula::as_atom() const {
  if (node_->kind != Kind::atom) throw std::logic_error("Formula::as_atom: not an atom");
  return node_->atom;
}

const std::vector<Formula>& Formula::children() const { return node_->children; }
const std::vector<Var>& Formula::bound() const { return node_->bound; }
std::size_t Formula::node_count() const { return node_->nodes; }
std::size_t Formula::term_count() const { return node_->terms; }

namespace {

void collect(const Formula& f, std::set<Var>& out, std::multiset<Var>& shadow, bool free_only) {
  switch (f.kind()) {
    case Formula::Kind::atom:
      for (const auto& t : f.as_atom().terms)
        if (!free_only || !shadow.contains(t.var)) out.insert(t.var);
      return;
    case Formula::Kind::exists:
      if (!free_only) out.insert(f.bound().begin(), f.bound().end());
      for (const auto& v : f.bound()) shadow.insert(v);
      collect(f.children()[0], out, shadow, free_only);
      for (const auto& v : f.bound()) shadow.erase(shadow.find(v));
      return;
    default:
      for (const auto& c : f.children()) collect(c, out, shadow, free_only);
  }
}

}  // namespace

std::vector<Var> Formula::free_vars() const {
  std::set<Var> out;
  std::multiset<Var> shadow;
  collect(*this, out, shadow, true);
  return {out.begin(), out.end()};
}

std::vector<Var> Formula::all_vars() const {
  std::set<Var> out;
  std::multiset<Var> shadow;
  collect(*this, out, shadow, false);
  return {out.begin(), out.end()};
}

bool holds(const Formula& f, const std::map<Var, Rational>& assignment) {
  switch (f.kind()) {
    case Formula::Kind::top:
      return true;
    case Formula::Kind::bottom:
      return false;
    case Formula::Kind::atom: {
      const Atom& a = f.as_atom();
      Rational lhs = 0;
      for (const auto& t : a.terms) {
        auto it = assignment.find(t.var);
        if (it == assignment.end()) throw std::invalid_argument("holds: unassigned variable");
        lhs += t.coeff * it->second;
      }
      switch (a.cmp) {
        case Cmp::eq: return lhs == a.rhs;
        case Cmp::ge: return lhs >= a.rhs;
        case Cmp::gt: return lhs > a.rhs;
        case Cmp::le: return lhs <= a.rhs;
        case Cmp::lt: return lhs < a.rhs;
      }
      return false;
    }
    case Formula::Kind::conj:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return holds(c, assignment); });
    case Formula::Kind::disj:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return holds(c, assignment); });
    case Formula::Kind::implies:
      return !holds(f.children()[0], assignment) || holds(f.children()[1], assignment);
    case Formula::Kind::exists:
      return holds(f.children()[0], assignment);
  }
  return false;
}

Var z_place(Direction d, PlaceIndex p) {
  return {d == Direction::forward ? VarKind::zf : VarKind::zb, p};
}

Var z_transition(Direction d, const PetriNet& net, TransitionIndex t) {
  return {d == Direction::forward ? VarKind::zf : VarKind::zb, net.num_places() + t};
}

namespace {

Formula positive(Var v) { return Formula::atom({{{v, Rational(1)}}, Cmp::gt, 0}); }

// a - b cmp 0
Formula compare(Var a, Cmp cmp, Var b) {
  return Formula::atom({{{a, Rational(1)}, {b, Rational(-1)}}, cmp, 0});
}

Var y(TransitionIndex t) { return {VarKind::y, t}; }

}  // namespace

Formula build_fs_formula(const PetriNet& net, const MarkingArg& marking, Direction direction) {
  std::vector<Var> zs;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) zs.push_back(z_place(direction, p));
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
    zs.push_back(z_transition(direction, net, t));

  std::vector<Formula> parts;
  // Input places of a used transition are marked no later than it fires.
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    std::vector<Formula> inputs;
    const Var zt = z_transition(direction, net, t);
    for (const auto& arc : net.pre_arcs(t)) {
      const Var zp = z_place(direction, arc.place);
      inputs.push_back(positive(zp));
      inputs.push_back(compare(zp, Cmp::le, zt));
    }
    parts.push_back(Formula::implies(positive(y(t)), Formula::conj(std::move(inputs))));
  }
  // A place with positive order is marked initially or by an earlier producer.
  const auto* constants = std::get_if<RationalMarking>(&marking);
  if (constants) check_dimension(net, constants->size());
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    if (constants && (*constants)[p] > 0) continue;
    std::vector<Formula> reasons;
    if (!constants) reasons.push_back(positive({std::get<VarKind>(marking), p}));
    const Var zp = z_place(direction, p);
    for (TransitionIndex t : net.producers(p))
      reasons.push_back(Formula::conj({positive(y(t)), compare(z_transition(direction, net, t), Cmp::lt, zp)}));
    parts.push_back(Formula::implies(positive(zp), Formula::disj(std::move(reasons))));
  }
  return Formula::exists(std::move(zs), Formula::conj(std::move(parts)));
}

namespace {

// x = C·y + w for each place, where x and w are variable families or constants.
std::vector<Formula> state_equation(const PetriNet& net, const MarkingArg& w, VarKind x) {
  const IncidenceMatrix c = incidence(net);
  std::vector<std::vector<Term>> rows(net.num_places());
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
    for (const auto& e : c.column(t)) rows[e.place].push_back({y(t), to_rational(-e.delta)});
  std::vector<Formula> out;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    std::vector<Term> terms{{Var{x, p}, Rational(1)}};
    terms.insert(terms.end(), rows[p].begin(), rows[p].end());
    Rational rhs = 0;
    if (const auto* k = std::get_if<RationalMarking>(&w))
      rhs = (*k)[p];
    else
      terms.push_back({Var{std::get<VarKind>(w), p}, Rational(-1)});
    out.push_back(Formula::atom({std::move(terms), Cmp::eq, rhs}));
  }
  return out;
}

Formula reach(const PetriNet& net, const MarkingArg& w, VarKind x) {
  std::vector<Formula> parts = state_equation(net, w, x);
  parts.push_back(build_fs_formula(net, w, Direction::forward));
  parts.push_back(build_fs_formula(reverse_net(net), x, Direction::backward));
  std::vector<Var> ys;
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) ys.push_back(y(t));
  return Formula::exists(std::move(ys), Formula::conj(std::move(parts)));
}

}  // namespace

Formula build_reach_formula(const PetriNet& net) { return reach(net, VarKind::w, VarKind::x); }

Formula build_cover_query(const PetriNet& net, const DiscreteMarking& m0) {
  check_dimension(net, m0.size());
  std::vector<Formula> parts{reach(net, RationalMarking(m0), VarKind::r)};
  std::vector<Var> rs;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    rs.push_back({VarKind::r, p});
    parts.push_back(compare({VarKind::r, p}, Cmp::ge, {VarKind::x, p}));
  }
  return Formula::exists(std::move(rs), Formula::conj(std::move(parts)));
}

namespace {

bool simple_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

std::string symbol(const std::string& raw) {
  if (std::all_of(raw.begin(), raw.end(), simple_symbol_char)) return raw;
  std::string out = "|";
  for (char c : raw) {
    if (c == '|' || c == '\\') {
      static const char* hex = "0123456789abcdef";
      out += "_x";
      out += hex[(static_cast<unsigned char>(c) >> 4) & 15];
      out += hex[static_cast<unsigned char>(c) & 15];
      out += '_';
    } else {
      out += c;
    }
  }
  return out + "|";
}

std::string number(const Rational& q) {
  Rational a = abs(q);
  std::string body = a.get_den() == 1 ? a.get_num().get_str()
                                      : "(/ " + a.get_num().get_str() + " " + a.get_den().get_str() + ")";
  return q < 0 ? "(- " + body + ")" : body;
}

void emit(const Formula& f, const PetriNet& net, std::ostream& out) {
  switch (f.kind()) {
    case Formula::Kind::top: out << "true"; return;
    case Formula::Kind::bottom: out << "false"; return;
    case Formula::Kind::atom: {
      const Atom& a = f.as_atom();
      static const char* ops[] = {"=", ">=", ">", "<=", "<"};
      out << '(' << ops[static_cast<int>(a.cmp)] << ' ';
      auto term = [&](const Term& t) {
        std::string name = symbol(var_name(t.var, net));
        if (t.coeff == 1)
          out << name;
        else if (t.coeff == -1)
          out << "(- " << name << ')';
        else
          out << "(* " << number(t.coeff) << ' ' << name << ')';
      };
      if (a.terms.empty()) {
        out << '0';
      } else if (a.terms.size() == 1) {
        term(a.terms[0]);
      } else {
        out << "(+";
        for (const auto& t : a.terms) {
          out << ' ';
          term(t);
        }
        out << ')';
      }
      out << ' ' << number(a.rhs) << ')';
      return;
    }
    case Formula::Kind::exists:
      emit(f.children()[0], net, out);
      return;
    default: {
      const auto& cs = f.children();
      if (cs.empty()) {
        out << (f.kind() == Formula::Kind::conj ? "true" : "false");
        return;
      }
      out << (f.kind() == Formula::Kind::conj ? "(and" : f.kind() == Formula::Kind::disj ? "(or" : "(=>");
      for (const auto& c : cs) {
        out << ' ';
        emit(c, net, out);
      }
      out << ')';
    }
  }
}

}  // namespace

std::string var_name(const Var& v, const PetriNet& net) {
  auto node = [&](std::size_t i) {
    return i < net.num_places() ? net.place_name(i) : net.transition_name(i - net.num_places());
  };
  switch (v.kind) {
    case VarKind::w: return "w_" + net.place_name(v.index);
    case VarKind::x: return "x_" + net.place_name(v.index);
    case VarKind::r: return "r_" + net.place_name(v.index);
    case VarKind::y: return "y_" + net.transition_name(v.index);
    case VarKind::zf: return "zf_" + node(v.index);
    case VarKind::zb: return "zb_" + node(v.index);
  }
  return {};
}

std::string emit_smtlib(const Formula& f, const PetriNet& net) {
  std::ostringstream out;
  out << "(set-logic QF_LRA)\n";
  const auto vars = f.all_vars();
  for (const auto& v : vars) out << "(declare-fun " << symbol(var_name(v, net)) << " () Real)\n";
  for (const auto& v : vars) out << "(assert (>= " << symbol(var_name(v, net)) << " 0))\n";
  // Split a top-level conjunction (under binders) into separate asserts.
  Formula body = f;
  while (body.kind() == Formula::Kind::exists) body = body.children()[0];
  if (body.kind() == Formula::Kind::conj && !body.children().empty()) {
    for (const auto& c : body.children()) {
      out << "(assert ";
      emit(c, net, out);
      out << ")\n";
    }
  } else {
    out << "(assert ";
    emit(body, net, out);
    out << ")\n";
  }
  out << "(check-sat)\n";
  return out.str();
}

}  // namespace qcover
