#include "qcover/mist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace qcover {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

namespace {

// ---------------------------------------------------------------- MIST lexer

enum class Tok { ident, number, ge, eq, arrow, comma, semi, plus, minus, prime, newline, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, std::string(s.substr(i, len)), line, col});
    i += len;
    col += len;
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      push(Tok::newline, 1);
      ++line;
      col = 1;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i, ++col;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i, ++col;
    } else if (ident_start(c)) {
      std::size_t n = 1;
      while (i + n < s.size() && ident_char(s[i + n])) ++n;
      push(Tok::ident, n);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 1;
      while (i + n < s.size() && std::isdigit(static_cast<unsigned char>(s[i + n]))) ++n;
      push(Tok::number, n);
    } else if (s.substr(i, 2) == ">=") {
      push(Tok::ge, 2);
    } else if (s.substr(i, 2) == "->") {
      push(Tok::arrow, 2);
    } else if (c == '=') {
      push(Tok::eq, 1);
    } else if (c == ',') {
      push(Tok::comma, 1);
    } else if (c == ';') {
      push(Tok::semi, 1);
    } else if (c == '+') {
      push(Tok::plus, 1);
    } else if (c == '-') {
      push(Tok::minus, 1);
    } else if (c == '\'') {
      push(Tok::prime, 1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

const char* describe(Tok k) {
  switch (k) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::ge: return "'>='";
    case Tok::eq: return "'='";
    case Tok::arrow: return "'->'";
    case Tok::comma: return "','";
    case Tok::semi: return "';'";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::prime: return "'''";
    case Tok::newline: return "end of line";
    case Tok::end: return "end of input";
  }
  return "token";
}

const std::vector<std::string> kSections{"vars", "rules", "init", "target", "invariants"};

bool is_section(const Token& t) {
  return t.kind == Tok::ident &&
         std::find(kSections.begin(), kSections.end(), t.text) != kSections.end();
}

// --------------------------------------------------------------- MIST parser

class MistParser {
 public:
  explicit MistParser(std::string_view text) : toks_(lex(text)) {}

  Instance run(std::string name) {
    skip_newlines();
    section("vars");
    parse_vars();
    if (at_section("rules")) {
      next();
      parse_rules();
    }
    reject_invariants();
    section("init");
    parse_init();
    reject_invariants();
    section("target");
    parse_targets();
    reject_invariants();
    if (peek().kind != Tok::end) fail("unexpected " + shown(peek()) + " after target section");
    return finish(std::move(name));
  }

 private:
  struct Rule {
    std::map<PlaceIndex, Natural> guard;
    std::map<PlaceIndex, std::pair<long long, Token>> delta;
  };

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  void skip_newlines() {
    while (peek().kind == Tok::newline) ++pos_;
  }
  bool at_section(std::string_view s) {
    skip_newlines();
    return peek().kind == Tok::ident && peek().text == s;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
    throw ParseError(msg, t.line, t.column);
  }
  static std::string shown(const Token& t) {
    if (t.kind == Tok::ident || t.kind == Tok::number) return "'" + t.text + "'";
    return describe(t.kind);
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) fail("expected " + std::string(describe(k)) + ", found " + shown(peek()));
    return next();
  }

  void section(std::string_view s) {
    if (!at_section(s)) fail("missing '" + std::string(s) + "' section, found " + shown(peek()));
    next();
  }

  void reject_invariants() {
    if (at_section("invariants")) fail("'invariants' sections are not supported");
  }

  PlaceIndex variable() {
    const Token& t = expect(Tok::ident);
    auto it = index_.find(t.text);
    if (it == index_.end()) fail_at(t, "unknown variable '" + t.text + "'");
    return it->second;
  }

  Natural number() {
    const Token& t = expect(Tok::number);
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(t.text, &used);
      return static_cast<Natural>(v);
    } catch (const std::out_of_range&) {
      fail_at(t, "number out of range");
    }
  }

  void parse_vars() {
    skip_newlines();
    while (peek().kind == Tok::ident && !is_section(peek())) {
      const Token& t = next();
      if (!index_.emplace(t.text, places_.size()).second)
        fail_at(t, "variable '" + t.text + "' declared twice");
      places_.push_back(t);
      skip_newlines();
    }
    if (places_.empty()) fail("expected at least one variable");
  }

  void parse_rules() {
    skip_newlines();
    while (!(peek().kind == Tok::end || is_section(peek()))) {
      rules_.push_back(parse_rule());
      skip_newlines();
    }
  }

  Rule parse_rule() {
    Rule r;
    skip_newlines();
    if (peek().kind != Tok::arrow) {
      while (true) {
        skip_newlines();
        const Token& at = peek();
        PlaceIndex p = variable();
        if (peek().kind == Tok::eq) fail("rule guards use '>=', found '='");
        expect(Tok::ge);
        Natural n = number();
        if (!r.guard.emplace(p, n).second) fail_at(at, "variable '" + at.text + "' guarded twice");
        skip_newlines();
        if (peek().kind != Tok::comma) break;
        next();
      }
    }
    skip_newlines();
    expect(Tok::arrow);
    skip_newlines();
    if (peek().kind != Tok::semi) {
      while (true) {
        skip_newlines();
        const Token& at = peek();
        PlaceIndex p = variable();
        expect(Tok::prime);
        expect(Tok::eq);
        const Token& rhs = peek();
        if (variable() != p) fail_at(rhs, "update of '" + at.text + "' must read '" + at.text + "'");
        long long d = 0;
        if (peek().kind == Tok::plus || peek().kind == Tok::minus) {
          const bool minus = next().kind == Tok::minus;
          Natural n = number();
          if (n > static_cast<Natural>(std::numeric_limits<long long>::max()))
            fail_at(rhs, "update constant out of range");
          d = minus ? -static_cast<long long>(n) : static_cast<long long>(n);
        }
        if (!r.delta.emplace(p, std::make_pair(d, at)).second)
          fail_at(at, "variable '" + at.text + "' updated twice");
        skip_newlines();
        if (peek().kind != Tok::comma) break;
        next();
      }
    }
    skip_newlines();
    expect(Tok::semi);
    return r;
  }

  void parse_init() {
    init_ = DiscreteMarking(places_.size());
    std::vector<bool> seen(places_.size(), false);
    skip_newlines();
    while (peek().kind == Tok::ident && !is_section(peek())) {
      const Token& at = peek();
      PlaceIndex p = variable();
      if (peek().kind == Tok::ge) fail("interval initial conditions are not supported");
      expect(Tok::eq);
      if (seen[p]) fail_at(at, "variable '" + at.text + "' initialized twice");
      seen[p] = true;
      init_[p] = number();
      skip_newlines();
      if (peek().kind == Tok::comma) {
        next();
        skip_newlines();
      }
    }
  }

  void parse_targets() {
    skip_newlines();
    while (peek().kind == Tok::ident && !is_section(peek())) {
      DiscreteMarking t(places_.size());
      std::vector<bool> seen(places_.size(), false);
      while (true) {
        const Token& at = peek();
        PlaceIndex p = variable();
        expect(Tok::ge);
        if (seen[p]) fail_at(at, "variable '" + at.text + "' bounded twice in one target");
        seen[p] = true;
        t[p] = number();
        if (peek().kind != Tok::comma) break;
        next();
      }
      if (peek().kind == Tok::semi) next();
      if (peek().kind != Tok::newline && peek().kind != Tok::end)
        fail("expected end of target line, found " + shown(peek()));
      targets_.push_back(std::move(t));
      skip_newlines();
    }
    if (targets_.empty()) fail("expected at least one target");
  }

  Instance finish(std::string name) {
    PetriNet::Builder b;
    for (const auto& p : places_) b.add_place(p.text);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const std::string tname = "t" + std::to_string(i + 1);
      if (auto clash = index_.find(tname); clash != index_.end())
        fail_at(places_[clash->second],
                "variable '" + tname + "' clashes with the name of a transition");
      b.add_transition(tname);
      const Rule& r = rules_[i];
      for (const auto& [p, g] : r.guard)
        if (g > 0) b.pre(p, i, g);
      for (PlaceIndex p = 0; p < places_.size(); ++p) {
        auto g = r.guard.count(p) ? r.guard.at(p) : Natural{0};
        auto d = r.delta.find(p);
        if (d == r.delta.end()) {
          if (g > 0) b.post(p, i, g);
          continue;
        }
        const long long delta = d->second.first;
        if (delta < 0 && static_cast<Natural>(-delta) > g)
          fail_at(d->second.second, "Post(" + places_[p].text + "," + tname + ") = " +
                                        std::to_string(g) + " - " + std::to_string(-delta) +
                                        " < 0");
        const Natural post = delta < 0 ? g - static_cast<Natural>(-delta) : g + static_cast<Natural>(delta);
        if (post > 0) b.post(p, i, post);
      }
    }
    return Instance{b.build(), std::move(init_), std::move(targets_), std::move(name)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Token> places_;
  std::map<std::string, PlaceIndex, std::less<>> index_;
  std::vector<Rule> rules_;
  DiscreteMarking init_;
  std::vector<DiscreteMarking> targets_;
};

bool mist_identifier(const std::string& s) {
  if (s.empty() || !ident_start(s[0])) return false;
  if (std::find(kSections.begin(), kSections.end(), s) != kSections.end()) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

std::string serialize_mist(const Instance& inst) {
  const PetriNet& net = inst.net;
  for (const auto& p : net.place_names())
    if (!mist_identifier(p))
      throw std::invalid_argument("place name '" + p + "' is not a MIST identifier");
  if (net.num_places() == 0) throw std::invalid_argument("MIST needs at least one variable");
  std::ostringstream out;
  out << "vars\n ";
  for (const auto& p : net.place_names()) out << ' ' << p;
  out << "\n\nrules\n";
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    out << ' ';
    bool first = true;
    for (const auto& a : net.pre_arcs(t)) {
      out << (first ? " " : ", ") << net.place_name(a.place) << " >= " << a.weight;
      first = false;
    }
    out << " ->";
    first = true;
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
      const Natural pre = net.pre(p, t), post = net.post(p, t);
      if (pre == post) continue;
      const auto& n = net.place_name(p);
      out << (first ? " " : ", ") << n << "' = " << n
          << (post > pre ? " + " : " - ") << (post > pre ? post - pre : pre - post);
      first = false;
    }
    out << ";\n";
  }
  out << "\ninit\n ";
  for (PlaceIndex p = 0; p < net.num_places(); ++p)
    out << (p == 0 ? " " : ", ") << net.place_name(p) << " = " << inst.initial[p];
  out << "\n\ntarget\n";
  for (const auto& t : inst.targets) {
    out << ' ';
    bool first = true;
    for (PlaceIndex p = 0; p < net.num_places(); ++p) {
      if (t[p] == 0) continue;
      out << (first ? " " : ", ") << net.place_name(p) << " >= " << t[p];
      first = false;
    }
    if (first) out << ' ' << net.place_name(0) << " >= 0";
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------- JSON

using Json = nlohmann::ordered_json;

std::pair<std::size_t, std::size_t> position(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class JsonReader {
 public:
  explicit JsonReader(std::string_view text) : text_(text) {}

  Instance run(std::string fallback_name) {
    Json doc;
    try {
      doc = Json::parse(text_);
    } catch (const Json::parse_error& e) {
      auto [line, col] = position(text_, e.byte == 0 ? 0 : e.byte - 1);
      throw ParseError(e.what(), line, col);
    }
    if (!doc.is_object()) fail("", "top level must be an object");
    Instance inst;
    inst.name = fallback_name;
    if (doc.contains("name")) {
      if (!doc["name"].is_string()) fail("name", "'name' must be a string");
      inst.name = doc["name"].get<std::string>();
    }

    PetriNet::Builder b;
    const Json& places = member(doc, "places");
    if (!places.is_array() || places.empty()) fail("places", "'places' must be a non-empty array");
    for (const auto& p : places) {
      if (!p.is_string()) fail("places", "place names must be strings");
      const auto name = p.get<std::string>();
      if (!index_.emplace(name, index_.size()).second)
        fail(name, "place '" + name + "' declared twice");
      b.add_place(name);
    }

    const Json& transitions = member(doc, "transitions");
    if (!transitions.is_array()) fail("transitions", "'transitions' must be an array");
    for (const auto& t : transitions) {
      if (!t.is_object() || !t.contains("name") || !t["name"].is_string())
        fail("transitions", "each transition needs a string 'name'");
      const auto id = b.add_transition(t["name"].get<std::string>());
      if (t.contains("pre"))
        for (const auto& [p, w] : marking_entries(t["pre"], "pre")) b.pre(p, id, w);
      if (t.contains("post"))
        for (const auto& [p, w] : marking_entries(t["post"], "post")) b.post(p, id, w);
    }
    try {
      inst.net = b.build();
    } catch (const NetError& e) {
      fail("", e.what());
    }

    inst.initial = marking(member(doc, "init"), "init");
    const Json& targets = member(doc, "targets");
    if (!targets.is_array() || targets.empty())
      fail("targets", "'targets' must be a non-empty array");
    for (const auto& t : targets) inst.targets.push_back(marking(t, "targets"));
    return inst;
  }

 private:
  // Semantic errors point at the first occurrence of the offending key.
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::size_t at = key.empty() ? std::string_view::npos : text_.find("\"" + key + "\"");
    auto [line, col] = position(text_, at == std::string_view::npos ? 0 : at);
    throw ParseError(msg, line, col);
  }

  const Json& member(const Json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail("", "missing '" + key + "'");
    return obj[key];
  }

  std::vector<std::pair<PlaceIndex, Natural>> marking_entries(const Json& m,
                                                              const std::string& where) const {
    if (!m.is_object()) fail(where, "'" + where + "' must map place names to naturals");
    std::vector<std::pair<PlaceIndex, Natural>> out;
    for (const auto& [name, v] : m.items()) {
      auto it = index_.find(name);
      if (it == index_.end()) fail(name, "unknown place '" + name + "'");
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(name, "value for '" + name + "' must be a natural number");
      out.emplace_back(it->second, v.get<Natural>());
    }
    return out;
  }

  DiscreteMarking marking(const Json& m, const std::string& where) const {
    DiscreteMarking out(index_.size());
    for (const auto& [p, v] : marking_entries(m, where)) out[p] = v;
    return out;
  }

  std::string_view text_;
  std::map<std::string, PlaceIndex, std::less<>> index_;
};

Json sparse(const PetriNet& net, std::span<const PetriNet::Arc> arcs) {
  Json j = Json::object();
  for (const auto& a : arcs) j[net.place_name(a.place)] = a.weight;
  return j;
}

Json sparse(const PetriNet& net, const DiscreteMarking& m) {
  Json j = Json::object();
  for (PlaceIndex p = 0; p < m.size(); ++p)
    if (m[p] > 0) j[net.place_name(p)] = m[p];
  return j;
}

std::string serialize_json(const Instance& inst) {
  const PetriNet& net = inst.net;
  Json j;
  j["name"] = inst.name;
  j["places"] = net.place_names();
  j["transitions"] = Json::array();
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
    j["transitions"].push_back({{"name", net.transition_name(t)},
                                {"pre", sparse(net, net.pre_arcs(t))},
                                {"post", sparse(net, net.post_arcs(t))}});
  j["init"] = sparse(net, inst.initial);
  j["targets"] = Json::array();
  for (const auto& t : inst.targets) j["targets"].push_back(sparse(net, t));
  return j.dump(2) + "\n";
}

}  // namespace

Instance parse(std::string_view text, Format format, std::string name) {
  if (format == Format::json) return JsonReader(text).run(std::move(name));
  return MistParser(text).run(std::move(name));
}

std::string serialize(const Instance& inst, Format format) {
  return format == Format::json ? serialize_json(inst) : serialize_mist(inst);
}

Format format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? Format::json : Format::mist;
}

Instance load_instance(const std::filesystem::path& path, std::optional<Format> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), format.value_or(format_for(path)), path.stem().string());
}

}  // namespace qcover
