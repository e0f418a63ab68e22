#include "tpatch/theory.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "tpatch/error.hpp"

namespace tpatch {

namespace {

bool is_ident_start(char ch) { return (ch >= 'a' && ch <= 'z') || ch == '_'; }
bool is_ident_char(char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char) && s != "not";
}

std::size_t parse_ordinal(std::string_view s, std::string_view whole) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("bad ordinal in component id '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace

// ---------------------------------------------------------------------------
// ComponentId

ComponentId ComponentId::prop(std::string name) {
  return ComponentId{Kind::Prop, std::move(name), 0, 0};
}

ComponentId ComponentId::clause_of(std::string head, std::size_t k) {
  return ComponentId{Kind::Clause, std::move(head), k, 0};
}

ComponentId ComponentId::lit(std::string head, std::size_t k, std::size_t j) {
  return ComponentId{Kind::Lit, std::move(head), k, j};
}

ComponentId ComponentId::parse(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  if (text.size() < 3 || text[1] != ':') {
    throw InputError("malformed component id '" + std::string(whole) + "'");
  }
  const char tag = text[0];
  std::string_view rest = text.substr(2);
  std::vector<std::string_view> parts;
  while (true) {
    auto slash = rest.find('/');
    parts.push_back(rest.substr(0, slash));
    if (slash == std::string_view::npos) break;
    rest.remove_prefix(slash + 1);
  }
  if (!is_identifier(parts[0])) {
    throw InputError("bad proposition name in component id '" + std::string(whole) + "'");
  }
  std::string name(parts[0]);
  switch (tag) {
    case 'p':
      if (parts.size() == 1) return prop(std::move(name));
      break;
    case 'c':
      if (parts.size() == 2) return clause_of(std::move(name), parse_ordinal(parts[1], whole));
      break;
    case 'l':
      if (parts.size() == 3) {
        return lit(std::move(name), parse_ordinal(parts[1], whole),
                   parse_ordinal(parts[2], whole));
      }
      break;
    default:
      break;
  }
  throw InputError("malformed component id '" + std::string(whole) + "'");
}

std::string ComponentId::str() const {
  switch (kind) {
    case Kind::Prop:
      return "p:" + name;
    case Kind::Clause:
      return "c:" + name + "/" + std::to_string(clause);
    case Kind::Lit:
      return "l:" + name + "/" + std::to_string(clause) + "/" + std::to_string(literal);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Theory

Theory::Theory(std::string root, std::vector<Clause> clauses,
               std::vector<std::string> primitives, std::set<std::string> forced_true)
    : root_(std::move(root)),
      clauses_(std::move(clauses)),
      primitives_(std::move(primitives)),
      forced_(std::move(forced_true)) {
  build_index();
}

void Theory::build_index() {
  if (root_.empty()) throw InputError("theory has no root");

  std::set<std::string_view> prim_set;
  for (const auto& p : primitives_) {
    if (!prim_set.insert(p).second) throw InputError("primitive '" + p + "' declared twice");
  }
  if (prim_set.count(root_)) throw InputError("root '" + root_ + "' is declared primitive");

  auto intern = [this](const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, names_.size());
    if (inserted) names_.push_back(name);
    return it->second;
  };

  intern(root_);
  for (const auto& c : clauses_) {
    if (prim_set.count(c.head)) {
      throw InputError("primitive '" + c.head + "' used as a clause head");
    }
    intern(c.head);
  }
  for (const auto& c : clauses_) {
    for (const auto& l : c.body) {
      if (l.prop.empty()) throw InputError("empty literal in clause for '" + c.head + "'");
      intern(l.prop);
    }
  }
  for (const auto& p : primitives_) intern(p);

  primitive_.assign(names_.size(), false);
  for (const auto& p : primitives_) primitive_[ids_.at(p)] = true;

  for (const auto& f : forced_) {
    auto it = ids_.find(f);
    if (it == ids_.end() || primitive_[it->second]) {
      throw InputError("forced proposition '" + f + "' is not an internal proposition");
    }
  }

  clauses_of_.assign(names_.size(), {});
  head_ids_.clear();
  ordinals_.clear();
  literal_ids_.clear();
  for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
    const auto h = ids_.at(clauses_[ci].head);
    head_ids_.push_back(h);
    ordinals_.push_back(clauses_of_[h].size());
    clauses_of_[h].push_back(ci);
    std::vector<std::size_t> lits;
    lits.reserve(clauses_[ci].body.size());
    for (const auto& l : clauses_[ci].body) lits.push_back(ids_.at(l.prop));
    literal_ids_.push_back(std::move(lits));
  }

  // Acyclicity over every slot, live or not: 0 unvisited, 1 on stack, 2 done.
  std::vector<std::uint8_t> state(names_.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t start = 0; start < names_.size(); ++start) {
    if (state[start]) continue;
    // Frame: (prop, position in the flattened list of body props).
    std::vector<std::vector<std::size_t>> succ_cache;
    stack.emplace_back(start, 0);
    state[start] = 1;
    auto successors = [this](std::size_t p) {
      std::vector<std::size_t> out;
      for (auto ci : clauses_of_[p]) {
        out.insert(out.end(), literal_ids_[ci].begin(), literal_ids_[ci].end());
      }
      return out;
    };
    succ_cache.push_back(successors(start));
    while (!stack.empty()) {
      auto& [p, pos] = stack.back();
      auto& succ = succ_cache.back();
      if (pos == succ.size()) {
        state[p] = 2;
        stack.pop_back();
        succ_cache.pop_back();
        continue;
      }
      const auto q = succ[pos++];
      if (state[q] == 1) {
        throw InputError("cyclic dependency through '" + names_[q] + "'");
      }
      if (state[q] == 0) {
        state[q] = 1;
        stack.emplace_back(q, 0);
        succ_cache.push_back(successors(q));
      }
    }
  }
}

std::vector<std::string> Theory::internal_propositions() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!primitive_[i]) out.push_back(names_[i]);
  }
  return out;
}

std::optional<std::size_t> Theory::prop_id(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool Theory::has_proposition(std::string_view name) const { return prop_id(name).has_value(); }

bool Theory::is_primitive(std::string_view name) const {
  auto id = prop_id(name);
  return id && primitive_[*id];
}

bool Theory::is_forced_true(std::string_view name) const {
  return forced_.count(std::string(name)) > 0;
}

std::optional<std::size_t> Theory::clause_index(std::string_view head, std::size_t k) const {
  auto id = prop_id(head);
  if (!id || k >= clauses_of_[*id].size()) return std::nullopt;
  return clauses_of_[*id][k];
}

std::size_t Theory::clause_slots(std::string_view head) const {
  auto id = prop_id(head);
  return id ? clauses_of_[*id].size() : 0;
}

bool Theory::addresses(const ComponentId& c) const {
  switch (c.kind) {
    case ComponentId::Kind::Prop:
      return has_proposition(c.name) && !is_primitive(c.name);
    case ComponentId::Kind::Clause:
      return clause_index(c.name, c.clause).has_value();
    case ComponentId::Kind::Lit: {
      auto ci = clause_index(c.name, c.clause);
      return ci && c.literal < clauses_[*ci].body.size();
    }
  }
  return false;
}

bool Theory::resolves(const ComponentId& c) const {
  if (!addresses(c)) return false;
  switch (c.kind) {
    case ComponentId::Kind::Prop:
      return !is_forced_true(c.name);
    case ComponentId::Kind::Clause:
      return !clauses_[*clause_index(c.name, c.clause)].deleted;
    case ComponentId::Kind::Lit: {
      const auto& clause = clauses_[*clause_index(c.name, c.clause)];
      return !clause.deleted && !clause.body[c.literal].deleted;
    }
  }
  return false;
}

Theory Theory::without(const ComponentId& c) const {
  if (!resolves(c)) throw InputError("component " + c.str() + " does not resolve");
  auto clauses = clauses_;
  auto forced = forced_;
  switch (c.kind) {
    case ComponentId::Kind::Prop:
      forced.insert(c.name);
      break;
    case ComponentId::Kind::Clause:
      clauses[*clause_index(c.name, c.clause)].deleted = true;
      break;
    case ComponentId::Kind::Lit:
      clauses[*clause_index(c.name, c.clause)].body[c.literal].deleted = true;
      break;
  }
  return Theory(root_, std::move(clauses), primitives_, std::move(forced));
}

Theory Theory::with_clause(Clause clause) const {
  auto clauses = clauses_;
  clauses.push_back(std::move(clause));
  return Theory(root_, std::move(clauses), primitives_, forced_);
}

Theory Theory::with_literal(std::size_t clause_index, Literal literal) const {
  auto clauses = clauses_;
  clauses.at(clause_index).body.push_back(std::move(literal));
  return Theory(root_, std::move(clauses), primitives_, forced_);
}

bool operator==(const Theory& a, const Theory& b) {
  if (a.root_ != b.root_ || a.clauses_ != b.clauses_ || a.forced_ != b.forced_) return false;
  std::set<std::string> pa(a.primitives_.begin(), a.primitives_.end());
  std::set<std::string> pb(b.primitives_.begin(), b.primitives_.end());
  return pa == pb;
}

// ---------------------------------------------------------------------------
// Theory text format

namespace {

enum class Tok { Ident, Neck, Comma, Period, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blank();
    Token t{Tok::End, {}, line_, column_};
    if (pos_ >= text_.size()) return t;
    const char ch = text_[pos_];
    if (is_ident_start(ch)) {
      std::size_t end = pos_;
      while (end < text_.size() && is_ident_char(text_[end])) ++end;
      t.kind = Tok::Ident;
      t.text = std::string(text_.substr(pos_, end - pos_));
      advance(end - pos_);
      return t;
    }
    if (ch == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
      t.kind = Tok::Neck;
      advance(2);
      return t;
    }
    if (ch == ',') {
      t.kind = Tok::Comma;
      advance(1);
      return t;
    }
    if (ch == '.') {
      t.kind = Tok::Period;
      advance(1);
      return t;
    }
    throw ParseError(line_, column_, std::string("unexpected character '") + ch + "'");
  }

 private:
  void advance(std::size_t n) {
    pos_ += n;
    column_ += n;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '\n') {
        ++pos_;
        ++line_;
        column_ = 1;
      } else if (ch == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class TheoryParser {
 public:
  explicit TheoryParser(std::string_view text) : lexer_(text) { shift(); }

  Theory parse() {
    std::optional<std::string> root;
    std::vector<Clause> clauses;
    std::vector<std::string> declared;

    while (cur_.kind != Tok::End) {
      if (cur_.kind != Tok::Ident) fail("expected a statement");
      if (cur_.text == "not") fail("'not' cannot start a statement");
      Token first = cur_;
      shift();
      if ((first.text == "root" || first.text == "primitive") && cur_.kind == Tok::Ident) {
        Token name = expect_name();
        expect(Tok::Period, "'.'");
        if (first.text == "root") {
          if (root) throw ParseError(first.line, first.column, "root declared twice");
          root = name.text;
        } else {
          declared.push_back(name.text);
        }
        continue;
      }
      Clause clause{first.text, {}, false};
      if (cur_.kind == Tok::Neck) {
        shift();
        while (true) {
          Literal lit;
          if (cur_.kind == Tok::Ident && cur_.text == "not") {
            lit.negated = true;
            shift();
          }
          lit.prop = expect_name().text;
          clause.body.push_back(std::move(lit));
          if (cur_.kind == Tok::Comma) {
            shift();
            continue;
          }
          break;
        }
      }
      expect(Tok::Period, "'.'");
      clauses.push_back(std::move(clause));
    }
    if (!root) throw ParseError(cur_.line, cur_.column, "missing root declaration");

    // Bodiless names that head nothing default to primitives.
    std::set<std::string> heads;
    for (const auto& c : clauses) heads.insert(c.head);
    std::set<std::string> known(declared.begin(), declared.end());
    std::vector<std::string> primitives = declared;
    for (const auto& c : clauses) {
      for (const auto& l : c.body) {
        if (!heads.count(l.prop) && l.prop != *root && known.insert(l.prop).second) {
          primitives.push_back(l.prop);
        }
      }
    }
    return Theory(*root, std::move(clauses), std::move(primitives));
  }

 private:
  void shift() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(cur_.line, cur_.column, what);
  }

  Token expect_name() {
    if (cur_.kind != Tok::Ident || cur_.text == "not") fail("expected a proposition name");
    Token t = cur_;
    shift();
    return t;
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  Lexer lexer_;
  Token cur_{Tok::End, {}, 1, 1};
};

}  // namespace

Theory parse_theory(std::string_view text) { return TheoryParser(text).parse(); }

std::string clause_text(const Clause& clause) {
  std::string out = clause.head;
  bool first = true;
  for (const auto& l : clause.body) {
    if (l.deleted) continue;
    out += first ? " :- " : ", ";
    if (l.negated) out += "not ";
    out += l.prop;
    first = false;
  }
  out += '.';
  return out;
}

std::string serialize_theory(const Theory& theory) {
  std::ostringstream out;
  out << "root " << theory.root() << ".\n";

  std::set<std::string> referenced;
  for (const auto& c : theory.clauses()) {
    if (c.deleted) continue;
    for (const auto& l : c.body) {
      if (!l.deleted) referenced.insert(l.prop);
    }
  }
  for (const auto& p : theory.primitives()) {
    if (!referenced.count(p)) out << "primitive " << p << ".\n";
  }

  for (const auto& c : theory.clauses()) {
    if (!c.deleted) out << clause_text(c) << '\n';
  }
  for (const auto& p : theory.forced_true()) out << p << ".\n";
  return out.str();
}

std::vector<ComponentId> enumerate_components(const Theory& theory) {
  std::vector<ComponentId> out;
  for (const auto& name : theory.propositions()) {
    auto id = ComponentId::prop(name);
    if (theory.resolves(id)) out.push_back(std::move(id));
  }
  const auto clauses = theory.clauses();
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    if (!clauses[ci].deleted) {
      out.push_back(ComponentId::clause_of(clauses[ci].head, theory.ordinal_of(ci)));
    }
  }
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    if (clauses[ci].deleted) continue;
    for (std::size_t j = 0; j < clauses[ci].body.size(); ++j) {
      if (!clauses[ci].body[j].deleted) {
        out.push_back(ComponentId::lit(clauses[ci].head, theory.ordinal_of(ci), j));
      }
    }
  }
  return out;
}

Theory delete_component(const Theory& theory, const ComponentId& c) { return theory.without(c); }

// ---------------------------------------------------------------------------
// Examples and open sets

void validate_example(const Theory& theory, const Example& example) {
  for (const auto& name : example.true_primitives) {
    if (!theory.is_primitive(name)) {
      throw InputError("example names '" + name + "', which is not a primitive of the theory");
    }
  }
}

std::vector<LabeledExample> parse_examples(std::string_view text) {
  std::vector<LabeledExample> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    LabeledExample ex;
    if (line.front() == '+') {
      ex.label = true;
    } else if (line.front() == '-') {
      ex.label = false;
    } else {
      throw ParseError(line_no, 1, "example line must start with '+' or '-'");
    }
    std::istringstream words{std::string(line.substr(1))};
    std::string word;
    while (words >> word) {
      if (!is_identifier(word)) {
        throw ParseError(line_no, 1, "bad primitive name '" + word + "'");
      }
      ex.example.true_primitives.insert(word);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string serialize_examples(std::span<const LabeledExample> examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += ex.label ? '+' : '-';
    for (const auto& name : ex.example.true_primitives) {
      out += ' ';
      out += name;
    }
    out += '\n';
  }
  return out;
}

PatchableTheory::PatchableTheory(Theory t, std::set<ComponentId> o, RevisionPolicy p)
    : theory(std::move(t)), open(std::move(o)), policy(p) {
  for (const auto& c : open) {
    if (c.kind == ComponentId::Kind::Prop && theory.is_primitive(c.name)) {
      throw InputError("open component " + c.str() + " is a primitive proposition");
    }
    if (!theory.resolves(c)) throw InputError("open component " + c.str() + " does not resolve");
  }
}

std::set<ComponentId> parse_open(std::string_view text) {
  std::set<ComponentId> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(strip_comment(text.substr(0, nl)));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty()) out.insert(ComponentId::parse(line));
  }
  return out;
}

std::string serialize_open(const std::set<ComponentId>& open) {
  std::string out;
  for (const auto& c : open) out += c.str() + "\n";
  return out;
}

}  // namespace tpatch
