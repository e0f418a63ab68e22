#include "tpatch/firstorder.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "tpatch/error.hpp"
#include "tpatch/stability.hpp"

namespace tpatch {

namespace {

bool is_word_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}

bool is_pred_name(std::string_view s) {
  if (s.empty() || !((s[0] >= 'a' && s[0] <= 'z') || s[0] == '_')) return false;
  return s != "not" && std::all_of(s.begin(), s.end(), [](char ch) {
           return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
         });
}

bool is_variable_name(std::string_view s) { return !s.empty() && s[0] >= 'A' && s[0] <= 'Z'; }

std::vector<Term> root_vector(std::size_t n) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Term::var("X" + std::to_string(i + 1)));
  return out;
}

}  // namespace

std::string atom_text(const Atom& atom) {
  if (atom.args.empty()) return atom.pred;
  std::string out = atom.pred + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += atom.args[i].name;
  }
  return out + ")";
}

std::string clause_text(const FOClause& clause) {
  std::string out = atom_text(clause.head);
  bool first = true;
  for (const auto& l : clause.body) {
    if (l.deleted) continue;
    out += first ? " :- " : ", ";
    if (l.negated) out += "not ";
    out += atom_text(l.atom);
    first = false;
  }
  return out + ".";
}

// ---------------------------------------------------------------------------
// FOTheory

FOTheory::FOTheory(std::string root, std::size_t root_arity, std::vector<FOClause> clauses,
                   std::vector<Atom> facts, std::vector<std::string> fact_predicates,
                   std::set<std::string> forced_true)
    : root_(std::move(root)),
      root_arity_(root_arity),
      clauses_(std::move(clauses)),
      facts_(std::move(facts)),
      fact_preds_(std::move(fact_predicates)),
      forced_(std::move(forced_true)) {
  build_index();
}

void FOTheory::build_index() {
  if (!is_pred_name(root_)) throw InputError("bad root predicate '" + root_ + "'");

  auto note_arity = [this](const std::string& pred, std::size_t n) {
    if (!is_pred_name(pred)) throw InputError("bad predicate name '" + pred + "'");
    auto [it, fresh] = arity_.emplace(pred, n);
    if (!fresh && it->second != n) {
      throw InputError("predicate '" + pred + "' used with arities " +
                       std::to_string(it->second) + " and " + std::to_string(n));
    }
  };
  note_arity(root_, root_arity_);

  defined_ = {root_};
  std::set<std::string> defined_set{root_};
  for (const auto& c : clauses_) {
    if (defined_set.insert(c.head.pred).second) defined_.push_back(c.head.pred);
  }

  std::set<std::string> fact_set;
  std::vector<std::string> ordered;
  auto add_fact_pred = [&](const std::string& p) {
    if (defined_set.count(p)) {
      throw InputError("fact predicate '" + p + "' heads a clause");
    }
    if (fact_set.insert(p).second) ordered.push_back(p);
  };
  for (const auto& p : fact_preds_) add_fact_pred(p);
  for (const auto& f : facts_) {
    add_fact_pred(f.pred);
    note_arity(f.pred, f.args.size());
  }

  clauses_of_.clear();
  ordinals_.clear();
  for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
    const auto& c = clauses_[ci];
    note_arity(c.head.pred, c.head.args.size());
    auto& slots = clauses_of_[c.head.pred];
    ordinals_.push_back(slots.size());
    slots.push_back(ci);
    for (const auto& l : c.body) {
      note_arity(l.atom.pred, l.atom.args.size());
      if (!defined_set.count(l.atom.pred)) add_fact_pred(l.atom.pred);
    }
  }
  fact_preds_ = std::move(ordered);
  for (const auto& p : fact_preds_) {
    if (!arity_.count(p)) throw InputError("fact predicate '" + p + "' has no arity");
  }
  for (const auto& p : forced_) {
    if (!defined_set.count(p)) throw InputError("forced predicate '" + p + "' is not defined");
  }

  // Non-recursive: the defined-predicate dependency graph is acyclic.
  std::map<std::string, std::uint8_t> state;
  std::function<void(const std::string&)> visit = [&](const std::string& p) {
    auto& s = state[p];
    if (s == 2) return;
    if (s == 1) throw InputError("recursive dependency through '" + p + "'");
    s = 1;
    if (auto it = clauses_of_.find(p); it != clauses_of_.end()) {
      for (auto ci : it->second) {
        for (const auto& l : clauses_[ci].body) {
          if (defined_set.count(l.atom.pred)) visit(l.atom.pred);
        }
      }
    }
    state[p] = 2;
  };
  for (const auto& p : defined_) visit(p);
}

bool FOTheory::is_fact_predicate(std::string_view pred) const {
  return std::find(fact_preds_.begin(), fact_preds_.end(), pred) != fact_preds_.end();
}

bool FOTheory::is_defined(std::string_view pred) const {
  return std::find(defined_.begin(), defined_.end(), pred) != defined_.end();
}

std::optional<std::size_t> FOTheory::arity(std::string_view pred) const {
  auto it = arity_.find(pred);
  if (it == arity_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FOTheory::clause_index(std::string_view head, std::size_t k) const {
  auto it = clauses_of_.find(head);
  if (it == clauses_of_.end() || k >= it->second.size()) return std::nullopt;
  return it->second[k];
}

std::size_t FOTheory::clause_slots(std::string_view head) const {
  auto it = clauses_of_.find(head);
  return it == clauses_of_.end() ? 0 : it->second.size();
}

bool FOTheory::resolves(const ComponentId& c) const {
  switch (c.kind) {
    case ComponentId::Kind::Prop:
      return is_defined(c.name) && !forced_.count(c.name);
    case ComponentId::Kind::Clause: {
      auto ci = clause_index(c.name, c.clause);
      return ci && !clauses_[*ci].deleted;
    }
    case ComponentId::Kind::Lit: {
      auto ci = clause_index(c.name, c.clause);
      return ci && !clauses_[*ci].deleted && c.literal < clauses_[*ci].body.size() &&
             !clauses_[*ci].body[c.literal].deleted;
    }
  }
  return false;
}

FOTheory FOTheory::without(const ComponentId& c) const {
  if (!resolves(c)) throw InputError("component " + c.str() + " does not resolve");
  FOTheory out = *this;
  switch (c.kind) {
    case ComponentId::Kind::Prop:
      out.forced_.insert(c.name);
      break;
    case ComponentId::Kind::Clause:
      out.clauses_[*clause_index(c.name, c.clause)].deleted = true;
      break;
    case ComponentId::Kind::Lit:
      out.clauses_[*clause_index(c.name, c.clause)].body[c.literal].deleted = true;
      break;
  }
  return out;
}

FOTheory FOTheory::with_clause(FOClause clause) const {
  auto clauses = clauses_;
  clauses.push_back(std::move(clause));
  return FOTheory(root_, root_arity_, std::move(clauses), facts_, fact_preds_, forced_);
}

FOTheory FOTheory::with_literal(std::size_t clause_index, FOLiteral literal) const {
  auto clauses = clauses_;
  clauses.at(clause_index).body.push_back(std::move(literal));
  return FOTheory(root_, root_arity_, std::move(clauses), facts_, fact_preds_, forced_);
}

FOTheory FOTheory::with_facts(std::vector<Atom> facts) const {
  auto all = facts_;
  for (auto& f : facts) all.push_back(std::move(f));
  return FOTheory(root_, root_arity_, clauses_, std::move(all), fact_preds_, forced_);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

enum class FTok { Word, LParen, RParen, Comma, Period, Neck, Slash, End };

struct FToken {
  FTok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class FOLexer {
 public:
  explicit FOLexer(std::string_view text) : text_(text) {}

  FToken next() {
    skip_blank();
    FToken t{FTok::End, {}, line_, column_};
    if (pos_ >= text_.size()) return t;
    const char ch = text_[pos_];
    if (is_word_char(ch)) {
      std::size_t end = pos_;
      while (end < text_.size() && is_word_char(text_[end])) ++end;
      t.kind = FTok::Word;
      t.text = std::string(text_.substr(pos_, end - pos_));
      advance(end - pos_);
      return t;
    }
    if (ch == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
      t.kind = FTok::Neck;
      advance(2);
      return t;
    }
    switch (ch) {
      case '(':
        t.kind = FTok::LParen;
        break;
      case ')':
        t.kind = FTok::RParen;
        break;
      case ',':
        t.kind = FTok::Comma;
        break;
      case '.':
        t.kind = FTok::Period;
        break;
      case '/':
        t.kind = FTok::Slash;
        break;
      default:
        throw ParseError(line_, column_, std::string("unexpected character '") + ch + "'");
    }
    advance(1);
    return t;
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

class FOParser {
 public:
  explicit FOParser(std::string_view text) : lexer_(text) { shift(); }

  FOTheory parse() {
    std::optional<std::pair<std::string, std::size_t>> root;
    std::vector<std::string> declared;
    struct Statement {
      Atom head;
      std::vector<FOLiteral> body;
      bool has_body;
    };
    std::vector<Statement> statements;

    while (cur_.kind != FTok::End) {
      if (cur_.kind != FTok::Word) fail("expected a statement");
      const FToken first = cur_;
      if (first.text == "root" || first.text == "fact") {
        shift();
        if (cur_.kind == FTok::Word) {
          auto name = expect_pred();
          expect(FTok::Slash, "'/'");
          auto n = expect_number();
          expect(FTok::Period, "'.'");
          if (first.text == "root") {
            if (root) throw ParseError(first.line, first.column, "root declared twice");
            root.emplace(std::move(name), n);
          } else {
            declared.push_back(std::move(name));
          }
          continue;
        }
        statements.push_back(Statement{atom_rest(first), {}, false});
      } else {
        statements.push_back(Statement{atom(), {}, false});
      }
      auto& st = statements.back();
      if (cur_.kind == FTok::Neck) {
        shift();
        st.has_body = true;
        while (true) {
          FOLiteral lit;
          if (cur_.kind == FTok::Word && cur_.text == "not") {
            lit.negated = true;
            shift();
          }
          lit.atom = atom();
          st.body.push_back(std::move(lit));
          if (cur_.kind != FTok::Comma) break;
          shift();
        }
      }
      expect(FTok::Period, "'.'");
    }
    if (!root) throw ParseError(cur_.line, cur_.column, "missing root declaration");

    std::set<std::string> defined{root->first};
    for (const auto& st : statements) {
      if (st.has_body) defined.insert(st.head.pred);
    }
    std::vector<FOClause> clauses;
    std::vector<Atom> facts;
    for (auto& st : statements) {
      if (defined.count(st.head.pred)) {
        clauses.push_back(FOClause{std::move(st.head), std::move(st.body), false});
      } else {
        facts.push_back(std::move(st.head));
      }
    }
    return FOTheory(root->first, root->second, std::move(clauses), std::move(facts),
                    std::move(declared));
  }

 private:
  void shift() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(cur_.line, cur_.column, what);
  }

  void expect(FTok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  std::string expect_pred() {
    if (cur_.kind != FTok::Word || !is_pred_name(cur_.text)) fail("expected a predicate name");
    auto out = cur_.text;
    shift();
    return out;
  }

  std::size_t expect_number() {
    if (cur_.kind != FTok::Word ||
        !std::all_of(cur_.text.begin(), cur_.text.end(),
                     [](char ch) { return ch >= '0' && ch <= '9'; })) {
      fail("expected an arity");
    }
    auto out = static_cast<std::size_t>(std::stoul(cur_.text));
    shift();
    return out;
  }

  Atom atom() {
    if (cur_.kind != FTok::Word) fail("expected an atom");
    FToken name = cur_;
    shift();
    return atom_rest(name);
  }

  // The predicate token has been consumed already.
  Atom atom_rest(const FToken& name) {
    if (!is_pred_name(name.text)) {
      throw ParseError(name.line, name.column, "bad predicate name '" + name.text + "'");
    }
    Atom a{name.text, {}};
    if (cur_.kind != FTok::LParen) return a;
    shift();
    while (true) {
      if (cur_.kind != FTok::Word) fail("expected a term");
      a.args.push_back(Term{cur_.text, is_variable_name(cur_.text)});
      shift();
      if (cur_.kind == FTok::Comma) {
        shift();
        continue;
      }
      expect(FTok::RParen, "')'");
      break;
    }
    return a;
  }

  FOLexer lexer_;
  FToken cur_{FTok::End, {}, 1, 1};
};

}  // namespace

FOTheory parse_fo_theory(std::string_view text) { return FOParser(text).parse(); }

std::string serialize_fo_theory(const FOTheory& theory) {
  std::ostringstream out;
  out << "root " << theory.root() << '/' << theory.root_arity() << ".\n";
  std::set<std::string> referenced;
  for (const auto& c : theory.clauses()) {
    if (c.deleted) continue;
    for (const auto& l : c.body) {
      if (!l.deleted) referenced.insert(l.atom.pred);
    }
  }
  for (const auto& f : theory.facts()) referenced.insert(f.pred);
  for (const auto& p : theory.fact_predicates()) {
    if (!referenced.count(p)) out << "fact " << p << '/' << *theory.arity(p) << ".\n";
  }
  for (const auto& c : theory.clauses()) {
    if (!c.deleted) out << clause_text(c) << '\n';
  }
  for (const auto& p : theory.forced_true()) {
    out << atom_text(Atom{p, root_vector(*theory.arity(p))}) << ".\n";
  }
  for (const auto& f : theory.facts()) out << atom_text(f) << ".\n";
  return out.str();
}

std::vector<ComponentId> enumerate_fo_components(const FOTheory& theory) {
  std::vector<ComponentId> out;
  for (const auto& p : theory.defined_predicates()) {
    if (!theory.forced_true().count(p)) out.push_back(ComponentId::prop(p));
  }
  const auto clauses = theory.clauses();
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    if (!clauses[ci].deleted) {
      out.push_back(ComponentId::clause_of(clauses[ci].head.pred, theory.ordinal_of(ci)));
    }
  }
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    if (clauses[ci].deleted) continue;
    for (std::size_t j = 0; j < clauses[ci].body.size(); ++j) {
      if (!clauses[ci].body[j].deleted) {
        out.push_back(ComponentId::lit(clauses[ci].head.pred, theory.ordinal_of(ci), j));
      }
    }
  }
  return out;
}

std::vector<FOLabeledExample> parse_fo_examples(std::string_view text) {
  std::vector<FOLabeledExample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string sign;
    if (!(words >> sign)) continue;
    if (sign != "+" && sign != "-") {
      throw ParseError(line_no, 1, "example must start with '+' or '-'");
    }
    FOLabeledExample ex;
    ex.label = sign == "+";
    std::string c;
    while (words >> c) {
      if (!std::all_of(c.begin(), c.end(), is_word_char) || is_variable_name(c)) {
        throw ParseError(line_no, 1, "bad constant '" + c + "'");
      }
      ex.example.args.push_back(c);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string serialize_fo_examples(std::span<const FOLabeledExample> examples) {
  std::string out;
  for (const auto& e : examples) {
    out += e.label ? '+' : '-';
    for (const auto& c : e.example.args) out += " " + c;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

FOValidation validate_fo(const FOTheory& theory) {
  FOValidation v;
  const auto clauses = theory.clauses();
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    const auto& c = clauses[ci];
    if (c.deleted) continue;
    const auto k = theory.ordinal_of(ci);
    std::set<std::string> head_vars;
    for (const auto& t : c.head.args) {
      if (t.variable) head_vars.insert(t.name);
    }
    const bool head_is_vector = head_vars.size() == c.head.args.size() &&
                                c.head.args.size() == theory.root_arity();
    if (!head_is_vector) v.not_propositional.push_back(ComponentId::clause_of(c.head.pred, k));
    for (std::size_t j = 0; j < c.body.size(); ++j) {
      const auto& l = c.body[j];
      if (l.deleted) continue;
      const auto id = ComponentId::lit(c.head.pred, k, j);
      if (l.negated) v.negation_free = false;
      const bool bound = std::all_of(l.atom.args.begin(), l.atom.args.end(), [&](const Term& t) {
        return !t.variable || head_vars.count(t.name);
      });
      if (!bound) v.unbound.push_back(id);
      if (head_is_vector && l.atom.args != c.head.args) v.not_propositional.push_back(id);
    }
  }
  for (const auto& f : theory.facts()) {
    if (std::any_of(f.args.begin(), f.args.end(), [](const Term& t) { return t.variable; })) {
      v.nonground_facts.push_back(atom_text(f));
    }
  }
  v.completely_bound = v.unbound.empty();
  v.quasi_propositional = v.completely_bound && v.not_propositional.empty();
  v.ground_facts_only = v.nonground_facts.empty();

  std::map<std::string, std::size_t> depth;
  std::function<std::size_t(const std::string&)> depth_of = [&](const std::string& p) {
    if (theory.is_fact_predicate(p)) return std::size_t{0};
    if (auto it = depth.find(p); it != depth.end()) return it->second;
    std::size_t d = 1;
    for (std::size_t k = 0; k < theory.clause_slots(p); ++k) {
      const auto& c = clauses[*theory.clause_index(p, k)];
      if (c.deleted) continue;
      for (const auto& l : c.body) {
        if (!l.deleted) d = std::max(d, depth_of(l.atom.pred) + 1);
      }
    }
    depth.emplace(p, d);
    return d;
  };
  v.depth = depth_of(theory.root());
  return v;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class FOProver {
 public:
  FOProver(const FOTheory& t, const FOExample& e, std::span<const ComponentId> disabled)
      : t_(t), clause_off_(t.clauses().size(), false) {
    if (e.args.size() != t.root_arity()) {
      throw InputError("example has " + std::to_string(e.args.size()) + " arguments, root " +
                       t.root() + " takes " + std::to_string(t.root_arity()));
    }
    lit_on_.resize(t.clauses().size());
    for (std::size_t ci = 0; ci < t.clauses().size(); ++ci) {
      lit_on_[ci].assign(t.clauses()[ci].body.size(), false);
    }
    for (const auto& c : disabled) {
      if (c.kind == ComponentId::Kind::Prop) {
        forced_.insert(c.name);
        continue;
      }
      auto ci = t.clause_index(c.name, c.clause);
      if (!ci) continue;
      if (c.kind == ComponentId::Kind::Clause) {
        clause_off_[*ci] = true;
      } else if (c.literal < lit_on_[*ci].size()) {
        lit_on_[*ci][c.literal] = true;
      }
    }
    std::set<std::string> domain(e.args.begin(), e.args.end());
    for (const auto& c : t.clauses()) {
      for (const auto& a : c.head.args) {
        if (!a.variable) domain.insert(a.name);
      }
      for (const auto& l : c.body) {
        for (const auto& a : l.atom.args) {
          if (!a.variable) domain.insert(a.name);
        }
      }
    }
    for (const auto& f : t.facts()) {
      facts_of_[f.pred].push_back(&f);
      for (const auto& a : f.args) {
        if (!a.variable) domain.insert(a.name);
      }
    }
    domain_.assign(domain.begin(), domain.end());
    root_args_ = e.args;
  }

  bool prove_root() { return prove(t_.root(), root_args_); }

 private:
  using Binding = std::map<std::string, std::string>;

  bool prove(const std::string& pred, const std::vector<std::string>& args) {
    auto key = std::make_pair(pred, args);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool v = false;
    if (t_.is_fact_predicate(pred)) {
      v = matches_fact(pred, args);
    } else if (t_.forced_true().count(pred) || forced_.count(pred)) {
      v = true;
    } else {
      for (std::size_t k = 0; k < t_.clause_slots(pred) && !v; ++k) {
        const auto ci = *t_.clause_index(pred, k);
        const auto& c = t_.clauses()[ci];
        if (c.deleted || clause_off_[ci]) continue;
        Binding b;
        if (unify(c.head.args, args, b)) v = solve(ci, 0, b);
      }
    }
    memo_.emplace(std::move(key), v);
    return v;
  }

  bool matches_fact(const std::string& pred, const std::vector<std::string>& args) const {
    auto it = facts_of_.find(pred);
    if (it == facts_of_.end()) return false;
    for (const Atom* f : it->second) {
      Binding b;
      if (unify(f->args, args, b)) return true;
    }
    return false;
  }

  static bool unify(const std::vector<Term>& pattern, const std::vector<std::string>& args,
                    Binding& b) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const auto& term = pattern[i];
      if (!term.variable) {
        if (term.name != args[i]) return false;
        continue;
      }
      auto [it, fresh] = b.emplace(term.name, args[i]);
      if (!fresh && it->second != args[i]) return false;
    }
    return true;
  }

  bool solve(std::size_t ci, std::size_t j, const Binding& b) {
    const auto& c = t_.clauses()[ci];
    if (j == c.body.size()) return true;
    const auto& l = c.body[j];
    if (l.deleted || lit_on_[ci][j]) return solve(ci, j + 1, b);

    std::vector<std::string> free;
    for (const auto& a : l.atom.args) {
      if (a.variable && !b.count(a.name) &&
          std::find(free.begin(), free.end(), a.name) == free.end()) {
        free.push_back(a.name);
      }
    }
    if (free.empty()) {
      if (prove(l.atom.pred, ground(l.atom, b)) == l.negated) return false;
      return solve(ci, j + 1, b);
    }

    // Unbound variables range over the active domain; under negation they
    // are existential inside the `not`.
    std::vector<std::size_t> pick(free.size(), 0);
    bool any_true = false;
    while (!domain_.empty()) {
      Binding ext = b;
      for (std::size_t i = 0; i < free.size(); ++i) ext[free[i]] = domain_[pick[i]];
      if (prove(l.atom.pred, ground(l.atom, ext))) {
        if (!l.negated && solve(ci, j + 1, ext)) return true;
        any_true = true;
        if (l.negated) break;
      }
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == domain_.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    if (l.negated && !any_true) return solve(ci, j + 1, b);
    return false;
  }

  static std::vector<std::string> ground(const Atom& a, const Binding& b) {
    std::vector<std::string> out;
    out.reserve(a.args.size());
    for (const auto& t : a.args) out.push_back(t.variable ? b.at(t.name) : t.name);
    return out;
  }

  const FOTheory& t_;
  std::vector<bool> clause_off_;
  std::vector<std::vector<bool>> lit_on_;
  std::set<std::string> forced_;
  std::map<std::string, std::vector<const Atom*>> facts_of_;
  std::vector<std::string> domain_;
  std::vector<std::string> root_args_;
  std::map<std::pair<std::string, std::vector<std::string>>, bool> memo_;
};

}  // namespace

bool classify_fo(const FOTheory& theory, const FOExample& example) {
  return FOProver(theory, example, {}).prove_root();
}

bool classify_fo_with(const FOTheory& theory, const FOExample& example,
                      std::span<const ComponentId> disabled) {
  return FOProver(theory, example, disabled).prove_root();
}

// ---------------------------------------------------------------------------
// Patching

FOPatchableTheory::FOPatchableTheory(FOTheory t, std::set<ComponentId> o)
    : theory(std::move(t)), open(std::move(o)) {
  for (const auto& c : open) {
    if (!theory.resolves(c)) throw InputError("open component " + c.str() + " does not resolve");
  }
}

ParityMap compute_fo_parity(const FOTheory& theory) {
  std::vector<std::string> names = theory.defined_predicates();
  const std::size_t n_defined = names.size();
  for (const auto& p : theory.fact_predicates()) names.push_back(p);
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < names.size(); ++i) id.emplace(names[i], i);

  ParityGraph g;
  g.root = id.at(theory.root());
  g.primitive.assign(names.size(), false);
  for (std::size_t i = n_defined; i < names.size(); ++i) g.primitive[i] = true;
  const auto clauses = theory.clauses();
  for (const auto& c : clauses) {
    ParityGraph::Rule r{id.at(c.head.pred), {}, !c.deleted};
    for (const auto& l : c.body) {
      if (l.deleted) {
        r.body.emplace_back(std::nullopt);
      } else {
        r.body.emplace_back(ParityGraph::Occurrence{id.at(l.atom.pred), l.negated});
      }
    }
    g.rules.push_back(std::move(r));
  }
  const auto solved = solve_parity(g);

  ParityMap out;
  for (std::size_t p = 0; p < n_defined; ++p) out.emplace(ComponentId::prop(names[p]), solved.props[p]);
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    if (clauses[ci].deleted) continue;
    const auto k = theory.ordinal_of(ci);
    const auto& head = clauses[ci].head.pred;
    out.emplace(ComponentId::clause_of(head, k), solved.rules[ci]);
    for (std::size_t j = 0; j < clauses[ci].body.size(); ++j) {
      if (!clauses[ci].body[j].deleted) {
        out.emplace(ComponentId::lit(head, k, j), solved.literals[ci][j]);
      }
    }
  }
  return out;
}

Example propositional_example(const FOTheory& theory, const FOExample& example) {
  if (example.args.size() != theory.root_arity()) {
    throw InputError("example has " + std::to_string(example.args.size()) +
                     " arguments, root takes " + std::to_string(theory.root_arity()));
  }
  Example out;
  for (const auto& f : theory.facts()) {
    if (f.args.size() != example.args.size()) continue;
    bool match = true;
    std::map<std::string, std::string> b;
    for (std::size_t i = 0; i < f.args.size() && match; ++i) {
      if (!f.args[i].variable) {
        match = f.args[i].name == example.args[i];
      } else {
        auto [it, fresh] = b.emplace(f.args[i].name, example.args[i]);
        match = fresh || it->second == example.args[i];
      }
    }
    if (match) out.true_primitives.insert(f.pred);
  }
  return out;
}

namespace {

void require_reducible(const FOTheory& theory) {
  const auto v = validate_fo(theory);
  if (!v.quasi_propositional) {
    std::vector<std::string> witness;
    for (const auto& c : v.unbound) witness.push_back(c.str());
    for (const auto& c : v.not_propositional) witness.push_back(c.str());
    throw PreconditionError("theory is not quasi-propositional", std::move(witness));
  }
  if (!v.ground_facts_only) {
    throw PreconditionError("theory has non-ground facts", v.nonground_facts);
  }
}

}  // namespace

Propositionalized propositionalize(const FOPatchableTheory& pt,
                                   std::span<const FOLabeledExample> examples) {
  const auto& t = pt.theory;
  require_reducible(t);

  std::vector<Clause> clauses;
  for (const auto& c : t.clauses()) {
    Clause pc{c.head.pred, {}, c.deleted};
    for (const auto& l : c.body) pc.body.push_back(Literal{l.atom.pred, l.negated, l.deleted});
    clauses.push_back(std::move(pc));
  }
  Theory hat(t.root(), std::move(clauses), t.fact_predicates(), t.forced_true());

  PropositionalizedBundle bundle{PatchableTheory(std::move(hat), pt.open), {}, {}};
  for (const auto& c : pt.open) bundle.component_map.emplace(c, c);
  const auto vec = root_vector(t.root_arity());
  for (const auto& p : t.defined_predicates()) {
    bundle.predicate_map.emplace(atom_text(Atom{p, vec}), p);
  }
  for (const auto& p : t.fact_predicates()) {
    bundle.predicate_map.emplace(atom_text(Atom{p, vec}), p);
  }

  const auto report = is_parity_definite(bundle.pt);
  if (!report.definite) {
    std::vector<std::string> witness;
    for (const auto& c : report.offending) witness.push_back(c.str());
    throw PreconditionError("patchable theory is not parity-definite", std::move(witness));
  }

  Propositionalized out{std::move(bundle), {}};
  for (const auto& e : examples) {
    out.examples.push_back({propositional_example(t, e.example), e.label});
  }
  return out;
}

FOPatchResult fpatch(const FOPatchableTheory& pt, std::span<const FOLabeledExample> examples) {
  for (const auto& e : examples) {
    if (e.example.args.size() != pt.theory.root_arity()) {
      throw InputError("example arity does not match the root");
    }
  }
  auto prop = propositionalize(pt, examples);

  // Identical instantiations with opposite labels cannot be separated.
  std::map<std::vector<std::string>, std::pair<ExampleIndex, bool>> seen;
  for (ExampleIndex i = 0; i < examples.size(); ++i) {
    auto [it, fresh] = seen.try_emplace(examples[i].example.args, i, examples[i].label);
    if (!fresh && it->second.second != examples[i].label) {
      return Unrepairable{std::nullopt, {it->second.first, i},
                          "identical examples carry opposite labels"};
    }
  }

  auto plan = plan_patch(prop.bundle.pt, prop.examples);
  if (auto* fail = std::get_if<Unrepairable>(&plan)) return std::move(*fail);
  auto revisions = std::get<std::vector<Revision>>(std::move(plan));

  FOTheory theory = pt.theory;
  const auto vec = root_vector(theory.root_arity());
  for (auto& r : revisions) {
    const auto& c = r.target;
    if (r.kind == Revision::Kind::Delete) {
      theory = theory.without(c);
      continue;
    }
    if (r.kind != Revision::Kind::Disable) continue;

    const std::string aux = aux_name(c);
    if (theory.arity(aux)) {
      throw InputError("fresh predicate '" + aux + "' already occurs in the theory");
    }
    std::vector<Atom> facts;
    std::set<std::vector<std::string>> listed;
    for (auto i : r.disabling) {
      if (!listed.insert(examples[i].example.args).second) continue;
      Atom f{aux, {}};
      for (const auto& a : examples[i].example.args) f.args.push_back(Term::constant(a));
      facts.push_back(std::move(f));
    }
    if (c.kind == ComponentId::Kind::Clause) {
      const auto ci = *theory.clause_index(c.name, c.clause);
      const auto& head_args = theory.clauses()[ci].head.args;
      theory = theory.with_literal(ci, FOLiteral{Atom{aux, head_args}, true, false});
      r.synthesized.push_back(clause_text(theory.clauses()[ci]));
    } else {
      FOClause bridge{Atom{c.name, vec}, {FOLiteral{Atom{aux, vec}, false, false}}, false};
      r.synthesized.push_back(clause_text(bridge));
      theory = theory.with_clause(std::move(bridge));
    }
    for (const auto& f : facts) r.synthesized.push_back(atom_text(f) + ".");
    theory = theory.with_facts(std::move(facts));
  }

  for (const auto& e : examples) {
    if (classify_fo(theory, e.example) != e.label) {
      throw std::logic_error("patched first-order theory misclassifies a training example");
    }
  }
  return FORepaired{std::move(revisions), std::move(theory)};
}

bool oracle_fpatch_repairable(const FOPatchableTheory& pt,
                              std::span<const FOLabeledExample> examples,
                              const OracleBudget& budget) {
  if (pt.open.size() > budget.max_open || examples.size() > budget.max_examples) {
    throw BudgetExceeded("first-order patch oracle: instance exceeds the budget");
  }
  std::vector<ComponentId> lits;
  std::vector<ComponentId> others;
  for (const auto& c : pt.open) {
    (c.kind == ComponentId::Kind::Lit ? lits : others).push_back(c);
  }
  std::vector<ComponentId> disabled;
  for (std::uint64_t lm = 0; lm < (std::uint64_t{1} << lits.size()); ++lm) {
    const bool all_ok = std::all_of(examples.begin(), examples.end(), [&](const auto& e) {
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << others.size()); ++m) {
        disabled.clear();
        for (std::size_t i = 0; i < lits.size(); ++i) {
          if (lm >> i & 1U) disabled.push_back(lits[i]);
        }
        for (std::size_t i = 0; i < others.size(); ++i) {
          if (m >> i & 1U) disabled.push_back(others[i]);
        }
        if (classify_fo_with(pt.theory, e.example, disabled) == e.label) return true;
      }
      return false;
    });
    if (!all_ok) continue;
    // Per-example choices only conflict when one instantiation carries both labels.
    std::map<std::vector<std::string>, bool> label_of;
    bool consistent = true;
    for (const auto& e : examples) {
      auto [it, fresh] = label_of.emplace(e.example.args, e.label);
      if (!fresh && it->second != e.label) consistent = false;
    }
    return consistent;
  }
  return false;
}

}  // namespace tpatch
