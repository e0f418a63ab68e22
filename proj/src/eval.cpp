#include "tpatch/eval.hpp"

#include <cstdint>
#include <vector>

#include "tpatch/error.hpp"

namespace tpatch {

namespace {

// Memoized top-down prover over one (theory, example, disabled set) view.
class Prover {
 public:
  Prover(const Theory& theory, const Example& example)
      : theory_(theory),
        memo_(theory.propositions().size(), kUnknown),
        clause_off_(theory.clauses().size(), false),
        lit_on_(theory.clauses().size()) {
    const auto& names = theory.propositions();
    for (std::size_t p = 0; p < names.size(); ++p) {
      if (theory.is_primitive(p)) memo_[p] = kFalse;
    }
    for (const auto& name : example.true_primitives) {
      auto id = theory.prop_id(name);
      if (!id || !theory.is_primitive(*id)) {
        throw InputError("example names '" + name + "', which is not a primitive of the theory");
      }
      memo_[*id] = kTrue;
    }
    for (const auto& name : theory.forced_true()) memo_[*theory.prop_id(name)] = kTrue;
    for (std::size_t ci = 0; ci < lit_on_.size(); ++ci) {
      lit_on_[ci].assign(theory.clauses()[ci].body.size(), false);
    }
  }

  void disable(const ComponentId& c) {
    switch (c.kind) {
      case ComponentId::Kind::Prop: {
        auto id = theory_.prop_id(c.name);
        if (!id || theory_.is_primitive(*id)) break;
        memo_[*id] = kTrue;
        break;
      }
      case ComponentId::Kind::Clause:
        if (auto ci = theory_.clause_index(c.name, c.clause)) clause_off_[*ci] = true;
        break;
      case ComponentId::Kind::Lit:
        if (auto ci = theory_.clause_index(c.name, c.clause)) {
          if (c.literal < lit_on_[*ci].size()) lit_on_[*ci][c.literal] = true;
        }
        break;
    }
  }

  bool proves(std::size_t prop) {
    if (memo_[prop] != kUnknown) return memo_[prop] == kTrue;
    bool result = false;
    const auto clauses = theory_.clauses();
    for (auto ci : theory_.clauses_for(prop)) {
      if (clauses[ci].deleted || clause_off_[ci]) continue;
      bool body = true;
      const auto& lits = clauses[ci].body;
      for (std::size_t j = 0; j < lits.size() && body; ++j) {
        if (lits[j].deleted || lit_on_[ci][j]) continue;
        const bool holds = proves(theory_.literal_prop_id(ci, j));
        body = lits[j].negated ? !holds : holds;
      }
      if (body) {
        result = true;
        break;
      }
    }
    memo_[prop] = result ? kTrue : kFalse;
    return result;
  }

  bool proves_root() { return proves(*theory_.prop_id(theory_.root())); }

 private:
  static constexpr std::int8_t kUnknown = -1;
  static constexpr std::int8_t kFalse = 0;
  static constexpr std::int8_t kTrue = 1;

  const Theory& theory_;
  std::vector<std::int8_t> memo_;
  std::vector<bool> clause_off_;
  std::vector<std::vector<bool>> lit_on_;
};

}  // namespace

bool classify(const Theory& theory, const Example& example) {
  return Prover(theory, example).proves_root();
}

bool classify_with(const Theory& theory, const Example& example,
                   std::span<const ComponentId> disabled) {
  Prover prover(theory, example);
  for (const auto& c : disabled) prover.disable(c);
  return prover.proves_root();
}

bool classify_disabled(const Theory& theory, const std::set<ComponentId>& open,
                       const Example& example, ExampleIndex index, const DisablingMap& d) {
  std::vector<ComponentId> disabled;
  for (const auto& [c, dis] : d) {
    if (!open.count(c)) throw InputError("disabling map names closed component " + c.str());
    if (c.kind == ComponentId::Kind::Lit && dis.mode() == Disabling::Mode::Some) {
      throw InputError("literal " + c.str() + " admits only deletion or the null revision");
    }
    if (dis.disables(index)) disabled.push_back(c);
  }
  return classify_with(theory, example, disabled);
}

}  // namespace tpatch
