#include "tpatch/parity.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace tpatch {

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::Even:
      return "even";
    case Parity::Odd:
      return "odd";
    case Parity::Undefined:
      return "undefined";
  }
  return "undefined";
}

namespace {

// Unreached < {Even, Odd} < Conflict.
enum class Mark : std::uint8_t { Unreached, Even, Odd, Conflict };

Mark join(Mark a, Mark b) {
  if (a == Mark::Unreached) return b;
  if (b == Mark::Unreached || a == b) return a;
  return Mark::Conflict;
}

Mark flip(Mark m) {
  return m == Mark::Even ? Mark::Odd : m == Mark::Odd ? Mark::Even : m;
}

Parity to_parity(Mark m) {
  return m == Mark::Even ? Parity::Even : m == Mark::Odd ? Parity::Odd : Parity::Undefined;
}

// Propositions ordered so every clause head precedes the propositions in its
// body.
std::vector<std::size_t> heads_first_order(const ParityGraph& g) {
  const std::size_t n = g.primitive.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& r : g.rules) {
    if (!r.live) continue;
    for (const auto& occ : r.body) {
      if (occ) succ[r.head].push_back(occ->prop);
    }
  }
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::size_t> post;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [p, i] = stack.back();
      if (i < succ[p].size()) {
        const auto q = succ[p][i++];
        if (!seen[q]) {
          seen[q] = 1;
          stack.emplace_back(q, 0);
        }
      } else {
        post.push_back(p);
        stack.pop_back();
      }
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

}  // namespace

GraphParity solve_parity(const ParityGraph& g) {
  const std::size_t n = g.primitive.size();
  std::vector<Mark> prop(n, Mark::Unreached);
  std::vector<Mark> rule(g.rules.size(), Mark::Unreached);
  std::vector<std::vector<Mark>> lit(g.rules.size());
  std::vector<std::vector<std::size_t>> rules_of(n);
  for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
    lit[ri].assign(g.rules[ri].body.size(), Mark::Unreached);
    if (g.rules[ri].live) rules_of[g.rules[ri].head].push_back(ri);
  }

  prop[g.root] = Mark::Even;
  for (auto p : heads_first_order(g)) {
    if (g.primitive[p] || prop[p] == Mark::Unreached) continue;
    for (auto ri : rules_of[p]) {
      rule[ri] = flip(prop[p]);
      const auto& body = g.rules[ri].body;
      for (std::size_t j = 0; j < body.size(); ++j) {
        if (!body[j]) continue;
        lit[ri][j] = flip(rule[ri]);
        const Mark constraint = body[j]->negated ? flip(lit[ri][j]) : lit[ri][j];
        prop[body[j]->prop] = join(prop[body[j]->prop], constraint);
      }
    }
  }

  GraphParity out;
  out.props.reserve(n);
  for (auto m : prop) out.props.push_back(to_parity(m));
  for (auto m : rule) out.rules.push_back(to_parity(m));
  for (const auto& row : lit) {
    std::vector<Parity> r;
    for (auto m : row) r.push_back(to_parity(m));
    out.literals.push_back(std::move(r));
  }
  return out;
}

ParityMap compute_parity(const Theory& theory) {
  ParityGraph g;
  const auto& names = theory.propositions();
  g.root = *theory.prop_id(theory.root());
  g.primitive.resize(names.size());
  for (std::size_t p = 0; p < names.size(); ++p) g.primitive[p] = theory.is_primitive(p);
  const auto clauses = theory.clauses();
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    ParityGraph::Rule r{theory.head_id(ci), {}, !clauses[ci].deleted};
    for (std::size_t j = 0; j < clauses[ci].body.size(); ++j) {
      if (clauses[ci].body[j].deleted) {
        r.body.emplace_back(std::nullopt);
      } else {
        r.body.emplace_back(ParityGraph::Occurrence{theory.literal_prop_id(ci, j),
                                                    clauses[ci].body[j].negated});
      }
    }
    g.rules.push_back(std::move(r));
  }

  const auto solved = solve_parity(g);
  ParityMap out;
  for (std::size_t p = 0; p < names.size(); ++p) {
    if (!g.primitive[p]) out.emplace(ComponentId::prop(names[p]), solved.props[p]);
  }
  for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
    if (clauses[ci].deleted) continue;
    const auto k = theory.ordinal_of(ci);
    out.emplace(ComponentId::clause_of(clauses[ci].head, k), solved.rules[ci]);
    for (std::size_t j = 0; j < clauses[ci].body.size(); ++j) {
      if (!clauses[ci].body[j].deleted) {
        out.emplace(ComponentId::lit(clauses[ci].head, k, j), solved.literals[ci][j]);
      }
    }
  }
  return out;
}

ParityReport check_parity_definite(const ParityMap& parity, const std::set<ComponentId>& open) {
  ParityReport report;
  for (const auto& c : open) {
    auto it = parity.find(c);
    if (it == parity.end() || it->second == Parity::Undefined) {
      report.definite = false;
      report.offending.push_back(c);
    }
  }
  return report;
}

ParityReport is_parity_definite(const PatchableTheory& pt) {
  return check_parity_definite(compute_parity(pt.theory), pt.open);
}

}  // namespace tpatch
