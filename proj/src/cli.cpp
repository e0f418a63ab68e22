#include "tpatch/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "tpatch/error.hpp"
#include "tpatch/eval.hpp"
#include "tpatch/firstorder.hpp"
#include "tpatch/generate.hpp"
#include "tpatch/parity.hpp"
#include "tpatch/patch.hpp"
#include "tpatch/reductions.hpp"
#include "tpatch/stability.hpp"

namespace tpatch::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kDocumentFormat = "tpatch-patch/1";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw InputError("cannot write " + path);
  o << text;
  if (!o) throw InputError("failed writing " + path);
}

// Inputs re-serialized so that formatting and comments do not affect digests.
struct PropositionalInputs {
  Theory theory;
  std::set<ComponentId> open;
  std::vector<LabeledExample> examples;
  std::string theory_text;
  std::string open_text;
  std::string examples_text;
};

PropositionalInputs load_inputs(const std::string& theory_path, const std::string& open_path,
                                const std::string& examples_path) {
  auto theory = parse_theory(read_file(theory_path));
  std::set<ComponentId> open;
  if (!open_path.empty()) open = parse_open(read_file(open_path));
  std::vector<LabeledExample> examples;
  if (!examples_path.empty()) examples = parse_examples(read_file(examples_path));
  for (const auto& e : examples) validate_example(theory, e.example);
  auto theory_text = serialize_theory(theory);
  auto open_text = serialize_open(open);
  auto examples_text = serialize_examples(examples);
  return {std::move(theory), std::move(open), std::move(examples),
          std::move(theory_text), std::move(open_text), std::move(examples_text)};
}

Json indices(const auto& xs) {
  Json a = Json::array();
  for (auto x : xs) a.push_back(x);
  return a;
}

Json revision_json(const Revision& r) {
  Json j;
  j["component"] = r.target.str();
  j["kind"] = std::string(to_string(r.kind));
  j["disabling"] = indices(r.disabling);
  j["synthesized"] = r.synthesized;
  return j;
}

Revision revision_from_json(const Json& j) {
  Revision r = Revision::null(ComponentId::parse(j.at("component").get<std::string>()));
  r.kind = parse_revision_kind(j.at("kind").get<std::string>());
  for (const auto& i : j.at("disabling")) r.disabling.insert(i.get<ExampleIndex>());
  r.synthesized = j.at("synthesized").get<std::vector<std::string>>();
  return r;
}

Json unrepairable_json(const Unrepairable& u) {
  Json j;
  j["component"] = u.component ? Json(u.component->str()) : Json(nullptr);
  j["examples"] = indices(u.examples);
  j["reason"] = u.reason;
  return j;
}

Json verify_json(const VerifyReport& v) {
  Json j;
  j["passed"] = v.passed();
  j["classification_ok"] = v.classification_ok;
  j["misclassified"] = indices(v.misclassified);
  Json comps = Json::array();
  for (const auto& c : v.components) {
    Json cj;
    cj["component"] = c.component.str();
    cj["kind"] = std::string(to_string(c.kind));
    cj["explicit"] = c.explicit_revision;
    cj["obstructive"] = indices(c.sets.obstructive);
    cj["protected"] = indices(c.sets.protected_examples);
    cj["contains_obstructive"] = c.contains_obstructive;
    cj["misses_protected"] = c.misses_protected;
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  return j;
}

std::string_view policy_name(RevisionPolicy p) {
  return p == RevisionPolicy::DeletionOnly ? "deletion-only" : "unrestricted";
}

RevisionPolicy parse_policy(const std::string& s) {
  if (s == "unrestricted") return RevisionPolicy::Unrestricted;
  if (s == "deletion-only") return RevisionPolicy::DeletionOnly;
  throw InputError("unknown revision policy '" + s + "'");
}

PatchResult compute_patch(const PatchableTheory& pt, std::span<const LabeledExample> examples) {
  if (pt.policy == RevisionPolicy::DeletionOnly) return oracle_patch(pt, examples);
  return ppatch(pt, examples);
}

struct Args {
  std::string theory;
  std::string open;
  std::string examples;
  std::string out;
  std::string doc;
  std::string cnf;
  std::string form = "t1";
  bool oracle = false;
  bool deletion_only = false;
  std::size_t budget = kDefaultStabilityBudget;
  std::uint64_t seed = 1;
  std::size_t count = 50;
};

int cmd_classify(const Args& a, std::ostream& out) {
  auto in = load_inputs(a.theory, "", a.examples);
  for (ExampleIndex i = 0; i < in.examples.size(); ++i) {
    out << i << '\t' << (classify(in.theory, in.examples[i].example) ? 'T' : 'F') << '\n';
  }
  return kOk;
}

int cmd_parity(const Args& a, std::ostream& out) {
  auto theory = parse_theory(read_file(a.theory));
  const auto parity = compute_parity(theory);
  for (const auto& c : enumerate_components(theory)) {
    out << c.str() << '\t' << to_string(parity.at(c)) << '\n';
  }
  return kOk;
}

int cmd_stable(const Args& a, std::ostream& out) {
  auto in = load_inputs(a.theory, a.open, a.examples);
  PatchableTheory pt(in.theory, in.open);
  for (ExampleIndex i = 0; i < in.examples.size(); ++i) {
    const auto& e = in.examples[i].example;
    const Verdict v = a.oracle ? oracle_stable(pt, e, a.budget) : pstable(pt, e);
    out << i << '\t' << to_char(v) << '\n';
  }
  return kOk;
}

int cmd_patch(const Args& a, std::ostream& out) {
  auto in = load_inputs(a.theory, a.open, a.examples);
  const auto policy = a.deletion_only ? RevisionPolicy::DeletionOnly : RevisionPolicy::Unrestricted;
  PatchableTheory pt(in.theory, in.open, policy);
  auto result = compute_patch(pt, in.examples);

  Json doc;
  doc["format"] = kDocumentFormat;
  doc["policy"] = std::string(policy_name(policy));
  doc["inputs"] = {{"theory", sha256_hex(in.theory_text)},
                   {"open", sha256_hex(in.open_text)},
                   {"examples", sha256_hex(in.examples_text)}};
  int code = kOk;
  if (auto* r = std::get_if<Repaired>(&result)) {
    const auto final_text = serialize_theory(r->theory);
    doc["verdict"] = "repaired";
    Json revs = Json::array();
    for (const auto& rev : r->revisions) revs.push_back(revision_json(rev));
    doc["revisions"] = std::move(revs);
    doc["final_theory"] = sha256_hex(final_text);
    doc["verify"] = verify_json(verify_patch(pt, r->revisions, in.examples));
    if (!a.out.empty()) write_file(a.out, final_text);
  } else {
    doc["verdict"] = "unrepairable";
    doc["revisions"] = Json::array();
    doc["unrepairable"] = unrepairable_json(std::get<Unrepairable>(result));
    code = kUnrepairable;
  }
  const auto text = doc.dump(2) + "\n";
  if (!a.doc.empty()) write_file(a.doc, text);
  out << text;
  return code;
}

int cmd_verify(const Args& a, std::ostream& out, std::ostream& err) {
  Json doc;
  try {
    doc = Json::parse(read_file(a.doc));
  } catch (const Json::exception& e) {
    throw InputError(std::string("patch document: ") + e.what());
  }
  auto in = load_inputs(a.theory, a.open, a.examples);
  std::vector<std::string> failures;
  try {
    if (doc.at("format").get<std::string>() != kDocumentFormat) {
      throw InputError("unsupported patch document format");
    }
    const auto& inputs = doc.at("inputs");
    if (inputs.at("theory") != sha256_hex(in.theory_text)) failures.push_back("theory digest");
    if (inputs.at("open") != sha256_hex(in.open_text)) failures.push_back("open digest");
    if (inputs.at("examples") != sha256_hex(in.examples_text)) failures.push_back("examples digest");

    PatchableTheory pt(in.theory, in.open, parse_policy(doc.at("policy").get<std::string>()));
    const auto verdict = doc.at("verdict").get<std::string>();
    if (failures.empty() && verdict == "repaired") {
      std::vector<Revision> revisions;
      for (const auto& r : doc.at("revisions")) revisions.push_back(revision_from_json(r));
      std::vector<Revision> plain = revisions;
      for (auto& r : plain) r.synthesized.clear();
      Theory t = in.theory;
      for (std::size_t i = 0; i < revisions.size(); ++i) {
        auto s = synthesize_edit(t, plain[i], in.examples);
        if (s.added != revisions[i].synthesized) {
          failures.push_back("synthesized text of " + revisions[i].target.str());
        }
        t = std::move(s.theory);
      }
      if (doc.at("final_theory") != sha256_hex(serialize_theory(t))) {
        failures.push_back("final theory digest");
      }
      const auto report = verify_patch(pt, plain, in.examples);
      if (!report.classification_ok) failures.push_back("classification");
      for (const auto& c : report.components) {
        if (!c.contains_obstructive) failures.push_back("obstructive set of " + c.component.str());
        if (!c.misses_protected) failures.push_back("protected set of " + c.component.str());
      }
    } else if (failures.empty() && verdict == "unrepairable") {
      if (!std::holds_alternative<Unrepairable>(compute_patch(pt, in.examples))) {
        failures.push_back("inputs are repairable");
      }
    } else if (failures.empty()) {
      throw InputError("unknown verdict '" + verdict + "'");
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("patch document: ") + e.what());
  }
  for (const auto& f : failures) err << "verify: mismatch in " << f << '\n';
  out << (failures.empty() ? "pass" : "fail") << '\n';
  return failures.empty() ? kOk : kUnrepairable;
}

std::string validation_text(const FOValidation& v) {
  std::ostringstream s;
  s << "completely_bound\t" << v.completely_bound << '\n'
    << "quasi_propositional\t" << v.quasi_propositional << '\n'
    << "ground_facts_only\t" << v.ground_facts_only << '\n'
    << "negation_free\t" << v.negation_free << '\n'
    << "depth\t" << v.depth << '\n';
  return s.str();
}

int cmd_gen_sat(const Args& a, std::ostream& out) {
  const auto cnf = parse_dimacs(read_file(a.cnf));
  if (a.out.empty()) throw InputError("gen-sat needs --out PREFIX");
  if (a.form == "t1") {
    auto inst = sat_to_ppatch(cnf);
    write_file(a.out + ".theory", serialize_theory(inst.pt.theory));
    write_file(a.out + ".open", serialize_open(inst.pt.open));
    write_file(a.out + ".examples", serialize_examples(inst.examples));
    out << a.out << ".theory\n" << a.out << ".open\n" << a.out << ".examples\n";
    return kOk;
  }
  FOSatInstance inst = [&] {
    if (a.form == "t7") return monotone_sat_to_fpatch_ground(cnf);
    if (a.form == "t8") return monotone_sat_to_fpatch_qp(cnf);
    throw InputError("--form must be t1, t7 or t8");
  }();
  write_file(a.out + ".fo", serialize_fo_theory(inst.pt.theory));
  write_file(a.out + ".open", serialize_open(inst.pt.open));
  write_file(a.out + ".foexamples", serialize_fo_examples(inst.examples));
  out << a.out << ".fo\n" << a.out << ".open\n" << a.out << ".foexamples\n";
  out << validation_text(validate_fo(inst.pt.theory));
  return kOk;
}

struct FOInputs {
  FOPatchableTheory pt;
  std::vector<FOLabeledExample> examples;
};

FOInputs load_fo(const Args& a) {
  auto theory = parse_fo_theory(read_file(a.theory));
  std::set<ComponentId> open;
  if (!a.open.empty()) open = parse_open(read_file(a.open));
  std::vector<FOLabeledExample> examples;
  if (!a.examples.empty()) examples = parse_fo_examples(read_file(a.examples));
  return {FOPatchableTheory(std::move(theory), std::move(open)), std::move(examples)};
}

int cmd_fo_reduce(const Args& a, std::ostream& out) {
  auto in = load_fo(a);
  if (a.out.empty()) throw InputError("fo-reduce needs --out PREFIX");
  auto p = propositionalize(in.pt, in.examples);
  write_file(a.out + ".theory", serialize_theory(p.bundle.pt.theory));
  write_file(a.out + ".open", serialize_open(p.bundle.pt.open));
  write_file(a.out + ".examples", serialize_examples(p.examples));
  std::ostringstream map;
  for (const auto& [fo, prop] : p.bundle.component_map) {
    map << "component\t" << fo.str() << '\t' << prop.str() << '\n';
  }
  for (const auto& [pattern, prop] : p.bundle.predicate_map) {
    map << "predicate\t" << pattern << '\t' << prop << '\n';
  }
  write_file(a.out + ".map", map.str());
  out << a.out << ".theory\n"
      << a.out << ".open\n"
      << a.out << ".examples\n"
      << a.out << ".map\n";
  return kOk;
}

int cmd_fpatch(const Args& a, std::ostream& out) {
  auto in = load_fo(a);
  auto result = fpatch(in.pt, in.examples);
  Json doc;
  doc["inputs"] = {{"theory", sha256_hex(serialize_fo_theory(in.pt.theory))},
                   {"open", sha256_hex(serialize_open(in.pt.open))},
                   {"examples", sha256_hex(serialize_fo_examples(in.examples))}};
  int code = kOk;
  if (auto* r = std::get_if<FORepaired>(&result)) {
    const auto final_text = serialize_fo_theory(r->theory);
    doc["verdict"] = "repaired";
    Json revs = Json::array();
    for (const auto& rev : r->revisions) revs.push_back(revision_json(rev));
    doc["revisions"] = std::move(revs);
    doc["final_theory"] = sha256_hex(final_text);
    std::vector<ExampleIndex> wrong;
    for (ExampleIndex i = 0; i < in.examples.size(); ++i) {
      if (classify_fo(r->theory, in.examples[i].example) != in.examples[i].label) {
        wrong.push_back(i);
      }
    }
    doc["classification_ok"] = wrong.empty();
    doc["misclassified"] = indices(wrong);
    if (!a.out.empty()) write_file(a.out, final_text);
    if (!wrong.empty()) code = kUnrepairable;
  } else {
    doc["verdict"] = "unrepairable";
    doc["revisions"] = Json::array();
    doc["unrepairable"] = unrepairable_json(std::get<Unrepairable>(result));
    code = kUnrepairable;
  }
  out << doc.dump(2) << '\n';
  return code;
}

// Randomized cross-checks of the fast algorithms against the oracles.
int cmd_selftest(const Args& a, std::ostream& out) {
  std::mt19937_64 rng(a.seed);
  std::size_t stable_bad = 0;
  std::size_t patch_bad = 0;
  std::size_t sat_bad = 0;
  std::size_t fo_bad = 0;
  for (std::size_t i = 0; i < a.count; ++i) {
    auto inst = random_instance(rng);
    for (const auto& e : inst.examples) {
      if (pstable(inst.pt, e.example) != oracle_stable(inst.pt, e.example)) ++stable_bad;
    }
    const auto fast = ppatch(inst.pt, inst.examples);
    const auto slow = oracle_patch(inst.pt, inst.examples);
    bool ok = std::holds_alternative<Repaired>(fast) == std::holds_alternative<Repaired>(slow);
    if (ok && std::holds_alternative<Repaired>(fast)) {
      ok = verify_patch(inst.pt, std::get<Repaired>(fast).revisions, inst.examples).passed();
    }
    if (!ok) ++patch_bad;
  }
  for (std::size_t i = 0; i < a.count; ++i) {
    auto cnf = random_cnf(rng);
    auto inst = sat_to_ppatch(cnf);
    if (cnf_sat_oracle(cnf).has_value() !=
        std::holds_alternative<Repaired>(oracle_patch(inst.pt, inst.examples))) {
      ++sat_bad;
    }
  }
  for (std::size_t i = 0; i < a.count; ++i) {
    auto inst = random_qp_instance(rng);
    auto p = propositionalize(inst.pt, inst.examples);
    for (std::size_t k = 0; k < inst.examples.size(); ++k) {
      if (classify_fo(inst.pt.theory, inst.examples[k].example) !=
          classify(p.bundle.pt.theory, p.examples[k].example)) {
        ++fo_bad;
      }
    }
  }
  out << "seed\t" << a.seed << '\n'
      << "stability_disagreements\t" << stable_bad << '\n'
      << "patch_disagreements\t" << patch_bad << '\n'
      << "sat_disagreements\t" << sat_bad << '\n'
      << "fo_disagreements\t" << fo_bad << '\n';
  return stable_bad + patch_bad + sat_bad + fo_bad == 0 ? kOk : kUnrepairable;
}

}  // namespace

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream s;
  s << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) s << std::setw(2) << static_cast<int>(md[i]);
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patch definite-clause theories against labeled examples", "tpatch"};
  app.require_subcommand(1);
  Args a;

  auto add_inputs = [&](CLI::App* sub, bool open, bool examples) {
    sub->add_option("--theory", a.theory, "theory file")->required();
    if (open) sub->add_option("--open", a.open, "open components, one id per line")->required();
    if (examples) sub->add_option("--examples", a.examples, "labeled examples")->required();
  };

  auto* classify_cmd = app.add_subcommand("classify", "classify each example");
  add_inputs(classify_cmd, false, true);

  auto* parity_cmd = app.add_subcommand("parity", "print the parity of every component");
  add_inputs(parity_cmd, false, false);

  auto* stable_cmd = app.add_subcommand("stable", "stability verdict per example");
  add_inputs(stable_cmd, true, true);
  stable_cmd->add_flag("--oracle", a.oracle, "enumerate every obtainable theory");
  stable_cmd->add_option("--budget", a.budget, "open-set budget for --oracle");

  auto* patch_cmd = app.add_subcommand("patch", "repair a theory and emit a patch document");
  add_inputs(patch_cmd, true, true);
  patch_cmd->add_option("--out", a.out, "write the revised theory here");
  patch_cmd->add_option("--doc", a.doc, "also write the patch document here");
  patch_cmd->add_flag("--deletion-only", a.deletion_only,
                      "only delete or keep open components (exhaustive search)");

  auto* verify_cmd = app.add_subcommand("verify", "check a patch document against its inputs");
  add_inputs(verify_cmd, true, true);
  verify_cmd->add_option("--doc", a.doc, "patch document")->required();

  auto* gen_cmd = app.add_subcommand("gen-sat", "build a patching instance from a CNF");
  gen_cmd->add_option("--cnf", a.cnf, "DIMACS file")->required();
  gen_cmd->add_option("--form", a.form, "t1: propositional, t7: ground facts, t8: quasi-propositional")
      ->check(CLI::IsMember({"t1", "t7", "t8"}));
  gen_cmd->add_option("--out", a.out, "output path prefix")->required();

  auto* reduce_cmd = app.add_subcommand("fo-reduce", "propositionalize a first-order instance");
  add_inputs(reduce_cmd, true, true);
  reduce_cmd->add_option("--out", a.out, "output path prefix")->required();

  auto* fpatch_cmd = app.add_subcommand("fpatch", "repair a first-order theory");
  add_inputs(fpatch_cmd, true, true);
  fpatch_cmd->add_option("--out", a.out, "write the revised theory here");

  auto* self_cmd = app.add_subcommand("selftest", "cross-check against the exhaustive oracles");
  self_cmd->add_option("--seed", a.seed, "random seed");
  self_cmd->add_option("--count", a.count, "instances per suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*classify_cmd) return cmd_classify(a, out);
    if (*parity_cmd) return cmd_parity(a, out);
    if (*stable_cmd) return cmd_stable(a, out);
    if (*patch_cmd) return cmd_patch(a, out);
    if (*verify_cmd) return cmd_verify(a, out, err);
    if (*gen_cmd) return cmd_gen_sat(a, out);
    if (*reduce_cmd) return cmd_fo_reduce(a, out);
    if (*fpatch_cmd) return cmd_fpatch(a, out);
    if (*self_cmd) return cmd_selftest(a, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << '\n';
    for (const auto& w : e.witness()) err << "  " << w << '\n';
    return kPrecondition;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  }
  return kUsage;
}

}  // namespace tpatch::cli
