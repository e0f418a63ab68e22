#pragma once

#include <map>
#include <set>
#include <span>

#include "tpatch/theory.hpp"

namespace tpatch {

// True iff the root is provable from the example under negation as failure.
bool classify(const Theory& theory, const Example& example);

// As classify, with the listed components disabled for this one evaluation:
// a disabled clause cannot be used, a disabled literal holds, and a disabled
// proposition is true (so `not p` fails). Tombstoned ids are accepted and
// have no further effect.
bool classify_with(const Theory& theory, const Example& example,
                   std::span<const ComponentId> disabled);

// Disabling set of a revision, over training-example indices.
class Disabling {
 public:
  enum class Mode { None, All, Some };

  static Disabling none() { return Disabling(Mode::None, {}); }
  static Disabling all() { return Disabling(Mode::All, {}); }
  static Disabling of(std::set<ExampleIndex> examples) {
    return Disabling(Mode::Some, std::move(examples));
  }

  Mode mode() const { return mode_; }
  const std::set<ExampleIndex>& examples() const { return examples_; }
  bool disables(ExampleIndex e) const {
    return mode_ == Mode::All || (mode_ == Mode::Some && examples_.count(e) > 0);
  }

 private:
  Disabling(Mode mode, std::set<ExampleIndex> examples)
      : mode_(mode), examples_(std::move(examples)) {}

  Mode mode_;
  std::set<ExampleIndex> examples_;
};

using DisablingMap = std::map<ComponentId, Disabling>;

// Classification of example `index` under the virtual revision `d`. Keys of
// `d` must be open; Lit keys may only carry all() or none().
bool classify_disabled(const Theory& theory, const std::set<ComponentId>& open,
                       const Example& example, ExampleIndex index, const DisablingMap& d);

}  // namespace tpatch
