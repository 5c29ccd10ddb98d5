#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "morita/ast.hpp"

namespace morita {

// Deterministic fresh-name source. Names come from the reserved `_vN`
// namespace; the counter restarts at each top-level operation so outputs are
// reproducible.
class NameGen {
 public:
  explicit NameGen(std::set<std::string> avoid = {}) : avoid_(std::move(avoid)) {}
  explicit NameGen(std::string prefix, std::set<std::string> avoid = {})
      : prefix_(std::move(prefix)), avoid_(std::move(avoid)) {}

  std::string fresh();
  // First tries `hint`, then hint0, hint1, ... until unused.
  std::string fresh_like(const std::string& hint);
  void reserve(const std::string& name) { avoid_.insert(name); }

 private:
  std::string prefix_ = "_v";
  int counter_ = 0;
  std::set<std::string> avoid_;
};

// Free variables in first-occurrence order.
std::vector<std::pair<std::string, std::string>> free_vars(const Term& t);
std::vector<std::pair<std::string, std::string>> free_vars(const Formula& f);
std::set<std::string> var_names(const Formula& f);  // free and bound
std::set<std::string> var_names(const Term& t);

// Capture-avoiding simultaneous substitution. Bindings must be
// sort-respecting; violations throw std::invalid_argument.
Term substitute(const Term& t, const std::map<std::string, Term>& binding);
Formula substitute(const Formula& f, const std::map<std::string, Term>& binding);

// Variable-to-variable renaming convenience.
Formula rename_free(const Formula& f, const std::map<std::string, std::string>& renaming);

// Deterministic bound-variable normalization: the k-th binder encountered in
// a pre-order walk is renamed _vk. Free variables are untouched, so two
// formulas canonicalize identically iff they are alpha-equivalent.
// Throws if a free variable falls outside `ctx`.
Formula canonicalize(const Formula& f, const Context& ctx);
Formula canonicalize_closed(const Formula& f);  // no context check
Sequent canonicalize(const Sequent& s);

bool alpha_equal(const Formula& a, const Formula& b);

// Canonical context: free variables in first-occurrence order.
Context canonical_context(const Formula& f);

}  // namespace morita
