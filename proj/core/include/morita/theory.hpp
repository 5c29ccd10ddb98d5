#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morita/ast.hpp"

namespace morita {

enum class Fragment { Cartesian, Regular, Coherent, FirstOrder };

const char* fragment_name(Fragment f);
std::optional<Fragment> fragment_from_name(const std::string& s);
// Cartesian < Regular < Coherent < FirstOrder
bool fragment_at_most(Fragment a, Fragment b);

enum class SortKind { Base, Product, Coproduct, Subsort, Quotient, Unit, Empty };

const char* sort_kind_name(SortKind k);

// A sort together with how it was introduced. Derived sorts own their
// structural function symbols (projections, injections, etc.); those symbols
// are declared in the signature but printed as part of the `derived` block.
struct SortDescriptor {
  std::string name;
  SortKind kind = SortKind::Base;

  // Product/Coproduct: component sorts. Subsort/Quotient: {ambient sort}.
  // Unit/Empty: {witness sort}.
  std::vector<std::string> components;
  // Product: pi_i (into components[i]). Coproduct: rho_i (from components[i]).
  // Subsort: {injection}. Quotient: {surjection}. Unit: maps T -> 1, one per
  // entry of map_sorts. Empty: maps 0 -> T likewise.
  std::vector<std::string> maps;
  std::vector<std::string> map_sorts;  // Unit/Empty only

  // Subsort: one free variable formula_vars[0] of the ambient sort.
  // Quotient: two free variables of the ambient sort.
  std::optional<Formula> formula;
  std::vector<std::string> formula_vars;

  bool operator==(const SortDescriptor& other) const;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> args;
  std::string result;
  bool operator==(const FunctionDecl& other) const = default;
};

struct RelationDecl {
  std::string name;
  std::vector<std::string> args;
  bool operator==(const RelationDecl& other) const = default;
};

struct Signature {
  // Declaration order is preserved; printing and enumeration follow it.
  std::vector<SortDescriptor> sorts;
  std::vector<FunctionDecl> functions;
  std::vector<RelationDecl> relations;

  const SortDescriptor* sort(const std::string& name) const;
  const FunctionDecl* function(const std::string& name) const;
  const RelationDecl* relation(const std::string& name) const;
  bool has_sort(const std::string& name) const { return sort(name) != nullptr; }
  bool has_function(const std::string& name) const { return function(name) != nullptr; }
  bool has_relation(const std::string& name) const { return relation(name) != nullptr; }
  bool has_symbol(const std::string& name) const {
    return has_sort(name) || has_function(name) || has_relation(name);
  }

  // Function symbols owned by a derived sort's descriptor.
  std::set<std::string> structural_functions() const;

  bool operator==(const Signature& other) const;
};

struct Theory {
  std::string name;
  Fragment fragment = Fragment::Coherent;
  Signature signature;
  std::vector<Sequent> axioms;

  const Sequent* axiom(const std::string& label) const;
};

// True if the formula's connectives stay within the fragment. Existentials
// are admitted in the cartesian fragment (provable uniqueness is a semantic
// side condition, checked by the extension machinery, not here).
bool formula_in_fragment(const Formula& f, Fragment frag);

}  // namespace morita
