#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morita/outcome.hpp"
#include "morita/theory.hpp"

namespace morita {

enum class ExtensionKind {
  ProductSort,
  CoproductSort,
  Subsort,
  QuotientSort,
  UnitSort,
  EmptySort,
  DefinedFunction,
  DefinedRelation,
};

const char* extension_kind_name(ExtensionKind k);

struct ExtensionSpec {
  ExtensionKind kind;
  std::string name;  // new sort name, or defined function/relation name

  // ProductSort/CoproductSort: component sorts.
  // Subsort/QuotientSort: {ambient sort}. UnitSort/EmptySort: {witness sort}.
  // DefinedFunction/DefinedRelation: argument sorts.
  std::vector<std::string> components;
  std::string result_sort;  // DefinedFunction only

  // ProductSort: projections. CoproductSort: injections. Subsort: {injection}.
  // QuotientSort: {surjection}. UnitSort/EmptySort: map names, one per
  // map_sorts entry (empty map_sorts means "one per sort in the base
  // signature", resolved at application time with `name_prefix_<sort>`).
  std::vector<std::string> maps;
  std::vector<std::string> map_sorts;

  // Subsort: formula over formula_vars[0]:ambient. QuotientSort: over two
  // ambient variables. DefinedFunction: over args + result variable (last).
  // DefinedRelation: over the argument variables.
  std::optional<Formula> formula;
  std::vector<std::string> formula_vars;
};

// The exact defining sequents for the spec, instantiated with its names.
// Throws std::invalid_argument on name collisions or malformed specs.
std::vector<Sequent> generate_schema(const ExtensionSpec& spec, const Theory& base);

// The signature additions the spec makes (sort descriptor and/or declarations).
Signature extended_signature(const ExtensionSpec& spec, const Theory& base);

struct AdmissibilityCondition {
  std::string description;
  Sequent goal;
  ProofOutcome outcome;
};

struct AdmissibilityReport {
  std::vector<AdmissibilityCondition> conditions;
  bool admissible() const {
    for (const auto& c : conditions)
      if (!c.outcome.proved()) return false;
    return true;
  }
  bool blocked_by_unknown() const {
    for (const auto& c : conditions)
      if (c.outcome.unknown()) return true;
    return false;
  }
};

AdmissibilityReport check_admissibility(const ExtensionSpec& spec, const Theory& base,
                                        const Budget& budget = {});

// base + new symbols + generated schemas. Requires admissibility (checked
// here unless a precomputed report is supplied); Unknown conditions block.
Theory apply_extension(const Theory& base, const ExtensionSpec& spec, const Budget& budget = {},
                       const AdmissibilityReport* precomputed = nullptr);

struct MoritaChain {
  Theory base;
  std::vector<std::pair<ExtensionSpec, Theory>> steps;

  const Theory& final_theory() const { return steps.empty() ? base : steps.back().second; }
};

MoritaChain extend_chain(const Theory& base, const std::vector<ExtensionSpec>& specs,
                         const Budget& budget = {});

struct ConservativityReport {
  struct SyntacticCheck {
    Sequent sample;
    ProofOutcome in_extended;
    ProofOutcome in_base;
    bool consistent;  // not (Proved in extended and Refuted in base)
  };
  std::vector<SyntacticCheck> syntactic;
  int base_models_checked = 0;
  int expansions_verified = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// (a) sampled base sequents Proved in the extension must not be Refuted in
// the base; (b) every finite base model up to the bound expands canonically
// to a model of every chain stage, all generated schemas holding.
ConservativityReport check_conservativity(const MoritaChain& chain,
                                          const std::vector<Sequent>& samples, int carrier_bound,
                                          const Budget& budget = {});

// Canonical expansion of a base-theory model along one extension step.
// Product carriers are tuple sets, coproducts disjoint unions, subsorts
// definable subsets, quotients classes, unit a singleton, empty void.
FiniteModel expand_model(const FiniteModel& base_model, const ExtensionSpec& spec,
                         const Theory& base, const Theory& extended);

// Copy of `theory` whose signature is disjoint from `other`'s: only clashing
// symbols are renamed (primes appended); returns the invertible renaming.
std::pair<Theory, std::map<std::string, std::string>> rename_disjoint(const Theory& theory,
                                                                      const Theory& other);

// Applies a symbol renaming (sorts, functions, relations) consistently.
Theory rename_symbols(const Theory& theory, const std::map<std::string, std::string>& renaming);

}  // namespace morita
