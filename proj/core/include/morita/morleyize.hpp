#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morita/extend.hpp"
#include "morita/theory.hpp"

namespace morita {

// The Morleyization signature adds a pair of relation symbols per pooled
// first-order formula, with arity the formula's canonical context (free
// variables in first-occurrence order). Alpha-variant formulas share one
// symbol pair; the pool is keyed on canonical forms.

struct PoolEntry {
  Formula formula;  // representative instance
  Context ctx;      // canonical context of the representative
  std::string cname;
  std::string dname;
};

class MorleyPool {
 public:
  // Subformula closure of the theory's axioms plus any extra formulas.
  static MorleyPool build(const Theory& t, const std::vector<Formula>& extras = {});

  const std::vector<PoolEntry>& entries() const { return entries_; }

  // Index and instance arguments (entry-context order) for an alpha-instance
  // of a pooled formula.
  std::optional<std::pair<int, std::vector<Term>>> lookup(const Formula& f) const;

  // The C_phi / D_phi atoms for an instance of a pooled formula.
  Formula cite_c(const Formula& f) const;
  Formula cite_d(const Formula& f) const;

  bool subformula_closed() const;

 private:
  void add_with_subformulas(const Formula& f, const Signature& sig);
  void add(const Formula& f, const Signature& sig);

  std::vector<PoolEntry> entries_;
  std::map<std::string, int> index_;
};

// The coherent theory over the pooled signature: totality and disjointness
// per pooled formula, per-connective biconditional schemas linking C/D of a
// formula to its immediate subformulas, and C_phi |- C_psi per input axiom.
Theory morleyize(const Theory& t, const MorleyPool& pool);

struct CorrespondenceReport {
  long fo_models = 0;           // models of the first-order theory
  long expansions_ok = 0;       // whose canonical expansion satisfies the Morleyization
  long coherent_models = 0;     // models of the Morleyization
  long forced_ok = 0;           // that equal the canonical expansion of their reduct
  std::vector<std::string> failures;
  bool ok() const {
    return failures.empty() && fo_models == coherent_models && expansions_ok == fo_models &&
           forced_ok == coherent_models;
  }
};

// Set-model instance of the mod-equivalence: expansions one way, forced
// reducts the other, counted both directions.
CorrespondenceReport model_correspondence(const Theory& t, const MorleyPool& pool,
                                          const Theory& morleyized, int carrier_bound);

struct FomorWitness {
  Theory t1;  // the first-order definitional extension with C/D explicit
  long t1_models = 0;
  long tm_models = 0;
  bool models_agree = false;
  bool tautology_ok = false;  // phi \/ not phi holds in every t1 model
};

// The definitional-extension witness that a first-order theory is Morita
// equivalent to its Morleyization, checked at desk scale over finite models.
FomorWitness build_fomor_witness(const Theory& t, const MorleyPool& pool, int carrier_bound = 2);

struct MorleyizedExtension {
  ExtensionSpec spec;
  AdmissibilityReport admissibility;  // over the Morleyized base
};

// Rewrites a first-order defining formula to its C-atom, yielding a coherent
// extension spec over the Morleyized base; admissibility is re-dispatched.
MorleyizedExtension morleyize_extension(const Theory& base_fo, const ExtensionSpec& spec,
                                        const MorleyPool& pool, const Budget& budget = {});

}  // namespace morita
