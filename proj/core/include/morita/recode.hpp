#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "morita/extend.hpp"
#include "morita/outcome.hpp"
#include "morita/theory.hpp"

namespace morita {

// A code expresses variables of derived sorts through base-sort carrier
// variables: products through projections, coproducts through one chosen
// injection, subsorts through the subsort injection, quotients through the
// surjection. The empty variable list codes to `true`.

struct CodedVar {
  std::string var;
  std::string sort;
  SortKind kind = SortKind::Base;
  int branch = -1;  // coproduct injection index, 0-based; -1 otherwise
  std::vector<std::string> carriers;
  std::vector<std::string> carrier_sorts;
  std::vector<Formula> atoms;
};

struct Code {
  std::vector<CodedVar> coded;
  std::vector<std::pair<std::string, std::string>> carriers;  // introduction order

  Formula conjunction() const;  // `true` for the empty code
};

// One disjunct of a recoding: `psi` mentions only base-signature symbols.
struct RecodeDisjunct {
  Code code;
  Formula psi;

  Formula theta() const;  // code /\ psi
};

// Sort names in `extended` missing from `base`.
std::set<std::string> new_sorts(const Theory& extended, const Theory& base);

// Builds the code for the listed derived-sort variables. Coproduct variables
// need an entry in `branch_choice`; carrier names avoid `avoid` and each
// other. Deterministic.
Code make_code(const std::vector<std::pair<std::string, std::string>>& vars,
               const std::map<std::string, int>& branch_choice, const std::set<std::string>& avoid,
               const Theory& extended, const Theory& base);

struct CodeLemmaReport {
  struct Entry {
    std::string description;
    Sequent goal;
    ProofOutcome outcome;
    bool skipped = false;
  };
  std::vector<Entry> entries;
  bool all_proved() const {
    for (const auto& e : entries)
      if (!e.skipped && !e.outcome.proved()) return false;
    return true;
  }
};

// Dispatches the code-cover sequent (over all coproduct branch choices), the
// code-totality sequent (skipped when a subsort or empty-sort code is
// present), and functionality to the prover.
CodeLemmaReport check_code_lemmas(const Code& code, const Theory& extended, const Theory& base,
                                  const Budget& budget = {});

// Recoding of terms: t = result_var is provably equivalent to the disjunction
// of exists-carriers (code /\ psi) with psi over the base signature. The code
// covers t's derived-sort variables and, when t itself has a derived sort,
// the result variable.
std::vector<RecodeDisjunct> recode_term(const Term& t, const std::string& result_var,
                                        const Theory& extended, const Theory& base,
                                        const std::vector<ExtensionSpec>& defined = {},
                                        const std::set<std::string>& avoid = {});

// Recoding of formulas-in-context: every derived-sort context variable is
// coded in every disjunct (coproduct variables fan out over all injections).
std::vector<RecodeDisjunct> recode_formula(const Context& ctx, const Formula& f,
                                           const Theory& extended, const Theory& base,
                                           const std::vector<ExtensionSpec>& defined = {});

// All sorts, functions and relations of the formula lie in the signature.
bool over_signature(const Formula& f, const Signature& sig);

struct CoverReport {
  struct MorphismCheck {
    RecodeDisjunct disjunct;
    Context source_ctx;
    Formula source_formula;
    Formula theta;
    ProofOutcome relatedness;
    ProofOutcome single_valued;
    ProofOutcome totality;
    bool sigma1_domain = false;
  };
  std::vector<MorphismCheck> morphisms;
  ProofOutcome cover_forward;   // disjunction of images |- object formula
  ProofOutcome cover_backward;  // object formula |- disjunction of images
  bool all_proved() const {
    for (const auto& m : morphisms)
      if (!(m.relatedness.proved() && m.single_valued.proved() && m.totality.proved()))
        return false;
    return cover_forward.proved() && cover_backward.proved();
  }
};

// The covering family for an object over the extended signature: one
// provably functional relation per recoding disjunct, with domains over the
// base signature, whose images join to the whole object.
CoverReport cover_family(const Context& ctx, const Formula& f, const Theory& extended,
                         const Theory& base, const std::vector<ExtensionSpec>& defined = {},
                         const Budget& budget = {});

}  // namespace morita
