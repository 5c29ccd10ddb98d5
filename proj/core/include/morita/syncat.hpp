#pragma once

#include <map>
#include <string>
#include <vector>

#include "morita/extend.hpp"
#include "morita/outcome.hpp"
#include "morita/recode.hpp"
#include "morita/theory.hpp"

namespace morita {

// Objects are formulas-in-context up to renaming; stored canonically.
struct SynObject {
  Context ctx;
  Formula formula;

  std::string key() const;  // canonical identity
  std::string display() const;
};

SynObject make_object(Context ctx, Formula f);

// A morphism candidate that survived the three functional-relation checks.
// theta lives over source.ctx ++ target.ctx (contexts disjoint by renaming).
struct SynMorphism {
  SynObject source;
  SynObject target;
  Formula theta;
  ProofOutcome relatedness;
  ProofOutcome single_valued;
  ProofOutcome totality;

  bool certified() const {
    return relatedness.proved() && single_valued.proved() && totality.proved();
  }
};

// The three sequents of a provably functional relation, dispatched to derive.
SynMorphism certify_morphism(const Theory& t, const SynObject& src, const SynObject& tgt,
                             const Formula& theta, const Budget& budget = {});

struct HomSearchResult {
  std::vector<SynMorphism> morphisms;  // certified, deduplicated by proven equivalence
  int candidates_tried = 0;
  int dropped_unknown = 0;   // candidates with an Unknown certificate sequent
  int unmerged_unknown = 0;  // pairs kept distinct because equivalence was Unknown
};

// Enumerates conjunctions of up to `size_bound` atoms over the joint context
// (equalities, relation atoms, and the two object formulas), certifies each,
// and merges candidates that are provably equivalent over the theory.
HomSearchResult hom_search(const Theory& t, const SynObject& src, const SynObject& tgt,
                           int size_bound, const Budget& budget = {});

SynMorphism identity_morphism(const Theory& t, const SynObject& obj, const Budget& budget = {});
// Relational composite: exists middle (theta_f /\ theta_g).
Formula compose_theta(const SynMorphism& f, const SynMorphism& g);
SynObject image_object(const SynMorphism& m);

struct SubobjectLattice {
  SynObject object;
  std::vector<Formula> members;
  std::vector<std::vector<ProofOutcome>> le;  // le[i][j]: member i <= member j
  struct Join {
    size_t lhs, rhs;
    Formula join;
    ProofOutcome upper_left, upper_right;
    std::vector<std::pair<size_t, ProofOutcome>> least_under;  // pool upper bounds
  };
  std::vector<Join> joins;
};

// Pool formulas ordered by derivable implication over the object; binary
// joins realized by disjunction and checked least among pool upper bounds.
SubobjectLattice subobject_lattice(const Theory& t, const SynObject& obj,
                                   const std::vector<Formula>& pool, const Budget& budget = {});

struct CoverHypothesisReport {
  struct Entry {
    SynObject object;
    CoverReport cover;
    bool domains_sigma1 = false;
  };
  std::vector<Entry> entries;
  bool all_ok() const {
    for (const auto& e : entries)
      if (!e.cover.all_proved() || !e.domains_sigma1) return false;
    return true;
  }
};

// Desk-scale shadow of the comparison-lemma hypothesis: every object over the
// extended signature gets a certified covering family whose domains are
// base-signature objects.
CoverHypothesisReport check_cover_hypothesis(const Theory& base, const Theory& extended,
                                             const std::vector<ExtensionSpec>& specs,
                                             const std::vector<SynObject>& objects,
                                             const Budget& budget = {});

// ---------------------------------------------------------------------------
// Pool-relativized fragments of the two constructions relating a theory to
// the internal theory of its syntactic category.

struct HatFragment {
  MoritaChain chain;
  // canonical object key -> sort name carrying it (base sort, product sort,
  // or subsort)
  std::map<std::string, std::string> object_sorts;
  // canonical theta key (normalized over source++target) -> function name
  std::map<std::string, std::string> morphism_funs;
  // per-morphism bookkeeping for the tilde construction
  struct MorphismInfo {
    std::string name;
    SynObject source;
    SynObject target;
    Formula theta;
  };
  std::vector<MorphismInfo> morphisms;
  std::vector<std::string> notes;

  const Theory& theory() const { return chain.final_theory(); }
};

// Stage 1 adds product sorts for the multi-variable context shapes in the
// pool; stage 2 adds subsorts for the non-trivial pooled objects, unit and
// empty sorts, defined symbols for the certified provably-functional
// relations between pooled objects, and compound projections. Single-variable
// top objects are identified with their base sorts.
HatFragment build_hat_fragment(const Theory& t, const std::vector<SynObject>& pool,
                               const Budget& budget = {});

struct TildeFragment {
  Theory internal;  // certified fragment of the internal theory of C_T
  MoritaChain chain;
  std::vector<std::string> notes;

  const Theory& theory() const { return chain.final_theory(); }
};

// Rebuilds the same objects as sorts of the canonical language, emits the
// internal-theory sequents the fragment can certify (terminal/initial,
// identities, monos, surjections, triangles, product cones, sup covers), then
// appends the definitional sequents for projections, inclusions, the maps
// into 1 and out of 0, and the base function and relation symbols.
TildeFragment build_tilde_fragment(const Theory& t, const HatFragment& hat,
                                   const Budget& budget = {});

// Small-object enumeration: contexts up to max_vars over the signature's
// sorts, formulas up to max_atoms atoms (conjunction/disjunction of relation
// atoms and equalities), canonicalized and deduplicated.
std::vector<SynObject> enumerate_objects(const Theory& t, int max_vars, int max_atoms);

}  // namespace morita
