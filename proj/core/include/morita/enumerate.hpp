#pragma once

#include <functional>
#include <vector>

#include "morita/model.hpp"
#include "morita/outcome.hpp"

namespace morita {

// Enumerates the finite models of the theory with the given carrier sizes
// (signature sort order). Axioms are checked as soon as every symbol they
// mention has been decided, which prunes most of the table space. The
// callback returns false to stop; the function returns false if stopped.
bool enumerate_models_sized(const Theory& t, const std::vector<int>& sizes,
                            const std::function<bool(const FiniteModel&)>& cb);

// All size vectors with entries in 0..max_size, ascending by total then lex.
bool enumerate_models(const Theory& t, int max_size,
                      const std::function<bool(const FiniteModel&)>& cb);

// Counts models; mostly for correspondence checks.
long count_models(const Theory& t, int max_size);

// Searches sizes 0..max_size for a model of the theory violating the goal.
// Refuted comes with the model and a violating assignment, both re-verified
// by evaluation before being returned. Never returns Proved.
ProofOutcome find_countermodel(const Theory& t, const Sequent& goal, int max_size);

// True iff no sort-wise permutation of carriers yields a lexicographically
// smaller serialization. Used to skip isomorphic duplicates.
bool is_canonical_model(const FiniteModel& m);

}  // namespace morita
