#pragma once

#include "morita/outcome.hpp"
#include "morita/theory.hpp"

namespace morita {

// Forward-chaining derivability for coherent sequents. The antecedent is
// asserted over fresh constants for the goal context, theory axioms are
// chased with case splits on disjunctions and fresh witnesses for
// existentials, and equality is kept congruence-closed. A branch closes when
// the consequent holds or the branch is absurd; Proved means every branch
// closed. A consistent saturated branch is extracted as a finite model and,
// once re-verified by evaluation, reported as Refuted. Otherwise the budget
// ran out: Unknown, after a bounded countermodel sweep.
//
// First-order theories or goals are routed to the model search only, which
// can refute but never prove.
ProofOutcome derive(const Theory& t, const Sequent& goal, const Budget& budget = {});

// Both directions of lhs -||- rhs over the context. Proved iff both
// directions are Proved; Refuted if either is; Unknown otherwise.
ProofOutcome derive_iff(const Theory& t, const Context& ctx, const Formula& lhs,
                        const Formula& rhs, const Budget& budget = {});

// Re-applies the recorded rule instances without search and checks that every
// branch closes for the recorded reason.
bool replay_trace(const Theory& t, const Sequent& goal, const ProofTrace& trace);

}  // namespace morita
