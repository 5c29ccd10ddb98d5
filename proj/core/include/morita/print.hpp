#pragma once

#include <string>

#include "morita/theory.hpp"

namespace morita {

// The printer is total and deterministic: equal ASTs print byte-identically,
// and every output re-parses to the same AST.
//
// Precedence, loosest to tightest: ->, \/, /\, prefix (not, exists, forall),
// atoms. A quantifier body binds like a prefix operand; compound bodies are
// parenthesized, e.g. `exists p:AxB. (pi1(p) = x1 /\ pi2(p) = x2)`.

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);
std::string print_context(const Context& ctx);
std::string print_sequent(const Sequent& s);  // `phi |- (ctx) psi`, no label
std::string print_axiom(const Sequent& s, const std::string& fallback_label);
std::string print_sort_decl(const SortDescriptor& d);
std::string print_theory(const Theory& t);

// Canonical-print key: canonicalize bound variables, then print. Used as a
// deterministic identity for dedup maps.
std::string canonical_key(const Formula& f);
std::string canonical_key(const Sequent& s);

}  // namespace morita
