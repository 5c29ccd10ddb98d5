#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morita/theory.hpp"

namespace morita {

struct Diagnostic {
  std::string where;  // e.g. "axiom prod1 / consequent"
  std::string message;
};

// Returns the declared sort of a well-sorted term, or records a diagnostic
// and returns nullopt.
std::optional<std::string> sort_of_term(const Signature& sig, const Context& ctx, const Term& t,
                                        std::vector<Diagnostic>* diags, const std::string& where);

void check_formula(const Signature& sig, const Context& ctx, Fragment frag, const Formula& f,
                   std::vector<Diagnostic>& diags, const std::string& where);
void check_sequent(const Signature& sig, Fragment frag, const Sequent& s,
                   std::vector<Diagnostic>& diags);

// Empty result iff all Signature/Formula/Sequent invariants hold.
std::vector<Diagnostic> check_wellformed(const Theory& t);

}  // namespace morita
