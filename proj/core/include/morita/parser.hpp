#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morita/extend.hpp"
#include "morita/theory.hpp"

namespace morita {

struct ParseDiagnostic {
  int line = 0;
  int col = 0;
  std::string message;
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return value.has_value(); }
};

std::string format_diagnostics(const std::vector<ParseDiagnostic>& diags);

// `.thy` document: one theory block. Grammar keywords: theory, fragment,
// sorts, derived, fun, rel, axiom; connectives true false /\ \/ not -> =
// exists forall; sequents `phi |- (ctx) psi`. `#` starts a line comment.
ParseResult<Theory> parse_theory(const std::string& text);

ParseResult<Sequent> parse_sequent_text(const std::string& text, const Theory& over);
ParseResult<Formula> parse_formula_text(const std::string& text, const Theory& over,
                                        const Context& ctx);
ParseResult<Context> parse_context_text(const std::string& text);

// `.ext` document: a list of `extend ... as ...` lines applied in order.
// Later entries may reference sorts introduced by earlier ones.
ParseResult<std::vector<ExtensionSpec>> parse_extensions(const std::string& text,
                                                         const Theory& base);

}  // namespace morita
