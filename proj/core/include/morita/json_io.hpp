#pragma once

#include <string>

#include "morita/outcome.hpp"
#include "morita/theory.hpp"

namespace morita {

// `.thy.json` companion format: a one-to-one mirror of the ASTs.
std::string theory_to_json(const Theory& t, int indent = 2);
Theory theory_from_json(const std::string& text);

std::string model_to_json(const FiniteModel& m);
std::string outcome_to_json(const ProofOutcome& o);
std::string sequent_to_json(const Sequent& s);

}  // namespace morita
