#include "morita/outcome.hpp"

namespace morita {

const char* status_name(ProofOutcome::Status s) {
  switch (s) {
    case ProofOutcome::Status::Proved: return "proved";
    case ProofOutcome::Status::Refuted: return "refuted";
    case ProofOutcome::Status::Unknown: return "unknown";
  }
  return "?";
}

}  // namespace morita
