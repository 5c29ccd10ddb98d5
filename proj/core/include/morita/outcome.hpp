#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morita/ast.hpp"
#include "morita/model.hpp"

namespace morita {

struct Budget {
  long steps = 10000;
  int branches = 64;
  int countermodel_size = 2;  // fallback carrier bound for derive's refutation search
};

struct TraceEvent {
  enum class Kind { Seed, Fresh, Totalize, Fire, Split, Close };
  Kind kind = Kind::Fire;
  int branch = 0;
  int parent = -1;           // Split: the branch the new one forked from
  int axiom = -1;            // Fire: axiom index
  std::vector<int> nodes;    // Fire: matched context assignment; Fresh/Totalize: created node
  std::string note;          // Close: "goal" or "absurd"; Totalize: function name
};

struct ProofTrace {
  std::vector<TraceEvent> events;
};

struct Refutation {
  FiniteModel model;
  std::map<std::string, int> assignment;  // goal context variable -> element
};

struct ProofOutcome {
  enum class Status { Proved, Refuted, Unknown };
  Status status = Status::Unknown;
  std::optional<ProofTrace> trace;
  std::optional<Refutation> refutation;
  std::string note;  // e.g. budget descriptor for Unknown

  bool proved() const { return status == Status::Proved; }
  bool refuted() const { return status == Status::Refuted; }
  bool unknown() const { return status == Status::Unknown; }

  static ProofOutcome proved_with(ProofTrace t) {
    return ProofOutcome{Status::Proved, std::move(t), std::nullopt, {}};
  }
  static ProofOutcome refuted_with(Refutation r) {
    return ProofOutcome{Status::Refuted, std::nullopt, std::move(r), {}};
  }
  static ProofOutcome unknown_with(std::string note) {
    return ProofOutcome{Status::Unknown, std::nullopt, std::nullopt, std::move(note)};
  }
};

const char* status_name(ProofOutcome::Status s);

}  // namespace morita
