#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "morita/theory.hpp"

namespace morita {

// A finite structure for a signature. Carriers are 0..size-1 per sort;
// function tables are row-major over the mixed-radix argument tuple.
struct FiniteModel {
  std::vector<std::pair<std::string, int>> carriers;  // (sort, size), signature order
  std::map<std::string, std::vector<int>> functions;
  std::map<std::string, std::set<std::vector<int>>> relations;

  int carrier(const std::string& sort) const;
  bool operator==(const FiniteModel& other) const = default;
};

// Row-major index of an argument tuple given per-argument carrier sizes.
size_t table_index(const std::vector<int>& args, const std::vector<int>& sizes);
size_t table_size(const std::vector<int>& sizes);

using Assignment = std::map<std::string, int>;

int eval_term(const FiniteModel& m, const Term& t, const Assignment& asgn);
// Tarskian evaluation; empty carriers make exists false and forall true.
// Throws std::invalid_argument on unassigned free variables.
bool eval_formula(const FiniteModel& m, const Formula& f, const Assignment& asgn);

// All context assignments satisfy antecedent -> consequent.
bool satisfies_sequent(const FiniteModel& m, const Sequent& s);
bool satisfies_all(const FiniteModel& m, const std::vector<Sequent>& axioms);

std::string describe_model(const FiniteModel& m);

}  // namespace morita
