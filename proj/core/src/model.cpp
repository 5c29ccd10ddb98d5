#include "morita/model.hpp"

#include <sstream>
#include <stdexcept>

namespace morita {

int FiniteModel::carrier(const std::string& sort) const {
  for (const auto& [name, size] : carriers)
    if (name == sort) return size;
  throw std::invalid_argument("model has no carrier for sort " + sort);
}

size_t table_index(const std::vector<int>& args, const std::vector<int>& sizes) {
  size_t idx = 0;
  for (size_t i = 0; i < args.size(); ++i) idx = idx * static_cast<size_t>(sizes[i]) + args[i];
  return idx;
}

size_t table_size(const std::vector<int>& sizes) {
  size_t n = 1;
  for (int s : sizes) n *= static_cast<size_t>(s);
  return n;
}

namespace {

std::vector<int> arg_sizes(const FiniteModel& m, const std::vector<std::string>& sorts) {
  std::vector<int> sizes;
  sizes.reserve(sorts.size());
  for (const auto& s : sorts) sizes.push_back(m.carrier(s));
  return sizes;
}

}  // namespace

int eval_term(const FiniteModel& m, const Term& t, const Assignment& asgn) {
  if (const Term::Var* v = t.as_var()) {
    auto it = asgn.find(v->name);
    if (it == asgn.end()) throw std::invalid_argument("unassigned free variable: " + v->name);
    return it->second;
  }
  const Term::App& a = *t.as_app();
  auto table = m.functions.find(a.fn);
  if (table == m.functions.end())
    throw std::invalid_argument("model has no table for function " + a.fn);
  std::vector<int> args;
  std::vector<int> sizes;
  args.reserve(a.args.size());
  for (const Term& arg : a.args) {
    args.push_back(eval_term(m, arg, asgn));
    sizes.push_back(m.carrier(arg.sort()));
  }
  return table->second.at(table_index(args, sizes));
}

bool eval_formula(const FiniteModel& m, const Formula& f, const Assignment& asgn) {
  switch (f.kind()) {
    case Conn::True:
      return true;
    case Conn::False:
      return false;
    case Conn::Eq:
      return eval_term(m, f.eq_lhs(), asgn) == eval_term(m, f.eq_rhs(), asgn);
    case Conn::Rel: {
      auto table = m.relations.find(f.rel_name());
      if (table == m.relations.end())
        throw std::invalid_argument("model has no table for relation " + f.rel_name());
      std::vector<int> args;
      for (const Term& t : f.rel_args()) args.push_back(eval_term(m, t, asgn));
      return table->second.count(args) > 0;
    }
    case Conn::And:
      return eval_formula(m, f.lhs(), asgn) && eval_formula(m, f.rhs(), asgn);
    case Conn::Or:
      return eval_formula(m, f.lhs(), asgn) || eval_formula(m, f.rhs(), asgn);
    case Conn::Implies:
      return !eval_formula(m, f.lhs(), asgn) || eval_formula(m, f.rhs(), asgn);
    case Conn::Not:
      return !eval_formula(m, f.body(), asgn);
    case Conn::Exists:
    case Conn::Forall: {
      int n = m.carrier(f.bound_sort());
      Assignment inner = asgn;
      for (int e = 0; e < n; ++e) {
        inner[f.bound_var()] = e;
        bool v = eval_formula(m, f.body(), inner);
        if (f.kind() == Conn::Exists && v) return true;
        if (f.kind() == Conn::Forall && !v) return false;
      }
      return f.kind() == Conn::Forall;
    }
  }
  return false;
}

bool satisfies_sequent(const FiniteModel& m, const Sequent& s) {
  std::vector<int> sizes;
  for (const auto& [name, sort] : s.ctx.vars) {
    (void)name;
    sizes.push_back(m.carrier(sort));
  }
  std::vector<int> tuple(sizes.size(), 0);
  for (int s_ : sizes)
    if (s_ == 0) return true;  // some context sort is empty: vacuously true
  for (;;) {
    Assignment asgn;
    for (size_t i = 0; i < tuple.size(); ++i) asgn[s.ctx.vars[i].first] = tuple[i];
    if (eval_formula(m, s.antecedent, asgn) && !eval_formula(m, s.consequent, asgn)) return false;
    bool wrapped = true;
    for (size_t i = tuple.size(); i-- > 0;) {
      if (++tuple[i] < sizes[i]) {
        wrapped = false;
        break;
      }
      tuple[i] = 0;
    }
    if (wrapped) return true;
  }
}

bool satisfies_all(const FiniteModel& m, const std::vector<Sequent>& axioms) {
  for (const auto& ax : axioms)
    if (!satisfies_sequent(m, ax)) return false;
  return true;
}

std::string describe_model(const FiniteModel& m) {
  std::ostringstream os;
  os << "carriers:";
  for (const auto& [sort, size] : m.carriers) os << " " << sort << "=" << size;
  for (const auto& [fn, table] : m.functions) {
    os << "; " << fn << "=[";
    for (size_t i = 0; i < table.size(); ++i) os << (i ? "," : "") << table[i];
    os << "]";
  }
  for (const auto& [rel, tuples] : m.relations) {
    os << "; " << rel << "={";
    bool first = true;
    for (const auto& tup : tuples) {
      os << (first ? "" : ",") << "(";
      first = false;
      for (size_t i = 0; i < tup.size(); ++i) os << (i ? "," : "") << tup[i];
      os << ")";
    }
    os << "}";
  }
  return os.str();
}

}  // namespace morita
