#include "morita/ast.hpp"

#include <stdexcept>

namespace morita {

Term Term::var(std::string name, std::string sort) {
  return Term(std::make_shared<const std::variant<Var, App>>(Var{std::move(name), std::move(sort)}));
}

Term Term::app(std::string fn, std::string sort, std::vector<Term> args) {
  return Term(std::make_shared<const std::variant<Var, App>>(
      App{std::move(fn), std::move(sort), std::move(args)}));
}

const std::string& Term::sort() const {
  if (const Var* v = as_var()) return v->sort;
  return as_app()->sort;
}

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  const Var* v1 = as_var();
  const Var* v2 = other.as_var();
  if (v1 && v2) return v1->name == v2->name && v1->sort == v2->sort;
  if (v1 || v2) return false;
  const App& a1 = *as_app();
  const App& a2 = *other.as_app();
  return a1.fn == a2.fn && a1.sort == a2.sort && a1.args == a2.args;
}

Formula Formula::make(Node n) { return Formula(std::make_shared<const Node>(std::move(n))); }

Formula Formula::truth() { return make(Node{Conn::True, {}, {}, {}, {}}); }
Formula Formula::falsity() { return make(Node{Conn::False, {}, {}, {}, {}}); }

Formula Formula::eq(Term lhs, Term rhs) {
  return make(Node{Conn::Eq, {}, {}, {std::move(lhs), std::move(rhs)}, {}});
}

Formula Formula::rel(std::string name, std::vector<Term> args) {
  return make(Node{Conn::Rel, std::move(name), {}, std::move(args), {}});
}

Formula Formula::conj(Formula lhs, Formula rhs) {
  return make(Node{Conn::And, {}, {}, {}, {std::move(lhs), std::move(rhs)}});
}

Formula Formula::disj(Formula lhs, Formula rhs) {
  return make(Node{Conn::Or, {}, {}, {}, {std::move(lhs), std::move(rhs)}});
}

Formula Formula::exists(std::string var, std::string sort, Formula body) {
  return make(Node{Conn::Exists, std::move(var), std::move(sort), {}, {std::move(body)}});
}

Formula Formula::neg(Formula body) {
  return make(Node{Conn::Not, {}, {}, {}, {std::move(body)}});
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  return make(Node{Conn::Implies, {}, {}, {}, {std::move(lhs), std::move(rhs)}});
}

Formula Formula::forall(std::string var, std::string sort, Formula body) {
  return make(Node{Conn::Forall, std::move(var), std::move(sort), {}, {std::move(body)}});
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Conn::True:
    case Conn::False:
      return true;
    case Conn::Eq:
      return eq_lhs() == other.eq_lhs() && eq_rhs() == other.eq_rhs();
    case Conn::Rel:
      return rel_name() == other.rel_name() && rel_args() == other.rel_args();
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
      return lhs() == other.lhs() && rhs() == other.rhs();
    case Conn::Not:
      return body() == other.body();
    case Conn::Exists:
    case Conn::Forall:
      return bound_var() == other.bound_var() && bound_sort() == other.bound_sort() &&
             body() == other.body();
  }
  return false;
}

Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::truth();
  Formula acc = fs.back();
  for (size_t i = fs.size() - 1; i-- > 0;) acc = Formula::conj(fs[i], acc);
  return acc;
}

Formula disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::falsity();
  Formula acc = fs.back();
  for (size_t i = fs.size() - 1; i-- > 0;) acc = Formula::disj(fs[i], acc);
  return acc;
}

Formula exists_all(const std::vector<std::pair<std::string, std::string>>& vars, Formula body) {
  Formula acc = std::move(body);
  for (size_t i = vars.size(); i-- > 0;) acc = Formula::exists(vars[i].first, vars[i].second, acc);
  return acc;
}

std::vector<Formula> flatten(const Formula& f, Conn c) {
  std::vector<Formula> out;
  const Formula* cur = &f;
  while (cur->kind() == c) {
    out.push_back(cur->lhs());
    cur = &cur->rhs();
  }
  out.push_back(*cur);
  return out;
}

bool Context::contains(const std::string& name) const { return sort_of(name) != nullptr; }

const std::string* Context::sort_of(const std::string& name) const {
  for (const auto& [n, s] : vars)
    if (n == name) return &s;
  return nullptr;
}

void Context::push(const std::string& name, const std::string& sort) {
  if (contains(name)) throw std::invalid_argument("duplicate context variable: " + name);
  vars.emplace_back(name, sort);
}

Sequent make_sequent(std::string label, Formula ante, Context ctx, Formula cons) {
  return Sequent{std::move(label), std::move(ante), std::move(cons), std::move(ctx)};
}

}  // namespace morita
