#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace morita {

// Terms and formulas are immutable once built; nodes are shared freely, so
// copies are cheap and values can cross threads without synchronization.

class Term {
 public:
  struct Var {
    std::string name;
    std::string sort;
  };
  struct App {
    std::string fn;
    std::string sort;  // declared result sort
    std::vector<Term> args;
  };

  Term() : Term(var("_", "_")) {}

  static Term var(std::string name, std::string sort);
  static Term app(std::string fn, std::string sort, std::vector<Term> args);

  const Var* as_var() const { return std::get_if<Var>(node_.get()); }
  const App* as_app() const { return std::get_if<App>(node_.get()); }
  const std::string& sort() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

 private:
  explicit Term(std::shared_ptr<const std::variant<Var, App>> n) : node_(std::move(n)) {}
  std::shared_ptr<const std::variant<Var, App>> node_;
};

enum class Conn {
  True,
  False,
  Eq,
  Rel,
  And,
  Or,
  Exists,
  // first-order fragment only:
  Not,
  Implies,
  Forall,
};

class Formula {
 public:
  Formula() : Formula(truth()) {}

  static Formula truth();
  static Formula falsity();
  static Formula eq(Term lhs, Term rhs);
  static Formula rel(std::string name, std::vector<Term> args);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula exists(std::string var, std::string sort, Formula body);
  static Formula neg(Formula body);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula forall(std::string var, std::string sort, Formula body);

  Conn kind() const { return node_->kind; }

  // Eq
  const Term& eq_lhs() const { return node_->terms[0]; }
  const Term& eq_rhs() const { return node_->terms[1]; }
  // Rel
  const std::string& rel_name() const { return node_->name; }
  const std::vector<Term>& rel_args() const { return node_->terms; }
  // And / Or / Implies
  const Formula& lhs() const { return node_->subs[0]; }
  const Formula& rhs() const { return node_->subs[1]; }
  // Exists / Forall / Not
  const std::string& bound_var() const { return node_->name; }
  const std::string& bound_sort() const { return node_->sort; }
  const Formula& body() const { return node_->subs[0]; }

  bool is(Conn c) const { return kind() == c; }
  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

  // Stable identity of the shared node; usable as a cache key.
  const void* id() const { return node_.get(); }

 private:
  struct Node {
    Conn kind;
    std::string name;  // Rel name or binder variable
    std::string sort;  // binder sort
    std::vector<Term> terms;
    std::vector<Formula> subs;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Node n);
  std::shared_ptr<const Node> node_;
};

// Right-nested conjunction of a list; empty list is `true`.
Formula conj_all(const std::vector<Formula>& fs);
// Right-nested disjunction; empty list is `false`.
Formula disj_all(const std::vector<Formula>& fs);
// Wraps `body` in one existential per (name, sort) pair, innermost last.
Formula exists_all(const std::vector<std::pair<std::string, std::string>>& vars, Formula body);
// Flattens a right-nested chain of the given binary connective.
std::vector<Formula> flatten(const Formula& f, Conn c);

struct Context {
  std::vector<std::pair<std::string, std::string>> vars;  // (name, sort), duplicate-free

  Context() = default;
  Context(std::initializer_list<std::pair<std::string, std::string>> init) : vars(init) {}

  bool contains(const std::string& name) const;
  const std::string* sort_of(const std::string& name) const;
  // Appends, rejecting duplicates.
  void push(const std::string& name, const std::string& sort);
  size_t size() const { return vars.size(); }
  bool operator==(const Context& other) const { return vars == other.vars; }
};

struct Sequent {
  std::string label;  // ignored by equality
  Formula antecedent;
  Formula consequent;
  Context ctx;

  bool operator==(const Sequent& other) const {
    return antecedent == other.antecedent && consequent == other.consequent && ctx == other.ctx;
  }
};

Sequent make_sequent(std::string label, Formula ante, Context ctx, Formula cons);

}  // namespace morita
