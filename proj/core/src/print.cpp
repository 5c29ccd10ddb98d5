#include "morita/print.hpp"

#include <sstream>

#include "morita/rewrite.hpp"

namespace morita {

namespace {

// Precedence levels: 0 implies, 1 or, 2 and, 3 prefix, 4 atom.
int level_of(const Formula& f) {
  switch (f.kind()) {
    case Conn::Implies: return 0;
    case Conn::Or: return 1;
    case Conn::And: return 2;
    case Conn::Not:
    case Conn::Exists:
    case Conn::Forall: return 3;
    default: return 4;
  }
}

void print_rec(std::ostream& os, const Formula& f, int min_level) {
  bool parens = level_of(f) < min_level;
  if (parens) os << "(";
  switch (f.kind()) {
    case Conn::True:
      os << "true";
      break;
    case Conn::False:
      os << "false";
      break;
    case Conn::Eq:
      os << print_term(f.eq_lhs()) << " = " << print_term(f.eq_rhs());
      break;
    case Conn::Rel: {
      os << f.rel_name() << "(";
      bool first = true;
      for (const Term& t : f.rel_args()) {
        if (!first) os << ", ";
        first = false;
        os << print_term(t);
      }
      os << ")";
      break;
    }
    case Conn::And: {
      bool first = true;
      for (const Formula& g : flatten(f, Conn::And)) {
        if (!first) os << " /\\ ";
        first = false;
        print_rec(os, g, 3);
      }
      break;
    }
    case Conn::Or: {
      bool first = true;
      for (const Formula& g : flatten(f, Conn::Or)) {
        if (!first) os << " \\/ ";
        first = false;
        print_rec(os, g, 2);
      }
      break;
    }
    case Conn::Implies:
      print_rec(os, f.lhs(), 1);
      os << " -> ";
      print_rec(os, f.rhs(), 0);
      break;
    case Conn::Not:
      os << "not ";
      print_rec(os, f.body(), 3);
      break;
    case Conn::Exists:
    case Conn::Forall:
      os << (f.kind() == Conn::Exists ? "exists " : "forall ") << f.bound_var() << ":"
         << f.bound_sort() << ". ";
      print_rec(os, f.body(), 3);
      break;
  }
  if (parens) os << ")";
}

void join_idents(std::ostream& os, const std::vector<std::string>& xs) {
  bool first = true;
  for (const auto& x : xs) {
    if (!first) os << ", ";
    first = false;
    os << x;
  }
}

}  // namespace

std::string print_term(const Term& t) {
  if (const Term::Var* v = t.as_var()) return v->name;
  const Term::App& a = *t.as_app();
  std::string out = a.fn + "(";
  bool first = true;
  for (const Term& arg : a.args) {
    if (!first) out += ", ";
    first = false;
    out += print_term(arg);
  }
  return out + ")";
}

std::string print_formula(const Formula& f) {
  std::ostringstream os;
  print_rec(os, f, 0);
  return os.str();
}

std::string print_context(const Context& ctx) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (const auto& [name, sort] : ctx.vars) {
    if (!first) os << ", ";
    first = false;
    os << name << ":" << sort;
  }
  os << ")";
  return os.str();
}

std::string print_sequent(const Sequent& s) {
  return print_formula(s.antecedent) + " |- " + print_context(s.ctx) + " " +
         print_formula(s.consequent);
}

std::string print_axiom(const Sequent& s, const std::string& fallback_label) {
  const std::string& label = s.label.empty() ? fallback_label : s.label;
  return "axiom " + label + ": " + print_sequent(s);
}

std::string print_sort_decl(const SortDescriptor& d) {
  std::ostringstream os;
  os << "derived " << d.name << " = ";
  switch (d.kind) {
    case SortKind::Base:
      return d.name;  // not used; base sorts print on the `sorts` line
    case SortKind::Product:
    case SortKind::Coproduct: {
      os << (d.kind == SortKind::Product ? "product(" : "coproduct(");
      join_idents(os, d.components);
      os << ") with ";
      join_idents(os, d.maps);
      break;
    }
    case SortKind::Subsort:
      os << "subsort(" << d.formula_vars[0] << ":" << d.components[0] << " | "
         << print_formula(*d.formula) << ") with " << d.maps[0];
      break;
    case SortKind::Quotient:
      os << "quotient(" << d.formula_vars[0] << ":" << d.components[0] << ", "
         << d.formula_vars[1] << ":" << d.components[0] << " | " << print_formula(*d.formula)
         << ") with " << d.maps[0];
      break;
    case SortKind::Unit:
    case SortKind::Empty: {
      os << (d.kind == SortKind::Unit ? "unit(" : "empty(") << d.components[0] << ")";
      if (!d.maps.empty()) {
        os << " with ";
        for (size_t i = 0; i < d.maps.size(); ++i) {
          if (i) os << ", ";
          os << d.maps[i] << ":" << d.map_sorts[i];
        }
      }
      break;
    }
  }
  return os.str();
}

std::string print_theory(const Theory& t) {
  std::ostringstream os;
  os << "theory " << t.name << "\n";
  os << "fragment " << fragment_name(t.fragment) << "\n";
  std::vector<std::string> base;
  for (const auto& s : t.signature.sorts)
    if (s.kind == SortKind::Base) base.push_back(s.name);
  if (!base.empty()) {
    os << "sorts ";
    join_idents(os, base);
    os << "\n";
  }
  for (const auto& s : t.signature.sorts)
    if (s.kind != SortKind::Base) os << print_sort_decl(s) << "\n";
  std::set<std::string> structural = t.signature.structural_functions();
  for (const auto& f : t.signature.functions) {
    if (structural.count(f.name)) continue;
    os << "fun " << f.name << " : ";
    join_idents(os, f.args);
    os << (f.args.empty() ? "-> " : " -> ") << f.result << "\n";
  }
  for (const auto& r : t.signature.relations) {
    os << "rel " << r.name << " : ";
    join_idents(os, r.args);
    os << "\n";
  }
  for (size_t i = 0; i < t.axioms.size(); ++i)
    os << print_axiom(t.axioms[i], "ax" + std::to_string(i)) << "\n";
  return os.str();
}

std::string canonical_key(const Formula& f) { return print_formula(canonicalize_closed(f)); }

std::string canonical_key(const Sequent& s) {
  return print_formula(canonicalize_closed(s.antecedent)) + " |- " + print_context(s.ctx) + " " +
         print_formula(canonicalize_closed(s.consequent));
}

}  // namespace morita
