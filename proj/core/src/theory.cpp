#include "morita/theory.hpp"

namespace morita {

const char* fragment_name(Fragment f) {
  switch (f) {
    case Fragment::Cartesian: return "cartesian";
    case Fragment::Regular: return "regular";
    case Fragment::Coherent: return "coherent";
    case Fragment::FirstOrder: return "firstorder";
  }
  return "?";
}

std::optional<Fragment> fragment_from_name(const std::string& s) {
  if (s == "cartesian") return Fragment::Cartesian;
  if (s == "regular") return Fragment::Regular;
  if (s == "coherent") return Fragment::Coherent;
  if (s == "first-order" || s == "firstorder") return Fragment::FirstOrder;
  return std::nullopt;
}

bool fragment_at_most(Fragment a, Fragment b) { return static_cast<int>(a) <= static_cast<int>(b); }

const char* sort_kind_name(SortKind k) {
  switch (k) {
    case SortKind::Base: return "base";
    case SortKind::Product: return "product";
    case SortKind::Coproduct: return "coproduct";
    case SortKind::Subsort: return "subsort";
    case SortKind::Quotient: return "quotient";
    case SortKind::Unit: return "unit";
    case SortKind::Empty: return "empty";
  }
  return "?";
}

bool SortDescriptor::operator==(const SortDescriptor& other) const {
  if (name != other.name || kind != other.kind || components != other.components ||
      maps != other.maps || map_sorts != other.map_sorts || formula_vars != other.formula_vars)
    return false;
  if (formula.has_value() != other.formula.has_value()) return false;
  return !formula || *formula == *other.formula;
}

const SortDescriptor* Signature::sort(const std::string& name) const {
  for (const auto& s : sorts)
    if (s.name == name) return &s;
  return nullptr;
}

const FunctionDecl* Signature::function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const RelationDecl* Signature::relation(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return &r;
  return nullptr;
}

std::set<std::string> Signature::structural_functions() const {
  std::set<std::string> out;
  for (const auto& s : sorts)
    for (const auto& m : s.maps) out.insert(m);
  return out;
}

bool Signature::operator==(const Signature& other) const {
  return sorts == other.sorts && functions == other.functions && relations == other.relations;
}

const Sequent* Theory::axiom(const std::string& label) const {
  for (const auto& a : axioms)
    if (a.label == label) return &a;
  return nullptr;
}

bool formula_in_fragment(const Formula& f, Fragment frag) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::Eq:
    case Conn::Rel:
      return true;
    case Conn::And:
      return formula_in_fragment(f.lhs(), frag) && formula_in_fragment(f.rhs(), frag);
    case Conn::Exists:
      return formula_in_fragment(f.body(), frag);
    case Conn::False:
      return fragment_at_most(Fragment::Coherent, frag);
    case Conn::Or:
      return fragment_at_most(Fragment::Coherent, frag) && formula_in_fragment(f.lhs(), frag) &&
             formula_in_fragment(f.rhs(), frag);
    case Conn::Not:
      return frag == Fragment::FirstOrder && formula_in_fragment(f.body(), frag);
    case Conn::Implies:
      return frag == Fragment::FirstOrder && formula_in_fragment(f.lhs(), frag) &&
             formula_in_fragment(f.rhs(), frag);
    case Conn::Forall:
      return frag == Fragment::FirstOrder && formula_in_fragment(f.body(), frag);
  }
  return false;
}

}  // namespace morita
