#include "morita/wellformed.hpp"

#include <set>

#include "morita/print.hpp"
#include "morita/rewrite.hpp"

namespace morita {

std::optional<std::string> sort_of_term(const Signature& sig, const Context& ctx, const Term& t,
                                        std::vector<Diagnostic>* diags, const std::string& where) {
  if (const Term::Var* v = t.as_var()) {
    const std::string* declared = ctx.sort_of(v->name);
    if (!declared) {
      if (diags) diags->push_back({where, "free variable outside context: " + v->name});
      return std::nullopt;
    }
    if (*declared != v->sort) {
      if (diags)
        diags->push_back({where, "variable " + v->name + " annotated " + v->sort +
                                     " but context declares " + *declared});
      return std::nullopt;
    }
    if (!sig.has_sort(v->sort)) {
      if (diags) diags->push_back({where, "undeclared sort: " + v->sort});
      return std::nullopt;
    }
    return v->sort;
  }
  const Term::App& a = *t.as_app();
  const FunctionDecl* decl = sig.function(a.fn);
  if (!decl) {
    if (diags) diags->push_back({where, "undeclared function: " + a.fn});
    return std::nullopt;
  }
  if (decl->args.size() != a.args.size()) {
    if (diags)
      diags->push_back({where, "arity mismatch for " + a.fn + ": expected " +
                                   std::to_string(decl->args.size()) + " arguments"});
    return std::nullopt;
  }
  bool ok = true;
  for (size_t i = 0; i < a.args.size(); ++i) {
    auto s = sort_of_term(sig, ctx, a.args[i], diags, where);
    if (!s) {
      ok = false;
      continue;
    }
    if (*s != decl->args[i]) {
      if (diags)
        diags->push_back({where, "argument " + std::to_string(i + 1) + " of " + a.fn + " has sort " +
                                     *s + ", expected " + decl->args[i]});
      ok = false;
    }
  }
  if (a.sort != decl->result) {
    if (diags)
      diags->push_back({where, "application of " + a.fn + " annotated " + a.sort +
                                   " but declared result is " + decl->result});
    ok = false;
  }
  if (!ok) return std::nullopt;
  return decl->result;
}

void check_formula(const Signature& sig, const Context& ctx, Fragment frag, const Formula& f,
                   std::vector<Diagnostic>& diags, const std::string& where) {
  if (!formula_in_fragment(f, frag)) {
    diags.push_back({where, "constructor outside fragment " + std::string(fragment_name(frag))});
    // keep checking sorts below
  }
  struct Rec {
    const Signature& sig;
    Fragment frag;
    std::vector<Diagnostic>& diags;
    const std::string& where;
    void go(const Formula& f, Context ctx) {
      switch (f.kind()) {
        case Conn::True:
        case Conn::False:
          return;
        case Conn::Eq: {
          auto s1 = sort_of_term(sig, ctx, f.eq_lhs(), &diags, where);
          auto s2 = sort_of_term(sig, ctx, f.eq_rhs(), &diags, where);
          if (s1 && s2 && *s1 != *s2)
            diags.push_back({where, "sort mismatch in equality: " + *s1 + " vs " + *s2});
          return;
        }
        case Conn::Rel: {
          const RelationDecl* decl = sig.relation(f.rel_name());
          if (!decl) {
            diags.push_back({where, "undeclared relation: " + f.rel_name()});
            return;
          }
          if (decl->args.size() != f.rel_args().size()) {
            diags.push_back({where, "arity mismatch for relation " + f.rel_name()});
            return;
          }
          for (size_t i = 0; i < decl->args.size(); ++i) {
            auto s = sort_of_term(sig, ctx, f.rel_args()[i], &diags, where);
            if (s && *s != decl->args[i])
              diags.push_back({where, "argument " + std::to_string(i + 1) + " of relation " +
                                          f.rel_name() + " has sort " + *s + ", expected " +
                                          decl->args[i]});
          }
          return;
        }
        case Conn::And:
        case Conn::Or:
        case Conn::Implies:
          go(f.lhs(), ctx);
          go(f.rhs(), ctx);
          return;
        case Conn::Not:
          go(f.body(), ctx);
          return;
        case Conn::Exists:
        case Conn::Forall: {
          if (!sig.has_sort(f.bound_sort()))
            diags.push_back({where, "undeclared sort in binder: " + f.bound_sort()});
          Context inner = ctx;
          // rebinding shadows an outer variable of the same name
          for (auto& v : inner.vars)
            if (v.first == f.bound_var()) v.second = f.bound_sort();
          if (!inner.contains(f.bound_var())) inner.push(f.bound_var(), f.bound_sort());
          go(f.body(), inner);
          return;
        }
      }
    }
  } rec{sig, frag, diags, where};
  rec.go(f, ctx);
}

void check_sequent(const Signature& sig, Fragment frag, const Sequent& s,
                   std::vector<Diagnostic>& diags) {
  std::string where = "axiom " + (s.label.empty() ? std::string("<unnamed>") : s.label);
  std::set<std::string> seen;
  for (const auto& [name, sort] : s.ctx.vars) {
    if (!seen.insert(name).second)
      diags.push_back({where, "duplicate context variable: " + name});
    if (!sig.has_sort(sort)) diags.push_back({where, "undeclared sort in context: " + sort});
  }
  check_formula(sig, s.ctx, frag, s.antecedent, diags, where + " / antecedent");
  check_formula(sig, s.ctx, frag, s.consequent, diags, where + " / consequent");
}

namespace {

void check_signature(const Signature& sig, std::vector<Diagnostic>& diags, Fragment frag) {
  std::set<std::string> sort_names, fun_names, rel_names;
  std::set<std::string> declared;  // sorts declared so far, for provenance acyclicity
  for (const auto& s : sig.sorts) {
    std::string where = "sort " + s.name;
    if (!sort_names.insert(s.name).second) diags.push_back({where, "duplicate sort name"});
    for (const auto& c : s.components)
      if (!declared.count(c))
        diags.push_back({where, "references sort " + c + " not declared earlier"});
    switch (s.kind) {
      case SortKind::Base:
        break;
      case SortKind::Product:
      case SortKind::Coproduct:
        if (s.components.empty()) diags.push_back({where, "component list is empty"});
        if (s.maps.size() != s.components.size())
          diags.push_back({where, "expected one map per component"});
        break;
      case SortKind::Subsort:
      case SortKind::Quotient: {
        size_t nvars = s.kind == SortKind::Subsort ? 1 : 2;
        if (s.components.size() != 1 || s.maps.size() != 1 || !s.formula ||
            s.formula_vars.size() != nvars) {
          diags.push_back({where, "malformed descriptor"});
          break;
        }
        Context ctx;
        for (const auto& v : s.formula_vars) ctx.push(v, s.components[0]);
        auto fv = free_vars(*s.formula);
        for (const auto& [n, srt] : fv) {
          if (!ctx.contains(n))
            diags.push_back({where, "defining formula has stray free variable " + n});
          else if (*ctx.sort_of(n) != srt)
            diags.push_back({where, "defining formula variable " + n + " has wrong sort"});
        }
        check_formula(sig, ctx, frag, *s.formula, diags, where + " / defining formula");
        break;
      }
      case SortKind::Unit:
      case SortKind::Empty:
        if (s.components.size() != 1) diags.push_back({where, "expected one witness sort"});
        if (s.maps.size() != s.map_sorts.size())
          diags.push_back({where, "map and map_sorts lists differ in length"});
        for (const auto& t : s.map_sorts)
          if (!declared.count(t) && t != s.name)
            diags.push_back({where, "map target sort " + t + " not declared earlier"});
        break;
    }
    declared.insert(s.name);
  }
  for (const auto& f : sig.functions) {
    std::string where = "function " + f.name;
    if (!fun_names.insert(f.name).second) diags.push_back({where, "duplicate function name"});
    for (const auto& a : f.args)
      if (!sort_names.count(a)) diags.push_back({where, "undeclared argument sort: " + a});
    if (!sort_names.count(f.result)) diags.push_back({where, "undeclared result sort: " + f.result});
  }
  for (const auto& r : sig.relations) {
    std::string where = "relation " + r.name;
    if (!rel_names.insert(r.name).second) diags.push_back({where, "duplicate relation name"});
    for (const auto& a : r.args)
      if (!sort_names.count(a)) diags.push_back({where, "undeclared argument sort: " + a});
  }
}

}  // namespace

std::vector<Diagnostic> check_wellformed(const Theory& t) {
  std::vector<Diagnostic> diags;
  check_signature(t.signature, diags, t.fragment);
  for (const auto& ax : t.axioms) check_sequent(t.signature, t.fragment, ax, diags);
  return diags;
}

}  // namespace morita
