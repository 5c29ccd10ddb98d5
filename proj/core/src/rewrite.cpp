#include "morita/rewrite.hpp"

#include <stdexcept>

namespace morita {

std::string NameGen::fresh() {
  for (;;) {
    std::string name = prefix_ + std::to_string(counter_++);
    if (avoid_.insert(name).second) return name;
  }
}

std::string NameGen::fresh_like(const std::string& hint) {
  if (avoid_.insert(hint).second) return hint;
  for (int i = 0;; ++i) {
    std::string name = hint + std::to_string(i);
    if (avoid_.insert(name).second) return name;
  }
}

namespace {

void collect_free(const Term& t, std::vector<std::pair<std::string, std::string>>& out,
                  const std::set<std::string>& bound) {
  if (const Term::Var* v = t.as_var()) {
    if (bound.count(v->name)) return;
    for (const auto& [n, s] : out)
      if (n == v->name) return;
    out.emplace_back(v->name, v->sort);
    return;
  }
  for (const Term& a : t.as_app()->args) collect_free(a, out, bound);
}

void collect_free(const Formula& f, std::vector<std::pair<std::string, std::string>>& out,
                  std::set<std::string> bound) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return;
    case Conn::Eq:
      collect_free(f.eq_lhs(), out, bound);
      collect_free(f.eq_rhs(), out, bound);
      return;
    case Conn::Rel:
      for (const Term& t : f.rel_args()) collect_free(t, out, bound);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
      collect_free(f.lhs(), out, bound);
      collect_free(f.rhs(), out, bound);
      return;
    case Conn::Not:
      collect_free(f.body(), out, bound);
      return;
    case Conn::Exists:
    case Conn::Forall:
      bound.insert(f.bound_var());
      collect_free(f.body(), out, std::move(bound));
      return;
  }
}

void collect_names(const Term& t, std::set<std::string>& out) {
  if (const Term::Var* v = t.as_var()) {
    out.insert(v->name);
    return;
  }
  for (const Term& a : t.as_app()->args) collect_names(a, out);
}

void collect_names(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return;
    case Conn::Eq:
      collect_names(f.eq_lhs(), out);
      collect_names(f.eq_rhs(), out);
      return;
    case Conn::Rel:
      for (const Term& t : f.rel_args()) collect_names(t, out);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
      collect_names(f.lhs(), out);
      collect_names(f.rhs(), out);
      return;
    case Conn::Not:
      collect_names(f.body(), out);
      return;
    case Conn::Exists:
    case Conn::Forall:
      out.insert(f.bound_var());
      collect_names(f.body(), out);
      return;
  }
}

Term subst_term(const Term& t, const std::map<std::string, Term>& binding) {
  if (const Term::Var* v = t.as_var()) {
    auto it = binding.find(v->name);
    if (it == binding.end()) return t;
    if (it->second.sort() != v->sort)
      throw std::invalid_argument("sort-mismatched binding for variable " + v->name + ": " +
                                  v->sort + " vs " + it->second.sort());
    return it->second;
  }
  const Term::App& a = *t.as_app();
  std::vector<Term> args;
  args.reserve(a.args.size());
  for (const Term& arg : a.args) args.push_back(subst_term(arg, binding));
  return Term::app(a.fn, a.sort, std::move(args));
}

Formula subst_rec(const Formula& f, std::map<std::string, Term> binding, NameGen& names) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return f;
    case Conn::Eq:
      return Formula::eq(subst_term(f.eq_lhs(), binding), subst_term(f.eq_rhs(), binding));
    case Conn::Rel: {
      std::vector<Term> args;
      args.reserve(f.rel_args().size());
      for (const Term& t : f.rel_args()) args.push_back(subst_term(t, binding));
      return Formula::rel(f.rel_name(), std::move(args));
    }
    case Conn::And:
      return Formula::conj(subst_rec(f.lhs(), binding, names), subst_rec(f.rhs(), binding, names));
    case Conn::Or:
      return Formula::disj(subst_rec(f.lhs(), binding, names), subst_rec(f.rhs(), binding, names));
    case Conn::Implies:
      return Formula::implies(subst_rec(f.lhs(), binding, names),
                              subst_rec(f.rhs(), binding, names));
    case Conn::Not:
      return Formula::neg(subst_rec(f.body(), binding, names));
    case Conn::Exists:
    case Conn::Forall: {
      std::string var = f.bound_var();
      binding.erase(var);
      // Rename the binder when a range term would capture it.
      bool capture = false;
      for (const auto& [from, to] : binding) {
        (void)from;
        if (var_names(to).count(var)) {
          capture = true;
          break;
        }
      }
      Formula body = f.body();
      if (capture) {
        std::string renamed = names.fresh();
        binding[var] = Term::var(renamed, f.bound_sort());
        Formula newbody = subst_rec(body, binding, names);
        return f.kind() == Conn::Exists ? Formula::exists(renamed, f.bound_sort(), newbody)
                                        : Formula::forall(renamed, f.bound_sort(), newbody);
      }
      Formula newbody = subst_rec(body, binding, names);
      return f.kind() == Conn::Exists ? Formula::exists(var, f.bound_sort(), newbody)
                                      : Formula::forall(var, f.bound_sort(), newbody);
    }
  }
  return f;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> free_vars(const Term& t) {
  std::vector<std::pair<std::string, std::string>> out;
  collect_free(t, out, {});
  return out;
}

std::vector<std::pair<std::string, std::string>> free_vars(const Formula& f) {
  std::vector<std::pair<std::string, std::string>> out;
  collect_free(f, out, {});
  return out;
}

std::set<std::string> var_names(const Formula& f) {
  std::set<std::string> out;
  collect_names(f, out);
  return out;
}

std::set<std::string> var_names(const Term& t) {
  std::set<std::string> out;
  collect_names(t, out);
  return out;
}

Term substitute(const Term& t, const std::map<std::string, Term>& binding) {
  return subst_term(t, binding);
}

Formula substitute(const Formula& f, const std::map<std::string, Term>& binding) {
  std::set<std::string> avoid = var_names(f);
  for (const auto& [from, to] : binding) {
    avoid.insert(from);
    auto names = var_names(to);
    avoid.insert(names.begin(), names.end());
  }
  NameGen names(std::move(avoid));
  return subst_rec(f, binding, names);
}

Formula rename_free(const Formula& f, const std::map<std::string, std::string>& renaming) {
  std::map<std::string, Term> binding;
  auto fv = free_vars(f);
  for (const auto& [name, sort] : fv) {
    auto it = renaming.find(name);
    if (it != renaming.end()) binding.emplace(name, Term::var(it->second, sort));
  }
  return substitute(f, binding);
}

namespace {

Term canon_term(const Term& t, const std::map<std::string, std::string>& bound) {
  if (const Term::Var* v = t.as_var()) {
    auto it = bound.find(v->name);
    if (it == bound.end()) return t;
    return Term::var(it->second, v->sort);
  }
  const Term::App& a = *t.as_app();
  std::vector<Term> args;
  args.reserve(a.args.size());
  for (const Term& arg : a.args) args.push_back(canon_term(arg, bound));
  return Term::app(a.fn, a.sort, std::move(args));
}

Formula canon_rec(const Formula& f, std::map<std::string, std::string> bound, int& counter) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return f;
    case Conn::Eq:
      return Formula::eq(canon_term(f.eq_lhs(), bound), canon_term(f.eq_rhs(), bound));
    case Conn::Rel: {
      std::vector<Term> args;
      for (const Term& t : f.rel_args()) args.push_back(canon_term(t, bound));
      return Formula::rel(f.rel_name(), std::move(args));
    }
    case Conn::And:
      return Formula::conj(canon_rec(f.lhs(), bound, counter), canon_rec(f.rhs(), bound, counter));
    case Conn::Or:
      return Formula::disj(canon_rec(f.lhs(), bound, counter), canon_rec(f.rhs(), bound, counter));
    case Conn::Implies:
      return Formula::implies(canon_rec(f.lhs(), bound, counter),
                              canon_rec(f.rhs(), bound, counter));
    case Conn::Not:
      return Formula::neg(canon_rec(f.body(), bound, counter));
    case Conn::Exists:
    case Conn::Forall: {
      std::string canon = "_v" + std::to_string(counter++);
      bound[f.bound_var()] = canon;
      Formula body = canon_rec(f.body(), std::move(bound), counter);
      return f.kind() == Conn::Exists ? Formula::exists(canon, f.bound_sort(), body)
                                      : Formula::forall(canon, f.bound_sort(), body);
    }
  }
  return f;
}

}  // namespace

Formula canonicalize(const Formula& f, const Context& ctx) {
  for (const auto& [name, sort] : free_vars(f)) {
    const std::string* declared = ctx.sort_of(name);
    if (!declared)
      throw std::invalid_argument("free variable outside context: " + name);
    if (*declared != sort)
      throw std::invalid_argument("context sort mismatch for " + name + ": " + *declared +
                                  " vs " + sort);
  }
  int counter = 0;
  return canon_rec(f, {}, counter);
}

Formula canonicalize_closed(const Formula& f) {
  int counter = 0;
  return canon_rec(f, {}, counter);
}

Sequent canonicalize(const Sequent& s) {
  return Sequent{s.label, canonicalize(s.antecedent, s.ctx), canonicalize(s.consequent, s.ctx),
                 s.ctx};
}

bool alpha_equal(const Formula& a, const Formula& b) {
  return canonicalize_closed(a) == canonicalize_closed(b);
}

Context canonical_context(const Formula& f) {
  Context ctx;
  for (const auto& [name, sort] : free_vars(f)) ctx.push(name, sort);
  return ctx;
}

}  // namespace morita
