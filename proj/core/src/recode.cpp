#include "morita/recode.hpp"

#include <algorithm>
#include <stdexcept>

#include "morita/chase.hpp"
#include "morita/print.hpp"
#include "morita/rewrite.hpp"

namespace morita {

Formula Code::conjunction() const {
  std::vector<Formula> atoms;
  for (const CodedVar& cv : coded)
    for (const Formula& a : cv.atoms) atoms.push_back(a);
  return conj_all(atoms);
}

Formula RecodeDisjunct::theta() const {
  Formula xi = code.conjunction();
  if (xi.is(Conn::True)) return psi;
  if (psi.is(Conn::True)) return xi;
  return Formula::conj(xi, psi);
}

std::set<std::string> new_sorts(const Theory& extended, const Theory& base) {
  std::set<std::string> out;
  for (const auto& s : extended.signature.sorts)
    if (!base.signature.has_sort(s.name)) out.insert(s.name);
  return out;
}

namespace {

struct Disjunct {
  Code code;
  Formula psi = Formula::truth();
};

void conjoin(Formula& into, const Formula& f) {
  if (f.is(Conn::True)) return;
  if (into.is(Conn::True)) {
    into = f;
    return;
  }
  into = Formula::conj(into, f);
}

// Shared state of one top-level recoding run.
struct Recoder {
  const Theory& ext;
  const Theory& base;
  std::map<std::string, const ExtensionSpec*> defined;  // defined fn/rel name -> spec
  std::set<std::string> fresh_sorts;
  NameGen names;

  Recoder(const Theory& ext_, const Theory& base_, const std::vector<ExtensionSpec>& specs,
          std::set<std::string> avoid)
      : ext(ext_), base(base_), names("y", std::move(avoid)) {
    fresh_sorts = new_sorts(ext_, base_);
    for (const auto& s : specs)
      if (s.kind == ExtensionKind::DefinedFunction || s.kind == ExtensionKind::DefinedRelation)
        defined[s.name] = &s;
  }

  bool is_new(const std::string& sort) const { return fresh_sorts.count(sort) > 0; }

  const SortDescriptor& descriptor(const std::string& sort) const {
    const SortDescriptor* d = ext.signature.sort(sort);
    if (!d || d->kind == SortKind::Base)
      throw std::invalid_argument("no derived-sort descriptor for " + sort);
    return *d;
  }

  // The coding atoms for one variable; `patch` collects the subsort defining
  // formula (or falsum for empty sorts), which recodings conjoin into psi.
  CodedVar code_var(const std::string& var, const std::string& sort, int branch,
                    std::vector<Formula>& patches) {
    const SortDescriptor& d = descriptor(sort);
    CodedVar cv;
    cv.var = var;
    cv.sort = sort;
    cv.kind = d.kind;
    Term x = Term::var(var, sort);
    switch (d.kind) {
      case SortKind::Product: {
        for (size_t i = 0; i < d.components.size(); ++i) {
          std::string y = names.fresh();
          cv.carriers.push_back(y);
          cv.carrier_sorts.push_back(d.components[i]);
          cv.atoms.push_back(Formula::eq(Term::app(d.maps[i], d.components[i], {x}),
                                         Term::var(y, d.components[i])));
        }
        break;
      }
      case SortKind::Coproduct: {
        if (branch < 0 || branch >= static_cast<int>(d.components.size()))
          throw std::invalid_argument("missing or out-of-range branch choice for coproduct variable " +
                                      var);
        cv.branch = branch;
        std::string y = names.fresh();
        cv.carriers.push_back(y);
        cv.carrier_sorts.push_back(d.components[branch]);
        cv.atoms.push_back(Formula::eq(
            Term::app(d.maps[branch], sort, {Term::var(y, d.components[branch])}), x));
        break;
      }
      case SortKind::Subsort: {
        std::string y = names.fresh();
        cv.carriers.push_back(y);
        cv.carrier_sorts.push_back(d.components[0]);
        cv.atoms.push_back(
            Formula::eq(Term::app(d.maps[0], d.components[0], {x}), Term::var(y, d.components[0])));
        patches.push_back(substitute(
            *d.formula, {{d.formula_vars[0], Term::var(y, d.components[0])}}));
        break;
      }
      case SortKind::Quotient: {
        std::string y = names.fresh();
        cv.carriers.push_back(y);
        cv.carrier_sorts.push_back(d.components[0]);
        cv.atoms.push_back(
            Formula::eq(Term::app(d.maps[0], sort, {Term::var(y, d.components[0])}), x));
        break;
      }
      case SortKind::Unit: {
        // code through the map out of the witness sort
        size_t k = d.maps.size();
        for (size_t i = 0; i < d.map_sorts.size(); ++i)
          if (d.map_sorts[i] == d.components[0]) {
            k = i;
            break;
          }
        if (k == d.maps.size())
          throw std::invalid_argument("unit sort " + sort + " has no map from its witness");
        std::string y = names.fresh();
        cv.carriers.push_back(y);
        cv.carrier_sorts.push_back(d.components[0]);
        cv.atoms.push_back(
            Formula::eq(Term::app(d.maps[k], sort, {Term::var(y, d.components[0])}), x));
        break;
      }
      case SortKind::Empty: {
        size_t k = d.maps.size();
        for (size_t i = 0; i < d.map_sorts.size(); ++i)
          if (d.map_sorts[i] == d.components[0]) {
            k = i;
            break;
          }
        if (k == d.maps.size())
          throw std::invalid_argument("empty sort " + sort + " has no map to its witness");
        std::string y = names.fresh();
        cv.carriers.push_back(y);
        cv.carrier_sorts.push_back(d.components[0]);
        cv.atoms.push_back(
            Formula::eq(Term::app(d.maps[k], d.components[0], {x}), Term::var(y, d.components[0])));
        patches.push_back(Formula::falsity());
        break;
      }
      case SortKind::Base:
        throw std::logic_error("base-sorted variable passed to code_var");
    }
    return cv;
  }

  const CodedVar* coded_in(const Disjunct& d, const std::string& var) const {
    for (const CodedVar& cv : d.code.coded)
      if (cv.var == var) return &cv;
    return nullptr;
  }

  void append_code(Disjunct& d, CodedVar cv, const std::vector<Formula>& patches) {
    for (size_t i = 0; i < cv.carriers.size(); ++i)
      d.code.carriers.emplace_back(cv.carriers[i], cv.carrier_sorts[i]);
    d.code.coded.push_back(std::move(cv));
    for (const Formula& p : patches) conjoin(d.psi, p);
  }

  void add_code(Disjunct& d, const std::string& var, const std::string& sort, int branch) {
    std::vector<Formula> patches;
    CodedVar cv = code_var(var, sort, branch, patches);
    append_code(d, std::move(cv), patches);
  }

  // Merge two disjuncts. Variables coded on both sides unify: mismatched
  // coproduct branches make the conjunction absurd, so the pair is dropped;
  // otherwise the right side's carriers are renamed to the left's.
  std::optional<Disjunct> combine(const Disjunct& a, const Disjunct& b) {
    Disjunct out = a;
    std::map<std::string, std::string> carrier_renaming;
    for (const CodedVar& cv : b.code.coded) {
      const CodedVar* have = coded_in(out, cv.var);
      if (!have) {
        for (size_t i = 0; i < cv.carriers.size(); ++i)
          out.code.carriers.emplace_back(cv.carriers[i], cv.carrier_sorts[i]);
        out.code.coded.push_back(cv);
        continue;
      }
      if (have->branch != cv.branch) return std::nullopt;  // incompatible codes
      for (size_t i = 0; i < cv.carriers.size(); ++i)
        carrier_renaming[cv.carriers[i]] = have->carriers[i];
    }
    Formula bpsi = carrier_renaming.empty() ? b.psi : rename_free(b.psi, carrier_renaming);
    conjoin(out.psi, bpsi);
    return out;
  }

  std::vector<Disjunct> combine_all(const std::vector<Disjunct>& as,
                                    const std::vector<Disjunct>& bs) {
    std::vector<Disjunct> out;
    for (const Disjunct& a : as)
      for (const Disjunct& b : bs)
        if (auto c = combine(a, b)) out.push_back(std::move(*c));
    return out;
  }

  // Drops the variable's code; its carriers move under existentials inside
  // psi. Sound by the code-cover lemma (subsort and empty codes keep their
  // defining-formula conjunct in psi, which is what licenses the move).
  void eliminate(Disjunct& d, const std::string& var) {
    auto it = std::find_if(d.code.coded.begin(), d.code.coded.end(),
                           [&](const CodedVar& cv) { return cv.var == var; });
    if (it == d.code.coded.end()) return;
    std::vector<std::pair<std::string, std::string>> binders;
    for (size_t i = 0; i < it->carriers.size(); ++i)
      binders.emplace_back(it->carriers[i], it->carrier_sorts[i]);
    d.psi = exists_all(binders, d.psi);
    std::set<std::string> dropped(it->carriers.begin(), it->carriers.end());
    d.code.coded.erase(it);
    auto& cs = d.code.carriers;
    cs.erase(std::remove_if(cs.begin(), cs.end(),
                            [&](const auto& p) { return dropped.count(p.first) > 0; }),
             cs.end());
  }

  // Ensures `var` is coded in every disjunct; coproduct variables multiply
  // the list, one disjunct per injection, in declaration order.
  std::vector<Disjunct> complete_var(std::vector<Disjunct> ds, const std::string& var,
                                     const std::string& sort) {
    std::vector<Disjunct> out;
    const SortDescriptor& desc = descriptor(sort);
    for (Disjunct& d : ds) {
      if (coded_in(d, var)) {
        out.push_back(std::move(d));
        continue;
      }
      if (desc.kind == SortKind::Coproduct) {
        for (size_t k = 0; k < desc.components.size(); ++k) {
          Disjunct copy = d;
          add_code(copy, var, sort, static_cast<int>(k));
          out.push_back(std::move(copy));
        }
      } else {
        add_code(d, var, sort, -1);
        out.push_back(std::move(d));
      }
    }
    return out;
  }

  // ---- terms ----

  // t = z  <->  \/_j exists carriers (code_j /\ psi_j)
  std::vector<Disjunct> term(const Term& t, const std::string& z) {
    const std::string& zsort = t.sort();
    if (const Term::Var* v = t.as_var()) {
      if (!is_new(v->sort)) {
        Disjunct d;
        d.psi = Formula::eq(Term::var(v->name, v->sort), Term::var(z, zsort));
        return {d};
      }
      const SortDescriptor& desc = descriptor(v->sort);
      std::vector<Disjunct> out;
      int branches = desc.kind == SortKind::Coproduct ? static_cast<int>(desc.components.size()) : 1;
      for (int k = 0; k < branches; ++k) {
        int br = desc.kind == SortKind::Coproduct ? k : -1;
        Disjunct d;
        std::vector<Formula> patches_x, patches_z;
        CodedVar cx = code_var(v->name, v->sort, br, patches_x);
        CodedVar cz = code_var(z, v->sort, br, patches_z);
        std::vector<Formula> link;
        for (size_t i = 0; i < cx.carriers.size(); ++i)
          link.push_back(Formula::eq(Term::var(cx.carriers[i], cx.carrier_sorts[i]),
                                     Term::var(cz.carriers[i], cz.carrier_sorts[i])));
        if (desc.kind == SortKind::Unit || desc.kind == SortKind::Empty) link.clear();
        append_code(d, std::move(cx), {});
        append_code(d, std::move(cz), {});
        Formula psi = conj_all(link);
        for (const Formula& p : patches_x) conjoin(psi, p);
        for (const Formula& p : patches_z) conjoin(psi, p);
        d.psi = psi;
        out.push_back(std::move(d));
      }
      return out;
    }

    const Term::App& app = *t.as_app();
    const FunctionDecl* base_decl = base.signature.function(app.fn);
    if (base_decl || defined.count(app.fn)) {
      // base or explicitly defined head: recode the arguments, then conjoin
      // the head atom (or its defining formula) under fresh result variables
      std::vector<Disjunct> acc{Disjunct{}};
      std::vector<Term> head_args;
      std::vector<std::pair<std::string, std::string>> bound;
      for (const Term& arg : app.args) {
        if (const Term::Var* av = arg.as_var(); av && !is_new(av->sort)) {
          head_args.push_back(arg);  // base variable: use directly
          continue;
        }
        std::string w = names.fresh();
        bound.emplace_back(w, arg.sort());
        head_args.push_back(Term::var(w, arg.sort()));
        acc = combine_all(acc, term(arg, w));
      }
      Formula head;
      if (base_decl) {
        head = Formula::eq(Term::app(app.fn, app.sort, head_args), Term::var(z, zsort));
      } else {
        const ExtensionSpec& spec = *defined.at(app.fn);
        std::map<std::string, Term> binding;
        for (size_t i = 0; i < head_args.size(); ++i)
          binding[spec.formula_vars[i]] = head_args[i];
        binding[spec.formula_vars.back()] = Term::var(z, zsort);
        head = substitute(*spec.formula, binding);
      }
      for (Disjunct& d : acc) {
        conjoin(d.psi, head);
        d.psi = exists_all(bound, d.psi);
      }
      return acc;
    }

    // structural symbol of a derived sort
    const SortDescriptor* owner = nullptr;
    size_t role = 0;
    for (const auto& s : ext.signature.sorts) {
      for (size_t i = 0; i < s.maps.size(); ++i)
        if (s.maps[i] == app.fn) {
          owner = &s;
          role = i;
        }
      if (owner) break;
    }
    if (!owner) throw std::invalid_argument("term mentions symbol outside the chain: " + app.fn);

    switch (owner->kind) {
      case SortKind::Product: {
        // pi_role(x0) = z, x0 a product variable
        const Term::Var* x0 = app.args[0].as_var();
        if (!x0) throw std::invalid_argument("projection applied to a non-variable term");
        Disjunct d;
        add_code(d, x0->name, x0->sort, -1);
        const CodedVar& cv = d.code.coded.back();
        d.psi = Formula::eq(Term::var(cv.carriers[role], cv.carrier_sorts[role]),
                            Term::var(z, zsort));
        return {d};
      }
      case SortKind::Coproduct: {
        // rho_k(t0) = z: z's code is forced onto branch k
        std::string y = names.fresh();
        std::vector<Disjunct> ds = term(app.args[0], y);
        for (Disjunct& d : ds) {
          CodedVar cz;
          cz.var = z;
          cz.sort = owner->name;
          cz.kind = SortKind::Coproduct;
          cz.branch = static_cast<int>(role);
          cz.carriers.push_back(y);
          cz.carrier_sorts.push_back(owner->components[role]);
          cz.atoms.push_back(Formula::eq(
              Term::app(app.fn, owner->name, {Term::var(y, owner->components[role])}),
              Term::var(z, owner->name)));
          append_code(d, std::move(cz), {});
        }
        return ds;
      }
      case SortKind::Quotient: {
        // eps(t0) = z: code z by eps(y) = z and relate y to t0
        std::string y = names.fresh();
        std::vector<Disjunct> ds = term(app.args[0], y);
        for (Disjunct& d : ds) {
          CodedVar cz;
          cz.var = z;
          cz.sort = owner->name;
          cz.kind = SortKind::Quotient;
          cz.carriers.push_back(y);
          cz.carrier_sorts.push_back(owner->components[0]);
          cz.atoms.push_back(
              Formula::eq(Term::app(app.fn, owner->name, {Term::var(y, owner->components[0])}),
                          Term::var(z, owner->name)));
          append_code(d, std::move(cz), {});
        }
        return ds;
      }
      case SortKind::Subsort: {
        // i(x0) = z with z of the ambient sort; keep the defining-formula patch
        const Term::Var* x0 = app.args[0].as_var();
        if (!x0) throw std::invalid_argument("subsort injection applied to a non-variable term");
        Disjunct d;
        add_code(d, x0->name, x0->sort, -1);
        const CodedVar& cv = d.code.coded.back();
        conjoin(d.psi, Formula::eq(Term::var(cv.carriers[0], cv.carrier_sorts[0]),
                                   Term::var(z, zsort)));
        return {d};
      }
      case SortKind::Unit: {
        if (owner->map_sorts[role] == owner->name || app.sort != owner->name)
          throw std::invalid_argument("unexpected unit map shape");
        // bang(t0) = z: any unit element equals any other, so only z's code
        // survives; t0's variables are handled at the formula level.
        Disjunct d;
        add_code(d, z, owner->name, -1);
        return {d};
      }
      case SortKind::Empty: {
        const Term::Var* x0 = app.args[0].as_var();
        if (!x0) throw std::invalid_argument("empty-sort map applied to a non-variable term");
        Disjunct d;
        add_code(d, x0->name, x0->sort, -1);  // conjoins the falsum patch
        return {d};
      }
      case SortKind::Base:
        break;
    }
    throw std::logic_error("unreachable");
  }

  // ---- formulas ----

  std::vector<Disjunct> formula(const Formula& f) {
    switch (f.kind()) {
      case Conn::True:
        return {Disjunct{}};
      case Conn::False: {
        Disjunct d;
        d.psi = Formula::falsity();
        return {d};
      }
      case Conn::And:
        return combine_all(formula(f.lhs()), formula(f.rhs()));
      case Conn::Or: {
        std::vector<Disjunct> ls = formula(f.lhs());
        std::vector<Disjunct> rs = formula(f.rhs());
        ls.insert(ls.end(), rs.begin(), rs.end());
        return ls;
      }
      case Conn::Eq: {
        const std::string& sort = f.eq_lhs().sort();
        std::string w = names.fresh();
        std::vector<Disjunct> ds = combine_all(term(f.eq_lhs(), w), term(f.eq_rhs(), w));
        for (Disjunct& d : ds) {
          if (is_new(sort))
            eliminate(d, w);
          else
            d.psi = Formula::exists(w, sort, d.psi);
        }
        return ds;
      }
      case Conn::Rel: {
        const RelationDecl* base_decl = base.signature.relation(f.rel_name());
        const ExtensionSpec* spec = nullptr;
        if (!base_decl) {
          auto it = defined.find(f.rel_name());
          if (it == defined.end())
            throw std::invalid_argument("relation outside the chain: " + f.rel_name());
          spec = it->second;
        }
        std::vector<Disjunct> acc{Disjunct{}};
        std::vector<Term> head_args;
        std::vector<std::pair<std::string, std::string>> bound;
        for (const Term& arg : f.rel_args()) {
          if (const Term::Var* av = arg.as_var(); av && !is_new(av->sort)) {
            head_args.push_back(arg);
            continue;
          }
          std::string w = names.fresh();
          bound.emplace_back(w, arg.sort());
          head_args.push_back(Term::var(w, arg.sort()));
          acc = combine_all(acc, term(arg, w));
        }
        Formula head;
        if (base_decl) {
          head = Formula::rel(f.rel_name(), head_args);
        } else {
          std::map<std::string, Term> binding;
          for (size_t i = 0; i < head_args.size(); ++i)
            binding[spec->formula_vars[i]] = head_args[i];
          head = substitute(*spec->formula, binding);
        }
        for (Disjunct& d : acc) {
          conjoin(d.psi, head);
          d.psi = exists_all(bound, d.psi);
        }
        return acc;
      }
      case Conn::Exists: {
        std::vector<Disjunct> ds = formula(f.body());
        if (!is_new(f.bound_sort())) {
          for (Disjunct& d : ds) d.psi = Formula::exists(f.bound_var(), f.bound_sort(), d.psi);
          return ds;
        }
        ds = complete_var(std::move(ds), f.bound_var(), f.bound_sort());
        for (Disjunct& d : ds) eliminate(d, f.bound_var());
        return ds;
      }
      default:
        throw std::invalid_argument("recoding is defined for coherent formulas only");
    }
  }
};

std::string disjunct_key(const RecodeDisjunct& d) {
  // positional carrier renaming so structurally equal disjuncts collide
  std::map<std::string, std::string> ren;
  for (size_t i = 0; i < d.code.carriers.size(); ++i)
    ren[d.code.carriers[i].first] = "_c" + std::to_string(i);
  return canonical_key(rename_free(d.theta(), ren));
}

}  // namespace

Code make_code(const std::vector<std::pair<std::string, std::string>>& vars,
               const std::map<std::string, int>& branch_choice, const std::set<std::string>& avoid,
               const Theory& extended, const Theory& base) {
  std::set<std::string> names = avoid;
  for (const auto& [v, s] : vars) {
    (void)s;
    names.insert(v);
  }
  Recoder rec(extended, base, {}, std::move(names));
  Disjunct d;
  for (const auto& [v, sort] : vars) {
    if (!rec.is_new(sort))
      throw std::invalid_argument("variable " + v + " has base sort " + sort +
                                  "; codes cover derived sorts only");
    int branch = -1;
    if (rec.descriptor(sort).kind == SortKind::Coproduct) {
      auto it = branch_choice.find(v);
      if (it == branch_choice.end())
        throw std::invalid_argument("missing branch choice for coproduct variable " + v);
      branch = it->second;
    }
    rec.add_code(d, v, sort, branch);
  }
  return d.code;
}

CodeLemmaReport check_code_lemmas(const Code& code, const Theory& extended, const Theory& base,
                                  const Budget& budget) {
  CodeLemmaReport report;
  Context xs;
  std::set<std::string> avoid;
  bool has_subsort_code = false;
  for (const CodedVar& cv : code.coded) {
    xs.push(cv.var, cv.sort);
    avoid.insert(cv.var);
    for (const auto& c : cv.carriers) avoid.insert(c);
    if (cv.kind == SortKind::Subsort || cv.kind == SortKind::Empty) has_subsort_code = true;
  }

  // (codex, part 1) true |- \/ over branch choices: exists carriers, code
  {
    std::vector<std::vector<std::pair<std::string, int>>> combos{{}};
    for (const CodedVar& cv : code.coded) {
      if (cv.kind != SortKind::Coproduct) continue;
      const SortDescriptor* d = extended.signature.sort(cv.sort);
      std::vector<std::vector<std::pair<std::string, int>>> next;
      for (const auto& combo : combos)
        for (size_t k = 0; k < d->components.size(); ++k) {
          auto c = combo;
          c.emplace_back(cv.var, static_cast<int>(k));
          next.push_back(std::move(c));
        }
      combos = std::move(next);
    }
    std::vector<Formula> disj;
    std::vector<std::pair<std::string, std::string>> vars;
    for (const CodedVar& cv : code.coded) vars.emplace_back(cv.var, cv.sort);
    for (const auto& combo : combos) {
      std::map<std::string, int> choice(combo.begin(), combo.end());
      Code variant = make_code(vars, choice, avoid, extended, base);
      disj.push_back(exists_all(variant.carriers, variant.conjunction()));
    }
    Sequent goal = make_sequent("", Formula::truth(), xs, disj_all(disj));
    report.entries.push_back(
        {"code cover over branch choices", goal, derive(extended, goal, budget), false});
  }

  // (codex, part 2) true |- exists coded vars, code — not for subsort codes
  {
    Context ys;
    for (const auto& [c, s] : code.carriers) ys.push(c, s);
    Formula body = code.conjunction();
    std::vector<std::pair<std::string, std::string>> binders;
    for (const CodedVar& cv : code.coded) binders.emplace_back(cv.var, cv.sort);
    Sequent goal = make_sequent("", Formula::truth(), ys, exists_all(binders, body));
    if (has_subsort_code) {
      report.entries.push_back({"code totality (skipped: subsort code present)", goal,
                                ProofOutcome::unknown_with("skipped"), true});
    } else {
      report.entries.push_back({"code totality", goal, derive(extended, goal, budget), false});
    }
  }

  // (codefunc) code(x,y) /\ code(z,y) |- x = z
  {
    Context ctx = xs;
    std::map<std::string, std::string> prime;
    std::vector<Formula> eqs;
    for (const CodedVar& cv : code.coded) {
      std::string alt = cv.var + "'";
      while (ctx.contains(alt) || avoid.count(alt)) alt += "'";
      prime[cv.var] = alt;
      ctx.push(alt, cv.sort);
      eqs.push_back(Formula::eq(Term::var(cv.var, cv.sort), Term::var(alt, cv.sort)));
    }
    for (const auto& [c, s] : code.carriers) ctx.push(c, s);
    Formula xi = code.conjunction();
    Formula xi2 = rename_free(xi, prime);
    Sequent goal = make_sequent("", Formula::conj(xi, xi2), ctx, conj_all(eqs));
    report.entries.push_back(
        {"code functionality", goal, derive(extended, goal, budget), false});
  }
  return report;
}

std::vector<RecodeDisjunct> recode_term(const Term& t, const std::string& result_var,
                                        const Theory& extended, const Theory& base,
                                        const std::vector<ExtensionSpec>& defined,
                                        const std::set<std::string>& avoid) {
  std::set<std::string> names = avoid;
  auto vs = var_names(t);
  names.insert(vs.begin(), vs.end());
  names.insert(result_var);
  Recoder rec(extended, base, defined, std::move(names));
  std::vector<RecodeDisjunct> out;
  for (Disjunct& d : rec.term(t, result_var))
    out.push_back(RecodeDisjunct{std::move(d.code), std::move(d.psi)});
  return out;
}

std::vector<RecodeDisjunct> recode_formula(const Context& ctx, const Formula& f,
                                           const Theory& extended, const Theory& base,
                                           const std::vector<ExtensionSpec>& defined) {
  if (!formula_in_fragment(f, Fragment::Coherent))
    throw std::invalid_argument("recoding is defined for coherent formulas only");
  std::set<std::string> names = var_names(f);
  for (const auto& [v, s] : ctx.vars) {
    (void)s;
    names.insert(v);
  }
  Recoder rec(extended, base, defined, std::move(names));
  std::vector<Disjunct> ds = rec.formula(f);
  for (const auto& [v, sort] : ctx.vars)
    if (rec.is_new(sort)) ds = rec.complete_var(std::move(ds), v, sort);
  std::vector<RecodeDisjunct> out;
  std::set<std::string> seen;
  for (Disjunct& d : ds) {
    RecodeDisjunct rd{std::move(d.code), std::move(d.psi)};
    if (seen.insert(disjunct_key(rd)).second) out.push_back(std::move(rd));
  }
  return out;
}

bool over_signature(const Formula& f, const Signature& sig) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return true;
    case Conn::Eq: {
      struct TermScan {
        const Signature& sig;
        bool ok = true;
        void go(const Term& t) {
          if (const Term::Var* v = t.as_var()) {
            ok = ok && sig.has_sort(v->sort);
            return;
          }
          const Term::App& a = *t.as_app();
          ok = ok && sig.has_function(a.fn) && sig.has_sort(a.sort);
          for (const Term& arg : a.args) go(arg);
        }
      } scan{sig};
      scan.go(f.eq_lhs());
      scan.go(f.eq_rhs());
      return scan.ok;
    }
    case Conn::Rel: {
      if (!sig.has_relation(f.rel_name())) return false;
      for (const Term& t : f.rel_args()) {
        Formula probe = Formula::eq(t, t);
        if (!over_signature(probe, sig)) return false;
      }
      return true;
    }
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
      return over_signature(f.lhs(), sig) && over_signature(f.rhs(), sig);
    case Conn::Not:
      return over_signature(f.body(), sig);
    case Conn::Exists:
    case Conn::Forall:
      return sig.has_sort(f.bound_sort()) && over_signature(f.body(), sig);
  }
  return false;
}

CoverReport cover_family(const Context& ctx, const Formula& f, const Theory& extended,
                         const Theory& base, const std::vector<ExtensionSpec>& defined,
                         const Budget& budget) {
  CoverReport report;
  std::vector<RecodeDisjunct> ds = recode_formula(ctx, f, extended, base, defined);

  NameGen primer("x", [&] {
    std::set<std::string> avoid = var_names(f);
    for (const auto& [v, s] : ctx.vars) {
      (void)s;
      avoid.insert(v);
    }
    for (const auto& d : ds)
      for (const auto& [c, s] : d.code.carriers) {
        (void)s;
        avoid.insert(c);
      }
    return avoid;
  }());

  // base-sorted context variables are shared between source and target; the
  // source uses primed copies tied back by equations inside theta
  std::vector<std::pair<std::string, std::string>> base_ctx;
  std::set<std::string> derived_ctx;
  for (const auto& [v, sort] : ctx.vars) {
    if (base.signature.has_sort(sort))
      base_ctx.emplace_back(v, sort);
    else
      derived_ctx.insert(v);
  }
  std::map<std::string, std::string> prime;
  for (const auto& [v, sort] : base_ctx) {
    (void)sort;
    prime[v] = primer.fresh_like(v + "'");
  }

  std::vector<Formula> images;
  for (const RecodeDisjunct& d : ds) {
    CoverReport::MorphismCheck mc;
    mc.disjunct = d;
    Formula psi_primed = rename_free(d.psi, prime);
    Context src;
    for (const auto& [v, sort] : base_ctx) src.push(prime.at(v), sort);
    for (const auto& [c, sort] : d.code.carriers) src.push(c, sort);
    mc.source_ctx = src;
    mc.source_formula = psi_primed;
    mc.sigma1_domain = over_signature(psi_primed, base.signature);

    std::vector<Formula> ties;
    for (const auto& [v, sort] : base_ctx)
      ties.push_back(Formula::eq(Term::var(prime.at(v), sort), Term::var(v, sort)));
    Formula theta = d.code.conjunction();
    conjoin(theta, psi_primed);
    for (const Formula& tie : ties) conjoin(theta, tie);
    mc.theta = theta;

    Context joint = src;
    for (const auto& [v, sort] : ctx.vars) joint.push(v, sort);

    // relatedness: theta |- source /\ target
    {
      Sequent goal = make_sequent("", theta, joint, Formula::conj(psi_primed, f));
      mc.relatedness = derive(extended, goal, budget);
    }
    // single-valuedness: theta /\ theta[tgt''] |- tgt'' = tgt
    {
      NameGen second("z", var_names(theta));
      for (const auto& [v, s] : joint.vars) {
        (void)s;
        second.reserve(v);
      }
      std::map<std::string, std::string> tgt2;
      Context ctx2 = joint;
      std::vector<Formula> eqs;
      for (const auto& [v, sort] : ctx.vars) {
        std::string v2 = second.fresh_like(v + "''");
        tgt2[v] = v2;
        ctx2.push(v2, sort);
        eqs.push_back(Formula::eq(Term::var(v2, sort), Term::var(v, sort)));
      }
      Formula theta2 = rename_free(theta, tgt2);
      Sequent goal = make_sequent("", Formula::conj(theta, theta2), ctx2, conj_all(eqs));
      mc.single_valued = derive(extended, goal, budget);
    }
    // totality: source |- exists tgt, theta
    {
      std::vector<std::pair<std::string, std::string>> binders;
      for (const auto& [v, sort] : ctx.vars) binders.emplace_back(v, sort);
      Sequent goal = make_sequent("", psi_primed, src, exists_all(binders, theta));
      mc.totality = derive(extended, goal, budget);
    }
    std::vector<std::pair<std::string, std::string>> src_binders = src.vars;
    images.push_back(exists_all(src_binders, theta));
    report.morphisms.push_back(std::move(mc));
  }

  Formula cover = disj_all(images);
  Context tgt_ctx = ctx;
  report.cover_forward = derive(extended, make_sequent("", cover, tgt_ctx, f), budget);
  report.cover_backward = derive(extended, make_sequent("", f, tgt_ctx, cover), budget);
  (void)derived_ctx;
  return report;
}

}  // namespace morita
