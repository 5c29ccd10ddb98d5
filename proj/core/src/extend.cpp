#include "morita/extend.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "morita/chase.hpp"
#include "morita/enumerate.hpp"
#include "morita/print.hpp"
#include "morita/rewrite.hpp"
#include "morita/wellformed.hpp"

namespace morita {

const char* extension_kind_name(ExtensionKind k) {
  switch (k) {
    case ExtensionKind::ProductSort: return "product";
    case ExtensionKind::CoproductSort: return "coproduct";
    case ExtensionKind::Subsort: return "subsort";
    case ExtensionKind::QuotientSort: return "quotient";
    case ExtensionKind::UnitSort: return "unit";
    case ExtensionKind::EmptySort: return "empty";
    case ExtensionKind::DefinedFunction: return "function";
    case ExtensionKind::DefinedRelation: return "relation";
  }
  return "?";
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Unit/Empty specs may leave map_sorts empty: one map per base-signature sort,
// named `<prefix>_<sort>`.
std::pair<std::vector<std::string>, std::vector<std::string>> resolve_unit_maps(
    const ExtensionSpec& spec, const Theory& base) {
  if (!spec.map_sorts.empty()) {
    require(spec.maps.size() == spec.map_sorts.size(), "map and map_sorts lists differ");
    return {spec.maps, spec.map_sorts};
  }
  require(spec.maps.size() == 1, "unit/empty specs take a single map-name prefix");
  std::vector<std::string> names, sorts;
  for (const auto& s : base.signature.sorts) {
    names.push_back(spec.maps[0] + "_" + s.name);
    sorts.push_back(s.name);
  }
  return {names, sorts};
}

Formula spec_formula(const ExtensionSpec& spec) {
  require(spec.formula.has_value(), "extension spec is missing its defining formula");
  return *spec.formula;
}

}  // namespace

Signature extended_signature(const ExtensionSpec& spec, const Theory& base) {
  Signature sig = base.signature;
  auto fresh = [&](const std::string& n) {
    require(!sig.has_symbol(n), "name collision with existing signature: " + n);
  };
  switch (spec.kind) {
    case ExtensionKind::ProductSort:
    case ExtensionKind::CoproductSort: {
      require(!spec.components.empty(), "component list is empty");
      require(spec.maps.size() == spec.components.size(), "one map per component required");
      for (const auto& c : spec.components)
        require(sig.has_sort(c), "undeclared component sort: " + c);
      fresh(spec.name);
      SortDescriptor d;
      d.name = spec.name;
      d.kind = spec.kind == ExtensionKind::ProductSort ? SortKind::Product : SortKind::Coproduct;
      d.components = spec.components;
      d.maps = spec.maps;
      sig.sorts.push_back(d);
      for (size_t i = 0; i < spec.maps.size(); ++i) {
        fresh(spec.maps[i]);
        if (spec.kind == ExtensionKind::ProductSort)
          sig.functions.push_back({spec.maps[i], {spec.name}, spec.components[i]});
        else
          sig.functions.push_back({spec.maps[i], {spec.components[i]}, spec.name});
      }
      return sig;
    }
    case ExtensionKind::Subsort:
    case ExtensionKind::QuotientSort: {
      require(spec.components.size() == 1, "expected a single ambient sort");
      require(sig.has_sort(spec.components[0]), "undeclared ambient sort: " + spec.components[0]);
      require(spec.maps.size() == 1, "expected a single map");
      fresh(spec.name);
      fresh(spec.maps[0]);
      SortDescriptor d;
      d.name = spec.name;
      d.kind = spec.kind == ExtensionKind::Subsort ? SortKind::Subsort : SortKind::Quotient;
      d.components = spec.components;
      d.maps = spec.maps;
      d.formula = spec_formula(spec);
      d.formula_vars = spec.formula_vars;
      sig.sorts.push_back(d);
      if (spec.kind == ExtensionKind::Subsort)
        sig.functions.push_back({spec.maps[0], {spec.name}, spec.components[0]});
      else
        sig.functions.push_back({spec.maps[0], {spec.components[0]}, spec.name});
      return sig;
    }
    case ExtensionKind::UnitSort:
    case ExtensionKind::EmptySort: {
      require(spec.components.size() == 1, "expected a single witness sort");
      require(sig.has_sort(spec.components[0]), "undeclared witness sort: " + spec.components[0]);
      auto [names, sorts] = resolve_unit_maps(spec, base);
      fresh(spec.name);
      SortDescriptor d;
      d.name = spec.name;
      d.kind = spec.kind == ExtensionKind::UnitSort ? SortKind::Unit : SortKind::Empty;
      d.components = spec.components;
      d.maps = names;
      d.map_sorts = sorts;
      sig.sorts.push_back(d);
      for (size_t i = 0; i < names.size(); ++i) {
        fresh(names[i]);
        if (spec.kind == ExtensionKind::UnitSort)
          sig.functions.push_back({names[i], {sorts[i]}, spec.name});
        else
          sig.functions.push_back({names[i], {spec.name}, sorts[i]});
      }
      return sig;
    }
    case ExtensionKind::DefinedFunction: {
      for (const auto& c : spec.components)
        require(sig.has_sort(c), "undeclared argument sort: " + c);
      require(sig.has_sort(spec.result_sort), "undeclared result sort: " + spec.result_sort);
      fresh(spec.name);
      sig.functions.push_back({spec.name, spec.components, spec.result_sort});
      return sig;
    }
    case ExtensionKind::DefinedRelation: {
      for (const auto& c : spec.components)
        require(sig.has_sort(c), "undeclared argument sort: " + c);
      fresh(spec.name);
      sig.relations.push_back({spec.name, spec.components});
      return sig;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<Sequent> generate_schema(const ExtensionSpec& spec, const Theory& base) {
  Signature sig = extended_signature(spec, base);  // also validates the spec
  std::vector<Sequent> out;
  const std::string& N = spec.name;

  switch (spec.kind) {
    case ExtensionKind::ProductSort: {
      size_t n = spec.components.size();
      Context ctx;
      std::vector<Formula> pair_x;
      for (size_t i = 0; i < n; ++i) ctx.push("x" + std::to_string(i + 1), spec.components[i]);
      Term p = Term::var("p", N);
      for (size_t i = 0; i < n; ++i)
        pair_x.push_back(Formula::eq(Term::app(spec.maps[i], spec.components[i], {p}),
                                     Term::var("x" + std::to_string(i + 1), spec.components[i])));
      out.push_back(make_sequent(N + "_prod1", Formula::truth(), ctx,
                                 Formula::exists("p", N, conj_all(pair_x))));
      Context ctx2 = ctx;
      ctx2.push("x", N);
      ctx2.push("z", N);
      std::vector<Formula> ante;
      for (const char* v : {"x", "z"})
        for (size_t i = 0; i < n; ++i)
          ante.push_back(Formula::eq(Term::app(spec.maps[i], spec.components[i], {Term::var(v, N)}),
                                     Term::var("x" + std::to_string(i + 1), spec.components[i])));
      out.push_back(make_sequent(N + "_prod2", conj_all(ante), ctx2,
                                 Formula::eq(Term::var("x", N), Term::var("z", N))));
      return out;
    }

    case ExtensionKind::CoproductSort: {
      size_t n = spec.components.size();
      {
        Context ctx{{"x", N}};
        std::vector<Formula> disj;
        for (size_t i = 0; i < n; ++i) {
          std::string xi = "x" + std::to_string(i + 1);
          disj.push_back(Formula::exists(
              xi, spec.components[i],
              Formula::eq(Term::app(spec.maps[i], N, {Term::var(xi, spec.components[i])}),
                          Term::var("x", N))));
        }
        out.push_back(make_sequent(N + "_cop1", Formula::truth(), ctx, disj_all(disj)));
      }
      for (size_t i = 0; i < n; ++i) {
        std::string xi = "x" + std::to_string(i + 1);
        std::string xi2 = xi + "'";
        Context ctx;
        ctx.push(xi, spec.components[i]);
        ctx.push(xi2, spec.components[i]);
        ctx.push("x", N);
        Formula a = Formula::conj(
            Formula::eq(Term::app(spec.maps[i], N, {Term::var(xi, spec.components[i])}),
                        Term::var("x", N)),
            Formula::eq(Term::app(spec.maps[i], N, {Term::var(xi2, spec.components[i])}),
                        Term::var("x", N)));
        out.push_back(make_sequent(
            N + "_cop2_" + std::to_string(i + 1), a, ctx,
            Formula::eq(Term::var(xi, spec.components[i]), Term::var(xi2, spec.components[i]))));
      }
      for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
          std::string xi = "x" + std::to_string(i + 1);
          std::string xj = "x" + std::to_string(j + 1);
          Context ctx;
          ctx.push(xi, spec.components[i]);
          if (xj == xi) xj += "'";
          ctx.push(xj, spec.components[j]);
          ctx.push("x", N);
          Formula a = Formula::conj(
              Formula::eq(Term::app(spec.maps[i], N, {Term::var(xi, spec.components[i])}),
                          Term::var("x", N)),
              Formula::eq(Term::app(spec.maps[j], N, {Term::var(xj, spec.components[j])}),
                          Term::var("x", N)));
          out.push_back(make_sequent(
              N + "_cop3_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), a, ctx,
              Formula::falsity()));
        }
      return out;
    }

    case ExtensionKind::Subsort: {
      const std::string& T = spec.components[0];
      const std::string& inj = spec.maps[0];
      const std::string& v = spec.formula_vars[0];
      Formula phi = spec_formula(spec);
      NameGen names("y", var_names(phi));
      names.reserve(v);
      std::string y = names.fresh_like("y");
      Context ctx{{v, T}};
      Formula img =
          Formula::exists(y, N, Formula::eq(Term::app(inj, T, {Term::var(y, N)}), Term::var(v, T)));
      out.push_back(make_sequent(N + "_sub1a", phi, ctx, img));
      out.push_back(make_sequent(N + "_sub1b", img, ctx, phi));
      Context ctx2{{"x", N}, {"y", N}};
      out.push_back(make_sequent(
          N + "_sub2",
          Formula::eq(Term::app(inj, T, {Term::var("x", N)}), Term::app(inj, T, {Term::var("y", N)})),
          ctx2, Formula::eq(Term::var("x", N), Term::var("y", N))));
      return out;
    }

    case ExtensionKind::QuotientSort: {
      const std::string& T = spec.components[0];
      const std::string& eps = spec.maps[0];
      const std::string& u = spec.formula_vars[0];
      const std::string& v = spec.formula_vars[1];
      Formula phi = spec_formula(spec);
      Context ctx{{u, T}, {v, T}};
      Formula eq_eps = Formula::eq(Term::app(eps, N, {Term::var(u, T)}),
                                   Term::app(eps, N, {Term::var(v, T)}));
      out.push_back(make_sequent(N + "_quot1a", eq_eps, ctx, phi));
      out.push_back(make_sequent(N + "_quot1b", phi, ctx, eq_eps));
      NameGen names("y", var_names(phi));
      std::string y = names.fresh_like("y");
      Context ctx2{{"x", N}};
      out.push_back(make_sequent(
          N + "_quot2", Formula::truth(), ctx2,
          Formula::exists(y, T,
                          Formula::eq(Term::app(eps, N, {Term::var(y, T)}), Term::var("x", N)))));
      return out;
    }

    case ExtensionKind::UnitSort: {
      out.push_back(make_sequent(N + "_unit1", Formula::truth(), Context{},
                                 Formula::exists("x", N, Formula::truth())));
      Context ctx{{"x", N}, {"y", N}};
      out.push_back(make_sequent(N + "_unit2", Formula::truth(), ctx,
                                 Formula::eq(Term::var("x", N), Term::var("y", N))));
      auto [names, sorts] = resolve_unit_maps(spec, base);
      for (size_t i = 0; i < names.size(); ++i) {
        Context mctx{{"x", sorts[i]}, {"y", N}};
        Formula lhs =
            Formula::eq(Term::app(names[i], N, {Term::var("x", sorts[i])}), Term::var("y", N));
        Formula rhs =
            Formula::conj(Formula::eq(Term::var("x", sorts[i]), Term::var("x", sorts[i])),
                          Formula::eq(Term::var("y", N), Term::var("y", N)));
        out.push_back(make_sequent(N + "_" + names[i] + "1", lhs, mctx, rhs));
        out.push_back(make_sequent(N + "_" + names[i] + "2", rhs, mctx, lhs));
      }
      return out;
    }

    case ExtensionKind::EmptySort: {
      Context ctx{{"x", N}};
      out.push_back(make_sequent(N + "_empty1", Formula::truth(), ctx, Formula::falsity()));
      auto [names, sorts] = resolve_unit_maps(spec, base);
      for (size_t i = 0; i < names.size(); ++i) {
        Context mctx{{"x", N}, {"y", sorts[i]}};
        Formula lhs = Formula::eq(Term::app(names[i], sorts[i], {Term::var("x", N)}),
                                  Term::var("y", sorts[i]));
        out.push_back(make_sequent(N + "_" + names[i] + "1", lhs, mctx, Formula::falsity()));
        out.push_back(make_sequent(N + "_" + names[i] + "2", Formula::falsity(), mctx, lhs));
      }
      return out;
    }

    case ExtensionKind::DefinedFunction: {
      require(spec.formula_vars.size() == spec.components.size() + 1,
              "defined function needs one variable per argument plus the result");
      Context ctx;
      std::vector<Term> args;
      for (size_t i = 0; i < spec.components.size(); ++i) {
        ctx.push(spec.formula_vars[i], spec.components[i]);
        args.push_back(Term::var(spec.formula_vars[i], spec.components[i]));
      }
      const std::string& vr = spec.formula_vars.back();
      ctx.push(vr, spec.result_sort);
      Formula app_eq = Formula::eq(Term::app(N, spec.result_sort, args),
                                   Term::var(vr, spec.result_sort));
      out.push_back(make_sequent(N + "_def1", app_eq, ctx, spec_formula(spec)));
      out.push_back(make_sequent(N + "_def2", spec_formula(spec), ctx, app_eq));
      return out;
    }

    case ExtensionKind::DefinedRelation: {
      require(spec.formula_vars.size() == spec.components.size(),
              "defined relation needs one variable per argument");
      Context ctx;
      std::vector<Term> args;
      for (size_t i = 0; i < spec.components.size(); ++i) {
        ctx.push(spec.formula_vars[i], spec.components[i]);
        args.push_back(Term::var(spec.formula_vars[i], spec.components[i]));
      }
      Formula atom = Formula::rel(N, args);
      out.push_back(make_sequent(N + "_def1", atom, ctx, spec_formula(spec)));
      out.push_back(make_sequent(N + "_def2", spec_formula(spec), ctx, atom));
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

Sequent nonempty_goal(const std::string& sort) {
  return make_sequent("", Formula::truth(), Context{},
                      Formula::exists("x", sort, Formula::truth()));
}

}  // namespace

AdmissibilityReport check_admissibility(const ExtensionSpec& spec, const Theory& base,
                                        const Budget& budget) {
  AdmissibilityReport report;
  auto dispatch = [&](std::string what, Sequent goal) {
    ProofOutcome o = derive(base, goal, budget);
    report.conditions.push_back({std::move(what), std::move(goal), std::move(o)});
  };
  switch (spec.kind) {
    case ExtensionKind::ProductSort:
    case ExtensionKind::CoproductSort:
      for (const auto& c : spec.components)
        dispatch("component sort " + c + " non-empty", nonempty_goal(c));
      break;
    case ExtensionKind::Subsort:
      dispatch("ambient sort " + spec.components[0] + " non-empty",
               nonempty_goal(spec.components[0]));
      break;
    case ExtensionKind::QuotientSort: {
      const std::string& T = spec.components[0];
      const std::string& u = spec.formula_vars[0];
      const std::string& v = spec.formula_vars[1];
      Formula phi = spec_formula(spec);
      dispatch("ambient sort " + T + " non-empty", nonempty_goal(T));
      NameGen names(var_names(phi));
      std::string w = names.fresh_like("w");
      Formula refl = substitute(phi, {{v, Term::var(u, T)}});
      dispatch("reflexivity", make_sequent("", Formula::truth(), Context{{u, T}}, refl));
      Formula symm =
          substitute(phi, {{u, Term::var(v, T)}, {v, Term::var(u, T)}});
      dispatch("symmetry", make_sequent("", phi, Context{{u, T}, {v, T}}, symm));
      Formula second = substitute(phi, {{u, Term::var(v, T)}, {v, Term::var(w, T)}});
      Formula concl = substitute(phi, {{v, Term::var(w, T)}});
      dispatch("transitivity", make_sequent("", Formula::conj(phi, second),
                                            Context{{u, T}, {v, T}, {w, T}}, concl));
      break;
    }
    case ExtensionKind::UnitSort:
    case ExtensionKind::EmptySort:
      dispatch("witness sort " + spec.components[0] + " non-empty",
               nonempty_goal(spec.components[0]));
      break;
    case ExtensionKind::DefinedFunction: {
      Context args_ctx;
      for (size_t i = 0; i < spec.components.size(); ++i)
        args_ctx.push(spec.formula_vars[i], spec.components[i]);
      const std::string& vr = spec.formula_vars.back();
      Formula phi = spec_formula(spec);
      dispatch("existence",
               make_sequent("", Formula::truth(), args_ctx,
                            Formula::exists(vr, spec.result_sort, phi)));
      NameGen names(var_names(phi));
      std::string vr2 = names.fresh_like(vr + "'");
      Context uctx = args_ctx;
      uctx.push(vr, spec.result_sort);
      uctx.push(vr2, spec.result_sort);
      Formula phi2 = substitute(phi, {{vr, Term::var(vr2, spec.result_sort)}});
      dispatch("uniqueness",
               make_sequent("", Formula::conj(phi, phi2), uctx,
                            Formula::eq(Term::var(vr, spec.result_sort),
                                        Term::var(vr2, spec.result_sort))));
      break;
    }
    case ExtensionKind::DefinedRelation:
      break;  // always admissible
  }
  return report;
}

namespace {

void check_fragment_gate(const ExtensionSpec& spec, const Theory& base) {
  Fragment frag = base.fragment;
  if (spec.kind == ExtensionKind::CoproductSort || spec.kind == ExtensionKind::EmptySort)
    require(fragment_at_most(Fragment::Coherent, frag),
            std::string(extension_kind_name(spec.kind)) +
                " sorts need the coherent fragment, theory is " + fragment_name(frag));
  if (spec.kind == ExtensionKind::QuotientSort)
    require(frag != Fragment::Cartesian, "quotient sorts are unavailable in the cartesian fragment");
  if (spec.formula) {
    require(formula_in_fragment(*spec.formula, frag),
            "defining formula falls outside the " + std::string(fragment_name(frag)) + " fragment");
    Fragment goal_frag = frag == Fragment::FirstOrder ? Fragment::FirstOrder : Fragment::Coherent;
    (void)goal_frag;
  }
}

}  // namespace

Theory apply_extension(const Theory& base, const ExtensionSpec& spec, const Budget& budget,
                       const AdmissibilityReport* precomputed) {
  check_fragment_gate(spec, base);
  AdmissibilityReport report = precomputed ? *precomputed : check_admissibility(spec, base, budget);
  for (const auto& c : report.conditions) {
    if (c.outcome.unknown())
      throw std::runtime_error("admissibility undecided within budget: " + c.description +
                               " (blocked)");
    if (c.outcome.refuted())
      throw std::runtime_error("extension inadmissible: " + c.description + " refuted");
  }
  Theory out = base;
  out.signature = extended_signature(spec, base);
  for (Sequent& s : generate_schema(spec, base)) out.axioms.push_back(std::move(s));
  std::vector<Diagnostic> diags = check_wellformed(out);
  if (!diags.empty())
    throw std::logic_error("generated extension is ill-formed: " + diags.front().where + ": " +
                           diags.front().message);
  return out;
}

MoritaChain extend_chain(const Theory& base, const std::vector<ExtensionSpec>& specs,
                         const Budget& budget) {
  MoritaChain chain;
  chain.base = base;
  const Theory* cur = &chain.base;
  for (const auto& spec : specs) {
    Theory next = apply_extension(*cur, spec, budget);
    chain.steps.emplace_back(spec, std::move(next));
    cur = &chain.steps.back().second;
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Canonical model expansion.

FiniteModel expand_model(const FiniteModel& base_model, const ExtensionSpec& spec,
                         const Theory& base, const Theory& extended) {
  FiniteModel m = base_model;
  const std::string& N = spec.name;
  switch (spec.kind) {
    case ExtensionKind::ProductSort: {
      std::vector<int> sizes;
      for (const auto& c : spec.components) sizes.push_back(m.carrier(c));
      int total = static_cast<int>(table_size(sizes));
      m.carriers.emplace_back(N, total);
      for (size_t i = 0; i < spec.maps.size(); ++i) {
        std::vector<int>& table = m.functions[spec.maps[i]];
        table.assign(total, 0);
        for (int e = 0; e < total; ++e) {
          int rem = e;
          // decode mixed radix left-to-right
          std::vector<int> digits(sizes.size());
          for (size_t k = sizes.size(); k-- > 0;) {
            digits[k] = rem % sizes[k];
            rem /= sizes[k];
          }
          table[e] = digits[i];
        }
      }
      break;
    }
    case ExtensionKind::CoproductSort: {
      int total = 0;
      std::vector<int> offsets;
      for (const auto& c : spec.components) {
        offsets.push_back(total);
        total += m.carrier(c);
      }
      m.carriers.emplace_back(N, total);
      for (size_t i = 0; i < spec.maps.size(); ++i) {
        int size = m.carrier(spec.components[i]);
        std::vector<int>& table = m.functions[spec.maps[i]];
        table.assign(size, 0);
        for (int e = 0; e < size; ++e) table[e] = offsets[i] + e;
      }
      break;
    }
    case ExtensionKind::Subsort: {
      const std::string& T = spec.components[0];
      Formula phi = spec_formula(spec);
      std::vector<int> members;
      for (int e = 0; e < m.carrier(T); ++e)
        if (eval_formula(m, phi, {{spec.formula_vars[0], e}})) members.push_back(e);
      m.carriers.emplace_back(N, static_cast<int>(members.size()));
      m.functions[spec.maps[0]] = members;  // inj: position -> ambient element
      break;
    }
    case ExtensionKind::QuotientSort: {
      const std::string& T = spec.components[0];
      Formula phi = spec_formula(spec);
      int n = m.carrier(T);
      std::vector<int> parent(n);
      for (int i = 0; i < n; ++i) parent[i] = i;
      std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (eval_formula(m, phi, {{spec.formula_vars[0], a}, {spec.formula_vars[1], b}})) {
            int ra = find(a), rb = find(b);
            if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
          }
      std::map<int, int> cls;
      for (int i = 0; i < n; ++i)
        if (find(i) == i) {
          int idx = static_cast<int>(cls.size());
          cls[i] = idx;
        }
      m.carriers.emplace_back(N, static_cast<int>(cls.size()));
      std::vector<int>& eps = m.functions[spec.maps[0]];
      eps.assign(n, 0);
      for (int i = 0; i < n; ++i) eps[i] = cls.at(find(i));
      break;
    }
    case ExtensionKind::UnitSort: {
      m.carriers.emplace_back(N, 1);
      auto [names, sorts] = resolve_unit_maps(spec, base);
      for (size_t i = 0; i < names.size(); ++i)
        m.functions[names[i]].assign(static_cast<size_t>(m.carrier(sorts[i])), 0);
      break;
    }
    case ExtensionKind::EmptySort: {
      m.carriers.emplace_back(N, 0);
      auto [names, sorts] = resolve_unit_maps(spec, base);
      for (size_t i = 0; i < names.size(); ++i) m.functions[names[i]].clear();
      break;
    }
    case ExtensionKind::DefinedFunction: {
      std::vector<int> sizes;
      for (const auto& c : spec.components) sizes.push_back(m.carrier(c));
      int rsize = m.carrier(spec.result_sort);
      Formula phi = spec_formula(spec);
      std::vector<int>& table = m.functions[N];
      table.assign(table_size(sizes), 0);
      std::vector<int> cur(sizes.size(), 0);
      bool any = !table.empty();
      while (any) {
        Assignment asgn;
        for (size_t i = 0; i < cur.size(); ++i) asgn[spec.formula_vars[i]] = cur[i];
        int found = -1;
        for (int b = 0; b < rsize; ++b) {
          asgn[spec.formula_vars.back()] = b;
          if (eval_formula(m, phi, asgn)) {
            if (found >= 0)
              throw std::runtime_error("defined function is not single-valued in this model");
            found = b;
          }
        }
        if (found < 0) throw std::runtime_error("defined function has no value in this model");
        table[table_index(cur, sizes)] = found;
        bool wrapped = true;
        for (size_t i = cur.size(); i-- > 0;) {
          if (++cur[i] < sizes[i]) {
            wrapped = false;
            break;
          }
          cur[i] = 0;
        }
        if (wrapped) break;
      }
      break;
    }
    case ExtensionKind::DefinedRelation: {
      std::vector<int> sizes;
      for (const auto& c : spec.components) sizes.push_back(m.carrier(c));
      Formula phi = spec_formula(spec);
      auto& table = m.relations[N];
      table.clear();
      std::vector<int> cur(sizes.size(), 0);
      bool nonempty = table_size(sizes) > 0;
      for (int s : sizes) nonempty = nonempty && s > 0;
      while (nonempty) {
        Assignment asgn;
        for (size_t i = 0; i < cur.size(); ++i) asgn[spec.formula_vars[i]] = cur[i];
        if (eval_formula(m, phi, asgn)) table.insert(cur);
        bool wrapped = true;
        for (size_t i = cur.size(); i-- > 0;) {
          if (++cur[i] < sizes[i]) {
            wrapped = false;
            break;
          }
          cur[i] = 0;
        }
        if (wrapped) break;
      }
      break;
    }
  }
  (void)extended;
  return m;
}

ConservativityReport check_conservativity(const MoritaChain& chain,
                                          const std::vector<Sequent>& samples, int carrier_bound,
                                          const Budget& budget) {
  ConservativityReport report;
  const Theory& base = chain.base;
  const Theory& ext = chain.final_theory();

  for (const auto& sample : samples) {
    ConservativityReport::SyntacticCheck check{sample, derive(ext, sample, budget),
                                               derive(base, sample, budget), true};
    if (check.in_extended.proved() && check.in_base.refuted()) {
      check.consistent = false;
      report.failures.push_back("sample '" + print_sequent(sample) +
                                "' proved in the extension but refuted in the base");
    } else if (check.in_extended.proved() && !check.in_base.proved()) {
      report.failures.push_back("sample '" + print_sequent(sample) +
                                "' proved in the extension but unconfirmed in the base");
    }
    report.syntactic.push_back(std::move(check));
  }

  enumerate_models(base, carrier_bound, [&](const FiniteModel& base_model) {
    ++report.base_models_checked;
    FiniteModel m = base_model;
    const Theory* cur = &base;
    try {
      for (const auto& [spec, stage] : chain.steps) {
        m = expand_model(m, spec, *cur, stage);
        cur = &stage;
      }
    } catch (const std::exception& e) {
      report.failures.push_back(std::string("expansion failed: ") + e.what() + " on " +
                                describe_model(base_model));
      return true;
    }
    if (!satisfies_all(m, ext.axioms)) {
      report.failures.push_back("expansion violates a schema on " + describe_model(base_model));
      return true;
    }
    ++report.expansions_verified;
    return true;
  });
  return report;
}

// ---------------------------------------------------------------------------
// Symbol renaming.

namespace {

Term rename_term_symbols(const Term& t, const std::map<std::string, std::string>& ren) {
  auto sortname = [&](const std::string& s) {
    auto it = ren.find(s);
    return it == ren.end() ? s : it->second;
  };
  if (const Term::Var* v = t.as_var()) return Term::var(v->name, sortname(v->sort));
  const Term::App& a = *t.as_app();
  std::vector<Term> args;
  for (const Term& arg : a.args) args.push_back(rename_term_symbols(arg, ren));
  auto it = ren.find(a.fn);
  return Term::app(it == ren.end() ? a.fn : it->second, sortname(a.sort), std::move(args));
}

Formula rename_formula_symbols(const Formula& f, const std::map<std::string, std::string>& ren) {
  auto name = [&](const std::string& s) {
    auto it = ren.find(s);
    return it == ren.end() ? s : it->second;
  };
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return f;
    case Conn::Eq:
      return Formula::eq(rename_term_symbols(f.eq_lhs(), ren),
                         rename_term_symbols(f.eq_rhs(), ren));
    case Conn::Rel: {
      std::vector<Term> args;
      for (const Term& t : f.rel_args()) args.push_back(rename_term_symbols(t, ren));
      return Formula::rel(name(f.rel_name()), std::move(args));
    }
    case Conn::And:
      return Formula::conj(rename_formula_symbols(f.lhs(), ren),
                           rename_formula_symbols(f.rhs(), ren));
    case Conn::Or:
      return Formula::disj(rename_formula_symbols(f.lhs(), ren),
                           rename_formula_symbols(f.rhs(), ren));
    case Conn::Implies:
      return Formula::implies(rename_formula_symbols(f.lhs(), ren),
                              rename_formula_symbols(f.rhs(), ren));
    case Conn::Not:
      return Formula::neg(rename_formula_symbols(f.body(), ren));
    case Conn::Exists:
      return Formula::exists(f.bound_var(), name(f.bound_sort()),
                             rename_formula_symbols(f.body(), ren));
    case Conn::Forall:
      return Formula::forall(f.bound_var(), name(f.bound_sort()),
                             rename_formula_symbols(f.body(), ren));
  }
  return f;
}

}  // namespace

Theory rename_symbols(const Theory& theory, const std::map<std::string, std::string>& ren) {
  auto name = [&](const std::string& s) {
    auto it = ren.find(s);
    return it == ren.end() ? s : it->second;
  };
  Theory out;
  out.name = theory.name;
  out.fragment = theory.fragment;
  for (const auto& s : theory.signature.sorts) {
    SortDescriptor d = s;
    d.name = name(s.name);
    for (auto& c : d.components) c = name(c);
    for (auto& m : d.maps) m = name(m);
    for (auto& m : d.map_sorts) m = name(m);
    if (d.formula) d.formula = rename_formula_symbols(*d.formula, ren);
    out.signature.sorts.push_back(std::move(d));
  }
  for (const auto& f : theory.signature.functions) {
    FunctionDecl d;
    d.name = name(f.name);
    for (const auto& a : f.args) d.args.push_back(name(a));
    d.result = name(f.result);
    out.signature.functions.push_back(std::move(d));
  }
  for (const auto& r : theory.signature.relations) {
    RelationDecl d;
    d.name = name(r.name);
    for (const auto& a : r.args) d.args.push_back(name(a));
    out.signature.relations.push_back(std::move(d));
  }
  for (const auto& ax : theory.axioms) {
    Sequent s;
    s.label = ax.label;
    s.antecedent = rename_formula_symbols(ax.antecedent, ren);
    s.consequent = rename_formula_symbols(ax.consequent, ren);
    for (const auto& [n, srt] : ax.ctx.vars) s.ctx.push(n, name(srt));
    out.axioms.push_back(std::move(s));
  }
  return out;
}

std::pair<Theory, std::map<std::string, std::string>> rename_disjoint(const Theory& theory,
                                                                      const Theory& other) {
  std::set<std::string> taken;
  for (const auto& s : other.signature.sorts) taken.insert(s.name);
  for (const auto& f : other.signature.functions) taken.insert(f.name);
  for (const auto& r : other.signature.relations) taken.insert(r.name);
  std::set<std::string> own;
  for (const auto& s : theory.signature.sorts) own.insert(s.name);
  for (const auto& f : theory.signature.functions) own.insert(f.name);
  for (const auto& r : theory.signature.relations) own.insert(r.name);

  std::map<std::string, std::string> ren;
  for (const auto& name : own) {
    if (!taken.count(name)) continue;
    std::string fresh = name;
    do {
      fresh += "'";
    } while (taken.count(fresh) || own.count(fresh) || ren.count(fresh));
    ren[name] = fresh;
    taken.insert(fresh);
  }
  if (ren.empty()) return {theory, {}};
  return {rename_symbols(theory, ren), ren};
}

}  // namespace morita
