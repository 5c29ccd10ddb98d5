#include "morita/morleyize.hpp"

#include <algorithm>
#include <stdexcept>

#include "morita/enumerate.hpp"
#include "morita/print.hpp"
#include "morita/rewrite.hpp"
#include "morita/wellformed.hpp"

namespace morita {

namespace {

// Canonical key: free variables renamed positionally, bound variables
// de-Bruijn-renamed, printed.
std::string pool_key(const Formula& f) {
  std::map<std::string, std::string> ren;
  int i = 0;
  for (const auto& [name, sort] : free_vars(f)) {
    (void)sort;
    ren[name] = "_f" + std::to_string(i++);
  }
  return canonical_key(rename_free(f, ren));
}

}  // namespace

void MorleyPool::add(const Formula& f, const Signature& sig) {
  std::string key = pool_key(f);
  if (index_.count(key)) return;
  PoolEntry e;
  e.formula = f;
  e.ctx = canonical_context(f);
  int n = static_cast<int>(entries_.size());
  e.cname = "C" + std::to_string(n);
  e.dname = "D" + std::to_string(n);
  while (sig.has_symbol(e.cname)) e.cname += "_";
  while (sig.has_symbol(e.dname)) e.dname += "_";
  index_[key] = n;
  entries_.push_back(std::move(e));
}

void MorleyPool::add_with_subformulas(const Formula& f, const Signature& sig) {
  switch (f.kind()) {
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
      add_with_subformulas(f.lhs(), sig);
      add_with_subformulas(f.rhs(), sig);
      break;
    case Conn::Not:
    case Conn::Exists:
    case Conn::Forall:
      add_with_subformulas(f.body(), sig);
      break;
    default:
      break;
  }
  add(f, sig);
}

MorleyPool MorleyPool::build(const Theory& t, const std::vector<Formula>& extras) {
  MorleyPool pool;
  for (const auto& ax : t.axioms) {
    pool.add_with_subformulas(ax.antecedent, t.signature);
    pool.add_with_subformulas(ax.consequent, t.signature);
  }
  for (const Formula& f : extras) pool.add_with_subformulas(f, t.signature);
  return pool;
}

std::optional<std::pair<int, std::vector<Term>>> MorleyPool::lookup(const Formula& f) const {
  auto it = index_.find(pool_key(f));
  if (it == index_.end()) return std::nullopt;
  std::vector<Term> args;
  for (const auto& [name, sort] : free_vars(f)) args.push_back(Term::var(name, sort));
  return std::make_pair(it->second, std::move(args));
}

Formula MorleyPool::cite_c(const Formula& f) const {
  auto hit = lookup(f);
  if (!hit) throw std::invalid_argument("formula not in the Morley pool: " + print_formula(f));
  return Formula::rel(entries_[hit->first].cname, hit->second);
}

Formula MorleyPool::cite_d(const Formula& f) const {
  auto hit = lookup(f);
  if (!hit) throw std::invalid_argument("formula not in the Morley pool: " + print_formula(f));
  return Formula::rel(entries_[hit->first].dname, hit->second);
}

bool MorleyPool::subformula_closed() const {
  for (const auto& e : entries_) {
    const Formula& f = e.formula;
    switch (f.kind()) {
      case Conn::And:
      case Conn::Or:
      case Conn::Implies:
        if (!lookup(f.lhs()) || !lookup(f.rhs())) return false;
        break;
      case Conn::Not:
      case Conn::Exists:
      case Conn::Forall:
        if (!lookup(f.body())) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

Theory morleyize(const Theory& t, const MorleyPool& pool) {
  if (t.fragment != Fragment::FirstOrder)
    throw std::invalid_argument("morleyize expects a first-order theory");
  if (!pool.subformula_closed())
    throw std::invalid_argument("Morley pool is not subformula-closed");
  for (const auto& ax : t.axioms)
    if (!pool.lookup(ax.antecedent) || !pool.lookup(ax.consequent))
      throw std::invalid_argument("Morley pool does not cover axiom " + ax.label);

  Theory out;
  out.name = t.name + "_m";
  out.fragment = Fragment::Coherent;
  out.signature = t.signature;
  for (const auto& e : pool.entries()) {
    std::vector<std::string> arity;
    for (const auto& [v, sort] : e.ctx.vars) {
      (void)v;
      arity.push_back(sort);
    }
    out.signature.relations.push_back({e.cname, arity});
    out.signature.relations.push_back({e.dname, arity});
  }

  int i = 0;
  for (const auto& e : pool.entries()) {
    const Formula& phi = e.formula;
    const Context& ctx = e.ctx;
    Formula c = pool.cite_c(phi);
    Formula d = pool.cite_d(phi);
    std::string tag = "m" + std::to_string(i++);
    auto both = [&](const std::string& suffix, const Formula& lhs, const Formula& rhs,
                    const Context& cx) {
      out.axioms.push_back(make_sequent(tag + "_" + suffix + "a", lhs, cx, rhs));
      out.axioms.push_back(make_sequent(tag + "_" + suffix + "b", rhs, cx, lhs));
    };
    out.axioms.push_back(make_sequent(tag + "_tot", Formula::truth(), ctx, Formula::disj(c, d)));
    out.axioms.push_back(make_sequent(tag + "_dis", Formula::conj(c, d), ctx, Formula::falsity()));
    switch (phi.kind()) {
      case Conn::True:
      case Conn::False:
      case Conn::Eq:
      case Conn::Rel:
        both("atom", c, phi, ctx);
        break;
      case Conn::And:
        both("c", c, Formula::conj(pool.cite_c(phi.lhs()), pool.cite_c(phi.rhs())), ctx);
        both("d", d, Formula::disj(pool.cite_d(phi.lhs()), pool.cite_d(phi.rhs())), ctx);
        break;
      case Conn::Or:
        both("c", c, Formula::disj(pool.cite_c(phi.lhs()), pool.cite_c(phi.rhs())), ctx);
        both("d", d, Formula::conj(pool.cite_d(phi.lhs()), pool.cite_d(phi.rhs())), ctx);
        break;
      case Conn::Not:
        both("c", c, pool.cite_d(phi.body()), ctx);
        both("d", d, pool.cite_c(phi.body()), ctx);
        break;
      case Conn::Implies:
        both("c", c, Formula::disj(pool.cite_d(phi.lhs()), pool.cite_c(phi.rhs())), ctx);
        both("d", d, Formula::conj(pool.cite_c(phi.lhs()), pool.cite_d(phi.rhs())), ctx);
        break;
      case Conn::Exists:
        both("c", c,
             Formula::exists(phi.bound_var(), phi.bound_sort(), pool.cite_c(phi.body())), ctx);
        break;
      case Conn::Forall:
        both("d", d,
             Formula::exists(phi.bound_var(), phi.bound_sort(), pool.cite_d(phi.body())), ctx);
        break;
    }
  }
  int a = 0;
  for (const auto& ax : t.axioms) {
    out.axioms.push_back(make_sequent("ax" + std::to_string(a++) + "_c",
                                      pool.cite_c(ax.antecedent), ax.ctx,
                                      pool.cite_c(ax.consequent)));
  }
  std::vector<Diagnostic> diags = check_wellformed(out);
  if (!diags.empty())
    throw std::logic_error("morleyization is ill-formed: " + diags.front().where + ": " +
                           diags.front().message);
  for (const auto& ax : out.axioms)
    if (!formula_in_fragment(ax.antecedent, Fragment::Coherent) ||
        !formula_in_fragment(ax.consequent, Fragment::Coherent))
      throw std::logic_error("morleyization emitted a non-coherent axiom");
  return out;
}

namespace {

// Truth table of a pooled formula in a model of the base theory.
std::set<std::vector<int>> truth_set(const FiniteModel& m, const PoolEntry& e) {
  std::set<std::vector<int>> out;
  std::vector<int> sizes;
  for (const auto& [v, sort] : e.ctx.vars) {
    (void)v;
    sizes.push_back(m.carrier(sort));
  }
  for (int s : sizes)
    if (s == 0) return out;
  std::vector<int> cur(sizes.size(), 0);
  for (;;) {
    Assignment asgn;
    for (size_t i = 0; i < cur.size(); ++i) asgn[e.ctx.vars[i].first] = cur[i];
    if (eval_formula(m, e.formula, asgn)) out.insert(cur);
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
  return out;
}

std::set<std::vector<int>> complement_set(const FiniteModel& m, const PoolEntry& e,
                                          const std::set<std::vector<int>>& cs) {
  std::set<std::vector<int>> out;
  std::vector<int> sizes;
  for (const auto& [v, sort] : e.ctx.vars) {
    (void)v;
    sizes.push_back(m.carrier(sort));
  }
  for (int s : sizes)
    if (s == 0) return out;
  std::vector<int> cur(sizes.size(), 0);
  for (;;) {
    if (!cs.count(cur)) out.insert(cur);
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
  return out;
}

FiniteModel expand_by_truth(const FiniteModel& m, const MorleyPool& pool) {
  FiniteModel out = m;
  for (const auto& e : pool.entries()) {
    auto cs = truth_set(m, e);
    out.relations[e.dname] = complement_set(m, e, cs);
    out.relations[e.cname] = std::move(cs);
  }
  return out;
}

FiniteModel reduct(const FiniteModel& m, const Signature& sig) {
  FiniteModel out;
  for (const auto& [sort, size] : m.carriers)
    if (sig.has_sort(sort)) out.carriers.emplace_back(sort, size);
  for (const auto& [fn, table] : m.functions)
    if (sig.has_function(fn)) out.functions.emplace(fn, table);
  for (const auto& [rel, tuples] : m.relations)
    if (sig.has_relation(rel)) out.relations.emplace(rel, tuples);
  return out;
}

}  // namespace

CorrespondenceReport model_correspondence(const Theory& t, const MorleyPool& pool,
                                          const Theory& morleyized, int carrier_bound) {
  if (carrier_bound < 0) throw std::invalid_argument("carrier bound must be non-negative");
  CorrespondenceReport report;
  std::set<std::string> fo_keys;
  enumerate_models(t, carrier_bound, [&](const FiniteModel& m) {
    ++report.fo_models;
    fo_keys.insert(describe_model(m));
    FiniteModel em = expand_by_truth(m, pool);
    if (satisfies_all(em, morleyized.axioms))
      ++report.expansions_ok;
    else
      report.failures.push_back("expansion fails a Morleyization axiom on " + describe_model(m));
    return true;
  });
  enumerate_models(morleyized, carrier_bound, [&](const FiniteModel& m) {
    ++report.coherent_models;
    FiniteModel red = reduct(m, t.signature);
    FiniteModel forced = expand_by_truth(red, pool);
    if (forced == m) {
      ++report.forced_ok;
      if (!fo_keys.count(describe_model(red)))
        report.failures.push_back("reduct of a Morleyization model is not a base model: " +
                                  describe_model(red));
    } else {
      report.failures.push_back("Morleyization model differs from the forced expansion of its "
                                "reduct: " +
                                describe_model(m));
    }
    return true;
  });
  if (report.fo_models != report.coherent_models)
    report.failures.push_back("model counts differ: " + std::to_string(report.fo_models) +
                              " first-order vs " + std::to_string(report.coherent_models) +
                              " coherent");
  return report;
}

FomorWitness build_fomor_witness(const Theory& t, const MorleyPool& pool, int carrier_bound) {
  FomorWitness w;
  Theory morleyized = morleyize(t, pool);
  w.t1.name = t.name + "_1";
  w.t1.fragment = Fragment::FirstOrder;
  w.t1.signature = morleyized.signature;
  w.t1.axioms = t.axioms;
  int i = 0;
  for (const auto& e : pool.entries()) {
    Formula c = pool.cite_c(e.formula);
    Formula d = pool.cite_d(e.formula);
    std::string tag = "def" + std::to_string(i++);
    w.t1.axioms.push_back(make_sequent(tag + "_ca", c, e.ctx, e.formula));
    w.t1.axioms.push_back(make_sequent(tag + "_cb", e.formula, e.ctx, c));
    w.t1.axioms.push_back(make_sequent(tag + "_da", d, e.ctx, Formula::neg(e.formula)));
    w.t1.axioms.push_back(make_sequent(tag + "_db", Formula::neg(e.formula), e.ctx, d));
  }

  std::set<std::string> t1_keys, tm_keys;
  bool tautologies = true;
  enumerate_models(w.t1, carrier_bound, [&](const FiniteModel& m) {
    t1_keys.insert(describe_model(m));
    for (const auto& e : pool.entries()) {
      Sequent excluded_middle = make_sequent(
          "", Formula::truth(), e.ctx, Formula::disj(e.formula, Formula::neg(e.formula)));
      if (!satisfies_sequent(m, excluded_middle)) tautologies = false;
    }
    return true;
  });
  enumerate_models(morleyized, carrier_bound, [&](const FiniteModel& m) {
    tm_keys.insert(describe_model(m));
    return true;
  });
  w.t1_models = static_cast<long>(t1_keys.size());
  w.tm_models = static_cast<long>(tm_keys.size());
  w.models_agree = t1_keys == tm_keys;
  w.tautology_ok = tautologies;
  return w;
}

MorleyizedExtension morleyize_extension(const Theory& base_fo, const ExtensionSpec& spec,
                                        const MorleyPool& pool, const Budget& budget) {
  ExtensionSpec out = spec;
  if (spec.formula) {
    if (!pool.lookup(*spec.formula))
      throw std::invalid_argument("defining formula outside the Morley pool: " +
                                  print_formula(*spec.formula));
    out.formula = pool.cite_c(*spec.formula);
  }
  Theory tm = morleyize(base_fo, pool);
  AdmissibilityReport rep = check_admissibility(out, tm, budget);
  return MorleyizedExtension{std::move(out), std::move(rep)};
}

}  // namespace morita
