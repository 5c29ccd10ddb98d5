#include "morita/chase.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "morita/enumerate.hpp"
#include "morita/rewrite.hpp"
#include "morita/wellformed.hpp"

namespace morita {

namespace {

// ---------------------------------------------------------------------------
// Fact base: a partial structure with congruence-closed equality. Nodes are
// union-find classes; function applications live in a table keyed by
// canonical argument ids, relation tuples in canonical tuple sets.

class FactBase {
 public:
  bool inconsistent = false;

  int add_node(const std::string& sort) {
    parent_.push_back(static_cast<int>(parent_.size()));
    sorts_.push_back(sort);
    return static_cast<int>(parent_.size()) - 1;
  }

  int find(int x) const {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    rebuild();
  }

  std::optional<int> lookup_app(const std::string& fn, std::vector<int> args) const {
    for (int& a : args) a = find(a);
    auto it = apps_.find({fn, args});
    if (it == apps_.end()) return std::nullopt;
    return find(it->second);
  }

  int ensure_app(const std::string& fn, std::vector<int> args, const std::string& result_sort,
                 bool* created = nullptr) {
    for (int& a : args) a = find(a);
    auto it = apps_.find({fn, args});
    if (it != apps_.end()) {
      if (created) *created = false;
      return find(it->second);
    }
    int n = add_node(result_sort);
    apps_[{fn, std::move(args)}] = n;
    if (created) *created = true;
    return n;
  }

  void add_tuple(const std::string& rel, std::vector<int> args) {
    for (int& a : args) a = find(a);
    rels_[rel].insert(std::move(args));
  }

  bool has_tuple(const std::string& rel, std::vector<int> args) const {
    auto it = rels_.find(rel);
    if (it == rels_.end()) return false;
    for (int& a : args) a = find(a);
    return it->second.count(args) > 0;
  }

  std::vector<int> nodes_of_sort(const std::string& sort) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(parent_.size()); ++i)
      if (find(i) == i && sorts_[i] == sort) out.push_back(i);
    return out;
  }

  const std::string& sort_of(int node) const { return sorts_[find(node)]; }
  int num_nodes() const { return static_cast<int>(parent_.size()); }

  const std::map<std::pair<std::string, std::vector<int>>, int>& apps() const { return apps_; }
  const std::map<std::string, std::set<std::vector<int>>>& relations() const { return rels_; }

 private:
  void rebuild() {
    // Re-canonicalize tables; colliding applications force further merges.
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<std::string, std::vector<int>>, int> next;
      for (const auto& [key, val] : apps_) {
        std::vector<int> args = key.second;
        for (int& a : args) a = find(a);
        int res = find(val);
        auto [it, inserted] = next.try_emplace({key.first, std::move(args)}, res);
        if (!inserted && find(it->second) != res) {
          int x = find(it->second), y = res;
          if (x > y) std::swap(x, y);
          parent_[y] = x;
          changed = true;
        }
      }
      apps_ = std::move(next);
    }
    std::map<std::string, std::set<std::vector<int>>> next_rels;
    for (const auto& [rel, tuples] : rels_) {
      auto& dst = next_rels[rel];
      for (const auto& tup : tuples) {
        std::vector<int> c = tup;
        for (int& a : c) a = find(a);
        dst.insert(std::move(c));
      }
    }
    rels_ = std::move(next_rels);
  }

  mutable std::vector<int> parent_;
  std::vector<std::string> sorts_;
  std::map<std::pair<std::string, std::vector<int>>, int> apps_;
  std::map<std::string, std::set<std::vector<int>>> rels_;
};

// ---------------------------------------------------------------------------
// Query compilation: coherent formulas become unions of conjunctive queries
// over flattened atoms, matched by a backtracking join.

struct QAtom {
  enum class Kind { Rel, App, EqVar };
  Kind kind;
  std::string name;        // relation or function
  std::vector<int> vars;   // argument variable slots
  int result = -1;         // App: result slot; EqVar: vars[0] == vars[1]
};

struct CQ {
  std::vector<QAtom> atoms;
};

struct Compiled {
  std::vector<CQ> disjuncts;
  int nctx = 0;  // slots [0, nctx) are the pre-bound/context variables
  std::vector<std::string> slot_sorts;
  std::vector<std::string> ctx_names;
};

class QueryCompiler {
 public:
  explicit QueryCompiler(const Signature& sig) : sig_(sig) {}

  Compiled compile(const Formula& f, const Context& ctx) {
    Compiled out;
    std::map<std::string, int> scope;
    for (const auto& [name, sort] : ctx.vars) {
      scope[name] = static_cast<int>(out.slot_sorts.size());
      out.slot_sorts.push_back(sort);
      out.ctx_names.push_back(name);
    }
    out.nctx = static_cast<int>(out.slot_sorts.size());
    out.disjuncts = go(f, scope, out);
    return out;
  }

 private:
  std::vector<CQ> go(const Formula& f, std::map<std::string, int> scope, Compiled& out) {
    switch (f.kind()) {
      case Conn::True:
        return {CQ{}};
      case Conn::False:
        return {};
      case Conn::And: {
        std::vector<CQ> ls = go(f.lhs(), scope, out);
        std::vector<CQ> rs = go(f.rhs(), scope, out);
        std::vector<CQ> prod;
        for (const CQ& l : ls)
          for (const CQ& r : rs) {
            CQ c = l;
            c.atoms.insert(c.atoms.end(), r.atoms.begin(), r.atoms.end());
            prod.push_back(std::move(c));
          }
        return prod;
      }
      case Conn::Or: {
        std::vector<CQ> ls = go(f.lhs(), scope, out);
        std::vector<CQ> rs = go(f.rhs(), std::move(scope), out);
        ls.insert(ls.end(), rs.begin(), rs.end());
        return ls;
      }
      case Conn::Exists: {
        int slot = static_cast<int>(out.slot_sorts.size());
        out.slot_sorts.push_back(f.bound_sort());
        scope[f.bound_var()] = slot;
        return go(f.body(), std::move(scope), out);
      }
      case Conn::Eq: {
        CQ cq;
        int a = flatten_term(f.eq_lhs(), scope, out, cq);
        int b = flatten_term(f.eq_rhs(), scope, out, cq);
        cq.atoms.push_back({QAtom::Kind::EqVar, "", {a, b}, -1});
        return {std::move(cq)};
      }
      case Conn::Rel: {
        CQ cq;
        std::vector<int> args;
        for (const Term& t : f.rel_args()) args.push_back(flatten_term(t, scope, out, cq));
        cq.atoms.push_back({QAtom::Kind::Rel, f.rel_name(), std::move(args), -1});
        return {std::move(cq)};
      }
      default:
        throw std::invalid_argument("non-coherent connective in chase query");
    }
  }

  int flatten_term(const Term& t, const std::map<std::string, int>& scope, Compiled& out, CQ& cq) {
    if (const Term::Var* v = t.as_var()) {
      auto it = scope.find(v->name);
      if (it == scope.end())
        throw std::invalid_argument("unscoped variable in query: " + v->name);
      return it->second;
    }
    const Term::App& a = *t.as_app();
    std::vector<int> args;
    for (const Term& arg : a.args) args.push_back(flatten_term(arg, scope, out, cq));
    int res = static_cast<int>(out.slot_sorts.size());
    out.slot_sorts.push_back(a.sort);
    cq.atoms.push_back({QAtom::Kind::App, a.fn, std::move(args), res});
    return res;
  }

  const Signature& sig_;
};

// Backtracking join over one CQ. `asgn` holds canonical node ids, -1 unbound.
class Matcher {
 public:
  Matcher(const FactBase& fb, const Compiled& q) : fb_(fb), q_(q) {}

  // cb returns false to stop; match() returns false if stopped early.
  bool match(const std::vector<int>& seed, const std::function<bool(const std::vector<int>&)>& cb) {
    for (const CQ& cq : q_.disjuncts) {
      std::vector<int> asgn(q_.slot_sorts.size(), -1);
      for (size_t i = 0; i < seed.size(); ++i) asgn[i] = seed[i] < 0 ? -1 : fb_.find(seed[i]);
      std::vector<char> used(cq.atoms.size(), 0);
      if (!solve(cq, used, asgn, cb)) return false;
    }
    return true;
  }

  bool any_match(const std::vector<int>& seed) {
    bool found = false;
    match(seed, [&](const std::vector<int>&) {
      found = true;
      return false;
    });
    return found;
  }

 private:
  bool bound(const std::vector<int>& asgn, int v) const { return asgn[v] >= 0; }

  // Picks the unused atom with the fewest unbound slots.
  int pick(const CQ& cq, const std::vector<char>& used, const std::vector<int>& asgn) const {
    int best = -1, best_score = 1 << 20;
    for (size_t i = 0; i < cq.atoms.size(); ++i) {
      if (used[i]) continue;
      const QAtom& at = cq.atoms[i];
      int unbound = 0;
      for (int v : at.vars) unbound += !bound(asgn, v);
      if (at.kind == QAtom::Kind::App && !bound(asgn, at.result)) ++unbound;
      // An application with bound arguments is a direct lookup: prefer it.
      int score = unbound;
      if (at.kind == QAtom::Kind::App) {
        bool args_bound = true;
        for (int v : at.vars) args_bound = args_bound && bound(asgn, v);
        if (args_bound) score = 0;
      }
      if (at.kind == QAtom::Kind::EqVar && unbound <= 1) score = 0;
      if (score < best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  bool solve(const CQ& cq, std::vector<char>& used, std::vector<int>& asgn,
             const std::function<bool(const std::vector<int>&)>& cb) {
    int idx = pick(cq, used, asgn);
    if (idx < 0) return finish(asgn, cb);
    used[idx] = 1;
    const QAtom& at = cq.atoms[idx];
    bool keep = true;
    switch (at.kind) {
      case QAtom::Kind::EqVar: {
        int a = at.vars[0], b = at.vars[1];
        if (bound(asgn, a) && bound(asgn, b)) {
          if (fb_.find(asgn[a]) == fb_.find(asgn[b])) keep = solve(cq, used, asgn, cb);
        } else if (bound(asgn, a) || bound(asgn, b)) {
          int src = bound(asgn, a) ? a : b, dst = bound(asgn, a) ? b : a;
          asgn[dst] = asgn[src];
          keep = solve(cq, used, asgn, cb);
          asgn[dst] = -1;
        } else {
          // both unbound: enumerate one, copy to the other
          for (int n : fb_.nodes_of_sort(q_.slot_sorts[a])) {
            asgn[a] = n;
            asgn[b] = n;
            if (!solve(cq, used, asgn, cb)) {
              keep = false;
              break;
            }
          }
          asgn[a] = asgn[b] = -1;
        }
        break;
      }
      case QAtom::Kind::App: {
        bool args_bound = true;
        for (int v : at.vars) args_bound = args_bound && bound(asgn, v);
        if (args_bound) {
          std::vector<int> args;
          for (int v : at.vars) args.push_back(asgn[v]);
          auto res = fb_.lookup_app(at.name, std::move(args));
          if (res) {
            if (bound(asgn, at.result)) {
              if (fb_.find(asgn[at.result]) == *res) keep = solve(cq, used, asgn, cb);
            } else {
              asgn[at.result] = *res;
              keep = solve(cq, used, asgn, cb);
              asgn[at.result] = -1;
            }
          }
        } else {
          // enumerate table entries for this function
          for (const auto& [key, val] : fb_.apps()) {
            if (key.first != at.name) continue;
            std::vector<int> touched;
            bool fits = true;
            for (size_t i = 0; i < at.vars.size() && fits; ++i) {
              int v = at.vars[i];
              int node = key.second[i];
              if (bound(asgn, v)) {
                fits = fb_.find(asgn[v]) == fb_.find(node);
              } else {
                asgn[v] = fb_.find(node);
                touched.push_back(v);
              }
            }
            if (fits) {
              int res = fb_.find(val);
              if (bound(asgn, at.result)) {
                fits = fb_.find(asgn[at.result]) == res;
              } else {
                asgn[at.result] = res;
                touched.push_back(at.result);
              }
              if (fits && !solve(cq, used, asgn, cb)) keep = false;
            }
            for (int v : touched) asgn[v] = -1;
            if (!keep) break;
          }
        }
        break;
      }
      case QAtom::Kind::Rel: {
        auto it = fb_.relations().find(at.name);
        if (it != fb_.relations().end()) {
          for (const auto& tup : it->second) {
            std::vector<int> touched;
            bool fits = true;
            for (size_t i = 0; i < at.vars.size() && fits; ++i) {
              int v = at.vars[i];
              if (bound(asgn, v)) {
                fits = fb_.find(asgn[v]) == fb_.find(tup[i]);
              } else {
                asgn[v] = fb_.find(tup[i]);
                touched.push_back(v);
              }
            }
            if (fits && !solve(cq, used, asgn, cb)) keep = false;
            for (int v : touched) asgn[v] = -1;
            if (!keep) break;
          }
        }
        break;
      }
    }
    used[idx] = 0;
    return keep;
  }

  // All atoms placed; enumerate any still-unbound slots over their carriers.
  bool finish(std::vector<int>& asgn, const std::function<bool(const std::vector<int>&)>& cb) {
    int slot = -1;
    for (size_t i = 0; i < asgn.size(); ++i)
      if (asgn[i] < 0) {
        slot = static_cast<int>(i);
        break;
      }
    if (slot < 0) return cb(asgn);
    for (int n : fb_.nodes_of_sort(q_.slot_sorts[slot])) {
      asgn[slot] = n;
      if (!finish(asgn, cb)) {
        asgn[slot] = -1;
        return false;
      }
    }
    asgn[slot] = -1;
    return true;
  }

  const FactBase& fb_;
  const Compiled& q_;
};

// ---------------------------------------------------------------------------
// The engine.

using Env = std::map<std::string, int>;

struct Branch {
  int id = 0;
  FactBase fb;
  bool closed = false;
};

struct BudgetExceeded {};

class ChaseEngine {
 public:
  ChaseEngine(const Theory& t, const Sequent& goal, const Budget& budget, const ProofTrace* script)
      : theory_(t), goal_(goal), budget_(budget), script_(script), compiler_(t.signature) {
    for (const auto& ax : t.axioms) {
      axioms_.push_back(&ax);
      ante_q_.push_back(compiler_.compile(ax.antecedent, ax.ctx));
      cons_q_.push_back(compiler_.compile(ax.consequent, ax.ctx));
    }
    goal_q_ = compiler_.compile(goal.consequent, goal.ctx);
  }

  ProofOutcome run() {
    Branch root;
    root.id = next_branch_id_++;
    for (const auto& [name, sort] : goal_.ctx.vars) {
      int n = root.fb.add_node(sort);
      goal_env_[name] = n;
      record({TraceEvent::Kind::Seed, root.id, -1, -1, {n}, sort});
    }
    try {
      assert_formula(root, goal_.antecedent, goal_env_);
      work_.push_back(std::move(root));
      while (!work_.empty()) {
        Branch b = std::move(work_.back());
        work_.pop_back();
        RunResult r = run_branch(b);
        if (r == RunResult::Saturated) {
          ProofOutcome out = extract_refutation(b);
          if (out.refuted()) return out;
          return ProofOutcome::unknown_with("saturated branch did not verify as a countermodel");
        }
      }
    } catch (BudgetExceeded&) {
      return ProofOutcome::unknown_with("budget exhausted after " + std::to_string(steps_) +
                                        " steps");
    }
    ProofOutcome out;
    out.status = ProofOutcome::Status::Proved;
    out.trace = ProofTrace{std::move(events_)};
    return out;
  }

  // Scripted replay: apply recorded Fire/Totalize events, verify closes.
  bool replay() {
    Branch root;
    root.id = next_branch_id_++;
    for (const auto& [name, sort] : goal_.ctx.vars) {
      int n = root.fb.add_node(sort);
      goal_env_[name] = n;
    }
    std::map<int, Branch> branches;
    try {
      assert_formula(root, goal_.antecedent, goal_env_);
      branches.emplace(root.id, std::move(root));
      for (Branch& b : work_) branches.emplace(b.id, std::move(b));
      work_.clear();
      for (const TraceEvent& e : script_->events) {
        // Splits created by scripted fires surface through work_.
        for (Branch& b : work_) branches.emplace(b.id, std::move(b));
        work_.clear();
        auto it = branches.find(e.branch);
        switch (e.kind) {
          case TraceEvent::Kind::Seed:
          case TraceEvent::Kind::Fresh:
          case TraceEvent::Kind::Split:
            break;  // consequences of seeds/fires; ids line up deterministically
          case TraceEvent::Kind::Totalize: {
            if (it == branches.end()) return false;
            const FunctionDecl* decl = theory_.signature.function(e.note);
            if (!decl) return false;
            std::vector<int> args(e.nodes.begin(), e.nodes.end() - 1);
            it->second.fb.ensure_app(e.note, args, decl->result);
            break;
          }
          case TraceEvent::Kind::Fire: {
            if (it == branches.end() || e.axiom < 0 ||
                e.axiom >= static_cast<int>(axioms_.size()))
              return false;
            Branch& b = it->second;
            const Sequent& ax = *axioms_[e.axiom];
            if (e.nodes.size() != ax.ctx.vars.size()) return false;
            Matcher m(b.fb, ante_q_[e.axiom]);
            if (!m.any_match(e.nodes)) return false;  // instance not applicable
            Env env;
            for (size_t i = 0; i < e.nodes.size(); ++i)
              env[ax.ctx.vars[i].first] = e.nodes[i];
            assert_formula(b, ax.consequent, env);
            break;
          }
          case TraceEvent::Kind::Close: {
            if (it == branches.end()) return false;
            Branch& b = it->second;
            bool ok = e.note == "absurd" ? b.fb.inconsistent
                                         : goal_satisfied(b);
            if (!ok) return false;
            b.closed = true;
            break;
          }
        }
      }
      for (Branch& b : work_) branches.emplace(b.id, std::move(b));
      for (const auto& [id, b] : branches) {
        (void)id;
        if (!b.closed) return false;
      }
      return true;
    } catch (BudgetExceeded&) {
      return false;
    }
  }

 private:
  enum class RunResult { Closed, Saturated };

  void record(TraceEvent e) {
    if (!script_) events_.push_back(std::move(e));
  }

  void spend(long n = 1) {
    steps_ += n;
    if (!script_ && steps_ > budget_.steps) throw BudgetExceeded{};
  }

  bool goal_satisfied(Branch& b) {
    if (b.fb.inconsistent) return false;
    std::vector<int> seed;
    for (const auto& [name, sort] : goal_.ctx.vars) {
      (void)sort;
      seed.push_back(goal_env_.at(name));
    }
    Matcher m(b.fb, goal_q_);
    return m.any_match(seed);
  }

  bool formula_satisfied(Branch& b, const Formula& f, const Env& env) {
    Context ctx;
    std::vector<int> seed;
    for (const auto& [name, sort] : free_vars_cached(f)) {
      ctx.push(name, sort);
      seed.push_back(env.at(name));
    }
    Compiled q = compiler_.compile(f, ctx);
    Matcher m(b.fb, q);
    return m.any_match(seed);
  }

  const std::vector<std::pair<std::string, std::string>>& free_vars_cached(const Formula& f);

  int ensure_term(Branch& b, const Term& t, const Env& env) {
    if (const Term::Var* v = t.as_var()) return b.fb.find(env.at(v->name));
    const Term::App& a = *t.as_app();
    std::vector<int> args;
    for (const Term& arg : a.args) args.push_back(ensure_term(b, arg, env));
    bool created = false;
    int n = b.fb.ensure_app(a.fn, std::move(args), a.sort, &created);
    if (created) spend();
    return n;
  }

  void assert_formula(Branch& b, const Formula& f, Env env) {
    if (b.fb.inconsistent) return;
    switch (f.kind()) {
      case Conn::True:
        return;
      case Conn::False:
        b.fb.inconsistent = true;
        return;
      case Conn::Eq: {
        int n1 = ensure_term(b, f.eq_lhs(), env);
        int n2 = ensure_term(b, f.eq_rhs(), env);
        b.fb.merge(n1, n2);
        return;
      }
      case Conn::Rel: {
        std::vector<int> args;
        for (const Term& t : f.rel_args()) args.push_back(ensure_term(b, t, env));
        b.fb.add_tuple(f.rel_name(), std::move(args));
        return;
      }
      case Conn::And:
        assert_formula(b, f.lhs(), env);
        assert_formula(b, f.rhs(), env);
        return;
      case Conn::Or: {
        if (formula_satisfied(b, f.lhs(), env) || formula_satisfied(b, f.rhs(), env)) return;
        Branch other;
        other.id = next_branch_id_++;
        if (other.id > budget_.branches && !script_) throw BudgetExceeded{};
        other.fb = b.fb;
        record({TraceEvent::Kind::Split, other.id, b.id, -1, {}, ""});
        assert_formula(other, f.rhs(), env);
        work_.push_back(std::move(other));
        assert_formula(b, f.lhs(), env);
        return;
      }
      case Conn::Exists: {
        if (formula_satisfied(b, f, env)) return;
        int n = b.fb.add_node(f.bound_sort());
        spend();
        record({TraceEvent::Kind::Fresh, b.id, -1, -1, {n}, f.bound_sort()});
        env[f.bound_var()] = n;
        assert_formula(b, f.body(), env);
        return;
      }
      default:
        throw std::invalid_argument("non-coherent connective asserted in chase");
    }
  }

  // One level of function totality: create missing applications over the
  // current nodes. Terms must denote for positive queries to see them.
  long totalize(Branch& b) {
    long created_count = 0;
    for (const auto& decl : theory_.signature.functions) {
      std::vector<std::vector<int>> arg_nodes;
      bool possible = true;
      for (const auto& s : decl.args) {
        arg_nodes.push_back(b.fb.nodes_of_sort(s));
        if (arg_nodes.back().empty()) possible = false;
      }
      if (!possible) continue;
      std::vector<size_t> idx(decl.args.size(), 0);
      for (;;) {
        std::vector<int> args;
        for (size_t i = 0; i < idx.size(); ++i) args.push_back(arg_nodes[i][idx[i]]);
        if (!b.fb.lookup_app(decl.name, args)) {
          bool created = false;
          std::vector<int> rec = args;
          int n = b.fb.ensure_app(decl.name, args, decl.result, &created);
          if (created) {
            ++created_count;
            spend();
            rec.push_back(n);
            record({TraceEvent::Kind::Totalize, b.id, -1, -1, rec, decl.name});
          }
        }
        bool wrapped = true;
        for (size_t i = idx.size(); i-- > 0;) {
          if (++idx[i] < arg_nodes[i].size()) {
            wrapped = false;
            break;
          }
          idx[i] = 0;
        }
        if (wrapped || idx.empty()) break;
      }
    }
    return created_count;
  }

  RunResult run_branch(Branch& b) {
    for (;;) {
      if (b.fb.inconsistent) {
        record({TraceEvent::Kind::Close, b.id, -1, -1, {}, "absurd"});
        b.closed = true;
        return RunResult::Closed;
      }
      if (goal_satisfied(b)) {
        record({TraceEvent::Kind::Close, b.id, -1, -1, {}, "goal"});
        b.closed = true;
        return RunResult::Closed;
      }
      bool fired = false;
      for (size_t i = 0; i < axioms_.size() && !b.fb.inconsistent; ++i) {
        // Snapshot matches first: firing mutates the tables under the join.
        std::vector<std::vector<int>> envs;
        {
          Matcher m(b.fb, ante_q_[i]);
          std::vector<int> seed(axioms_[i]->ctx.vars.size(), -1);
          m.match(seed, [&](const std::vector<int>& asgn) {
            envs.emplace_back(asgn.begin(), asgn.begin() + axioms_[i]->ctx.vars.size());
            return envs.size() < 4096;
          });
        }
        for (const auto& ctx_nodes : envs) {
          if (b.fb.inconsistent) break;
          Matcher check(b.fb, cons_q_[i]);
          if (check.any_match(ctx_nodes)) continue;  // instance already satisfied
          Env env;
          for (size_t k = 0; k < ctx_nodes.size(); ++k)
            env[axioms_[i]->ctx.vars[k].first] = ctx_nodes[k];
          record({TraceEvent::Kind::Fire, b.id, -1, static_cast<int>(i), ctx_nodes, ""});
          spend();
          assert_formula(b, axioms_[i]->consequent, env);
          fired = true;
          if (goal_satisfied(b)) break;
        }
        if (b.fb.inconsistent || goal_satisfied(b)) break;
      }
      if (fired) continue;
      if (totalize(b) > 0) continue;
      return RunResult::Saturated;
    }
  }

  ProofOutcome extract_refutation(Branch& b) {
    FiniteModel m;
    std::map<int, int> index;
    for (const auto& s : theory_.signature.sorts) {
      std::vector<int> reps = b.fb.nodes_of_sort(s.name);
      m.carriers.emplace_back(s.name, static_cast<int>(reps.size()));
      for (size_t i = 0; i < reps.size(); ++i) index[reps[i]] = static_cast<int>(i);
    }
    for (const auto& decl : theory_.signature.functions) {
      std::vector<std::vector<int>> arg_nodes;
      std::vector<int> sizes;
      for (const auto& s : decl.args) {
        arg_nodes.push_back(b.fb.nodes_of_sort(s));
        sizes.push_back(static_cast<int>(arg_nodes.back().size()));
      }
      std::vector<int>& table = m.functions[decl.name];
      table.assign(table_size(sizes), 0);
      if (table.empty()) continue;
      std::vector<size_t> idx(sizes.size(), 0);
      for (;;) {
        std::vector<int> args;
        std::vector<int> arg_idx;
        for (size_t i = 0; i < idx.size(); ++i) {
          args.push_back(arg_nodes[i][idx[i]]);
          arg_idx.push_back(static_cast<int>(idx[i]));
        }
        auto res = b.fb.lookup_app(decl.name, args);
        if (!res) return ProofOutcome::unknown_with("extraction found a partial function");
        table[table_index(arg_idx, sizes)] = index.at(*res);
        bool wrapped = true;
        for (size_t i = idx.size(); i-- > 0;) {
          if (++idx[i] < arg_nodes[i].size()) {
            wrapped = false;
            break;
          }
          idx[i] = 0;
        }
        if (wrapped || idx.empty()) break;
      }
    }
    for (const auto& decl : theory_.signature.relations) m.relations[decl.name];
    for (const auto& [rel, tuples] : b.fb.relations()) {
      if (!theory_.signature.relation(rel)) continue;
      for (const auto& tup : tuples) {
        std::vector<int> mapped;
        for (int n : tup) mapped.push_back(index.at(b.fb.find(n)));
        m.relations[rel].insert(std::move(mapped));
      }
    }
    Assignment asgn;
    for (const auto& [name, node] : goal_env_) asgn[name] = index.at(b.fb.find(node));
    // The chase built this as a model; trust only the evaluator.
    if (!satisfies_all(m, theory_.axioms))
      return ProofOutcome::unknown_with("saturated structure fails an axiom under evaluation");
    if (!eval_formula(m, goal_.antecedent, asgn) || eval_formula(m, goal_.consequent, asgn))
      return ProofOutcome::unknown_with("saturated structure does not violate the goal");
    return ProofOutcome::refuted_with(Refutation{std::move(m), std::move(asgn)});
  }

  const Theory& theory_;
  Sequent goal_;
  Budget budget_;
  const ProofTrace* script_;
  QueryCompiler compiler_;

  std::vector<const Sequent*> axioms_;
  std::vector<Compiled> ante_q_;
  std::vector<Compiled> cons_q_;
  Compiled goal_q_;
  Env goal_env_;

  std::vector<Branch> work_;
  std::vector<TraceEvent> events_;
  std::map<const void*, std::vector<std::pair<std::string, std::string>>> fv_cache_;
  long steps_ = 0;
  int next_branch_id_ = 0;
};

const std::vector<std::pair<std::string, std::string>>& ChaseEngine::free_vars_cached(
    const Formula& f) {
  // Key on the shared node; formulas are immutable.
  const void* key = f.id();
  auto it = fv_cache_.find(key);
  if (it != fv_cache_.end()) return it->second;
  return fv_cache_.emplace(key, free_vars(f)).first->second;
}

bool coherent_goal(const Sequent& goal) {
  return formula_in_fragment(goal.antecedent, Fragment::Coherent) &&
         formula_in_fragment(goal.consequent, Fragment::Coherent);
}

}  // namespace

ProofOutcome derive(const Theory& t, const Sequent& goal, const Budget& budget) {
  if (budget.steps <= 0 || budget.branches <= 0)
    throw std::invalid_argument("budget must be positive");
  {
    std::vector<Diagnostic> diags;
    check_sequent(t.signature, Fragment::FirstOrder, goal, diags);
    if (!diags.empty())
      throw std::invalid_argument("ill-sorted goal: " + diags.front().message);
  }
  if (t.fragment == Fragment::FirstOrder || !coherent_goal(goal)) {
    // Outside the complete fragment: semantic search only.
    return find_countermodel(t, goal, budget.countermodel_size);
  }
  ChaseEngine engine(t, goal, budget, nullptr);
  ProofOutcome out = engine.run();
  if (out.unknown() && budget.countermodel_size > 0) {
    ProofOutcome cm = find_countermodel(t, goal, budget.countermodel_size);
    if (cm.refuted()) return cm;
  }
  return out;
}

ProofOutcome derive_iff(const Theory& t, const Context& ctx, const Formula& lhs,
                        const Formula& rhs, const Budget& budget) {
  ProofOutcome fwd = derive(t, Sequent{"", lhs, rhs, ctx}, budget);
  if (fwd.refuted()) return fwd;
  ProofOutcome bwd = derive(t, Sequent{"", rhs, lhs, ctx}, budget);
  if (bwd.refuted()) return bwd;
  if (fwd.proved() && bwd.proved()) {
    ProofOutcome out;
    out.status = ProofOutcome::Status::Proved;
    out.trace = fwd.trace;
    return out;
  }
  return ProofOutcome::unknown_with(fwd.proved() ? "converse direction unknown"
                                                 : "forward direction unknown");
}

bool replay_trace(const Theory& t, const Sequent& goal, const ProofTrace& trace) {
  ChaseEngine engine(t, goal, Budget{}, &trace);
  return engine.replay();
}

}  // namespace morita
