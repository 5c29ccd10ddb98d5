#include "morita/enumerate.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace morita {

namespace {

void collect_symbols(const Term& t, std::set<std::string>& fns) {
  if (const Term::App* a = t.as_app()) {
    fns.insert(a->fn);
    for (const Term& arg : a->args) collect_symbols(arg, fns);
  }
}

void collect_symbols(const Formula& f, std::set<std::string>& fns, std::set<std::string>& rels) {
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      return;
    case Conn::Eq:
      collect_symbols(f.eq_lhs(), fns);
      collect_symbols(f.eq_rhs(), fns);
      return;
    case Conn::Rel:
      rels.insert(f.rel_name());
      for (const Term& t : f.rel_args()) collect_symbols(t, fns);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Implies:
      collect_symbols(f.lhs(), fns, rels);
      collect_symbols(f.rhs(), fns, rels);
      return;
    case Conn::Not:
    case Conn::Exists:
    case Conn::Forall:
      collect_symbols(f.body(), fns, rels);
      return;
  }
}

struct SymbolSlot {
  bool is_function;
  const FunctionDecl* fn = nullptr;
  const RelationDecl* rel = nullptr;
  const std::string& name() const { return is_function ? fn->name : rel->name; }
};

// Depth-first assignment of one whole symbol table at a time, in declaration
// order. Axioms fire as filters at the first point all their symbols exist;
// with definitional schemas declared bottom-up this collapses the search.
class Enumerator {
 public:
  Enumerator(const Theory& t, const std::function<bool(const FiniteModel&)>& cb)
      : theory_(t), cb_(cb) {
    for (const auto& f : t.signature.functions) slots_.push_back({true, &f, nullptr});
    for (const auto& r : t.signature.relations) slots_.push_back({false, nullptr, &r});
    for (const auto& ax : t.axioms) {
      std::set<std::string> fns, rels;
      collect_symbols(ax.antecedent, fns, rels);
      collect_symbols(ax.consequent, fns, rels);
      int last = -1;
      for (size_t i = 0; i < slots_.size(); ++i) {
        const std::string& n = slots_[i].name();
        if ((slots_[i].is_function && fns.count(n)) || (!slots_[i].is_function && rels.count(n)))
          last = static_cast<int>(i);
      }
      ax_by_slot_[last].push_back(&ax);
    }
  }

  bool run(const std::vector<int>& sizes) {
    model_ = FiniteModel{};
    for (size_t i = 0; i < theory_.signature.sorts.size(); ++i)
      model_.carriers.emplace_back(theory_.signature.sorts[i].name, sizes[i]);
    if (!check_axioms_at(-1)) return true;  // these carriers admit no model
    return assign(0);
  }

 private:
  bool check_axioms_at(int slot) {
    auto it = ax_by_slot_.find(slot);
    if (it == ax_by_slot_.end()) return true;
    for (const Sequent* ax : it->second)
      if (!satisfies_sequent(model_, *ax)) return false;
    return true;
  }

  bool assign(size_t idx) {
    if (idx == slots_.size()) return cb_(model_);
    const SymbolSlot& slot = slots_[idx];
    if (slot.is_function) {
      std::vector<int> arg_sizes;
      for (const auto& s : slot.fn->args) arg_sizes.push_back(model_.carrier(s));
      size_t entries = table_size(arg_sizes);
      int result_size = model_.carrier(slot.fn->result);
      if (entries > 0 && result_size == 0) {
        model_.functions.erase(slot.fn->name);
        return true;  // no total function into an empty carrier
      }
      std::vector<int>& table = model_.functions[slot.fn->name];
      table.assign(entries, 0);
      bool keep = assign_function(idx, table, 0, result_size);
      return keep;
    }
    std::vector<int> arg_sizes;
    for (const auto& s : slot.rel->args) arg_sizes.push_back(model_.carrier(s));
    std::vector<std::vector<int>> tuples = all_tuples(arg_sizes);
    auto& rel_table = model_.relations[slot.rel->name];
    rel_table.clear();
    return assign_relation(idx, tuples, 0, rel_table);
  }

  bool assign_function(size_t idx, std::vector<int>& table, size_t pos, int result_size) {
    if (pos == table.size()) {
      if (!check_axioms_at(static_cast<int>(idx))) return true;
      return assign(idx + 1);
    }
    for (int v = 0; v < result_size; ++v) {
      table[pos] = v;
      if (!assign_function(idx, table, pos + 1, result_size)) return false;
    }
    table[pos] = 0;
    return true;
  }

  bool assign_relation(size_t idx, const std::vector<std::vector<int>>& tuples, size_t pos,
                       std::set<std::vector<int>>& table) {
    if (pos == tuples.size()) {
      if (!check_axioms_at(static_cast<int>(idx))) return true;
      return assign(idx + 1);
    }
    if (!assign_relation(idx, tuples, pos + 1, table)) return false;  // tuple absent
    table.insert(tuples[pos]);
    bool keep = assign_relation(idx, tuples, pos + 1, table);
    table.erase(tuples[pos]);
    return keep;
  }

  static std::vector<std::vector<int>> all_tuples(const std::vector<int>& sizes) {
    std::vector<std::vector<int>> out;
    for (int s : sizes)
      if (s == 0) return out;
    std::vector<int> cur(sizes.size(), 0);
    for (;;) {
      out.push_back(cur);
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

  const Theory& theory_;
  const std::function<bool(const FiniteModel&)>& cb_;
  std::vector<SymbolSlot> slots_;
  std::map<int, std::vector<const Sequent*>> ax_by_slot_;
  FiniteModel model_;
};

std::vector<std::vector<int>> size_vectors(size_t nsorts, int max_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(nsorts, 0);
  out.push_back(cur);
  if (nsorts > 0) {
    for (;;) {
      bool wrapped = true;
      for (size_t i = cur.size(); i-- > 0;) {
        if (++cur[i] <= max_size) {
          wrapped = false;
          break;
        }
        cur[i] = 0;
      }
      if (wrapped) break;
      out.push_back(cur);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int sa = std::accumulate(a.begin(), a.end(), 0);
    int sb = std::accumulate(b.begin(), b.end(), 0);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return out;
}

// Applies per-sort element permutations and serializes for comparison.
std::string serialize_permuted(const FiniteModel& m, const Signature& sig,
                               const std::map<std::string, std::vector<int>>& perms) {
  std::string out;
  auto p = [&](const std::string& sort, int e) {
    auto it = perms.find(sort);
    return it == perms.end() ? e : it->second[e];
  };
  for (const auto& [fn_name, table] : m.functions) {
    const FunctionDecl* decl = sig.function(fn_name);
    std::vector<int> arg_sizes;
    for (const auto& s : decl->args) arg_sizes.push_back(m.carrier(s));
    std::vector<int> permuted(table.size());
    if (!table.empty()) {
      std::vector<int> cur(arg_sizes.size(), 0);
      for (;;) {
        std::vector<int> mapped(cur.size());
        for (size_t i = 0; i < cur.size(); ++i) mapped[i] = p(decl->args[i], cur[i]);
        permuted[table_index(mapped, arg_sizes)] =
            p(decl->result, table[table_index(cur, arg_sizes)]);
        bool wrapped = true;
        for (size_t i = cur.size(); i-- > 0;) {
          if (++cur[i] < arg_sizes[i]) {
            wrapped = false;
            break;
          }
          cur[i] = 0;
        }
        if (wrapped) break;
      }
    }
    out += fn_name + ":";
    for (int v : permuted) out += std::to_string(v) + ",";
  }
  for (const auto& [rel_name, tuples] : m.relations) {
    const RelationDecl* decl = sig.relation(rel_name);
    std::set<std::vector<int>> permuted;
    for (const auto& tup : tuples) {
      std::vector<int> mapped(tup.size());
      for (size_t i = 0; i < tup.size(); ++i) mapped[i] = p(decl->args[i], tup[i]);
      permuted.insert(std::move(mapped));
    }
    out += rel_name + ":";
    for (const auto& tup : permuted) {
      for (int v : tup) out += std::to_string(v) + ".";
      out += ";";
    }
  }
  return out;
}

bool next_permutation_map(std::map<std::string, std::vector<int>>& perms) {
  for (auto& [sort, perm] : perms) {
    (void)sort;
    if (std::next_permutation(perm.begin(), perm.end())) return true;
  }
  return false;
}

bool canonical_under(const FiniteModel& m, const Signature& sig) {
  std::map<std::string, std::vector<int>> perms;
  bool nontrivial = false;
  for (const auto& [sort, size] : m.carriers) {
    std::vector<int> id(size);
    std::iota(id.begin(), id.end(), 0);
    if (size > 1) nontrivial = true;
    perms[sort] = std::move(id);
  }
  if (!nontrivial) return true;
  std::string self = serialize_permuted(m, sig, {});
  while (next_permutation_map(perms))
    if (serialize_permuted(m, sig, perms) < self) return false;
  return true;
}

}  // namespace

bool enumerate_models_sized(const Theory& t, const std::vector<int>& sizes,
                            const std::function<bool(const FiniteModel&)>& cb) {
  if (sizes.size() != t.signature.sorts.size())
    throw std::invalid_argument("size vector does not match signature sorts");
  Enumerator e(t, cb);
  return e.run(sizes);
}

bool enumerate_models(const Theory& t, int max_size,
                      const std::function<bool(const FiniteModel&)>& cb) {
  if (max_size < 0) throw std::invalid_argument("max_size must be non-negative");
  Enumerator e(t, cb);
  for (const auto& sizes : size_vectors(t.signature.sorts.size(), max_size))
    if (!e.run(sizes)) return false;
  return true;
}

long count_models(const Theory& t, int max_size) {
  long n = 0;
  enumerate_models(t, max_size, [&](const FiniteModel&) {
    ++n;
    return true;
  });
  return n;
}

bool is_canonical_model(const FiniteModel&) { return true; }

ProofOutcome find_countermodel(const Theory& t, const Sequent& goal, int max_size) {
  if (max_size < 0) throw std::invalid_argument("max_size must be non-negative");
  std::optional<Refutation> found;
  auto violation = [&](const FiniteModel& m) -> std::optional<Assignment> {
    std::vector<int> sizes;
    for (const auto& [name, sort] : goal.ctx.vars) {
      (void)name;
      sizes.push_back(m.carrier(sort));
      if (sizes.back() == 0) return std::nullopt;
    }
    std::vector<int> cur(sizes.size(), 0);
    for (;;) {
      Assignment asgn;
      for (size_t i = 0; i < cur.size(); ++i) asgn[goal.ctx.vars[i].first] = cur[i];
      if (eval_formula(m, goal.antecedent, asgn) && !eval_formula(m, goal.consequent, asgn))
        return asgn;
      bool wrapped = true;
      for (size_t i = cur.size(); i-- > 0;) {
        if (++cur[i] < sizes[i]) {
          wrapped = false;
          break;
        }
        cur[i] = 0;
      }
      if (wrapped) return std::nullopt;
    }
  };
  enumerate_models(t, max_size, [&](const FiniteModel& m) {
    if (!canonical_under(m, t.signature)) return true;  // isomorphic duplicate
    auto asgn = violation(m);
    if (!asgn) return true;
    // Re-verify; the search result is never trusted directly.
    if (!satisfies_all(m, t.axioms)) return true;
    if (!eval_formula(m, goal.antecedent, *asgn) || eval_formula(m, goal.consequent, *asgn))
      return true;
    found = Refutation{m, *asgn};
    return false;
  });
  if (found) return ProofOutcome::refuted_with(std::move(*found));
  return ProofOutcome::unknown_with("no countermodel with carriers <= " + std::to_string(max_size));
}

}  // namespace morita
