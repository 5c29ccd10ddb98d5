#include "morita/json_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace morita {

using nlohmann::json;

namespace {

json term_to_j(const Term& t) {
  if (const Term::Var* v = t.as_var()) return json{{"var", v->name}, {"sort", v->sort}};
  const Term::App& a = *t.as_app();
  json args = json::array();
  for (const Term& arg : a.args) args.push_back(term_to_j(arg));
  return json{{"app", a.fn}, {"sort", a.sort}, {"args", std::move(args)}};
}

Term term_from_j(const json& j) {
  if (j.contains("var")) return Term::var(j.at("var"), j.at("sort"));
  std::vector<Term> args;
  for (const auto& a : j.at("args")) args.push_back(term_from_j(a));
  return Term::app(j.at("app"), j.at("sort"), std::move(args));
}

json formula_to_j(const Formula& f) {
  switch (f.kind()) {
    case Conn::True: return json{{"op", "true"}};
    case Conn::False: return json{{"op", "false"}};
    case Conn::Eq:
      return json{{"op", "eq"}, {"lhs", term_to_j(f.eq_lhs())}, {"rhs", term_to_j(f.eq_rhs())}};
    case Conn::Rel: {
      json args = json::array();
      for (const Term& t : f.rel_args()) args.push_back(term_to_j(t));
      return json{{"op", "rel"}, {"name", f.rel_name()}, {"args", std::move(args)}};
    }
    case Conn::And:
    case Conn::Or:
    case Conn::Implies: {
      const char* op = f.kind() == Conn::And ? "and" : f.kind() == Conn::Or ? "or" : "implies";
      return json{{"op", op}, {"lhs", formula_to_j(f.lhs())}, {"rhs", formula_to_j(f.rhs())}};
    }
    case Conn::Not:
      return json{{"op", "not"}, {"body", formula_to_j(f.body())}};
    case Conn::Exists:
    case Conn::Forall:
      return json{{"op", f.kind() == Conn::Exists ? "exists" : "forall"},
                  {"var", f.bound_var()},
                  {"sort", f.bound_sort()},
                  {"body", formula_to_j(f.body())}};
  }
  throw std::logic_error("unreachable");
}

Formula formula_from_j(const json& j) {
  const std::string op = j.at("op");
  if (op == "true") return Formula::truth();
  if (op == "false") return Formula::falsity();
  if (op == "eq") return Formula::eq(term_from_j(j.at("lhs")), term_from_j(j.at("rhs")));
  if (op == "rel") {
    std::vector<Term> args;
    for (const auto& a : j.at("args")) args.push_back(term_from_j(a));
    return Formula::rel(j.at("name"), std::move(args));
  }
  if (op == "and") return Formula::conj(formula_from_j(j.at("lhs")), formula_from_j(j.at("rhs")));
  if (op == "or") return Formula::disj(formula_from_j(j.at("lhs")), formula_from_j(j.at("rhs")));
  if (op == "implies")
    return Formula::implies(formula_from_j(j.at("lhs")), formula_from_j(j.at("rhs")));
  if (op == "not") return Formula::neg(formula_from_j(j.at("body")));
  if (op == "exists") return Formula::exists(j.at("var"), j.at("sort"), formula_from_j(j.at("body")));
  if (op == "forall") return Formula::forall(j.at("var"), j.at("sort"), formula_from_j(j.at("body")));
  throw std::invalid_argument("unknown formula op: " + op);
}

json context_to_j(const Context& ctx) {
  json out = json::array();
  for (const auto& [name, sort] : ctx.vars) out.push_back(json{{"var", name}, {"sort", sort}});
  return out;
}

Context context_from_j(const json& j) {
  Context ctx;
  for (const auto& v : j) ctx.push(v.at("var"), v.at("sort"));
  return ctx;
}

json sequent_to_j(const Sequent& s) {
  return json{{"label", s.label},
              {"antecedent", formula_to_j(s.antecedent)},
              {"context", context_to_j(s.ctx)},
              {"consequent", formula_to_j(s.consequent)}};
}

Sequent sequent_from_j(const json& j) {
  return Sequent{j.value("label", ""), formula_from_j(j.at("antecedent")),
                 formula_from_j(j.at("consequent")), context_from_j(j.at("context"))};
}

json model_to_j(const FiniteModel& m) {
  json carriers = json::array();
  for (const auto& [sort, size] : m.carriers)
    carriers.push_back(json{{"sort", sort}, {"size", size}});
  json functions = json::object();
  for (const auto& [fn, table] : m.functions) functions[fn] = table;
  json relations = json::object();
  for (const auto& [rel, tuples] : m.relations) {
    json arr = json::array();
    for (const auto& t : tuples) arr.push_back(t);
    relations[rel] = std::move(arr);
  }
  return json{{"carriers", std::move(carriers)},
              {"functions", std::move(functions)},
              {"relations", std::move(relations)}};
}

}  // namespace

std::string theory_to_json(const Theory& t, int indent) {
  json sorts = json::array();
  for (const auto& s : t.signature.sorts) {
    json e{{"name", s.name}, {"kind", sort_kind_name(s.kind)}};
    if (!s.components.empty()) e["components"] = s.components;
    if (!s.maps.empty()) e["maps"] = s.maps;
    if (!s.map_sorts.empty()) e["map_sorts"] = s.map_sorts;
    if (s.formula) {
      e["formula"] = formula_to_j(*s.formula);
      e["formula_vars"] = s.formula_vars;
    }
    sorts.push_back(std::move(e));
  }
  json functions = json::array();
  for (const auto& f : t.signature.functions)
    functions.push_back(json{{"name", f.name}, {"args", f.args}, {"result", f.result}});
  json relations = json::array();
  for (const auto& r : t.signature.relations)
    relations.push_back(json{{"name", r.name}, {"args", r.args}});
  json axioms = json::array();
  for (const auto& a : t.axioms) axioms.push_back(sequent_to_j(a));
  json doc{{"theory", t.name},
           {"fragment", fragment_name(t.fragment)},
           {"sorts", std::move(sorts)},
           {"functions", std::move(functions)},
           {"relations", std::move(relations)},
           {"axioms", std::move(axioms)}};
  return doc.dump(indent);
}

Theory theory_from_json(const std::string& text) {
  json doc = json::parse(text);
  Theory t;
  t.name = doc.at("theory");
  auto frag = fragment_from_name(doc.at("fragment"));
  if (!frag) throw std::invalid_argument("unknown fragment in JSON theory");
  t.fragment = *frag;
  for (const auto& e : doc.at("sorts")) {
    SortDescriptor d;
    d.name = e.at("name");
    std::string kind = e.at("kind");
    if (kind == "base") d.kind = SortKind::Base;
    else if (kind == "product") d.kind = SortKind::Product;
    else if (kind == "coproduct") d.kind = SortKind::Coproduct;
    else if (kind == "subsort") d.kind = SortKind::Subsort;
    else if (kind == "quotient") d.kind = SortKind::Quotient;
    else if (kind == "unit") d.kind = SortKind::Unit;
    else if (kind == "empty") d.kind = SortKind::Empty;
    else throw std::invalid_argument("unknown sort kind: " + kind);
    if (e.contains("components")) d.components = e.at("components").get<std::vector<std::string>>();
    if (e.contains("maps")) d.maps = e.at("maps").get<std::vector<std::string>>();
    if (e.contains("map_sorts")) d.map_sorts = e.at("map_sorts").get<std::vector<std::string>>();
    if (e.contains("formula")) {
      d.formula = formula_from_j(e.at("formula"));
      d.formula_vars = e.at("formula_vars").get<std::vector<std::string>>();
    }
    t.signature.sorts.push_back(std::move(d));
  }
  for (const auto& e : doc.at("functions"))
    t.signature.functions.push_back(
        {e.at("name"), e.at("args").get<std::vector<std::string>>(), e.at("result")});
  for (const auto& e : doc.at("relations"))
    t.signature.relations.push_back({e.at("name"), e.at("args").get<std::vector<std::string>>()});
  for (const auto& e : doc.at("axioms")) t.axioms.push_back(sequent_from_j(e));
  return t;
}

std::string model_to_json(const FiniteModel& m) { return model_to_j(m).dump(); }

std::string sequent_to_json(const Sequent& s) { return sequent_to_j(s).dump(); }

std::string outcome_to_json(const ProofOutcome& o) {
  json doc{{"status", status_name(o.status)}};
  if (!o.note.empty()) doc["note"] = o.note;
  if (o.trace) {
    json events = json::array();
    for (const auto& e : o.trace->events) {
      json ev{{"branch", e.branch}};
      switch (e.kind) {
        case TraceEvent::Kind::Seed: ev["kind"] = "seed"; break;
        case TraceEvent::Kind::Fresh: ev["kind"] = "fresh"; break;
        case TraceEvent::Kind::Totalize: ev["kind"] = "totalize"; break;
        case TraceEvent::Kind::Fire: ev["kind"] = "fire"; break;
        case TraceEvent::Kind::Split: ev["kind"] = "split"; break;
        case TraceEvent::Kind::Close: ev["kind"] = "close"; break;
      }
      if (e.parent >= 0) ev["parent"] = e.parent;
      if (e.axiom >= 0) ev["axiom"] = e.axiom;
      if (!e.nodes.empty()) ev["nodes"] = e.nodes;
      if (!e.note.empty()) ev["note"] = e.note;
      events.push_back(std::move(ev));
    }
    doc["trace"] = std::move(events);
  }
  if (o.refutation) {
    doc["model"] = model_to_j(o.refutation->model);
    json asgn = json::object();
    for (const auto& [var, elem] : o.refutation->assignment) asgn[var] = elem;
    doc["assignment"] = std::move(asgn);
  }
  return doc.dump();
}

}  // namespace morita
