#include "morita/parser.hpp"

#include <cctype>
#include <sstream>

namespace morita {

std::string format_diagnostics(const std::vector<ParseDiagnostic>& diags) {
  std::ostringstream os;
  for (const auto& d : diags) os << d.line << ":" << d.col << ": " << d.message << "\n";
  return os.str();
}

namespace {

enum class Tok {
  Ident,
  LParen,
  RParen,
  Comma,
  Colon,
  Dot,
  Bar,
  Equal,
  AndOp,
  OrOp,
  Arrow,
  Turnstile,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct ParseError {};

class Lexer {
 public:
  Lexer(const std::string& text, std::vector<ParseDiagnostic>& diags) : diags_(diags) {
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
      for (size_t k = 0; k < n; ++k) {
        if (text[i + k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < text.size()) {
      char c = text[i];
      if (c == '#') {
        while (i < text.size() && text[i] != '\n') advance(1);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
        continue;
      }
      int tl = line, tc = col;
      auto push = [&](Tok k, std::string s, size_t n) {
        tokens.push_back({k, std::move(s), tl, tc});
        advance(n);
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                   text[j] == '_' || text[j] == '\''))
          ++j;
        push(Tok::Ident, text.substr(i, j - i), j - i);
        continue;
      }
      switch (c) {
        case '(': push(Tok::LParen, "(", 1); continue;
        case ')': push(Tok::RParen, ")", 1); continue;
        case ',': push(Tok::Comma, ",", 1); continue;
        case ':': push(Tok::Colon, ":", 1); continue;
        case '.': push(Tok::Dot, ".", 1); continue;
        case '=': push(Tok::Equal, "=", 1); continue;
        case '/':
          if (i + 1 < text.size() && text[i + 1] == '\\') {
            push(Tok::AndOp, "/\\", 2);
            continue;
          }
          break;
        case '\\':
          if (i + 1 < text.size() && text[i + 1] == '/') {
            push(Tok::OrOp, "\\/", 2);
            continue;
          }
          break;
        case '-':
          if (i + 1 < text.size() && text[i + 1] == '>') {
            push(Tok::Arrow, "->", 2);
            continue;
          }
          break;
        case '|':
          if (i + 1 < text.size() && text[i + 1] == '-') {
            push(Tok::Turnstile, "|-", 2);
            continue;
          }
          push(Tok::Bar, "|", 1);
          continue;
      }
      diags_.push_back({line, col, std::string("unexpected character '") + c + "'"});
      advance(1);
    }
    tokens.push_back({Tok::End, "", line, col});
  }

  std::vector<Token> tokens;

 private:
  std::vector<ParseDiagnostic>& diags_;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<ParseDiagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return at(Tok::Ident) && peek().text == w; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool eat(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool eat_word(const char* w) {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) {
    diags_.push_back({peek().line, peek().col, msg});
    throw ParseError{};
  }
  void expect(Tok k, const char* what) {
    if (!eat(k)) fail(std::string("expected ") + what);
  }
  std::string expect_ident(const char* what) {
    if (!at(Tok::Ident)) fail(std::string("expected ") + what);
    return next().text;
  }
  void expect_word(const char* w) {
    if (!eat_word(w)) fail(std::string("expected keyword '") + w + "'");
  }
  size_t save() const { return pos_; }
  void restore(size_t p) { pos_ = p; }
  void note(const std::string& msg) { diags_.push_back({peek().line, peek().col, msg}); }

  // ---- formulas ----

  Term parse_term(const Signature& sig, const Context& ctx) {
    std::string name = expect_ident("term");
    if (at(Tok::LParen)) {
      next();
      std::vector<Term> args;
      if (!at(Tok::RParen)) {
        args.push_back(parse_term(sig, ctx));
        while (eat(Tok::Comma)) args.push_back(parse_term(sig, ctx));
      }
      expect(Tok::RParen, "')'");
      const FunctionDecl* decl = sig.function(name);
      if (!decl) fail("unknown function: " + name);
      if (decl->args.size() != args.size())
        fail("function " + name + " expects " + std::to_string(decl->args.size()) + " arguments");
      return Term::app(name, decl->result, std::move(args));
    }
    if (const std::string* sort = ctx.sort_of(name)) return Term::var(name, *sort);
    if (const FunctionDecl* decl = sig.function(name); decl && decl->args.empty())
      return Term::app(name, decl->result, {});
    fail("unknown identifier: " + name + " (not a context variable or constant)");
  }

  Formula parse_atom(const Signature& sig, const Context& ctx) {
    if (eat_word("true")) return Formula::truth();
    if (eat_word("false")) return Formula::falsity();
    if (at(Tok::LParen)) {
      next();
      Formula f = parse_formula(sig, ctx);
      expect(Tok::RParen, "')'");
      return f;
    }
    if (!at(Tok::Ident)) fail("expected a formula");
    const std::string& name = peek().text;
    bool is_rel = sig.has_relation(name) && !ctx.contains(name);
    bool is_fun = sig.has_function(name);
    if (is_rel && is_fun) {
      if (peek(1).kind == Tok::Equal) is_rel = false;
      if (peek(1).kind == Tok::LParen && rel_vs_fun_is_eq(sig, ctx)) is_rel = false;
    }
    if (is_rel) {
      next();
      std::vector<Term> args;
      if (eat(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          args.push_back(parse_term(sig, ctx));
          while (eat(Tok::Comma)) args.push_back(parse_term(sig, ctx));
        }
        expect(Tok::RParen, "')'");
      }
      return Formula::rel(name, std::move(args));
    }
    Term lhs = parse_term(sig, ctx);
    expect(Tok::Equal, "'=' after term");
    Term rhs = parse_term(sig, ctx);
    return Formula::eq(std::move(lhs), std::move(rhs));
  }

  // A name declared as both a relation and a function followed by '(' is
  // ambiguous; scan ahead for '=' after the closing paren.
  bool rel_vs_fun_is_eq(const Signature&, const Context&) {
    int depth = 0;
    for (int ahead = 1;; ++ahead) {
      const Token& t = peek(ahead);
      if (t.kind == Tok::End) return false;
      if (t.kind == Tok::LParen) ++depth;
      if (t.kind == Tok::RParen && --depth == 0) return peek(ahead + 1).kind == Tok::Equal;
    }
  }

  Formula parse_unary(const Signature& sig, const Context& ctx) {
    if (eat_word("not")) return Formula::neg(parse_unary(sig, ctx));
    if (at_word("exists") || at_word("forall")) {
      bool ex = next().text == "exists";
      std::string var = expect_ident("bound variable");
      expect(Tok::Colon, "':' in binder");
      std::string sort = expect_ident("sort");
      expect(Tok::Dot, "'.' after binder");
      Context inner = ctx;
      for (auto& v : inner.vars)
        if (v.first == var) v.second = sort;
      if (!inner.contains(var)) inner.push(var, sort);
      Formula body = parse_unary(sig, inner);
      return ex ? Formula::exists(var, sort, body) : Formula::forall(var, sort, body);
    }
    return parse_atom(sig, ctx);
  }

  Formula parse_and(const Signature& sig, const Context& ctx) {
    std::vector<Formula> parts{parse_unary(sig, ctx)};
    while (eat(Tok::AndOp)) parts.push_back(parse_unary(sig, ctx));
    return conj_all(parts);
  }

  Formula parse_or(const Signature& sig, const Context& ctx) {
    std::vector<Formula> parts{parse_and(sig, ctx)};
    while (eat(Tok::OrOp)) parts.push_back(parse_and(sig, ctx));
    return disj_all(parts);
  }

  Formula parse_formula(const Signature& sig, const Context& ctx) {
    Formula lhs = parse_or(sig, ctx);
    if (eat(Tok::Arrow)) return Formula::implies(lhs, parse_formula(sig, ctx));
    return lhs;
  }

  Context parse_context(const Signature* sig) {
    Context ctx;
    expect(Tok::LParen, "'(' starting a context");
    if (!at(Tok::RParen)) {
      do {
        std::string name = expect_ident("context variable");
        expect(Tok::Colon, "':' in context");
        std::string sort = expect_ident("sort");
        if (sig && !sig->has_sort(sort)) fail("undeclared sort in context: " + sort);
        if (ctx.contains(name)) fail("duplicate context variable: " + name);
        ctx.push(name, sort);
      } while (eat(Tok::Comma));
    }
    expect(Tok::RParen, "')' closing the context");
    return ctx;
  }

  Sequent parse_sequent(const Signature& sig, Fragment frag) {
    // The context sits between `|-` and the consequent, but scopes both
    // formulas; find it first, then parse the antecedent with it in place.
    size_t ante_start = save();
    int depth = 0;
    while (!at(Tok::Turnstile) || depth != 0) {
      if (at(Tok::End)) fail("expected '|-' in sequent");
      if (at(Tok::LParen)) ++depth;
      if (at(Tok::RParen)) --depth;
      next();
    }
    next();  // |-
    Token ctx_tok = peek();
    Context ctx = parse_context(&sig);
    size_t cons_start = save();
    restore(ante_start);
    Formula ante = parse_formula(sig, ctx);
    if (!at(Tok::Turnstile)) fail("unexpected input before '|-'");
    restore(cons_start);
    Formula cons = parse_formula(sig, ctx);
    (void)ctx_tok;
    if (!formula_in_fragment(ante, frag) || !formula_in_fragment(cons, frag))
      fail(std::string("fragment violation: connective outside the ") + fragment_name(frag) +
           " fragment");
    return Sequent{"", std::move(ante), std::move(cons), std::move(ctx)};
  }

  // ---- theory blocks ----

  Theory parse_theory_block() {
    Theory t;
    expect_word("theory");
    t.name = expect_ident("theory name");
    expect_word("fragment");
    std::string frag = expect_ident("fragment name");
    auto fr = fragment_from_name(frag);
    if (!fr) fail("unknown fragment: " + frag);
    t.fragment = *fr;
    while (!at(Tok::End)) {
      if (eat_word("sorts")) {
        do {
          std::string name = expect_ident("sort name");
          if (t.signature.has_sort(name)) fail("duplicate sort: " + name);
          t.signature.sorts.push_back({name, SortKind::Base, {}, {}, {}, std::nullopt, {}});
        } while (eat(Tok::Comma));
        continue;
      }
      if (eat_word("derived")) {
        parse_derived(t);
        continue;
      }
      if (eat_word("fun")) {
        std::string name = expect_ident("function name");
        expect(Tok::Colon, "':' after function name");
        FunctionDecl decl;
        decl.name = name;
        if (!at(Tok::Arrow)) {
          decl.args.push_back(expect_ident("argument sort"));
          while (eat(Tok::Comma)) decl.args.push_back(expect_ident("argument sort"));
        }
        expect(Tok::Arrow, "'->'");
        decl.result = expect_ident("result sort");
        if (t.signature.has_function(name)) fail("duplicate function: " + name);
        t.signature.functions.push_back(std::move(decl));
        continue;
      }
      if (eat_word("rel")) {
        std::string name = expect_ident("relation name");
        expect(Tok::Colon, "':' after relation name");
        RelationDecl decl;
        decl.name = name;
        if (at(Tok::Ident)) {
          decl.args.push_back(expect_ident("argument sort"));
          while (eat(Tok::Comma)) decl.args.push_back(expect_ident("argument sort"));
        }
        if (t.signature.has_relation(name)) fail("duplicate relation: " + name);
        t.signature.relations.push_back(std::move(decl));
        continue;
      }
      if (eat_word("axiom")) {
        std::string label = expect_ident("axiom label");
        expect(Tok::Colon, "':' after axiom label");
        Sequent s = parse_sequent(t.signature, t.fragment);
        s.label = label;
        t.axioms.push_back(std::move(s));
        continue;
      }
      fail("expected a theory block (sorts, derived, fun, rel, axiom)");
    }
    return t;
  }

  void parse_derived(Theory& t) {
    std::string name = expect_ident("derived sort name");
    if (t.signature.has_sort(name)) fail("duplicate sort: " + name);
    expect(Tok::Equal, "'='");
    std::string kind = expect_ident("sort constructor");
    SortDescriptor d;
    d.name = name;
    if (kind == "product" || kind == "coproduct") {
      d.kind = kind == "product" ? SortKind::Product : SortKind::Coproduct;
      expect(Tok::LParen, "'('");
      d.components.push_back(expect_ident("component sort"));
      while (eat(Tok::Comma)) d.components.push_back(expect_ident("component sort"));
      expect(Tok::RParen, "')'");
      expect_word("with");
      d.maps.push_back(expect_ident("map name"));
      while (eat(Tok::Comma)) d.maps.push_back(expect_ident("map name"));
      if (d.maps.size() != d.components.size()) fail("expected one map per component");
      for (const auto& c : d.components)
        if (!t.signature.has_sort(c)) fail("undeclared component sort: " + c);
      t.signature.sorts.push_back(d);
      for (size_t i = 0; i < d.maps.size(); ++i) {
        if (t.signature.has_function(d.maps[i])) fail("duplicate function: " + d.maps[i]);
        if (d.kind == SortKind::Product)
          t.signature.functions.push_back({d.maps[i], {name}, d.components[i]});
        else
          t.signature.functions.push_back({d.maps[i], {d.components[i]}, name});
      }
      return;
    }
    if (kind == "subsort" || kind == "quotient") {
      d.kind = kind == "subsort" ? SortKind::Subsort : SortKind::Quotient;
      expect(Tok::LParen, "'('");
      std::string v1 = expect_ident("variable");
      expect(Tok::Colon, "':'");
      std::string ambient = expect_ident("ambient sort");
      if (!t.signature.has_sort(ambient)) fail("undeclared ambient sort: " + ambient);
      Context ctx;
      ctx.push(v1, ambient);
      d.formula_vars.push_back(v1);
      if (d.kind == SortKind::Quotient) {
        expect(Tok::Comma, "','");
        std::string v2 = expect_ident("variable");
        expect(Tok::Colon, "':'");
        std::string ambient2 = expect_ident("ambient sort");
        if (ambient2 != ambient) fail("quotient variables must share the ambient sort");
        ctx.push(v2, ambient);
        d.formula_vars.push_back(v2);
      }
      expect(Tok::Bar, "'|' before the defining formula");
      d.formula = parse_formula(t.signature, ctx);
      expect(Tok::RParen, "')'");
      expect_word("with");
      d.maps.push_back(expect_ident("map name"));
      d.components.push_back(ambient);
      if (!formula_in_fragment(*d.formula, t.fragment))
        fail("defining formula outside the theory fragment");
      t.signature.sorts.push_back(d);
      if (t.signature.has_function(d.maps[0])) fail("duplicate function: " + d.maps[0]);
      if (d.kind == SortKind::Subsort)
        t.signature.functions.push_back({d.maps[0], {name}, ambient});
      else
        t.signature.functions.push_back({d.maps[0], {ambient}, name});
      return;
    }
    if (kind == "unit" || kind == "empty") {
      d.kind = kind == "unit" ? SortKind::Unit : SortKind::Empty;
      expect(Tok::LParen, "'('");
      std::string witness = expect_ident("witness sort");
      if (!t.signature.has_sort(witness)) fail("undeclared witness sort: " + witness);
      d.components.push_back(witness);
      expect(Tok::RParen, "')'");
      if (eat_word("with")) {
        do {
          std::string m = expect_ident("map name");
          expect(Tok::Colon, "':'");
          std::string target = expect_ident("sort");
          if (!t.signature.has_sort(target)) fail("undeclared sort: " + target);
          d.maps.push_back(m);
          d.map_sorts.push_back(target);
        } while (eat(Tok::Comma));
      }
      t.signature.sorts.push_back(d);
      for (size_t i = 0; i < d.maps.size(); ++i) {
        if (t.signature.has_function(d.maps[i])) fail("duplicate function: " + d.maps[i]);
        if (d.kind == SortKind::Unit)
          t.signature.functions.push_back({d.maps[i], {d.map_sorts[i]}, name});
        else
          t.signature.functions.push_back({d.maps[i], {name}, d.map_sorts[i]});
      }
      return;
    }
    fail("unknown sort constructor: " + kind);
  }

  // ---- extension specs ----

  std::vector<ExtensionSpec> parse_extension_file(const Theory& base) {
    std::vector<ExtensionSpec> specs;
    Theory current = base;  // signature evolves as specs stack
    while (!at(Tok::End)) {
      expect_word("extend");
      // optional `<theory> with`
      if (at(Tok::Ident) && peek(1).kind == Tok::Ident && peek(1).text == "with" &&
          peek().text != "product" && peek().text != "coproduct" && peek().text != "subsort" &&
          peek().text != "quotient" && peek().text != "unit" && peek().text != "empty" &&
          peek().text != "function" && peek().text != "relation") {
        std::string tname = next().text;
        next();  // with
        if (tname != base.name) note("extension targets theory '" + tname + "'");
      }
      ExtensionSpec spec = parse_extension_spec(current);
      current.signature = extended_signature(spec, current);
      specs.push_back(std::move(spec));
    }
    return specs;
  }

  ExtensionSpec parse_extension_spec(const Theory& current) {
    ExtensionSpec spec;
    std::string kind = expect_ident("extension kind");
    auto parse_as_clause = [&](size_t expected_maps) {
      expect_word("as");
      spec.name = expect_ident("new sort name");
      expect(Tok::LParen, "'('");
      spec.maps.push_back(expect_ident("map name"));
      while (eat(Tok::Comma)) spec.maps.push_back(expect_ident("map name"));
      expect(Tok::RParen, "')'");
      if (expected_maps && spec.maps.size() != expected_maps)
        fail("expected " + std::to_string(expected_maps) + " map name(s)");
    };
    if (kind == "product" || kind == "coproduct") {
      spec.kind = kind == "product" ? ExtensionKind::ProductSort : ExtensionKind::CoproductSort;
      expect(Tok::LParen, "'('");
      spec.components.push_back(expect_ident("component sort"));
      while (eat(Tok::Comma)) spec.components.push_back(expect_ident("component sort"));
      expect(Tok::RParen, "')'");
      parse_as_clause(spec.components.size());
      return spec;
    }
    if (kind == "subsort" || kind == "quotient") {
      spec.kind = kind == "subsort" ? ExtensionKind::Subsort : ExtensionKind::QuotientSort;
      expect(Tok::LParen, "'('");
      std::string v1 = expect_ident("variable");
      expect(Tok::Colon, "':'");
      std::string ambient = expect_ident("ambient sort");
      Context ctx;
      ctx.push(v1, ambient);
      spec.formula_vars.push_back(v1);
      if (spec.kind == ExtensionKind::QuotientSort) {
        expect(Tok::Comma, "','");
        std::string v2 = expect_ident("variable");
        expect(Tok::Colon, "':'");
        if (expect_ident("ambient sort") != ambient)
          fail("quotient variables must share the ambient sort");
        ctx.push(v2, ambient);
        spec.formula_vars.push_back(v2);
      }
      expect(Tok::Bar, "'|' before the defining formula");
      spec.formula = parse_formula(current.signature, ctx);
      expect(Tok::RParen, "')'");
      spec.components.push_back(ambient);
      parse_as_clause(1);
      return spec;
    }
    if (kind == "unit" || kind == "empty") {
      spec.kind = kind == "unit" ? ExtensionKind::UnitSort : ExtensionKind::EmptySort;
      expect(Tok::LParen, "'('");
      spec.components.push_back(expect_ident("witness sort"));
      expect(Tok::RParen, "')'");
      parse_as_clause(1);  // a single prefix; maps get resolved per sort at apply time
      return spec;
    }
    if (kind == "function") {
      spec.kind = ExtensionKind::DefinedFunction;
      spec.name = expect_ident("function name");
      expect(Tok::Colon, "':'");
      if (!at(Tok::Arrow)) {
        spec.components.push_back(expect_ident("argument sort"));
        while (eat(Tok::Comma)) spec.components.push_back(expect_ident("argument sort"));
      }
      expect(Tok::Arrow, "'->'");
      spec.result_sort = expect_ident("result sort");
      expect_word("by");
      Context ctx = parse_defining_context(spec.components, spec.result_sort, spec.formula_vars);
      spec.formula = parse_formula(current.signature, ctx);
      expect(Tok::RParen, "')'");
      return spec;
    }
    if (kind == "relation") {
      spec.kind = ExtensionKind::DefinedRelation;
      spec.name = expect_ident("relation name");
      expect(Tok::Colon, "':'");
      if (at(Tok::Ident)) {
        spec.components.push_back(expect_ident("argument sort"));
        while (eat(Tok::Comma)) spec.components.push_back(expect_ident("argument sort"));
      }
      expect_word("by");
      Context ctx = parse_defining_context(spec.components, "", spec.formula_vars);
      spec.formula = parse_formula(current.signature, ctx);
      expect(Tok::RParen, "')'");
      return spec;
    }
    fail("unknown extension kind: " + kind);
  }

  // `(x:A, y:B, z:C | ...` — declared sorts must match the arity; for
  // functions the final variable is the result.
  Context parse_defining_context(const std::vector<std::string>& arg_sorts,
                                 const std::string& result_sort,
                                 std::vector<std::string>& names_out) {
    expect(Tok::LParen, "'('");
    Context ctx;
    std::vector<std::string> expected = arg_sorts;
    if (!result_sort.empty()) expected.push_back(result_sort);
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) expect(Tok::Comma, "','");
      std::string v = expect_ident("variable");
      expect(Tok::Colon, "':'");
      std::string s = expect_ident("sort");
      if (s != expected[i])
        fail("defining variable " + v + " has sort " + s + ", expected " + expected[i]);
      ctx.push(v, s);
      names_out.push_back(v);
    }
    expect(Tok::Bar, "'|' before the defining formula");
    return ctx;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<ParseDiagnostic>& diags_;
};

template <typename T, typename Fn>
ParseResult<T> run_parser(const std::string& text, Fn&& fn) {
  ParseResult<T> result;
  Lexer lex(text, result.diagnostics);
  if (!result.diagnostics.empty()) return result;
  Parser p(std::move(lex.tokens), result.diagnostics);
  try {
    result.value = fn(p);
  } catch (ParseError&) {
    result.value.reset();
  }
  return result;
}

}  // namespace

ParseResult<Theory> parse_theory(const std::string& text) {
  return run_parser<Theory>(text, [](Parser& p) { return p.parse_theory_block(); });
}

ParseResult<Sequent> parse_sequent_text(const std::string& text, const Theory& over) {
  return run_parser<Sequent>(
      text, [&](Parser& p) { return p.parse_sequent(over.signature, over.fragment); });
}

ParseResult<Formula> parse_formula_text(const std::string& text, const Theory& over,
                                        const Context& ctx) {
  return run_parser<Formula>(text, [&](Parser& p) {
    Formula f = p.parse_formula(over.signature, ctx);
    if (!p.at(Tok::End)) p.fail("unexpected trailing input");
    return f;
  });
}

ParseResult<Context> parse_context_text(const std::string& text) {
  return run_parser<Context>(text, [](Parser& p) { return p.parse_context(nullptr); });
}

ParseResult<std::vector<ExtensionSpec>> parse_extensions(const std::string& text,
                                                         const Theory& base) {
  return run_parser<std::vector<ExtensionSpec>>(
      text, [&](Parser& p) { return p.parse_extension_file(base); });
}

}  // namespace morita
