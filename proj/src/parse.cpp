#include "fox/parse.hpp"

#include <cctype>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace fox {

namespace {

enum class Tok { Int, Ident, Keyword, Sym, TyVar, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "let",  "in",   "fun",  "rec",       "if",  "then", "else",  "match", "with",
      "inl",  "inr",  "end",  "ref",       "fork", "rand", "alloctape", "fst", "snd",
      "faa",  "cas",  "true", "false",     "mod", "def",  "not",   "forall", "exists",
      "mu"};
  return k;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* symbols[] = {"|||", ";;", ":=", "<=", "->", "=>", "||", "&&", "(", ")", ",",
                                  ";",   "=",  "<",  "+",  "-",  "*",  "!",  "|", "[", "]",
                                  ":",   "."};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      auto rest = src.substr(i + 1);
      auto literal = [&](std::string_view tag) {
        return rest.substr(0, tag.size()) == tag && rest.size() > tag.size() &&
               std::isdigit(static_cast<unsigned char>(rest[tag.size()]));
      };
      if (literal("loc") || literal("lbl"))
        throw ParseError("location and label literals are not allowed in source", line, col);
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line;
    int tc = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word(src.substr(i, j - i));
      out.push_back({keywords().count(word) ? Tok::Keyword : Tok::Ident, word, tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::TyVar, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* s : symbols) {
      std::string_view sv(s);
      if (src.substr(i, sv.size()) == sv) {
        out.push_back({Tok::Sym, std::string(sv), tl, tc});
        advance(sv.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expr program() {
    std::vector<std::pair<std::string, Expr>> defs;
    while (is_kw("def")) {
      next();
      std::string name = ident();
      std::vector<Param> params;
      while (!is_sym("=")) params.push_back(param());
      expect_sym("=");
      Expr body = expr();
      expect_sym(";;");
      body = lambdas(params, std::move(body));
      for (auto it = defs.rbegin(); it != defs.rend(); ++it)
        body = subst_expr(body, it->first, it->second);
      defs.emplace_back(name, body);
    }
    Expr main = expr();
    if (peek().kind != Tok::End) fail("expected end of input");
    for (auto it = defs.rbegin(); it != defs.rend(); ++it)
      main = subst_expr(main, it->first, it->second);
    return main;
  }

  Type type_only() {
    Type t = type();
    if (peek().kind != Tok::End) fail("expected end of type");
    return t;
  }

 private:
  struct Param {
    std::string name;
    std::optional<Type> type;
  };

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int fresh_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.line, t.col);
  }

  bool is_sym(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
  }
  bool is_kw(const char* s) const { return peek().kind == Tok::Keyword && peek().text == s; }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }
  std::string fresh(const char* tag) { return "%" + std::string(tag) + std::to_string(fresh_++); }

  static std::string binder(const std::string& name) { return name == "_" ? "" : name; }

  // ---- types

  Type type() {
    Type lhs = sum_type();
    if (is_sym("->")) {
      next();
      return Type::arrow(lhs, type());
    }
    return lhs;
  }
  Type sum_type() {
    Type t = prod_type();
    while (is_sym("+")) {
      next();
      t = Type::sum(t, prod_type());
    }
    return t;
  }
  Type prod_type() {
    Type t = prefix_type();
    while (is_sym("*")) {
      next();
      t = Type::prod(t, prefix_type());
    }
    return t;
  }
  Type prefix_type() {
    const Token& t = peek();
    if (t.kind == Tok::TyVar ||
        (t.kind == Tok::Keyword && (t.text == "forall" || t.text == "exists" || t.text == "mu")))
      throw UnsupportedFragment("unsupported fragment: polymorphic, existential or recursive type '" +
                                    t.text + "'",
                                t.line, t.col);
    if (is_kw("ref")) {
      next();
      return Type::ref(prefix_type());
    }
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        return Type::unit();
      }
      Type inner = type();
      expect_sym(")");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      static const std::map<std::string, Type (*)()> base = {{"unit", &Type::unit},
                                                              {"bool", &Type::boolean},
                                                              {"nat", &Type::nat},
                                                              {"int", &Type::integer},
                                                              {"tape", &Type::tape}};
      auto it = base.find(t.text);
      if (it != base.end()) {
        next();
        return it->second();
      }
      throw UnsupportedFragment("unsupported fragment: unknown type '" + t.text + "'", t.line,
                                t.col);
    }
    fail("expected type");
  }

  // ---- binders

  bool at_param() const {
    return peek().kind == Tok::Ident || (is_sym("(") && is_sym(")", 1)) ||
           (is_sym("(") && peek(1).kind == Tok::Ident && is_sym(":", 2));
  }

  Param param() {
    if (peek().kind == Tok::Ident) return {binder(next().text), std::nullopt};
    if (is_sym("(") && is_sym(")", 1)) {
      next();
      next();
      return {"", Type::unit()};
    }
    if (is_sym("(")) {
      next();
      std::string name = binder(ident());
      expect_sym(":");
      Type t = type();
      expect_sym(")");
      return {name, t};
    }
    fail("expected parameter");
  }

  static Expr lambdas(const std::vector<Param>& params, Expr body) {
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      body = build::rec("", it->name, std::move(body), it->type);
    return body;
  }

  // ---- expressions, loosest first

  Expr expr() {
    Expr first = stmt();
    if (is_sym(";")) {
      next();
      return build::seq(std::move(first), expr());
    }
    return first;
  }

  Expr stmt() {
    Expr lhs = assign();
    if (is_sym("|||")) {
      next();
      Expr rhs = assign();
      return par(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  // e1 ||| e2: fork e2 writing into a fresh join cell, run e1, then spin on the cell.
  Expr par(Expr e1, Expr e2) {
    using namespace build;
    std::string h = fresh("h");
    std::string v = fresh("v");
    std::string j = fresh("j");
    std::string w = fresh("w");
    Expr join = app(rec(j, "", case_(load(var(h)), lam("", app(var(j), unit())), lam(w, var(w)))),
                    unit());
    return let(h, alloc(inj_l(unit())),
               seq(fork(store(var(h), inj_r(std::move(e2)))),
                   let(v, std::move(e1), pair(var(v), join))));
  }

  Expr assign() {
    Expr lhs = disj();
    if (is_sym(":=")) {
      next();
      return build::store(std::move(lhs), disj());
    }
    return lhs;
  }

  Expr disj() {
    Expr lhs = conj();
    while (is_sym("||")) {
      next();
      lhs = build::if_(std::move(lhs), build::boolean(true), conj());
    }
    return lhs;
  }

  Expr conj() {
    Expr lhs = cmp();
    while (is_sym("&&")) {
      next();
      Expr rhs = cmp();
      lhs = build::if_(std::move(lhs), std::move(rhs), build::boolean(false));
    }
    return lhs;
  }

  Expr cmp() {
    Expr lhs = add();
    BinOpKind op;
    if (is_sym("=")) op = BinOpKind::Eq;
    else if (is_sym("<")) op = BinOpKind::Lt;
    else if (is_sym("<=")) op = BinOpKind::Le;
    else return lhs;
    next();
    return build::binop(op, std::move(lhs), add());
  }

  Expr add() {
    Expr lhs = mul();
    while (is_sym("+") || is_sym("-")) {
      BinOpKind op = next().text == "+" ? BinOpKind::Add : BinOpKind::Sub;
      lhs = build::binop(op, std::move(lhs), mul());
    }
    return lhs;
  }

  Expr mul() {
    Expr lhs = application();
    while (is_sym("*") || is_kw("mod")) {
      BinOpKind op = next().text == "*" ? BinOpKind::Mul : BinOpKind::Mod;
      lhs = build::binop(op, std::move(lhs), application());
    }
    return lhs;
  }

  bool at_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Ident) return true;
    if (t.kind == Tok::Keyword) return t.text == "true" || t.text == "false";
    return is_sym("(");
  }

  bool at_open_form() const {
    return is_kw("let") || is_kw("fun") || is_kw("rec") || is_kw("if") || is_kw("match");
  }

  Expr application() {
    if (at_open_form()) return open_form();
    if (!at_atom()) return prefix();
    Expr fn = atom();
    // a '-' after an operand is binary subtraction, never a unary argument
    while (at_atom() || at_open_form() || (at_prefix() && !is_sym("-"))) {
      Expr arg = at_open_form() ? open_form() : (at_atom() ? atom() : prefix());
      fn = build::app(std::move(fn), std::move(arg));
    }
    return fn;
  }

  bool at_prefix() const {
    if (is_sym("!") || is_sym("-")) return true;
    if (peek().kind != Tok::Keyword) return false;
    static const std::set<std::string> p = {"ref", "fst", "snd", "inl", "inr", "rand",
                                            "alloctape", "fork", "faa", "cas", "not"};
    return p.count(peek().text) > 0;
  }

  // Operand of a prefix operator: an atom or another prefix form.
  Expr operand() {
    if (at_atom()) return atom();
    if (at_prefix()) return prefix();
    if (at_open_form()) return open_form();
    fail("expected expression");
  }

  Expr prefix() {
    using namespace build;
    if (!at_prefix()) fail("expected expression");
    const Token& t = next();
    const std::string& k = t.text;
    if (k == "!") return load(operand());
    if (k == "-") {
      if (peek().kind == Tok::Int) return integer(-mpz_class(next().text));
      return binop(BinOpKind::Sub, integer(0), operand());
    }
    if (k == "ref") return alloc(operand());
    if (k == "fst") return fst(operand());
    if (k == "snd") return snd(operand());
    if (k == "inl") return inj_l(operand());
    if (k == "inr") return inj_r(operand());
    if (k == "alloctape") return alloc_tape(operand());
    if (k == "fork") return fork(operand());
    if (k == "not") return if_(operand(), boolean(false), boolean(true));
    if (k == "faa") {
      Expr l = operand();
      return faa(std::move(l), operand());
    }
    if (k == "cas") {
      Expr l = operand();
      Expr a = operand();
      return cas(std::move(l), std::move(a), operand());
    }
    // rand
    if (is_sym("[")) {
      next();
      Expr label = expr();
      expect_sym("]");
      return rand_lbl(std::move(label), operand());
    }
    return rand(operand());
  }

  Expr atom() {
    using namespace build;
    const Token& t = peek();
    if (t.kind == Tok::Int) return integer(mpz_class(next().text));
    if (t.kind == Tok::Ident) {
      if (t.text == "_") fail("'_' is not an expression");
      return var(next().text);
    }
    if (is_kw("true") || is_kw("false")) return boolean(next().text == "true");
    expect_sym("(");
    if (is_sym(")")) {
      next();
      return unit();
    }
    std::vector<Expr> items{expr()};
    while (is_sym(",")) {
      next();
      items.push_back(expr());
    }
    expect_sym(")");
    Expr out = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) out = pair(items[i], out);
    return out;
  }

  Expr open_form() {
    using namespace build;
    if (is_kw("fun")) {
      next();
      std::vector<Param> params;
      do params.push_back(param());
      while (!is_sym("->"));
      expect_sym("->");
      return lambdas(params, expr());
    }
    if (is_kw("rec")) {
      next();
      std::string f = ident();
      Param first = param();
      std::vector<Param> rest;
      while (!is_sym("=")) rest.push_back(param());
      expect_sym("=");
      return rec(f, first.name, lambdas(rest, expr()), first.type);
    }
    if (is_kw("if")) {
      next();
      Expr c = expr();
      expect_kw("then");
      Expr a = expr();
      expect_kw("else");
      return if_(std::move(c), std::move(a), stmt());
    }
    if (is_kw("match")) {
      next();
      Expr s = expr();
      expect_kw("with");
      if (is_sym("|")) next();
      expect_kw("inl");
      Param x = param();
      expect_sym("=>");
      Expr l = expr();
      expect_sym("|");
      expect_kw("inr");
      Param y = param();
      expect_sym("=>");
      Expr r = expr();
      expect_kw("end");
      return case_(std::move(s), rec("", x.name, std::move(l), x.type),
                   rec("", y.name, std::move(r), y.type));
    }
    expect_kw("let");
    if (is_sym("(") && !is_sym(")", 1) && !is_sym(":", 2)) {
      // let (x, y) = e1 in e2
      next();
      std::string x = binder(ident());
      expect_sym(",");
      std::string y = binder(ident());
      expect_sym(")");
      expect_sym("=");
      Expr bound = expr();
      expect_kw("in");
      Expr body = expr();
      std::string p = fresh("p");
      if (!x.empty()) body = subst_expr(body, x, fst(var(p)));
      if (!y.empty() && y != x) body = subst_expr(body, y, snd(var(p)));
      return let(p, std::move(bound), std::move(body));
    }
    if (is_kw("rec")) {
      next();
      std::string f = ident();
      Param first = param();
      std::vector<Param> rest;
      while (!is_sym("=")) rest.push_back(param());
      expect_sym("=");
      Expr fn = rec(f, first.name, lambdas(rest, expr()), first.type);
      expect_kw("in");
      return let(f, std::move(fn), expr());
    }
    Param head = param();
    std::vector<Param> params;
    while (!is_sym("=")) params.push_back(param());
    expect_sym("=");
    Expr bound = lambdas(params, expr());
    expect_kw("in");
    Expr body = expr();
    if (head.type)
      return app(rec("", head.name, std::move(body), head.type), std::move(bound));
    return let(head.name, std::move(bound), std::move(body));
  }
};

}  // namespace

Expr parse(std::string_view text, bool closed) {
  Parser p(lex(text));
  Expr e = p.program();
  if (closed) {
    auto fv = free_vars(e);
    if (!fv.empty()) throw UnboundVariable(fv.front());
  }
  return e;
}

Type parse_type(std::string_view text) {
  Parser p(lex(text));
  return p.type_only();
}

}  // namespace fox
