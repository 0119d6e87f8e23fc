#include "fox/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fox {

// ---------------------------------------------------------------------------
// Types

struct TypeNode {
  Type::Kind kind;
  std::vector<Type> args;
  std::uint32_t var_id = 0;
  bool numeric = false;
};

namespace {
Type::Kind leaf_kind_guard(Type::Kind k) { return k; }
}  // namespace

Type Type::unit() { return Type(std::make_shared<TypeNode>(TypeNode{Kind::Unit, {}})); }
Type Type::boolean() { return Type(std::make_shared<TypeNode>(TypeNode{Kind::Bool, {}})); }
Type Type::nat() { return Type(std::make_shared<TypeNode>(TypeNode{Kind::Nat, {}})); }
Type Type::integer() { return Type(std::make_shared<TypeNode>(TypeNode{Kind::Int, {}})); }
Type Type::tape() { return Type(std::make_shared<TypeNode>(TypeNode{Kind::Tape, {}})); }
Type Type::prod(Type a, Type b) {
  return Type(std::make_shared<TypeNode>(TypeNode{Kind::Prod, {std::move(a), std::move(b)}}));
}
Type Type::sum(Type a, Type b) {
  return Type(std::make_shared<TypeNode>(TypeNode{Kind::Sum, {std::move(a), std::move(b)}}));
}
Type Type::arrow(Type a, Type b) {
  return Type(std::make_shared<TypeNode>(TypeNode{Kind::Arrow, {std::move(a), std::move(b)}}));
}
Type Type::ref(Type a) {
  return Type(std::make_shared<TypeNode>(TypeNode{Kind::Ref, {std::move(a)}}));
}
Type Type::var(std::uint32_t id, bool numeric) {
  return Type(std::make_shared<TypeNode>(TypeNode{leaf_kind_guard(Kind::Var), {}, id, numeric}));
}

Type::Kind Type::kind() const { return node_->kind; }
const Type& Type::arg(std::size_t i) const { return node_->args.at(i); }
std::uint32_t Type::var_id() const { return node_->var_id; }
bool Type::numeric() const { return node_->numeric; }

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Type::Kind::Var) return a.var_id() == b.var_id();
  for (std::size_t i = 0; i < a.node_->args.size(); ++i)
    if (!(a.arg(i) == b.arg(i))) return false;
  return true;
}

namespace {

// precedence: 0 arrow, 1 sum, 2 prod, 3 prefix/atom
void print_type(const Type& t, int prec, std::ostream& out) {
  auto paren = [&](int mine, auto body) {
    if (mine < prec) out << '(';
    body();
    if (mine < prec) out << ')';
  };
  switch (t.kind()) {
    case Type::Kind::Unit: out << "unit"; break;
    case Type::Kind::Bool: out << "bool"; break;
    case Type::Kind::Nat: out << "nat"; break;
    case Type::Kind::Int: out << "int"; break;
    case Type::Kind::Tape: out << "tape"; break;
    case Type::Kind::Var: out << (t.numeric() ? "'n" : "'t") << t.var_id(); break;
    case Type::Kind::Ref:
      paren(3, [&] {
        out << "ref ";
        print_type(t.arg(0), 3, out);
      });
      break;
    case Type::Kind::Prod:
      paren(2, [&] {
        print_type(t.arg(0), 3, out);
        out << " * ";
        print_type(t.arg(1), 3, out);
      });
      break;
    case Type::Kind::Sum:
      paren(1, [&] {
        print_type(t.arg(0), 2, out);
        out << " + ";
        print_type(t.arg(1), 2, out);
      });
      break;
    case Type::Kind::Arrow:
      paren(0, [&] {
        print_type(t.arg(0), 1, out);
        out << " -> ";
        print_type(t.arg(1), 0, out);
      });
      break;
  }
}

}  // namespace

std::string Type::str() const {
  std::ostringstream out;
  print_type(*this, 0, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Expressions

const char* binop_symbol(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Mod: return "mod";
    case BinOpKind::Eq: return "=";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Le: return "<=";
  }
  return "?";
}

namespace {

bool compute_is_value(const Node& n) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, BoolLit> ||
                      std::is_same_v<T, UnitLit> || std::is_same_v<T, LocLit> ||
                      std::is_same_v<T, LblLit> || std::is_same_v<T, Rec>) {
          return true;
        } else if constexpr (std::is_same_v<T, Pair>) {
          return x.first.is_value() && x.second.is_value();
        } else if constexpr (std::is_same_v<T, InjL> || std::is_same_v<T, InjR>) {
          return x.e.is_value();
        } else {
          return false;
        }
      },
      n);
}

}  // namespace

Expr Expr::make(Node n) {
  Expr e;
  bool value = compute_is_value(n);
  e.box_ = std::make_shared<const NodeBox>(NodeBox{std::move(n), value});
  return e;
}

namespace {

template <class T>
std::strong_ordering cmp_scalar(const T& a, const T& b) {
  return a <=> b;
}

std::strong_ordering cmp_mpz(const mpz_class& a, const mpz_class& b) {
  int c = cmp(a, b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (a.box_ == b.box_) return std::strong_ordering::equal;
  if (!a.valid() || !b.valid()) return a.valid() <=> b.valid();
  const Node& na = a.node();
  const Node& nb = b.node();
  if (auto c = na.index() <=> nb.index(); c != 0) return c;
  return std::visit(
      [&](const auto& x) -> std::strong_ordering {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(nb);
        if constexpr (std::is_same_v<T, IntLit>) {
          return cmp_mpz(x.value, y.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value <=> y.value;
        } else if constexpr (std::is_same_v<T, UnitLit>) {
          return std::strong_ordering::equal;
        } else if constexpr (std::is_same_v<T, LocLit>) {
          return x.loc <=> y.loc;
        } else if constexpr (std::is_same_v<T, LblLit>) {
          return x.lbl <=> y.lbl;
        } else if constexpr (std::is_same_v<T, Var>) {
          return x.name <=> y.name;
        } else if constexpr (std::is_same_v<T, Rec>) {
          // parameter annotations are erased at runtime and ignored here
          if (auto c = x.f <=> y.f; c != 0) return c;
          if (auto c = x.x <=> y.x; c != 0) return c;
          return compare(x.body, y.body);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          if (auto c = cmp_scalar(static_cast<int>(x.op), static_cast<int>(y.op)); c != 0)
            return c;
          if (auto c = compare(x.lhs, y.lhs); c != 0) return c;
          return compare(x.rhs, y.rhs);
        } else {
          std::vector<Expr> ca = children(a);
          std::vector<Expr> cb = children(b);
          for (std::size_t i = 0; i < ca.size(); ++i)
            if (auto c = compare(ca[i], cb[i]); c != 0) return c;
          return std::strong_ordering::equal;
        }
      },
      na);
}

std::vector<Expr> children(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::vector<Expr> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rec>) return {x.body};
        else if constexpr (std::is_same_v<T, App>) return {x.fn, x.arg};
        else if constexpr (std::is_same_v<T, BinOp>) return {x.lhs, x.rhs};
        else if constexpr (std::is_same_v<T, If>) return {x.cond, x.then_branch, x.else_branch};
        else if constexpr (std::is_same_v<T, Pair>) return {x.first, x.second};
        else if constexpr (std::is_same_v<T, Fst> || std::is_same_v<T, Snd> ||
                           std::is_same_v<T, InjL> || std::is_same_v<T, InjR>)
          return {x.e};
        else if constexpr (std::is_same_v<T, Case>) return {x.scrutinee, x.left_fn, x.right_fn};
        else if constexpr (std::is_same_v<T, Alloc>) return {x.init};
        else if constexpr (std::is_same_v<T, Load>) return {x.loc};
        else if constexpr (std::is_same_v<T, Store>) return {x.loc, x.value};
        else if constexpr (std::is_same_v<T, Faa>) return {x.loc, x.delta};
        else if constexpr (std::is_same_v<T, Cas>) return {x.loc, x.expected, x.desired};
        else if constexpr (std::is_same_v<T, Rand>) return {x.bound};
        else if constexpr (std::is_same_v<T, RandLbl>) return {x.label, x.bound};
        else if constexpr (std::is_same_v<T, AllocTape>) return {x.bound};
        else if constexpr (std::is_same_v<T, Fork>) return {x.body};
        else return {};
      },
      e.node());
}

Expr replace_child(const Expr& e, std::size_t index, Expr c) {
  auto bad = [] { return std::out_of_range("replace_child: index out of range"); };
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        T copy = x;
        if constexpr (std::is_same_v<T, Rec>) {
          if (index != 0) throw bad();
          copy.body = std::move(c);
        } else if constexpr (std::is_same_v<T, App>) {
          (index == 0 ? copy.fn : index == 1 ? copy.arg : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          (index == 0 ? copy.lhs : index == 1 ? copy.rhs : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, If>) {
          (index == 0   ? copy.cond
           : index == 1 ? copy.then_branch
           : index == 2 ? copy.else_branch
                        : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Pair>) {
          (index == 0 ? copy.first : index == 1 ? copy.second : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Fst> || std::is_same_v<T, Snd> ||
                             std::is_same_v<T, InjL> || std::is_same_v<T, InjR>) {
          if (index != 0) throw bad();
          copy.e = std::move(c);
        } else if constexpr (std::is_same_v<T, Case>) {
          (index == 0   ? copy.scrutinee
           : index == 1 ? copy.left_fn
           : index == 2 ? copy.right_fn
                        : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Alloc>) {
          if (index != 0) throw bad();
          copy.init = std::move(c);
        } else if constexpr (std::is_same_v<T, Load>) {
          if (index != 0) throw bad();
          copy.loc = std::move(c);
        } else if constexpr (std::is_same_v<T, Store>) {
          (index == 0 ? copy.loc : index == 1 ? copy.value : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Faa>) {
          (index == 0 ? copy.loc : index == 1 ? copy.delta : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Cas>) {
          (index == 0   ? copy.loc
           : index == 1 ? copy.expected
           : index == 2 ? copy.desired
                        : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Rand> || std::is_same_v<T, AllocTape>) {
          if (index != 0) throw bad();
          copy.bound = std::move(c);
        } else if constexpr (std::is_same_v<T, RandLbl>) {
          (index == 0 ? copy.label : index == 1 ? copy.bound : throw bad()) = std::move(c);
        } else if constexpr (std::is_same_v<T, Fork>) {
          if (index != 0) throw bad();
          copy.body = std::move(c);
        } else {
          throw bad();
        }
        return Expr::make(Node(std::move(copy)));
      },
      e.node());
}

namespace build {
Expr integer(const mpz_class& v) { return Expr::make(IntLit{v}); }
Expr integer(long v) { return Expr::make(IntLit{mpz_class(v)}); }
Expr boolean(bool b) { return Expr::make(BoolLit{b}); }
Expr unit() { return Expr::make(UnitLit{}); }
Expr loc(Loc l) { return Expr::make(LocLit{l}); }
Expr lbl(Lbl l) { return Expr::make(LblLit{l}); }
Expr var(std::string name) { return Expr::make(Var{std::move(name)}); }
Expr rec(std::string f, std::string x, Expr body, std::optional<Type> param_type) {
  return Expr::make(Rec{std::move(f), std::move(x), std::move(body), std::move(param_type)});
}
Expr lam(std::string x, Expr body) { return rec("", std::move(x), std::move(body)); }
Expr app(Expr fn, Expr arg) { return Expr::make(App{std::move(fn), std::move(arg)}); }
Expr binop(BinOpKind op, Expr lhs, Expr rhs) {
  return Expr::make(BinOp{op, std::move(lhs), std::move(rhs)});
}
Expr if_(Expr c, Expr t, Expr e) { return Expr::make(If{std::move(c), std::move(t), std::move(e)}); }
Expr pair(Expr a, Expr b) { return Expr::make(Pair{std::move(a), std::move(b)}); }
Expr fst(Expr e) { return Expr::make(Fst{std::move(e)}); }
Expr snd(Expr e) { return Expr::make(Snd{std::move(e)}); }
Expr inj_l(Expr e) { return Expr::make(InjL{std::move(e)}); }
Expr inj_r(Expr e) { return Expr::make(InjR{std::move(e)}); }
Expr case_(Expr s, Expr l, Expr r) {
  return Expr::make(Case{std::move(s), std::move(l), std::move(r)});
}
Expr alloc(Expr e) { return Expr::make(Alloc{std::move(e)}); }
Expr load(Expr e) { return Expr::make(Load{std::move(e)}); }
Expr store(Expr l, Expr v) { return Expr::make(Store{std::move(l), std::move(v)}); }
Expr faa(Expr l, Expr d) { return Expr::make(Faa{std::move(l), std::move(d)}); }
Expr cas(Expr l, Expr a, Expr b) { return Expr::make(Cas{std::move(l), std::move(a), std::move(b)}); }
Expr rand(Expr bound) { return Expr::make(Rand{std::move(bound)}); }
Expr rand_lbl(Expr label, Expr bound) {
  return Expr::make(RandLbl{std::move(label), std::move(bound)});
}
Expr alloc_tape(Expr bound) { return Expr::make(AllocTape{std::move(bound)}); }
Expr fork(Expr body) { return Expr::make(Fork{std::move(body)}); }
Expr let(std::string x, Expr bound, Expr body) {
  return app(lam(std::move(x), std::move(body)), std::move(bound));
}
Expr seq(Expr first, Expr second) { return let("", std::move(first), std::move(second)); }
}  // namespace build

bool is_unboxed(const Expr& v) {
  return v.as<IntLit>() || v.as<BoolLit>() || v.as<UnitLit>() || v.as<LocLit>() ||
         v.as<LblLit>();
}

bool contains_closure(const Expr& v) {
  if (v.as<Rec>()) return true;
  for (const Expr& c : children(v))
    if (contains_closure(c)) return true;
  return false;
}

std::size_t size(const Expr& e) {
  std::size_t n = 1;
  for (const Expr& c : children(e)) n += size(c);
  return n;
}

namespace {

void collect_free(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (const auto* v = e.as<Var>()) {
    if (std::find(bound.begin(), bound.end(), v->name) == bound.end() &&
        std::find(out.begin(), out.end(), v->name) == out.end())
      out.push_back(v->name);
    return;
  }
  if (const auto* r = e.as<Rec>()) {
    std::size_t mark = bound.size();
    if (!r->f.empty()) bound.push_back(r->f);
    if (!r->x.empty()) bound.push_back(r->x);
    collect_free(r->body, bound, out);
    bound.resize(mark);
    return;
  }
  for (const Expr& c : children(e)) collect_free(c, bound, out);
}

Expr subst_impl(const Expr& e, const std::string& x, const Expr& r) {
  if (const auto* v = e.as<Var>()) return v->name == x ? r : e;
  if (const auto* rec = e.as<Rec>()) {
    if (rec->f == x || rec->x == x) return e;  // shadowed
    Expr body = subst_impl(rec->body, x, r);
    if (body.same(rec->body)) return e;
    return build::rec(rec->f, rec->x, std::move(body), rec->param_type);
  }
  std::vector<Expr> kids = children(e);
  Expr out = e;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    Expr k = subst_impl(kids[i], x, r);
    if (!k.same(kids[i])) out = replace_child(out, i, std::move(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// printing

bool is_atomic(const Expr& e) {
  if (const auto* i = e.as<IntLit>()) return i->value >= 0;
  return e.as<BoolLit>() || e.as<UnitLit>() || e.as<LocLit>() || e.as<LblLit>() ||
         e.as<Var>() || e.as<Pair>();
}

std::string binder(const std::string& name) { return name.empty() ? "_" : name; }

void print(const Expr& e, std::ostream& out);

void print_atom(const Expr& e, std::ostream& out) {
  if (is_atomic(e)) {
    print(e, out);
  } else {
    out << '(';
    print(e, out);
    out << ')';
  }
}

void print_param(const Rec& r, std::ostream& out) {
  if (r.param_type) {
    out << '(' << binder(r.x) << " : " << r.param_type->str() << ')';
  } else {
    out << binder(r.x);
  }
}

void print(const Expr& e, std::ostream& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          if (x.value < 0) out << '(' << x.value.get_str() << ')';
          else out << x.value.get_str();
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out << (x.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, UnitLit>) {
          out << "()";
        } else if constexpr (std::is_same_v<T, LocLit>) {
          out << "#loc" << x.loc.id;
        } else if constexpr (std::is_same_v<T, LblLit>) {
          out << "#lbl" << x.lbl.id;
        } else if constexpr (std::is_same_v<T, Var>) {
          out << x.name;
        } else if constexpr (std::is_same_v<T, Rec>) {
          if (x.f.empty()) {
            out << "fun ";
          } else {
            out << "rec " << x.f << ' ';
          }
          print_param(x, out);
          out << (x.f.empty() ? " -> " : " = ");
          print(x.body, out);
        } else if constexpr (std::is_same_v<T, App>) {
          const auto* fn = x.fn.template as<Rec>();
          if (fn && fn->f.empty() && !fn->param_type) {
            out << "let " << binder(fn->x) << " = ";
            print(x.arg, out);
            out << " in ";
            print(fn->body, out);
          } else {
            if (x.fn.template as<App>()) print(x.fn, out);
            else print_atom(x.fn, out);
            out << ' ';
            print_atom(x.arg, out);
          }
        } else if constexpr (std::is_same_v<T, BinOp>) {
          print_atom(x.lhs, out);
          out << ' ' << binop_symbol(x.op) << ' ';
          print_atom(x.rhs, out);
        } else if constexpr (std::is_same_v<T, If>) {
          out << "if ";
          print(x.cond, out);
          out << " then ";
          print(x.then_branch, out);
          out << " else ";
          print(x.else_branch, out);
        } else if constexpr (std::is_same_v<T, Pair>) {
          out << '(';
          print(x.first, out);
          out << ", ";
          print(x.second, out);
          out << ')';
        } else if constexpr (std::is_same_v<T, Fst>) {
          out << "fst ";
          print_atom(x.e, out);
        } else if constexpr (std::is_same_v<T, Snd>) {
          out << "snd ";
          print_atom(x.e, out);
        } else if constexpr (std::is_same_v<T, InjL>) {
          out << "inl ";
          print_atom(x.e, out);
        } else if constexpr (std::is_same_v<T, InjR>) {
          out << "inr ";
          print_atom(x.e, out);
        } else if constexpr (std::is_same_v<T, Case>) {
          out << "match ";
          print(x.scrutinee, out);
          out << " with ";
          auto arm = [&](const char* tag, const Expr& fn) {
            const auto* r = fn.template as<Rec>();
            if (r && r->f.empty()) {
              out << tag << ' ' << binder(r->x) << " => ";
              print(r->body, out);
            } else {
              out << tag << " v => ";
              print_atom(fn, out);
              out << " v";
            }
          };
          arm("inl", x.left_fn);
          out << " | ";
          arm("inr", x.right_fn);
          out << " end";
        } else if constexpr (std::is_same_v<T, Alloc>) {
          out << "ref ";
          print_atom(x.init, out);
        } else if constexpr (std::is_same_v<T, Load>) {
          out << '!';
          print_atom(x.loc, out);
        } else if constexpr (std::is_same_v<T, Store>) {
          print_atom(x.loc, out);
          out << " := ";
          print_atom(x.value, out);
        } else if constexpr (std::is_same_v<T, Faa>) {
          out << "faa ";
          print_atom(x.loc, out);
          out << ' ';
          print_atom(x.delta, out);
        } else if constexpr (std::is_same_v<T, Cas>) {
          out << "cas ";
          print_atom(x.loc, out);
          out << ' ';
          print_atom(x.expected, out);
          out << ' ';
          print_atom(x.desired, out);
        } else if constexpr (std::is_same_v<T, Rand>) {
          out << "rand ";
          print_atom(x.bound, out);
        } else if constexpr (std::is_same_v<T, RandLbl>) {
          out << "rand[";
          print(x.label, out);
          out << "] ";
          print_atom(x.bound, out);
        } else if constexpr (std::is_same_v<T, AllocTape>) {
          out << "alloctape ";
          print_atom(x.bound, out);
        } else if constexpr (std::is_same_v<T, Fork>) {
          out << "fork ";
          print_atom(x.body, out);
        }
      },
      e.node());
}

}  // namespace

std::vector<std::string> free_vars(const Expr& e) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(e, bound, out);
  return out;
}

Expr subst(const Expr& e, const std::string& x, const Val& v) { return subst_impl(e, x, v.expr()); }

Expr subst_expr(const Expr& e, const std::string& x, const Expr& replacement) {
  return subst_impl(e, x, replacement);
}

std::string to_source(const Expr& e) {
  std::ostringstream out;
  print(e, out);
  return out.str();
}

}  // namespace fox
