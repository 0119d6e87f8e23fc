#include "fox/typecheck.hpp"

#include <functional>
#include <vector>

namespace fox {

namespace {

class Inference {
 public:
  Type fresh(bool numeric = false) {
    std::uint32_t id = static_cast<std::uint32_t>(binding_.size());
    binding_.emplace_back(std::nullopt);
    numeric_.push_back(numeric);
    return Type::var(id, numeric);
  }

  // Follows variable bindings at the top level only.
  Type resolve(Type t) const {
    while (t.kind() == Type::Kind::Var && binding_[t.var_id()]) t = *binding_[t.var_id()];
    return t;
  }

  Type zonk(const Type& t) const {
    Type r = resolve(t);
    switch (r.kind()) {
      case Type::Kind::Var:
        return numeric_[r.var_id()] ? Type::integer() : Type::unit();
      case Type::Kind::Prod: return Type::prod(zonk(r.arg(0)), zonk(r.arg(1)));
      case Type::Kind::Sum: return Type::sum(zonk(r.arg(0)), zonk(r.arg(1)));
      case Type::Kind::Arrow: return Type::arrow(zonk(r.arg(0)), zonk(r.arg(1)));
      case Type::Kind::Ref: return Type::ref(zonk(r.arg(0)));
      default: return r;
    }
  }

  void unify(const Type& a0, const Type& b0, const Expr& where) {
    Type a = resolve(a0);
    Type b = resolve(b0);
    if (a.kind() == Type::Kind::Var && b.kind() == Type::Kind::Var && a.var_id() == b.var_id())
      return;
    if (a.kind() != Type::Kind::Var && b.kind() == Type::Kind::Var) std::swap(a, b);
    if (a.kind() == Type::Kind::Var) {
      std::uint32_t id = a.var_id();
      if (b.kind() == Type::Kind::Var) {
        numeric_[b.var_id()] = numeric_[b.var_id()] || numeric_[id];
      } else {
        if (numeric_[id] && b.kind() != Type::Kind::Nat && b.kind() != Type::Kind::Int)
          mismatch("a number", b, where);
        if (occurs(id, b)) mismatch("a finite type", b, where);
      }
      binding_[id] = b;
      return;
    }
    if (a.kind() != b.kind()) mismatch(zonk(a).str(), b, where);
    switch (a.kind()) {
      case Type::Kind::Prod:
      case Type::Kind::Sum:
      case Type::Kind::Arrow:
        unify(a.arg(0), b.arg(0), where);
        unify(a.arg(1), b.arg(1), where);
        break;
      case Type::Kind::Ref: unify(a.arg(0), b.arg(0), where); break;
      default: break;
    }
  }

  Type infer(std::map<std::string, Type>& env, const Expr& e) {
    return std::visit(
        [&](const auto& x) -> Type {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return x.value >= 0 ? fresh(true) : Type::integer();
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return Type::boolean();
          } else if constexpr (std::is_same_v<T, UnitLit>) {
            return Type::unit();
          } else if constexpr (std::is_same_v<T, LocLit>) {
            return Type::ref(fresh());
          } else if constexpr (std::is_same_v<T, LblLit>) {
            return Type::tape();
          } else if constexpr (std::is_same_v<T, Var>) {
            auto it = env.find(x.name);
            if (it == env.end()) throw TypeError("unbound variable: " + x.name);
            return it->second;
          } else if constexpr (std::is_same_v<T, Rec>) {
            Type arg = x.param_type ? *x.param_type : fresh();
            Type res = fresh();
            Type fn = Type::arrow(arg, res);
            auto saved = env;
            if (!x.f.empty()) env.insert_or_assign(x.f, fn);
            if (!x.x.empty()) env.insert_or_assign(x.x, arg);
            Type body = infer(env, x.body);
            env = std::move(saved);
            unify(res, body, x.body);
            return fn;
          } else if constexpr (std::is_same_v<T, App>) {
            Type fn = infer(env, x.fn);
            Type arg = infer(env, x.arg);
            Type res = fresh();
            unify(fn, Type::arrow(arg, res), e);
            return res;
          } else if constexpr (std::is_same_v<T, BinOp>) {
            Type l = infer(env, x.lhs);
            Type r = infer(env, x.rhs);
            if (x.op == BinOpKind::Eq) {
              unify(l, r, e);
              return Type::boolean();
            }
            Type n = fresh(true);
            unify(n, l, x.lhs);
            unify(n, r, x.rhs);
            if (x.op == BinOpKind::Lt || x.op == BinOpKind::Le) return Type::boolean();
            return n;
          } else if constexpr (std::is_same_v<T, If>) {
            unify(Type::boolean(), infer(env, x.cond), x.cond);
            Type a = infer(env, x.then_branch);
            unify(a, infer(env, x.else_branch), x.else_branch);
            return a;
          } else if constexpr (std::is_same_v<T, Pair>) {
            Type a = infer(env, x.first);
            return Type::prod(a, infer(env, x.second));
          } else if constexpr (std::is_same_v<T, Fst> || std::is_same_v<T, Snd>) {
            Type a = fresh();
            Type b = fresh();
            unify(Type::prod(a, b), infer(env, x.e), x.e);
            return std::is_same_v<T, Fst> ? a : b;
          } else if constexpr (std::is_same_v<T, InjL>) {
            return Type::sum(infer(env, x.e), fresh());
          } else if constexpr (std::is_same_v<T, InjR>) {
            return Type::sum(fresh(), infer(env, x.e));
          } else if constexpr (std::is_same_v<T, Case>) {
            Type a = fresh();
            Type b = fresh();
            Type r = fresh();
            unify(Type::sum(a, b), infer(env, x.scrutinee), x.scrutinee);
            unify(Type::arrow(a, r), infer(env, x.left_fn), x.left_fn);
            unify(Type::arrow(b, r), infer(env, x.right_fn), x.right_fn);
            return r;
          } else if constexpr (std::is_same_v<T, Alloc>) {
            return Type::ref(infer(env, x.init));
          } else if constexpr (std::is_same_v<T, Load>) {
            Type a = fresh();
            unify(Type::ref(a), infer(env, x.loc), x.loc);
            return a;
          } else if constexpr (std::is_same_v<T, Store>) {
            Type v = infer(env, x.value);
            unify(Type::ref(v), infer(env, x.loc), x.loc);
            return Type::unit();
          } else if constexpr (std::is_same_v<T, Faa>) {
            Type n = fresh(true);
            unify(n, infer(env, x.delta), x.delta);
            unify(Type::ref(n), infer(env, x.loc), x.loc);
            return n;
          } else if constexpr (std::is_same_v<T, Cas>) {
            Type a = infer(env, x.expected);
            unify(a, infer(env, x.desired), x.desired);
            unify(Type::ref(a), infer(env, x.loc), x.loc);
            return Type::boolean();
          } else if constexpr (std::is_same_v<T, Rand>) {
            unify(fresh(true), infer(env, x.bound), x.bound);
            return fresh(true);
          } else if constexpr (std::is_same_v<T, RandLbl>) {
            unify(fresh(true), infer(env, x.bound), x.bound);
            unify(Type::tape(), infer(env, x.label), x.label);
            return fresh(true);
          } else if constexpr (std::is_same_v<T, AllocTape>) {
            unify(fresh(true), infer(env, x.bound), x.bound);
            return Type::tape();
          } else {
            static_assert(std::is_same_v<T, Fork>);
            infer(env, x.body);
            return Type::unit();
          }
        },
        e.node());
  }

 private:
  std::vector<std::optional<Type>> binding_;
  std::vector<bool> numeric_;

  bool occurs(std::uint32_t id, const Type& t) const {
    Type r = resolve(t);
    if (r.kind() == Type::Kind::Var) return r.var_id() == id;
    switch (r.kind()) {
      case Type::Kind::Prod:
      case Type::Kind::Sum:
      case Type::Kind::Arrow: return occurs(id, r.arg(0)) || occurs(id, r.arg(1));
      case Type::Kind::Ref: return occurs(id, r.arg(0));
      default: return false;
    }
  }

  [[noreturn]] void mismatch(const std::string& want, const Type& got, const Expr& where) const {
    std::string src = to_source(where);
    if (src.size() > 60) src = src.substr(0, 57) + "...";
    throw TypeError("type mismatch: expected " + want + ", got " + zonk(got).str() + " in `" +
                    src + "`");
  }
};

}  // namespace

Type typecheck(const TypeContext& ctx, const Expr& e) {
  Inference inf;
  std::map<std::string, Type> env(ctx.begin(), ctx.end());
  Type t = inf.infer(env, e);
  return inf.zonk(t);
}

}  // namespace fox
