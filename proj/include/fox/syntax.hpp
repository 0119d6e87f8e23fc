#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fox {

struct Loc {
  std::uint64_t id = 0;
  auto operator<=>(const Loc&) const = default;
};

struct Lbl {
  std::uint64_t id = 0;
  auto operator<=>(const Lbl&) const = default;
};

// ---------------------------------------------------------------------------
// Types (monomorphic fragment plus inference variables)

struct TypeNode;

class Type {
 public:
  enum class Kind { Unit, Bool, Nat, Int, Tape, Prod, Sum, Arrow, Ref, Var };

  static Type unit();
  static Type boolean();
  static Type nat();
  static Type integer();
  static Type tape();
  static Type prod(Type a, Type b);
  static Type sum(Type a, Type b);
  static Type arrow(Type a, Type b);
  static Type ref(Type a);
  // Inference variable; `numeric` restricts it to nat or int.
  static Type var(std::uint32_t id, bool numeric);

  Kind kind() const;
  const Type& arg(std::size_t i) const;
  std::uint32_t var_id() const;
  bool numeric() const;

  friend bool operator==(const Type& a, const Type& b);
  std::string str() const;

 private:
  explicit Type(std::shared_ptr<const TypeNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TypeNode> node_;
};

// ---------------------------------------------------------------------------
// Expressions

enum class BinOpKind { Add, Sub, Mul, Mod, Eq, Lt, Le };

const char* binop_symbol(BinOpKind op);

struct NodeBox;

/// Immutable, structurally shared expression tree.
class Expr {
 public:
  Expr() = default;

  template <class T>
  const T* as() const;
  const struct Node& node() const;

  bool is_value() const;
  bool valid() const { return static_cast<bool>(box_); }

  /// Identity comparison; a fast path for structural equality.
  bool same(const Expr& other) const { return box_ == other.box_; }

  friend std::strong_ordering compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
  friend bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

  static Expr make(struct Node n);

 private:
  std::shared_ptr<const NodeBox> box_;
};

struct IntLit { mpz_class value; };
struct BoolLit { bool value; };
struct UnitLit {};
struct LocLit { Loc loc; };
struct LblLit { Lbl lbl; };
struct Var { std::string name; };
/// rec f x. body ; an empty name means the binder is anonymous.
struct Rec {
  std::string f;
  std::string x;
  Expr body;
  std::optional<Type> param_type;
};
struct App { Expr fn; Expr arg; };
struct BinOp { BinOpKind op; Expr lhs; Expr rhs; };
struct If { Expr cond; Expr then_branch; Expr else_branch; };
struct Pair { Expr first; Expr second; };
struct Fst { Expr e; };
struct Snd { Expr e; };
struct InjL { Expr e; };
struct InjR { Expr e; };
/// case s of inl => left_fn | inr => right_fn ; the arms are applied to the payload.
struct Case { Expr scrutinee; Expr left_fn; Expr right_fn; };
struct Alloc { Expr init; };
struct Load { Expr loc; };
struct Store { Expr loc; Expr value; };
struct Faa { Expr loc; Expr delta; };
struct Cas { Expr loc; Expr expected; Expr desired; };
struct Rand { Expr bound; };
struct RandLbl { Expr label; Expr bound; };
struct AllocTape { Expr bound; };
struct Fork { Expr body; };

struct Node
    : std::variant<IntLit, BoolLit, UnitLit, LocLit, LblLit, Var, Rec, App, BinOp, If, Pair, Fst,
                   Snd, InjL, InjR, Case, Alloc, Load, Store, Faa, Cas, Rand, RandLbl, AllocTape,
                   Fork> {
  using variant::variant;
};

struct NodeBox {
  Node node;
  bool value;
};

inline const Node& Expr::node() const { return box_->node; }
inline bool Expr::is_value() const { return box_->value; }

template <class T>
const T* Expr::as() const {
  return std::get_if<T>(&box_->node);
}

// Builders.
namespace build {
Expr integer(const mpz_class& v);
Expr integer(long v);
Expr boolean(bool b);
Expr unit();
Expr loc(Loc l);
Expr lbl(Lbl l);
Expr var(std::string name);
Expr rec(std::string f, std::string x, Expr body, std::optional<Type> param_type = std::nullopt);
Expr lam(std::string x, Expr body);
Expr app(Expr fn, Expr arg);
Expr binop(BinOpKind op, Expr lhs, Expr rhs);
Expr if_(Expr c, Expr t, Expr e);
Expr pair(Expr a, Expr b);
Expr fst(Expr e);
Expr snd(Expr e);
Expr inj_l(Expr e);
Expr inj_r(Expr e);
Expr case_(Expr s, Expr l, Expr r);
Expr alloc(Expr e);
Expr load(Expr e);
Expr store(Expr l, Expr v);
Expr faa(Expr l, Expr d);
Expr cas(Expr l, Expr a, Expr b);
Expr rand(Expr bound);
Expr rand_lbl(Expr label, Expr bound);
Expr alloc_tape(Expr bound);
Expr fork(Expr body);
Expr let(std::string x, Expr bound, Expr body);
Expr seq(Expr first, Expr second);
}  // namespace build

/// A closed expression satisfying is_value().
class Val {
 public:
  static std::optional<Val> of(Expr e) {
    if (!e.valid() || !e.is_value()) return std::nullopt;
    return Val(std::move(e));
  }
  const Expr& expr() const { return e_; }
  operator const Expr&() const { return e_; }  // NOLINT: values embed into expressions

  friend std::strong_ordering compare(const Val& a, const Val& b) { return compare(a.e_, b.e_); }
  friend bool operator==(const Val& a, const Val& b) { return a.e_ == b.e_; }
  friend bool operator<(const Val& a, const Val& b) { return a.e_ < b.e_; }

 private:
  explicit Val(Expr e) : e_(std::move(e)) {}
  Expr e_;
};

/// Unboxed values: literals, locations and labels (no pairs, sums or closures).
bool is_unboxed(const Expr& v);

/// True if the value contains a closure anywhere inside.
bool contains_closure(const Expr& v);

/// Concrete syntax; locations and labels print as #loc<n> / #lbl<n>.
std::string to_source(const Expr& e);

/// Direct subexpressions in declaration order (Rec exposes its body, Case
/// all three parts).
std::vector<Expr> children(const Expr& e);

/// Copy of `e` with child `index` (as numbered by children()) replaced.
Expr replace_child(const Expr& e, std::size_t index, Expr child);

/// Number of AST nodes.
std::size_t size(const Expr& e);

/// Free variables, in first-occurrence order without duplicates.
std::vector<std::string> free_vars(const Expr& e);

/// Capture-avoiding substitution of a closed value.
Expr subst(const Expr& e, const std::string& x, const Val& v);

/// Substitution of an arbitrary expression whose free variables are never
/// bound inside `e` (closed `def` bodies, desugaring with reserved names).
Expr subst_expr(const Expr& e, const std::string& x, const Expr& replacement);

}  // namespace fox
