#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fox/parse.hpp"
#include "fox/sched.hpp"
#include "fox/semantics.hpp"
#include "fox/typecheck.hpp"
#include "support/gen.hpp"

using namespace fox;
namespace b = fox::build;

namespace {

Val val(Expr e) { return *Val::of(std::move(e)); }

bool mentions_tapes(const Expr& e) {
  if (e.as<AllocTape>() || e.as<RandLbl>() || e.as<LblLit>()) return true;
  for (const auto& c : children(e))
    if (mentions_tapes(c)) return true;
  return false;
}

State with_tape(nat bound, std::vector<nat> contents) {
  State s;
  s.tapes[Lbl{0}] = Tape{bound, std::move(contents)};
  return s;
}

}  // namespace

TEST_CASE("parse: literals, sugar and errors") {
  CHECK(parse("if true then 1 else 2") == b::if_(b::boolean(true), b::integer(1), b::integer(2)));
  CHECK(parse("let x = rand 7 in x") == b::app(b::rec("", "x", b::var("x")), b::rand(b::integer(7))));
  CHECK(parse("# comment\n()") == b::unit());
  CHECK_THROWS_AS(parse("let x = in 3"), ParseError);
  CHECK_THROWS_AS(parse("x"), std::exception);
  CHECK_THROWS_AS(parse("rand[#lbl0] 1"), ParseError);
  try {
    parse("1 +\n  )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse: def bindings are substituted") {
  Expr e = parse("def two = 2;;\ndef add a b = a + b;;\nadd two 3");
  SupResult r = sup_value_mass(10, initial_config(e), [](const Val& v) { return v.expr() == b::integer(5); });
  CHECK(r.value == 1);
}

TEST_CASE("parallel composition desugars to a fork/join template with the pair semantics") {
  Expr par = parse("rand 1 ||| rand 1");
  Expr pair = parse("(rand 1, rand 1)");
  CHECK(!(par == pair));
  for (long x : {0, 1})
    for (long y : {0, 1}) {
      Expr k = b::pair(b::integer(x), b::integer(y));
      auto is_k = [&](const Val& v) { return v.expr() == k; };
      SupResult a = sup_value_mass(20, initial_config(par), is_k);
      SupResult c = sup_value_mass(20, initial_config(pair), is_k);
      CHECK(a.value == make_rat(1, 4));
      CHECK(c.value == make_rat(1, 4));
    }
}

TEST_CASE("typecheck") {
  CHECK(typecheck(parse("fun _ -> let (x, y) = (rand 7 ||| rand 31) in x * 32 + y")) ==
        Type::arrow(Type::unit(), Type::integer()));
  CHECK_THROWS_AS(typecheck(parse("1 + true")), TypeError);
  CHECK(typecheck(parse("fun (l : ref nat) -> ()")) ==
        Type::arrow(Type::ref(Type::nat()), Type::unit()));
  CHECK_THROWS_AS(parse("fun (x : forall a. a) -> x"), UnsupportedFragment);
  CHECK_THROWS_AS(parse("fun (x : 'a) -> x"), UnsupportedFragment);
  CHECK(typecheck(parse("let l = alloctape 3 in rand[l] 3")) == Type::integer());
}

TEST_CASE("substitution is capture avoiding") {
  Val three = val(b::integer(3));
  CHECK(subst(b::var("x"), "x", three) == b::integer(3));
  Expr body = b::binop(BinOpKind::Add, b::var("x"), b::var("y"));
  CHECK(subst(b::rec("f", "y", body), "x", three) ==
        b::rec("f", "y", b::binop(BinOpKind::Add, b::integer(3), b::var("y"))));
  Expr shadow = b::rec("f", "x", b::var("x"));
  CHECK(subst(shadow, "x", three) == shadow);
  Expr self = b::rec("x", "y", b::var("x"));
  CHECK(subst(self, "x", three) == self);
}

TEST_CASE("decompose follows right-to-left order") {
  Expr id = b::lam("x", b::var("x"));
  auto d = decompose(b::app(id, b::rand(b::integer(1))));
  REQUIRE(d);
  CHECK(d->second == b::rand(b::integer(1)));
  CHECK(!decompose(b::integer(3)));
  auto p = decompose(b::pair(b::rand(b::integer(1)), b::rand(b::integer(2))));
  REQUIRE(p);
  CHECK(p->second == b::rand(b::integer(2)));
}

TEST_CASE("head_step rules") {
  State s;
  auto r = head_step(b::rand(b::integer(1)), s);
  CHECK(r.size() == 2);
  CHECK(r(StepOutcome{b::integer(0), s, {}}) == make_rat(1, 2));
  CHECK(r(StepOutcome{b::integer(1), s, {}}) == make_rat(1, 2));

  auto f = head_step(b::fork(b::rand(b::integer(1))), s);
  CHECK(f == dret(StepOutcome{b::unit(), s, {b::rand(b::integer(1))}}));

  State t = with_tape(1, {1, 0});
  auto popped = head_step(b::rand_lbl(b::lbl(Lbl{0}), b::integer(1)), t);
  CHECK(popped == dret(StepOutcome{b::integer(1), with_tape(1, {0}), {}}));

  // bound mismatch: unlabelled sampling, tape untouched
  State m = with_tape(2, {1});
  auto mis = head_step(b::rand_lbl(b::lbl(Lbl{0}), b::integer(1)), m);
  CHECK(mis.size() == 2);
  CHECK(mis(StepOutcome{b::integer(0), m, {}}) == make_rat(1, 2));

  auto alloc = head_step(b::alloc_tape(b::integer(4)), s);
  REQUIRE(alloc.size() == 1);
  const StepOutcome& o = alloc.begin()->first;
  REQUIRE(o.expr.as<LblLit>());
  CHECK(o.state.tapes.at(o.expr.as<LblLit>()->lbl) == Tape{4, {}});

  State h;
  h.heap.emplace(Loc{0}, val(b::integer(5)));
  auto faa = head_step(b::faa(b::loc(Loc{0}), b::integer(2)), h);
  REQUIRE(faa.size() == 1);
  CHECK(faa.begin()->first.expr == b::integer(5));
  CHECK(faa.begin()->first.state.heap.at(Loc{0}) == val(b::integer(7)));

  CHECK(head_step(b::rand(b::integer(-1)), s).empty());
  CHECK(head_step(b::if_(b::integer(1), b::unit(), b::unit()), s).empty());
}

TEST_CASE("step refills the context; stuck steps lose mass") {
  State s;
  auto d = step(b::binop(BinOpKind::Add, b::integer(1), b::rand(b::integer(1))), s);
  CHECK(d(StepOutcome{b::binop(BinOpKind::Add, b::integer(1), b::integer(0)), s, {}}) == make_rat(1, 2));
  CHECK(d(StepOutcome{b::binop(BinOpKind::Add, b::integer(1), b::integer(1)), s, {}}) == make_rat(1, 2));
  CHECK(step(b::load(b::loc(Loc{3})), s).empty());
}

TEST_CASE("labelled rand on an empty tape equals unlabelled rand") {
  for (nat n : {0, 1, 3, 7}) {
    State s = with_tape(n, {});
    auto lab = step(b::rand_lbl(b::lbl(Lbl{0}), b::integer(static_cast<long>(n))), s);
    auto plain = step(b::rand(b::integer(static_cast<long>(n))), s);
    CHECK(lab == plain);
  }
}

TEST_CASE("decompose/fill round trip, step mass and tape erasure on 500 random closed terms") {
  nat redexes = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    foxtest::Rng r(i + 1);
    Expr e = foxtest::random_term(r, 4);
    CAPTURE(to_source(e));
    CHECK(free_vars(e).empty());
    auto d = decompose(e);
    CHECK(d.has_value() == !e.is_value());
    if (!d) continue;
    ++redexes;
    CHECK(fill(d->first, d->second) == e);
    State s = with_tape(2, {1});
    s.heap.emplace(Loc{0}, val(b::integer(1)));
    auto st = step(e, s);
    Rat m = st.mass();
    CHECK((m == 0 || m == 1));
    CHECK((m == 1) == reducible(e, s));
    if (!mentions_tapes(e))
      for (const auto& [o, w] : st) CHECK(o.state.tapes == s.tapes);
  }
  CHECK(redexes > 300);
}
