#pragma once

// Seeded generators shared by the unit tests and the acceptance binary.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fox/coupling.hpp"
#include "fox/dist.hpp"
#include "fox/sched.hpp"
#include "fox/syntax.hpp"

namespace foxtest {

using fox::Dist;
using fox::Expr;
using fox::nat;
using fox::Rat;

struct Rng {
  fox::SplitMix64 s;
  explicit Rng(std::uint64_t seed) : s{seed} {}
  std::uint64_t next() { return s.next(); }
  nat below(nat n) { return n == 0 ? 0 : next() % n; }
  bool coin() { return next() & 1U; }
};

/// Subdistribution over small integers with random dyadic-free weights.
inline Dist<long> random_dist(Rng& r, nat max_support = 4, long key_range = 6) {
  nat k = 1 + r.below(max_support);
  std::vector<std::pair<long, nat>> raw;
  nat total = 0;
  for (nat i = 0; i < k; ++i) {
    long key = static_cast<long>(r.below(static_cast<nat>(key_range)));
    nat w = 1 + r.below(6);
    raw.emplace_back(key, w);
    total += w;
  }
  // total mass 1 or a random fraction below it
  nat denom = r.coin() ? total : total + r.below(4);
  Dist<long> d;
  for (const auto& [key, w] : raw) d.add(key, fox::make_rat(static_cast<long>(w), denom));
  return d;
}

/// Random closed term; not necessarily well typed.
inline Expr random_term(Rng& r, int depth, std::vector<std::string> scope = {}) {
  namespace b = fox::build;
  auto leaf = [&]() -> Expr {
    switch (r.below(scope.empty() ? 4 : 6)) {
      case 0: return b::integer(static_cast<long>(r.below(5)));
      case 1: return b::boolean(r.coin());
      case 2: return b::unit();
      case 3: return b::rand(b::integer(static_cast<long>(r.below(3))));
      default: return b::var(scope[r.below(scope.size())]);
    }
  };
  if (depth <= 0) return leaf();
  auto sub = [&](std::vector<std::string> sc = {}) {
    if (sc.empty()) sc = scope;
    return random_term(r, depth - 1, sc);
  };
  switch (r.below(16)) {
    case 0: return leaf();
    case 1: return b::binop(static_cast<fox::BinOpKind>(r.below(7)), sub(), sub());
    case 2: return b::if_(sub(), sub(), sub());
    case 3: return b::pair(sub(), sub());
    case 4: return r.coin() ? b::fst(sub()) : b::snd(sub());
    case 5: {
      std::string x = "x" + std::to_string(depth);
      auto inner = scope;
      inner.push_back(x);
      return b::app(b::lam(x, random_term(r, depth - 1, inner)), sub());
    }
    case 6: return b::alloc(sub());
    case 7: return b::load(sub());
    case 8: return b::store(sub(), sub());
    case 9: return b::faa(sub(), sub());
    case 10: return b::cas(sub(), sub(), sub());
    case 11: return b::rand(sub());
    case 12: return b::fork(sub());
    case 13: return r.coin() ? b::inj_l(sub()) : b::inj_r(sub());
    case 14: {
      std::string x = "y" + std::to_string(depth);
      auto inner = scope;
      inner.push_back(x);
      return b::case_(sub(), b::lam(x, random_term(r, depth - 1, inner)),
                      b::lam(x, random_term(r, depth - 1, inner)));
    }
    default: return b::alloc_tape(sub());
  }
}

/// A random Kleisli arrow, fixed by its seed.
inline std::function<Dist<long>(const long&)> random_arrow(std::uint64_t seed) {
  return [seed](const long& a) {
    Rng r(seed * 1000003 + static_cast<std::uint64_t>(a));
    return random_dist(r);
  };
}

/// Each support pair with probability 1/2.
template <class A, class B>
std::set<std::pair<A, B>> dense_rel(Rng& r, const Dist<A>& mu1, const Dist<B>& mu2) {
  std::set<std::pair<A, B>> rel;
  for (const auto& [a, wa] : mu1)
    for (const auto& [b, wb] : mu2)
      if (r.coin()) rel.emplace(a, b);
  return rel;
}

inline std::set<std::pair<long, long>> random_rel(Rng& r, long range = 6) {
  std::set<std::pair<long, long>> rel;
  nat k = r.below(10);
  for (nat i = 0; i < k; ++i)
    rel.emplace(static_cast<long>(r.below(static_cast<nat>(range))),
                static_cast<long>(r.below(static_cast<nat>(range))));
  return rel;
}

struct ComposeInstance {
  fox::ComposeOutcome outcome;
  bool informative;  // the bound eps + E[err] is below the composed mass
};

/// One composition-lemma instance: eps and err are the oracle minima, so the
/// premises hold by construction (compose_check re-verifies them).
inline ComposeInstance random_compose_instance(std::uint64_t seed) {
  Rng r(seed * 31 + 9);
  auto mu1 = random_dist(r, 4);
  auto mu2 = random_dist(r, 4);
  auto rel = dense_rel(r, mu1, mu2);
  auto rel2 = random_rel(r, 4);
  for (long x = 0; x < 6; ++x)
    if (r.coin()) rel2.emplace(x, x);
  auto f = random_arrow(r.next());
  auto g = random_arrow(r.next());
  Rat eps = fox::arcoupl_subset_oracle(mu1, mu2, rel);
  std::map<long, Rat> err_of;
  for (const auto& [a, b] : rel) {
    Rat e = fox::arcoupl_subset_oracle(f(a), g(b), rel2);
    auto [it, fresh] = err_of.emplace(b, e);
    if (!fresh && e > it->second) it->second = e;
  }
  std::function<Rat(const long&)> err = [err_of](const long& b) {
    auto it = err_of.find(b);
    return it == err_of.end() ? Rat(0) : it->second;
  };
  auto out = fox::compose_check(mu1, mu2, f, g, rel, rel2, eps, err);
  return {out, eps + fox::expect(mu2, err) < fox::mass(fox::dbind(f, mu1))};
}

}  // namespace foxtest
