#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>

#include "fox/fisch.hpp"
#include "fox/fisch_check.hpp"

using namespace fox;
namespace b = fox::build;

namespace {

Config threads(std::vector<Expr> ts) { return Config{std::move(ts), State{}}; }

// chooses `picks[|history|]`, stops once the list is used up
FISch scripted(std::vector<nat> picks) {
  auto p = std::make_shared<const std::vector<nat>>(std::move(picks));
  return {[p](const FISchState& z) { return z.size() >= p->size(); },
          [p](const FISchState& z, const CfgPrime&) { return dret((*p)[z.size()]); }};
}

}  // namespace

TEST_CASE("fisch_step and fiexec basics") {
  Config rho = threads({b::binop(BinOpKind::Add, b::integer(1), b::integer(2)), b::rand(b::integer(1))});
  FISchState z{{strip(rho), 4}};
  CHECK(fisch_step(initialfisch(), z, rho) == dret(FIPoint(z, rho)));
  for (nat n : {0, 1, 6}) CHECK(fiexec(initialfisch(), n, z, rho) == dret(FIPoint(z, rho)));

  // hand trace: thread 1 samples, then thread 0 adds
  FISch phi = scripted({1, 0});
  for (const auto& [pt, w] : fisch_step(phi, {}, rho)) CHECK(pt.first.size() == 1);
  auto two = fiexec(phi, 2, {}, rho);
  CHECK(two.size() == 2);
  for (long k : {0, 1}) {
    Config mid = threads({rho.threads[0], b::integer(k)});
    Config end = threads({b::integer(3), b::integer(k)});
    FISchState h{{strip(rho), 1}, {strip(mid), 0}};
    CHECK(two(FIPoint(h, end)) == make_rat(1, 2));
  }
  CHECK(fiexec(phi, 0, {}, rho).empty());
  CHECK(fiexec(phi, 1, {}, rho).empty());
}

TEST_CASE("the eager step moves threads of final configurations") {
  Config fin = threads({b::integer(3), b::rand(b::integer(1))});
  auto d = fiexec(scripted({1}), 1, {}, fin);
  CHECK(d.size() == 2);
  CHECK(d.mass() == 1);
}

TEST_CASE("liftfisch") {
  Config rho = threads({b::rand(b::integer(2))});
  FISch phi = random_fisch(11, 3, 2);
  for (nat n = 0; n <= 4; ++n) CHECK(fiexec(liftfisch({}, phi), n, {}, rho) == fiexec(phi, n, {}, rho));
  FISchState z0{{strip(rho), 0}};
  FISch stopped = liftfisch(z0, initialfisch());
  CHECK(stopped.stops({}));
  CHECK(stopped.stops(z0));
  // histories that do not extend the prefix stop
  FISch lifted = liftfisch(z0, scripted({0, 0}));
  CHECK(lifted.stops(FISchState{{strip(rho), 1}}));
  CHECK(!lifted.stops(z0));
}

TEST_CASE("appfisch") {
  Config rho = threads({b::rand(b::integer(1)), b::rand(b::integer(2))});
  auto fam = [](const FISchState& p) { return random_fisch(p.size() + 5, 3, 3); };
  FISch direct = appfisch(initialfisch(), fam);
  for (nat n = 0; n <= 4; ++n)
    CHECK(fiexec(direct, n, {}, rho) == fiexec(liftfisch({}, fam({})), n, {}, rho));
  FISch phi = random_fisch(3, 3, 3);
  FISch same = appfisch(phi, [](const FISchState&) { return initialfisch(); });
  for (nat n = 0; n <= 5; ++n) CHECK(fiexec(same, n, {}, rho) == fiexec(phi, n, {}, rho));
}

TEST_CASE("consfisch") {
  Config rho = threads({b::rand(b::integer(1)), b::rand(b::integer(2))});
  FISch once = consfisch([](const CfgPrime&) { return dret(nat{0}); },
                         [](nat) { return initialfisch(); });
  auto d = fiexec(once, 5, {}, rho);
  CHECK(d.size() == 2);
  for (const auto& [pt, w] : d) {
    CHECK(pt.first == FISchState{{strip(rho), 0}});
    CHECK(pt.second.threads[1] == rho.threads[1]);
    CHECK(w == make_rat(1, 2));
  }

  // stutter past the pool: the history records a uniform n, the config is unchanged
  const nat big = 4;
  nat len = rho.threads.size();
  FISch stutter = consfisch(
      [len](const CfgPrime&) { return dmap([len](nat n) { return n + len; }, dunif(big)); },
      [](nat) { return initialfisch(); });
  auto s = fiexec(stutter, 1, {}, rho);
  CHECK(s.size() == big + 1);
  for (nat n = 0; n <= big; ++n)
    CHECK(s(FIPoint(FISchState{{strip(rho), n + len}}, rho)) == make_rat(1, static_cast<unsigned long>(big + 1)));
}

TEST_CASE("fisch_to_sch") {
  Config fin = threads({b::integer(4)});
  auto sch = fisch_to_sch(initialfisch());
  CHECK(exec(sch, 3, FISchState{}, fin) == dret(*Val::of(b::integer(4))));
  Config rho = threads({b::rand(b::integer(1))});
  FISch once = consfisch([](const CfgPrime&) { return dret(nat{0}); },
                         [](nat) { return initialfisch(); });
  auto e = exec(fisch_to_sch(once), 2, FISchState{}, rho);
  CHECK(e.mass() == 1);
  CHECK(e(*Val::of(b::integer(1))) == make_rat(1, 2));
}

TEST_CASE("consistency: stopping depends on the history alone") {
  auto pool = fisch_test_configs();
  std::vector<FISch> fs = {initialfisch(), random_fisch(1, 3, 3),
                           liftfisch(FISchState{{strip(pool[0]), 1}}, random_fisch(2, 2, 3)),
                           appfisch(random_fisch(4, 2, 3), [](const FISchState& p) {
                             return random_fisch(p.size() + 9, p.size() + 2, 3);
                           }),
                           consfisch([](const CfgPrime&) { return dunif(2); },
                                     [](nat j) { return random_fisch(j, 2, 3); })};
  for (const auto& f : fs) {
    for (const auto& a : pool)
      for (nat len = 0; len <= 3; ++len) {
        FISchState z;
        for (nat i = 0; i < len; ++i) z.emplace_back(strip(pool[(i * 5 + len) % pool.size()]), i % 3);
        bool none = !f.transition(z, a).has_value();
        for (const auto& other : pool) CHECK(none == !f.transition(z, other).has_value());
      }
  }
}

TEST_CASE("lemma validation over 200 random table FISches at depth <= 6") {
  auto t0 = std::chrono::steady_clock::now();
  FischValidation v = validate_fisch_lemmas(200, 6);
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& c : v.checks) {
    CAPTURE(c.property);
    CAPTURE(c.first_failure);
    CHECK(c.failures == 0);
    CHECK(c.nontrivial > 0);
  }
  CHECK(v.checks.size() == 7);
  CHECK(v.checks[0].instances >= 200);
  CHECK(secs < 120);
}

TEST_CASE("the lift check is sensitive: dropping the prefix breaks the equation") {
  Config rho = threads({b::rand(b::integer(1))});
  FISchState z0{{strip(rho), 2}};
  FISch phi = scripted({0});
  auto with_prefix = fiexec(liftfisch(z0, phi), 1, z0, rho);
  auto without = fiexec(phi, 1, {}, rho);
  CHECK(!(with_prefix == without));
  CHECK(with_prefix.mass() == without.mass());
}
