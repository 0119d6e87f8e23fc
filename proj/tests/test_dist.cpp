#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fox/dist.hpp"
#include "support/gen.hpp"

using namespace fox;
using foxtest::random_dist;
using foxtest::Rng;

namespace {

auto arrow(std::uint64_t seed) { return foxtest::random_arrow(seed); }

}  // namespace

TEST_CASE("rationals are canonical") {
  Rat r = make_rat(2, 4);
  CHECK(to_fraction(r) == "1/2");
  CHECK(to_fraction(Rat(1)) == "1/1");
  CHECK(to_string(Rat(0)) == "0");
  CHECK(parse_rat("-3/6") == make_rat(-1, 2));
  CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("x"), std::invalid_argument);
}

TEST_CASE("dret, dzero and dunif") {
  auto d = dret(7L);
  CHECK(d.size() == 1);
  CHECK(d(7) == 1);
  CHECK(mass(d) == 1);
  CHECK(mass(dzero<int>()) == 0);
  CHECK(!(dzero<long>() == dret(0L)));
  CHECK(dunif(0) == dret(nat{0}));
  auto u1 = dunif(1);
  CHECK(u1(0) == make_rat(1, 2));
  CHECK(u1(1) == make_rat(1, 2));
  CHECK(mass(dunif(31)) == 1);
}

TEST_CASE("dbind and dmap examples") {
  auto b = dbind([](nat n) { return dret(n + 1); }, dunif(1));
  CHECK(b == Dist<nat>::from_entries({{1, make_rat(1, 2)}, {2, make_rat(1, 2)}}));
  CHECK(dbind([](nat) { return dzero<nat>(); }, dunif(3)).empty());
  CHECK(dbind([](nat) { return dunif(1); }, dunif(1)) == dunif(1));
  CHECK(dbind([](nat n) { return dret(n); }, dzero<nat>()).empty());
  auto m = dmap([](nat n) { return n % 2; }, dunif(3));
  CHECK(m == dunif(1));
  CHECK(dmap([](nat n) { return n; }, dunif(5)) == dunif(5));
}

TEST_CASE("expect and mass") {
  CHECK(expect(dunif(1), [](nat n) { return Rat(static_cast<long>(n)); }) == make_rat(1, 2));
  CHECK(expect(dunif(3), [](nat n) { return n == 0 ? Rat(1) : Rat(0); }) == make_rat(1, 4));
  auto d = Dist<int>::from_entries({{0, make_rat(1, 4)}, {1, make_rat(1, 4)}});
  CHECK(mass(d) == make_rat(1, 2));
  CHECK(expect(d, [](int) { return Rat(1); }) == mass(d));
  CHECK_THROWS_AS(expect(dunif(1), [](nat) { return Rat(2); }), std::domain_error);
}

TEST_CASE("invariants on construction") {
  CHECK_THROWS_AS((Dist<int>::from_entries({{0, make_rat(3, 4)}, {1, make_rat(1, 2)}})),
                  std::invalid_argument);
  CHECK_THROWS_AS((Dist<int>::from_entries({{0, make_rat(-1, 4)}})), std::invalid_argument);
  Dist<int> d;
  d.add(1, make_rat(1, 3));
  d.add(1, make_rat(-1, 3));
  CHECK(d.empty());  // zero weights are never stored
}

TEST_CASE("monad laws on 500 random instances") {
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng r(i);
    auto mu = random_dist(r);
    auto f = arrow(2 * i + 1);
    auto g = arrow(2 * i + 2);
    long a = static_cast<long>(r.below(6));
    CAPTURE(i);
    CHECK(dbind(f, dret(a)) == f(a));
    CHECK(dbind([](long x) { return dret(x); }, mu) == mu);
    CHECK(dbind(g, dbind(f, mu)) == dbind([&](long x) { return dbind(g, f(x)); }, mu));
    auto bound = dbind(f, mu);
    CHECK(mass(bound) <= mass(mu));
  }
}

TEST_CASE("mass equality under bind iff the arrow is total on the support") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng r(10000 + i);
    auto mu = random_dist(r);
    auto f = arrow(i + 77);
    bool total = true;
    for (const auto& [a, w] : mu) total = total && mass(f(a)) == 1;
    CHECK((mass(dbind(f, mu)) == mass(mu)) == total);
  }
}
