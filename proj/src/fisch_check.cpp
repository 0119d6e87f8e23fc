#include "fox/fisch_check.hpp"

#include <stdexcept>

#include "fox/parse.hpp"
#include "fox/typecheck.hpp"

namespace fox {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 r{a ^ (b * 0x9e3779b97f4a7c15ULL)};
  return r.next();
}

Expr program(const std::string& src) {
  Expr e = parse(src);
  typecheck(e);
  return e;
}

Config threads_config(const std::vector<std::string>& srcs) {
  Config c;
  for (const auto& s : srcs) c.threads.push_back(program(s));
  return c;
}

// first-outcome run of thread 0 until the predicate holds
template <class P>
Config advance_until(Config c, P done, nat max_steps = 50) {
  for (nat k = 0; k < max_steps && !done(c); ++k) {
    auto d = fi_tp_step(c, 0);
    if (d.empty()) break;
    c = d.begin()->first;
  }
  if (!done(c)) throw std::logic_error("advance_until: predicate not reached");
  return c;
}

FISchState random_history(std::uint64_t seed, const std::vector<Config>& pool, nat len) {
  FISchState z;
  for (nat i = 0; i < len; ++i) {
    std::uint64_t h = mix(seed, i + 1);
    z.emplace_back(strip(pool[h % pool.size()]), (h >> 32) % 4);
  }
  return z;
}

FISchState prepend(const FISchState& z0, const FISchState& z) {
  FISchState out = z0;
  out.insert(out.end(), z.begin(), z.end());
  return out;
}

std::string describe(const std::string& what, std::uint64_t inst, nat n) {
  return what + " (instance " + std::to_string(inst) + ", depth " + std::to_string(n) + ")";
}

template <class T>
bool pointwise_le(const Dist<T>& a, const Dist<T>& b) {
  for (const auto& [x, w] : a)
    if (w > b(x)) return false;
  return true;
}

}  // namespace

FISch random_fisch(std::uint64_t seed, nat max_len, nat max_index) {
  FISch table = table_fisch(seed, max_len, max_index);
  auto stops = [seed, max_len](const FISchState& z) {
    if (z.size() >= max_len) return true;
    std::uint64_t last = z.empty() ? 0xffff : z.back().second;
    std::uint64_t h = mix(mix(seed, z.size()), last);
    return z.empty() ? h % 6 == 0 : h % 4 == 0;
  };
  return {stops, table.choose};
}

std::vector<Config> fisch_test_configs() {
  std::vector<Config> out;
  for (const auto& t : std::vector<std::vector<std::string>>{
           {"rand 1"},
           {"let x = rand 2 in x + 1"},
           {"let r = ref 0 in fork (r := rand 1); !r"},
           {"rand 1", "rand 2"},
           {"3", "rand 1"},
           {"(rec f n = if n = 0 then 0 else f (n - 1)) 2"},
           {"let r = ref 1 in fork (faa r 2); fork (r := 5); !r"},
           {"let l = alloctape 1 in rand[l] 1"},
           {"true", "()"},
       })
    out.push_back(threads_config(t));
  return out;
}

std::vector<Config> tape_test_configs() {
  std::vector<Config> out;
  for (const auto& src : {"let l = alloctape 2 in (rand[l] 2, rand 1)",
                          "let l = alloctape 1 in let r = ref 0 in fork (r := rand[l] 1); !r"}) {
    Config c = advance_until(threads_config({src}),
                             [](const Config& c) { return !c.state.tapes.empty(); });
    c.state.tapes.begin()->second.contents = {1, 0};
    out.push_back(c);
  }
  return out;
}

FischValidation validate_fisch_lemmas(nat instances, nat max_depth, std::uint64_t seed) {
  const std::vector<Config> pool = fisch_test_configs();
  auto named = [](const char* p) {
    LemmaCheck c;
    c.property = p;
    return c;
  };
  LemmaCheck lift = named("lift equation"), cons = named("consfisch equation"),
             app = named("appfisch inequality"), to_sch = named("fisch_to_sch inequality"),
             mono = named("fiexec mass monotone"), init = named("initialfisch depth independence"),
             blind = named("tape blindness");
  auto seen = [](LemmaCheck& c, const Rat& m) {
    if (m > 0) c.nontrivial++;
  };

  auto fail = [](LemmaCheck& c, const std::string& msg) {
    if (c.failures++ == 0) c.first_failure = msg;
  };

  for (nat i = 0; i < instances; ++i) {
    const std::uint64_t s = mix(seed, i);
    const Config& rho = pool[s % pool.size()];
    const nat max_index = static_cast<nat>(rho.threads.size()) + 1;  // includes stutter choices
    FISch phi = random_fisch(mix(s, 1), 1 + (s >> 8) % 3, max_index);
    FISchState z0 = random_history(mix(s, 2), pool, (s >> 12) % 3);
    FISchState z = random_history(mix(s, 3), pool, (s >> 16) % 2);
    auto family = [s, max_index](const FISchState& p) {
      std::uint64_t last = p.empty() ? 0xffff : p.back().second;
      return random_fisch(mix(mix(s, 4 + p.size()), last), p.size() + 1 + last % 3, max_index);
    };
    auto f_step = [s, max_index](const CfgPrime& c) {
      return table_fisch(mix(s, 5), 1, max_index).choose({}, c);
    };
    auto g_next = [s, max_index](nat j) { return random_fisch(mix(s, 6 + j), 1 + j % 3, max_index); };

    lift.instances++;
    cons.instances++;
    app.instances++;
    to_sch.instances++;
    mono.instances++;
    init.instances++;

    FISch lifted = liftfisch(z0, phi);
    FISch consed = consfisch(f_step, g_next);
    FISch chained = appfisch(phi, family);
    auto sch = fisch_to_sch(phi);
    Rat prev_mass = -1;
    for (nat n = 0; n <= max_depth; ++n) {
      // lift
      {
        lift.comparisons++;
        auto lhs = fiexec(lifted, n, prepend(z0, z), rho);
        auto rhs = dmap([&](const FIPoint& p) { return FIPoint(prepend(z0, p.first), p.second); },
                        fiexec(phi, n, z, rho));
        seen(lift, lhs.mass());
        if (!(lhs == rhs)) fail(lift, describe("lift", i, n));
      }
      // cons
      {
        cons.comparisons++;
        auto lhs = fiexec(consed, n + 1, {}, rho);
        Dist<FIPoint> rhs;
        CfgPrime here = strip(rho);
        for (const auto& [j, wj] : f_step(here)) {
          FISchState h{{here, j}};
          FISch rest = liftfisch(h, g_next(j));
          for (const auto& [r, wr] : fi_tp_step(rho, j)) rhs.add_scaled(fiexec(rest, n, h, r), wj * wr);
        }
        seen(cons, lhs.mass());
        if (!(lhs == rhs)) fail(cons, describe("cons", i, n));
      }
      // app
      {
        app.comparisons++;
        Dist<FIPoint> lhs;
        for (const auto& [pt, w] : fiexec(phi, n, {}, rho))
          lhs.add_scaled(fiexec(liftfisch(pt.first, family(pt.first)), n, pt.first, pt.second), w);
        auto rhs = fiexec(chained, 2 * n, {}, rho);
        seen(app, lhs.mass());
        if (!pointwise_le(lhs, rhs)) fail(app, describe("app", i, n));
      }
      // fisch_to_sch
      {
        to_sch.comparisons++;
        Dist<Val> lhs;
        for (const auto& [pt, w] : fiexec(phi, n, z, rho))
          if (is_final(pt.second)) lhs.add(*Val::of(pt.second.threads.front()), w);
        auto rhs = exec(sch, n, z, rho);
        seen(to_sch, lhs.mass());
        if (!pointwise_le(lhs, rhs)) fail(to_sch, describe("to-sch", i, n));
      }
      // monotone mass, initialfisch
      {
        mono.comparisons++;
        Rat m = fiexec(phi, n, z, rho).mass();
        seen(mono, m);
        if (m < prev_mass) fail(mono, describe("mass", i, n));
        prev_mass = m;
        init.comparisons++;
        init.nontrivial++;
        if (!(fiexec(initialfisch(), n, z, rho) == dret(FIPoint(z, rho))))
          fail(init, describe("initialfisch", i, n));
      }
    }
  }

  // tape blindness: same Cfg' and history, different tape contents
  const std::vector<std::vector<nat>> variants = {{}, {0}, {2, 1}, {1, 1, 0}};
  for (const Config& base : tape_test_configs()) {
    for (nat i = 0; i < instances / 4 + 1; ++i) {
      const std::uint64_t s = mix(seed ^ 0x7a9e, i);
      FISch phi = random_fisch(s, 3, static_cast<nat>(base.threads.size()) + 1);
      FISchState z = random_history(mix(s, 1), pool, i % 3);
      blind.instances++;
      auto histories = [](const Dist<FIPoint>& d) {
        return dmap([](const FIPoint& p) { return p.first; }, d);
      };
      auto ref_t = phi.transition(z, base);
      auto ref_h = histories(fisch_step(phi, z, base));
      for (const auto& contents : variants) {
        Config other = base;
        for (auto& [l, t] : other.state.tapes) {
          t.contents.clear();
          for (nat v : contents) t.contents.push_back(v % (t.bound + 1));
        }
        blind.comparisons++;
        if (ref_t) blind.nontrivial++;
        if (!(phi.transition(z, other) == ref_t) || !(histories(fisch_step(phi, z, other)) == ref_h))
          fail(blind, describe("tapes", i, 0));
      }
    }
  }
  return {{lift, cons, app, to_sch, mono, init, blind}};
}

}  // namespace fox
