#include "fox/fisch.hpp"

namespace fox {

bool is_prefix(const FISchState& prefix, const FISchState& of) {
  if (prefix.size() > of.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (!(prefix[i].second == of[i].second) || !(prefix[i].first == of[i].first)) return false;
  return true;
}

Dist<FIPoint> fisch_step(const FISch& phi, const FISchState& zeta, const Config& rho) {
  auto mu = phi.transition(zeta, rho);
  if (!mu) return dret(FIPoint(zeta, rho));
  Dist<FIPoint> out;
  CfgPrime here = strip(rho);
  for (const auto& [j, w] : *mu) {
    FISchState next = zeta;
    next.emplace_back(here, j);
    for (const auto& [cfg, v] : fi_tp_step(rho, j)) out.add(FIPoint(next, cfg), w * v);
  }
  return out;
}

Dist<FIPoint> fiexec(const FISch& phi, nat n, const FISchState& zeta, const Config& rho) {
  Dist<FIPoint> out;
  Dist<FIPoint> frontier = dret(FIPoint(zeta, rho));
  for (nat k = 0;; ++k) {
    Dist<FIPoint> next;
    for (const auto& [pt, w] : frontier) {
      if (phi.stops(pt.first)) {
        out.add(pt, w);
      } else if (k < n) {
        next.add_scaled(fisch_step(phi, pt.first, pt.second), w);
      }
    }
    if (k == n || next.empty()) break;
    frontier = std::move(next);
  }
  return out;
}

FISch initialfisch() {
  return {[](const FISchState&) { return true; },
          [](const FISchState&, const CfgPrime&) { return dzero<nat>(); }};
}

namespace {

FISchState suffix(const FISchState& z, std::size_t from) {
  return FISchState(z.begin() + static_cast<std::ptrdiff_t>(from), z.end());
}

}  // namespace

FISch liftfisch(FISchState zeta0, FISch phi) {
  auto z0 = std::make_shared<const FISchState>(std::move(zeta0));
  auto inner = std::make_shared<const FISch>(std::move(phi));
  return {[z0, inner](const FISchState& z) {
            return !is_prefix(*z0, z) || inner->stops(suffix(z, z0->size()));
          },
          [z0, inner](const FISchState& z, const CfgPrime& c) {
            return inner->choose(suffix(z, z0->size()), c);
          }};
}

FISch appfisch(FISch phi, std::function<FISch(const FISchState&)> f) {
  auto inner = std::make_shared<const FISch>(std::move(phi));
  // The active FIsch for a history: phi until its minimal stopping prefix p,
  // then lift(p, f(p)).
  auto active = [inner, f](const FISchState& z) -> std::optional<FISch> {
    for (std::size_t i = 0; i <= z.size(); ++i) {
      FISchState p(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(i));
      if (inner->stops(p)) return liftfisch(p, f(p));
    }
    return std::nullopt;
  };
  return {[inner, active](const FISchState& z) {
            auto a = active(z);
            return a ? a->stops(z) : false;
          },
          [inner, active](const FISchState& z, const CfgPrime& c) {
            auto a = active(z);
            return a ? a->choose(z, c) : inner->choose(z, c);
          }};
}

FISch consfisch(std::function<Dist<nat>(const CfgPrime&)> f, std::function<FISch(nat)> g) {
  auto rest = [g](const FISchState& z) { return liftfisch(FISchState{z.front()}, g(z.front().second)); };
  return {[rest](const FISchState& z) { return !z.empty() && rest(z).stops(z); },
          [f, rest](const FISchState& z, const CfgPrime& c) {
            return z.empty() ? f(c) : rest(z).choose(z, c);
          }};
}

Scheduler<FISchState> fisch_to_sch(FISch phi) {
  return {"fisch", [phi](const FISchState& z, const Config& rho) {
            Dist<std::pair<FISchState, nat>> out;
            auto mu = phi.transition(z, rho);
            if (!mu) {
              out.add({z, rho.threads.size()}, Rat(1));
              return out;
            }
            CfgPrime here = strip(rho);
            for (const auto& [j, w] : *mu) {
              FISchState next = z;
              next.emplace_back(here, j);
              out.add({std::move(next), j}, w);
            }
            return out;
          }};
}

FISch table_fisch(std::uint64_t seed, nat stop_len, nat max_index) {
  auto choose = [seed, max_index](const FISchState& z, const CfgPrime& c) {
    std::uint64_t last = z.empty() ? 0xffff : z.back().second;
    SplitMix64 rng{seed ^ (z.size() * 0x100000001b3ULL) ^ (last << 20) ^ (c.threads.size() << 40)};
    rng.next();
    // support size 1..3 with small integer weights
    nat k = 1 + rng.next() % 3;
    std::vector<std::pair<nat, std::uint64_t>> picks;
    std::uint64_t total = 0;
    for (nat i = 0; i < k; ++i) {
      nat j = rng.next() % (max_index + 1);
      std::uint64_t w = 1 + rng.next() % 4;
      picks.emplace_back(j, w);
      total += w;
    }
    Dist<nat> d;
    for (const auto& [j, w] : picks) {
      Rat r(mpz_class(static_cast<unsigned long>(w)), mpz_class(static_cast<unsigned long>(total)));
      r.canonicalize();
      d.add(j, r);
    }
    return d;
  };
  return {[stop_len](const FISchState& z) { return z.size() >= stop_len; }, choose};
}

}  // namespace fox
