#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fox/dist.hpp"
#include "fox/sched.hpp"
#include "fox/semantics.hpp"

namespace fox {

/// Tape-blind projection of a configuration: threads and heap only.
struct CfgPrime {
  std::vector<Expr> threads;
  std::map<Loc, Val> heap;

  friend bool operator==(const CfgPrime& a, const CfgPrime& b) {
    return a.threads == b.threads && a.heap == b.heap;
  }
  friend bool operator<(const CfgPrime& a, const CfgPrime& b) {
    if (a.threads != b.threads) return a.threads < b.threads;
    return a.heap < b.heap;
  }
};

inline CfgPrime strip(const Config& rho) { return {rho.threads, rho.state.heap}; }

using FISchState = std::vector<std::pair<CfgPrime, nat>>;

bool is_prefix(const FISchState& prefix, const FISchState& of);

/// Full-information scheduler. Stopping depends on the history alone, so the
/// consistency condition holds by construction; choices see only the
/// tape-stripped configuration.
struct FISch {
  std::function<bool(const FISchState&)> stops;
  std::function<Dist<nat>(const FISchState&, const CfgPrime&)> choose;

  /// None when stopped, otherwise the distribution over thread indices.
  std::optional<Dist<nat>> transition(const FISchState& zeta, const Config& rho) const {
    if (stops(zeta)) return std::nullopt;
    return choose(zeta, strip(rho));
  }
};

using FIPoint = std::pair<FISchState, Config>;

Dist<FIPoint> fisch_step(const FISch& phi, const FISchState& zeta, const Config& rho);

/// Runs phi for up to n steps; mass only on runs where phi stopped.
Dist<FIPoint> fiexec(const FISch& phi, nat n, const FISchState& zeta, const Config& rho);

/// Stops everywhere.
FISch initialfisch();

/// Behaves like phi on the suffix after zeta0; stops on histories that do not
/// extend zeta0.
FISch liftfisch(FISchState zeta0, FISch phi);

/// Acts like phi until its first (minimal) stopping prefix p, then like
/// liftfisch(p, f(p)).
FISch appfisch(FISch phi, std::function<FISch(const FISchState&)> f);

/// One step chosen by f, then liftfisch([(cfg', j)], g(j)).
FISch consfisch(std::function<Dist<nat>(const CfgPrime&)> f, std::function<FISch(nat)> g);

/// Regular scheduler with history state that follows phi and stutters
/// (index = thread count) once phi has stopped.
Scheduler<FISchState> fisch_to_sch(FISch phi);

/// Deterministic pseudo-random decision table: the choice distribution is a
/// function of (history length, last chosen index, thread count), drawn from
/// SplitMix64 keyed by `seed`. Indices range over [0, max_index]; stops at
/// histories of length >= stop_len.
FISch table_fisch(std::uint64_t seed, nat stop_len, nat max_index);

}  // namespace fox
