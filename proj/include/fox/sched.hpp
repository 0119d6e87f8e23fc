#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fox/dist.hpp"
#include "fox/semantics.hpp"

namespace fox {

/// Stateful probabilistic scheduler: (state, config) -> D(state x thread index).
/// Indices that are out of range or point at a value stutter.
template <class S>
struct Scheduler {
  std::string name;
  std::function<Dist<std::pair<S, nat>>(const S&, const Config&)> transition;
};

template <class S>
Dist<std::pair<S, Config>> sch_step(const Scheduler<S>& s, const S& zeta, const Config& rho) {
  Dist<std::pair<S, Config>> out;
  for (const auto& [choice, w] : s.transition(zeta, rho)) {
    const auto& [next, j] = choice;
    for (const auto& [cfg, v] : tp_step(rho, j)) out.add(std::pair<S, Config>(next, cfg), w * v);
  }
  return out;
}

/// Distribution of the first thread's value after at most n scheduler steps.
template <class S>
Dist<Val> exec(const Scheduler<S>& s, nat n, const S& zeta, const Config& rho) {
  Dist<Val> out;
  Dist<std::pair<S, Config>> frontier = dret(std::pair<S, Config>(zeta, rho));
  for (nat k = 0;; ++k) {
    Dist<std::pair<S, Config>> next;
    for (const auto& [sc, w] : frontier) {
      if (is_final(sc.second)) {
        out.add(*Val::of(sc.second.threads.front()), w);
      } else if (k < n) {
        next.add_scaled(sch_step(s, sc.first, sc.second), w);
      }
    }
    if (k == n || next.empty()) break;
    frontier = std::move(next);
  }
  return out;
}

/// Partial execution: mass stays on final configurations and on whatever is
/// left after n steps.
template <class S>
Dist<std::pair<S, Config>> pexec(const Scheduler<S>& s, nat n, const S& zeta, const Config& rho) {
  Dist<std::pair<S, Config>> frontier = dret(std::pair<S, Config>(zeta, rho));
  for (nat k = 0; k < n; ++k) {
    Dist<std::pair<S, Config>> next;
    bool moved = false;
    for (const auto& [sc, w] : frontier) {
      if (is_final(sc.second)) {
        next.add(sc, w);
      } else {
        next.add_scaled(sch_step(s, sc.first, sc.second), w);
        moved = true;
      }
    }
    frontier = std::move(next);
    if (!moved) break;
  }
  return frontier;
}

template <class S>
Rat term_prob(const Scheduler<S>& s, nat n, const S& zeta, const Config& rho) {
  return exec(s, n, zeta, rho).mass();
}

/// SplitMix64; the `random:<seed>` scheduler is specified in terms of it so
/// traces replay exactly.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

using NoState = std::monostate;

/// Thread (counter mod |threads|); the counter is the scheduler state.
Scheduler<std::uint64_t> round_robin();
/// Uniform over all thread indices.
Scheduler<NoState> uniform_scheduler();
/// Pseudo-random thread choice; the state is the SplitMix64 state, seeded by
/// the initial scheduler state.
Scheduler<std::uint64_t> seeded_random();
/// Lowest-index reducible thread (thread 0 when none is).
Scheduler<NoState> greedy();
/// Always the same index.
Scheduler<NoState> fixed_thread(nat j);

struct SupOptions {
  unsigned workers = 1;
  bool allow_stutter = false;
  /// When the search is not saturated, try to solve the limit exactly and
  /// mark the result saturated if it already equals the limit.
  bool certify = true;
  std::size_t limit_states = 20000;
};

struct SupResult {
  Rat value;
  std::uint64_t nodes = 0;
  /// Deeper searches return the same value: either no branch was cut by the
  /// depth bound, or the value equals the exact limit.
  bool saturated = false;
  /// Exact supremum over all schedulers without a depth bound, when the
  /// reachable state space was small enough to solve.
  std::optional<Rat> limit;
};

/// Exact unbounded supremum of the leaf expectation over schedulers for a
/// finite reachable state space (after garbage collection and renaming):
/// states that cannot reach a positive leaf are set to 0, then each strongly
/// connected component is solved by policy iteration with exact linear
/// solves, sinks first. None when more than max_states states are reachable.
std::optional<Rat> sup_limit(const Config& rho, const std::function<bool(const Val&)>& accept,
                             std::size_t max_states = 20000);

/// Depth-n maximal termination probability over schedulers:
///   V(rho) = 1 if the head is a value, 0 at depth 0,
///   else max over non-value threads j of E_{tp_step(rho, j)}[V_{n-1}].
SupResult sup_term(nat n, const Config& rho, const SupOptions& opts = {});

/// Same recursion with an indicator on the head value at the leaves.
SupResult sup_value_mass(nat n, const Config& rho, const std::function<bool(const Val&)>& accept,
                         const SupOptions& opts = {});

/// V_d(rho) for d = 0..max_depth from one shared memo table; node counts
/// are cumulative. With certify, an unsaturated tail is compared against
/// sup_limit.
std::vector<SupResult> sup_value_series(nat max_depth, const Config& rho,
                                        const std::function<bool(const Val&)>& accept,
                                        bool allow_stutter = false, bool certify = true);

/// Head values of final configurations reachable within n steps under some
/// scheduler, in Val order. Throws std::length_error past max_states
/// distinct configurations.
std::vector<Val> reachable_values(nat n, const Config& rho, std::size_t max_states = 200000);

/// Increases the depth until the search saturates or max_depth is reached;
/// returns the last result and the depth used.
std::pair<SupResult, nat> sup_until_stable(const Config& rho, nat max_depth,
                                           const SupOptions& opts = {});

struct FalsifyBudget {
  nat depth = 20;
  std::uint64_t seeds = 64;
  /// Observation on the head value; nullopt means plain termination.
  std::function<bool(const Val&)> accept;
};

struct CounterTrace {
  std::string scheduler;
  std::uint64_t seed = 0;
  Rat left;
  Rat right;
  Rat gap;
};

/// Looks for a scheduler run of e1 whose observed mass exceeds the exact
/// depth-bounded supremum of e2. None means inconclusive.
std::optional<CounterTrace> falsify(const Expr& e1, const Expr& e2, const FalsifyBudget& budget);

}  // namespace fox
