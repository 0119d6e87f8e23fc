#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fox/dist.hpp"
#include "fox/syntax.hpp"

namespace fox {

struct Tape {
  nat bound = 0;
  std::vector<nat> contents;
  auto operator<=>(const Tape&) const = default;
};

struct State {
  std::map<Loc, Val> heap;
  std::map<Lbl, Tape> tapes;

  Loc fresh_loc() const;
  Lbl fresh_lbl() const;

  friend bool operator==(const State& a, const State& b) {
    return a.heap == b.heap && a.tapes == b.tapes;
  }
  friend bool operator<(const State& a, const State& b) {
    if (a.heap != b.heap) return a.heap < b.heap;
    return a.tapes < b.tapes;
  }
};

/// Result of one head step: contractum, new state, spawned threads.
struct StepOutcome {
  Expr expr;
  State state;
  std::vector<Expr> forked;

  friend bool operator==(const StepOutcome& a, const StepOutcome& b) {
    return a.expr == b.expr && a.state == b.state && a.forked == b.forked;
  }
  friend bool operator<(const StepOutcome& a, const StepOutcome& b) {
    if (auto c = compare(a.expr, b.expr); c != 0) return c < 0;
    if (!(a.state == b.state)) return a.state < b.state;
    return a.forked < b.forked;
  }
};

/// One frame: the hole sits at child `index` (children() numbering) of `parent`.
struct Frame {
  Expr parent;
  std::size_t index;
};

/// Outermost frame first.
using EvalCtx = std::vector<Frame>;

/// Largest bound accepted by rand / alloctape; larger ones throw
/// std::length_error rather than materializing a huge support.
inline constexpr nat kMaxRandBound = nat{1} << 20;

/// Children visited by evaluation, in evaluation order (right to left).
const std::vector<std::size_t>& eval_order(const Expr& e);

/// None iff e is a value; otherwise the unique (K, r) with fill(K, r) = e where
/// r has all evaluated positions filled by values.
std::optional<std::pair<EvalCtx, Expr>> decompose(const Expr& e);

Expr fill(const EvalCtx& k, Expr r);

/// Head reduction of a redex; stuck redexes give the zero distribution.
Dist<StepOutcome> head_step(const Expr& r, const State& sigma);

/// Full step: decompose, head step, refill. Precondition: e is not a value.
Dist<StepOutcome> step(const Expr& e, const State& sigma);

/// mass(step(e, sigma)) == 1 (non-values only).
bool reducible(const Expr& e, const State& sigma);

struct Config {
  std::vector<Expr> threads;
  State state;

  friend bool operator==(const Config& a, const Config& b) {
    return a.threads == b.threads && a.state == b.state;
  }
  friend bool operator<(const Config& a, const Config& b) {
    if (a.threads != b.threads) return a.threads < b.threads;
    return a.state < b.state;
  }
};

inline Config initial_config(Expr e) { return Config{{std::move(e)}, State{}}; }

/// A configuration is final when its first thread is a value.
inline bool is_final(const Config& rho) { return rho.threads.front().is_value(); }

/// Steps thread j; stutters (dret) when j is out of range or a value, and
/// returns dzero on final configurations.
Dist<Config> tp_step(const Config& rho, nat j);

/// Eager variant used by full-information schedulers: no final short-circuit.
Dist<Config> fi_tp_step(const Config& rho, nat j);

/// Injective-up-to-renaming serialization: locations and labels are
/// renumbered in first-use order (threads, then reachable heap cells, then the
/// remaining heap and tape keys ascending).
std::string canonical_key(const Config& rho);

/// Applies the renaming used by canonical_key.
Config canonicalize(const Config& rho);

/// Drops what can no longer influence the first thread: value threads other
/// than the first, threads whose reachable locations and labels are disjoint
/// from those of the first thread (transitively through kept threads), and
/// unreachable heap cells and tapes. Thread order is preserved.
Config collect_garbage(const Config& rho);

}  // namespace fox
