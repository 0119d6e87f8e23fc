#include "fox/sched.hpp"

#include <algorithm>
#include <unordered_set>
#include <set>
#include <atomic>
#include <climits>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

namespace fox {

Scheduler<std::uint64_t> round_robin() {
  return {"roundrobin", [](const std::uint64_t& z, const Config& rho) {
            nat j = z % rho.threads.size();
            return dret(std::pair<std::uint64_t, nat>(z + 1, j));
          }};
}

Scheduler<NoState> uniform_scheduler() {
  return {"uniform", [](const NoState&, const Config& rho) {
            Dist<std::pair<NoState, nat>> out;
            Rat w(mpz_class(1), mpz_class(static_cast<unsigned long>(rho.threads.size())));
            w.canonicalize();
            for (nat j = 0; j < rho.threads.size(); ++j) out.add({NoState{}, j}, w);
            return out;
          }};
}

Scheduler<std::uint64_t> seeded_random() {
  return {"random", [](const std::uint64_t& z, const Config& rho) {
            SplitMix64 rng{z};
            nat j = rng.next() % rho.threads.size();
            return dret(std::pair<std::uint64_t, nat>(rng.state, j));
          }};
}

Scheduler<NoState> greedy() {
  return {"greedy", [](const NoState&, const Config& rho) {
            for (nat j = 0; j < rho.threads.size(); ++j)
              if (reducible(rho.threads[j], rho.state)) return dret(std::pair<NoState, nat>({}, j));
            return dret(std::pair<NoState, nat>({}, 0));
          }};
}

Scheduler<NoState> fixed_thread(nat j) {
  return {"fixed", [j](const NoState&, const Config&) {
            return dret(std::pair<NoState, nat>({}, j));
          }};
}

namespace {

class SupSearch {
 public:
  SupSearch(const std::function<Rat(const Val&)>& leaf, bool allow_stutter)
      : leaf_(leaf), allow_stutter_(allow_stutter) {}

  struct Entry {
    Rat value;
    bool exact;
  };

  // rho is garbage-collected by the caller.
  Entry value(const Config& rho, nat n) {
    if (is_final(rho)) return {leaf_(*Val::of(rho.threads.front())), true};
    std::string key = canonical_key(rho);
    if (n == 0) return {Rat(0), !any_progress(rho) || dead(rho, key)};
    if (auto it = exact_.find(key); it != exact_.end() && it->second.second <= n)
      return {it->second.first, true};
    std::string dkey = key + '#' + std::to_string(n);
    if (auto it = memo_.find(dkey); it != memo_.end()) return it->second;
    ++nodes_;
    Entry e = branches(rho, n);
    if (e.exact) {
      auto [it, inserted] = exact_.try_emplace(std::move(key), e.value, n);
      if (!inserted && n < it->second.second) it->second.second = n;
    } else {
      memo_.emplace(std::move(dkey), e);
    }
    return e;
  }

  // E_{tp_step(rho, j)}[V_{n-1}] for one choice.
  Entry choice(const Config& rho, nat j, nat n) {
    Entry acc{Rat(0), true};
    for (const auto& [next, w] : tp_step(rho, j)) {
      Entry sub = value(collect_garbage(next), n - 1);
      acc.value += w * sub.value;
      acc.exact = acc.exact && sub.exact;
    }
    return acc;
  }

  std::vector<nat> choices(const Config& rho) const {
    std::vector<nat> js;
    for (nat j = 0; j < rho.threads.size(); ++j)
      if (!rho.threads[j].is_value()) js.push_back(j);
    if (allow_stutter_) js.push_back(rho.threads.size());
    return js;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  std::function<Rat(const Val&)> leaf_;
  bool allow_stutter_;
  std::unordered_map<std::string, Entry> memo_;
  // exact values with the smallest depth at which they were reached
  std::unordered_map<std::string, std::pair<Rat, nat>> exact_;
  std::unordered_map<std::string, bool> dead_;
  std::uint64_t nodes_ = 0;

  static constexpr std::size_t kDeadLimit = 128;

  // True when a bounded exploration shows that no final configuration with a
  // positive leaf is reachable, so the value is 0 at every depth.
  bool dead(const Config& rho, const std::string& key) {
    if (auto it = dead_.find(key); it != dead_.end()) return it->second;
    std::unordered_map<std::string, bool> seen{{key, true}};
    std::vector<Config> stack{rho};
    bool result = true;
    while (!stack.empty() && result) {
      Config c = std::move(stack.back());
      stack.pop_back();
      for (nat j = 0; j < c.threads.size() && result; ++j) {
        if (c.threads[j].is_value()) continue;
        for (const auto& [next, w] : tp_step(c, j)) {
          Config g = collect_garbage(next);
          if (is_final(g)) {
            if (leaf_(*Val::of(g.threads.front())) > 0) result = false;
            continue;
          }
          if (seen.size() >= kDeadLimit) {
            result = false;
            break;
          }
          if (seen.emplace(canonical_key(g), true).second) stack.push_back(std::move(g));
        }
      }
    }
    dead_.emplace(key, result);
    return result;
  }

  static bool any_progress(const Config& rho) {
    for (const Expr& t : rho.threads)
      if (reducible(t, rho.state)) return true;
    return false;
  }

  Entry branches(const Config& rho, nat n) {
    Entry best{Rat(0), true};
    for (nat j : choices(rho)) {
      Entry e = choice(rho, j, n);
      if (e.value > best.value) best.value = e.value;
      best.exact = best.exact && e.exact;
      if (best.value == 1) return {best.value, true};
    }
    return best;
  }
};

SupResult run_search(nat n, const Config& rho_in, const std::function<Rat(const Val&)>& leaf,
                     const SupOptions& opts) {
  SupResult out;
  out.nodes = 1;
  Config rho = collect_garbage(rho_in);
  if (is_final(rho)) {
    out.value = leaf(*Val::of(rho.threads.front()));
    out.saturated = true;
    return out;
  }
  SupSearch probe(leaf, opts.allow_stutter);
  if (n == 0) {
    SupSearch::Entry e = probe.value(rho, 0);
    out.value = e.value;
    out.saturated = e.exact;
    return out;
  }
  // Each top-level choice gets its own search so the result and the node
  // count do not depend on how choices are spread over workers.
  std::vector<nat> js = probe.choices(rho);
  std::vector<SupSearch::Entry> results(js.size(), SupSearch::Entry{Rat(0), true});
  std::vector<std::uint64_t> nodes(js.size(), 0);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < js.size(); i = next++) {
      SupSearch s(leaf, opts.allow_stutter);
      results[i] = s.choice(rho, js[i], n);
      nodes[i] = s.nodes();
    }
  };
  unsigned workers = std::max(1U, std::min<unsigned>(opts.workers, js.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  out.value = 0;
  out.saturated = true;
  for (std::size_t i = 0; i < js.size(); ++i) {
    if (results[i].value > out.value) out.value = results[i].value;
    out.saturated = out.saturated && results[i].exact;
    out.nodes += nodes[i];
  }
  if (out.value == 1) out.saturated = true;
  if (!out.saturated && opts.certify) {
    out.limit = sup_limit(rho, [&](const Val& v) { return leaf(v) > 0; }, opts.limit_states);
    if (out.limit && *out.limit == out.value) out.saturated = true;
  }
  return out;
}

}  // namespace

namespace {

struct LimitGraph {
  // per state: terminal value, or actions as (successor, probability) lists
  std::vector<std::optional<Rat>> terminal;
  std::vector<std::vector<std::vector<std::pair<std::size_t, Rat>>>> actions;
};

std::optional<LimitGraph> explore(const Config& rho, const std::function<bool(const Val&)>& accept,
                                  std::size_t max_states) {
  LimitGraph g;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Config> configs;
  auto intern = [&](Config c) -> std::optional<std::size_t> {
    std::string key = canonical_key(c);
    auto [it, inserted] = index.try_emplace(std::move(key), configs.size());
    if (inserted) {
      if (configs.size() >= max_states) return std::nullopt;
      configs.push_back(std::move(c));
    }
    return it->second;
  };
  if (!intern(collect_garbage(rho))) return std::nullopt;
  // wide sampling branches grow the edge count faster than the state count
  const std::size_t max_edges = 8 * max_states;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    Config c = configs[i];
    g.terminal.emplace_back();
    g.actions.emplace_back();
    if (is_final(c)) {
      g.terminal.back() = accept(*Val::of(c.threads.front())) ? Rat(1) : Rat(0);
      continue;
    }
    std::vector<std::vector<std::pair<std::size_t, Rat>>> acts;
    for (nat j = 0; j < c.threads.size(); ++j) {
      if (c.threads[j].is_value()) continue;
      std::vector<std::pair<std::size_t, Rat>> act;
      for (const auto& [next, w] : tp_step(c, j)) {
        auto t = intern(collect_garbage(next));
        if (!t || ++edges > max_edges) return std::nullopt;
        act.emplace_back(*t, w);
      }
      if (!act.empty()) acts.push_back(std::move(act));
    }
    if (acts.empty()) g.terminal[i] = Rat(0);
    g.actions[i] = std::move(acts);
  }
  return g;
}

// Solves A x = b in place by Gauss-Jordan elimination; A is nonsingular.
std::vector<Rat> solve_linear(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw std::logic_error("solve_linear: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    Rat inv = 1 / a[col][col];
    for (std::size_t k = col; k < n; ++k) a[col][k] *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rat f = a[r][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  return b;
}

std::vector<std::vector<std::size_t>> tarjan(const std::vector<std::vector<std::size_t>>& succ,
                                             const std::vector<bool>& active) {
  const std::size_t n = succ.size();
  std::vector<std::size_t> idx(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (!active[root] || idx[root] != SIZE_MAX) continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = true;
    while (!work.empty()) {
      auto& [v, pos] = work.back();
      if (pos < succ[v].size()) {
        std::size_t w = succ[v][pos++];
        if (!active[w]) continue;
        if (idx[w] == SIZE_MAX) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = true;
          work.emplace_back(w, 0);
        } else if (on[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      std::size_t done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      if (low[done] == idx[done]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = false;
          comp.push_back(w);
        } while (w != done);
        out.push_back(std::move(comp));
      }
    }
  }
  return out;  // sinks first
}

}  // namespace

std::optional<Rat> sup_limit(const Config& rho, const std::function<bool(const Val&)>& accept,
                             std::size_t max_states) {
  auto graph = explore(rho, accept, max_states);
  if (!graph) return std::nullopt;
  const auto& g = *graph;
  const std::size_t n = g.terminal.size();

  // states that can reach a positive leaf
  std::vector<std::vector<std::size_t>> pred(n), succ(n);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& act : g.actions[s])
      for (const auto& [t, w] : act) {
        succ[s].push_back(t);
        pred[t].push_back(s);
      }
  std::vector<bool> live(n, false);
  std::vector<std::size_t> todo;
  for (std::size_t s = 0; s < n; ++s)
    if (g.terminal[s] && *g.terminal[s] > 0) {
      live[s] = true;
      todo.push_back(s);
    }
  while (!todo.empty()) {
    std::size_t t = todo.back();
    todo.pop_back();
    for (std::size_t s : pred[t])
      if (!live[s]) {
        live[s] = true;
        todo.push_back(s);
      }
  }

  std::vector<Rat> x(n, Rat(0));
  std::vector<bool> known(n, false);
  std::vector<bool> active(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (g.terminal[s]) {
      x[s] = *g.terminal[s];
      known[s] = true;
    } else if (!live[s]) {
      known[s] = true;
    } else {
      active[s] = true;
    }
  }

  auto q_value = [&](const std::vector<std::pair<std::size_t, Rat>>& act) {
    Rat v = 0;
    for (const auto& [t, w] : act) v += w * x[t];
    return v;
  };

  for (const auto& comp : tarjan(succ, active)) {
    std::unordered_map<std::size_t, std::size_t> pos;
    for (std::size_t i = 0; i < comp.size(); ++i) pos.emplace(comp[i], i);
    // initial policy: attract towards already solved positive states
    std::vector<std::size_t> policy(comp.size(), SIZE_MAX);
    std::vector<bool> reached(comp.size(), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        if (reached[i]) continue;
        const auto& acts = g.actions[comp[i]];
        for (std::size_t a = 0; a < acts.size() && !reached[i]; ++a) {
          for (const auto& [t, w] : acts[a]) {
            auto it = pos.find(t);
            bool good = it == pos.end() ? (known[t] && x[t] > 0) : reached[it->second];
            if (good) {
              policy[i] = a;
              reached[i] = true;
              changed = true;
              break;
            }
          }
        }
      }
    }
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (!reached[i]) throw std::logic_error("sup_limit: live state without a path out");

    for (;;) {
      const std::size_t m = comp.size();
      std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m, Rat(0)));
      std::vector<Rat> b(m, Rat(0));
      for (std::size_t i = 0; i < m; ++i) {
        a[i][i] += 1;
        for (const auto& [t, w] : g.actions[comp[i]][policy[i]]) {
          auto it = pos.find(t);
          if (it == pos.end()) {
            b[i] += w * x[t];
          } else {
            a[i][it->second] -= w;
          }
        }
      }
      std::vector<Rat> sol = solve_linear(std::move(a), std::move(b));
      for (std::size_t i = 0; i < m; ++i) x[comp[i]] = sol[i];
      bool improved = false;
      for (std::size_t i = 0; i < m; ++i) {
        const auto& acts = g.actions[comp[i]];
        for (std::size_t act = 0; act < acts.size(); ++act) {
          if (q_value(acts[act]) > q_value(acts[policy[i]])) {
            policy[i] = act;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    for (std::size_t s : comp) known[s] = true;
  }
  return x[0];
}

SupResult sup_term(nat n, const Config& rho, const SupOptions& opts) {
  return run_search(n, rho, [](const Val&) { return Rat(1); }, opts);
}

SupResult sup_value_mass(nat n, const Config& rho, const std::function<bool(const Val&)>& accept,
                         const SupOptions& opts) {
  return run_search(
      n, rho, [&](const Val& v) { return accept(v) ? Rat(1) : Rat(0); }, opts);
}

std::vector<SupResult> sup_value_series(nat max_depth, const Config& rho,
                                        const std::function<bool(const Val&)>& accept,
                                        bool allow_stutter, bool certify) {
  std::function<Rat(const Val&)> leaf = [&](const Val& v) { return accept(v) ? Rat(1) : Rat(0); };
  SupSearch s(leaf, allow_stutter);
  Config root = collect_garbage(rho);
  std::vector<SupResult> out;
  for (nat d = 0; d <= max_depth; ++d) {
    SupSearch::Entry e = s.value(root, d);
    SupResult r;
    r.value = e.value;
    r.nodes = s.nodes() + 1;
    r.saturated = e.exact || e.value == 1;
    out.push_back(std::move(r));
  }
  if (certify && !out.empty() && !out.back().saturated) {
    auto limit = sup_limit(root, accept);
    for (auto& r : out) {
      r.limit = limit;
      if (limit && r.value == *limit) r.saturated = true;
    }
  }
  return out;
}

std::vector<Val> reachable_values(nat n, const Config& rho, std::size_t max_states) {
  std::set<Val> values;
  std::unordered_set<std::string> seen;
  std::vector<Config> layer{collect_garbage(rho)};
  seen.insert(canonical_key(layer.front()));
  for (nat d = 0; !layer.empty(); ++d) {
    std::vector<Config> next;
    for (const Config& c : layer) {
      if (is_final(c)) {
        values.insert(*Val::of(c.threads.front()));
        continue;
      }
      if (d == n) continue;
      for (nat j = 0; j < c.threads.size(); ++j) {
        if (c.threads[j].is_value()) continue;
        for (const auto& [succ, w] : tp_step(c, j)) {
          Config g = collect_garbage(succ);
          if (!seen.insert(canonical_key(g)).second) continue;
          if (seen.size() > max_states) throw std::length_error("reachable_values: state budget exceeded");
          next.push_back(std::move(g));
        }
      }
    }
    layer = std::move(next);
  }
  return {values.begin(), values.end()};
}

std::pair<SupResult, nat> sup_until_stable(const Config& rho, nat max_depth,
                                           const SupOptions& opts) {
  SupResult r;
  nat d = 0;
  for (;; ++d) {
    r = sup_term(d, rho, opts);
    if (r.saturated || d >= max_depth) break;
  }
  return {r, d};
}

std::optional<CounterTrace> falsify(const Expr& e1, const Expr& e2, const FalsifyBudget& budget) {
  auto accept = budget.accept ? budget.accept : [](const Val&) { return true; };
  Config left = initial_config(e1);
  Rat right = sup_value_mass(budget.depth, initial_config(e2), accept).value;
  auto observed = [&](const Dist<Val>& d) {
    Rat m = 0;
    for (const auto& [v, w] : d)
      if (accept(v)) m += w;
    return m;
  };
  auto witness = [&](std::string name, std::uint64_t seed, const Rat& l) -> std::optional<CounterTrace> {
    if (l > right) return CounterTrace{std::move(name), seed, l, right, l - right};
    return std::nullopt;
  };
  if (auto w = witness("greedy", 0, observed(exec(greedy(), budget.depth, NoState{}, left)))) return w;
  if (auto w = witness("roundrobin", 0,
                       observed(exec(round_robin(), budget.depth, std::uint64_t{0}, left))))
    return w;
  auto rnd = seeded_random();
  for (std::uint64_t seed = 0; seed < budget.seeds; ++seed)
    if (auto w = witness("random", seed, observed(exec(rnd, budget.depth, seed, left)))) return w;
  return std::nullopt;
}

}  // namespace fox
