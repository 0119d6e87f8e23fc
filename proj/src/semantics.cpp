#include "fox/semantics.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <functional>
#include <stdexcept>
#include <string>

namespace fox {

Loc State::fresh_loc() const {
  std::uint64_t n = 0;
  for (const auto& [l, v] : heap) {
    if (l.id != n) break;
    ++n;
  }
  return Loc{n};
}

Lbl State::fresh_lbl() const {
  std::uint64_t n = 0;
  for (const auto& [l, t] : tapes) {
    if (l.id != n) break;
    ++n;
  }
  return Lbl{n};
}

namespace {

const std::vector<std::size_t> kNone{};
const std::vector<std::size_t> kFirst{0};
const std::vector<std::size_t> kTwoRtl{1, 0};
const std::vector<std::size_t> kThreeRtl{2, 1, 0};

Dist<StepOutcome> ret(Expr e, State s) {
  return dret(StepOutcome{std::move(e), std::move(s), {}});
}

std::optional<nat> as_bound(const Expr& e) {
  const auto* i = e.as<IntLit>();
  if (!i || i->value < 0) return std::nullopt;
  if (i->value > kMaxRandBound) throw std::length_error("rand bound exceeds desk-scale limit");
  return static_cast<nat>(i->value.get_ui());
}

Dist<StepOutcome> uniform(nat n, const State& s) {
  Dist<StepOutcome> out;
  for (const auto& [k, w] : dunif(n))
    out.add(StepOutcome{build::integer(mpz_class(static_cast<unsigned long>(k))), s, {}}, w);
  return out;
}

// Structural equality on closure-free values; nullopt when closures are involved.
std::optional<bool> value_equal(const Expr& a, const Expr& b) {
  if (contains_closure(a) || contains_closure(b)) return std::nullopt;
  return a == b;
}

Expr beta(const Rec& r, const Expr& fn, const Val& arg) {
  Expr body = r.body;
  if (!r.x.empty()) body = subst(body, r.x, arg);
  if (!r.f.empty() && r.f != r.x) body = subst(body, r.f, *Val::of(fn));
  return body;
}

}  // namespace

const std::vector<std::size_t>& eval_order(const Expr& e) {
  return std::visit(
      [](const auto& x) -> const std::vector<std::size_t>& {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, App> || std::is_same_v<T, BinOp> ||
                      std::is_same_v<T, Pair> || std::is_same_v<T, Store> ||
                      std::is_same_v<T, Faa> || std::is_same_v<T, RandLbl>)
          return kTwoRtl;
        else if constexpr (std::is_same_v<T, Cas>)
          return kThreeRtl;
        else if constexpr (std::is_same_v<T, If> || std::is_same_v<T, Fst> ||
                           std::is_same_v<T, Snd> || std::is_same_v<T, InjL> ||
                           std::is_same_v<T, InjR> || std::is_same_v<T, Case> ||
                           std::is_same_v<T, Alloc> || std::is_same_v<T, Load> ||
                           std::is_same_v<T, Rand> || std::is_same_v<T, AllocTape>)
          return kFirst;
        else
          return kNone;
      },
      e.node());
}

std::optional<std::pair<EvalCtx, Expr>> decompose(const Expr& e) {
  if (e.is_value()) return std::nullopt;
  EvalCtx k;
  Expr cur = e;
  for (;;) {
    bool descended = false;
    const auto& order = eval_order(cur);
    if (!order.empty()) {
      std::vector<Expr> kids = children(cur);
      for (std::size_t idx : order) {
        if (!kids[idx].is_value()) {
          k.push_back(Frame{cur, idx});
          cur = kids[idx];
          descended = true;
          break;
        }
      }
    }
    if (!descended) return std::make_pair(std::move(k), cur);
  }
}

Expr fill(const EvalCtx& k, Expr r) {
  for (auto it = k.rbegin(); it != k.rend(); ++it) r = replace_child(it->parent, it->index, std::move(r));
  return r;
}

Dist<StepOutcome> head_step(const Expr& r, const State& sigma) {
  using namespace build;
  auto stuck = [] { return dzero<StepOutcome>(); };
  return std::visit(
      [&](const auto& x) -> Dist<StepOutcome> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, App>) {
          const auto* fn = x.fn.template as<Rec>();
          auto arg = Val::of(x.arg);
          if (!fn || !arg) return stuck();
          return ret(beta(*fn, x.fn, *arg), sigma);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          if (x.op == BinOpKind::Eq) {
            auto eq = value_equal(x.lhs, x.rhs);
            if (!eq) return stuck();
            return ret(boolean(*eq), sigma);
          }
          const auto* a = x.lhs.template as<IntLit>();
          const auto* b = x.rhs.template as<IntLit>();
          if (!a || !b) return stuck();
          switch (x.op) {
            case BinOpKind::Add: return ret(integer(mpz_class(a->value + b->value)), sigma);
            case BinOpKind::Sub: return ret(integer(mpz_class(a->value - b->value)), sigma);
            case BinOpKind::Mul: return ret(integer(mpz_class(a->value * b->value)), sigma);
            case BinOpKind::Mod: {
              if (b->value == 0) return stuck();
              mpz_class q;
              mpz_tdiv_r(q.get_mpz_t(), a->value.get_mpz_t(), b->value.get_mpz_t());
              return ret(integer(q), sigma);
            }
            case BinOpKind::Lt: return ret(boolean(a->value < b->value), sigma);
            case BinOpKind::Le: return ret(boolean(a->value <= b->value), sigma);
            default: return stuck();
          }
        } else if constexpr (std::is_same_v<T, If>) {
          const auto* b = x.cond.template as<BoolLit>();
          if (!b) return stuck();
          return ret(b->value ? x.then_branch : x.else_branch, sigma);
        } else if constexpr (std::is_same_v<T, Fst> || std::is_same_v<T, Snd>) {
          const auto* p = x.e.template as<Pair>();
          if (!p || !x.e.is_value()) return stuck();
          return ret(std::is_same_v<T, Fst> ? p->first : p->second, sigma);
        } else if constexpr (std::is_same_v<T, Case>) {
          if (const auto* l = x.scrutinee.template as<InjL>()) return ret(app(x.left_fn, l->e), sigma);
          if (const auto* rr = x.scrutinee.template as<InjR>())
            return ret(app(x.right_fn, rr->e), sigma);
          return stuck();
        } else if constexpr (std::is_same_v<T, Alloc>) {
          State s = sigma;
          Loc l = s.fresh_loc();
          s.heap.emplace(l, *Val::of(x.init));
          return ret(loc(l), std::move(s));
        } else if constexpr (std::is_same_v<T, Load>) {
          const auto* l = x.loc.template as<LocLit>();
          if (!l) return stuck();
          auto it = sigma.heap.find(l->loc);
          if (it == sigma.heap.end()) return stuck();
          return ret(it->second.expr(), sigma);
        } else if constexpr (std::is_same_v<T, Store>) {
          const auto* l = x.loc.template as<LocLit>();
          if (!l || !sigma.heap.count(l->loc)) return stuck();
          State s = sigma;
          s.heap.insert_or_assign(l->loc, *Val::of(x.value));
          return ret(unit(), std::move(s));
        } else if constexpr (std::is_same_v<T, Faa>) {
          const auto* l = x.loc.template as<LocLit>();
          const auto* d = x.delta.template as<IntLit>();
          if (!l || !d) return stuck();
          auto it = sigma.heap.find(l->loc);
          if (it == sigma.heap.end()) return stuck();
          const auto* old = it->second.expr().template as<IntLit>();
          if (!old) return stuck();
          State s = sigma;
          s.heap.insert_or_assign(l->loc, *Val::of(integer(mpz_class(old->value + d->value))));
          return ret(it->second.expr(), std::move(s));
        } else if constexpr (std::is_same_v<T, Cas>) {
          const auto* l = x.loc.template as<LocLit>();
          if (!l) return stuck();
          auto it = sigma.heap.find(l->loc);
          if (it == sigma.heap.end()) return stuck();
          if (!is_unboxed(it->second.expr()) || !is_unboxed(x.expected)) return stuck();
          if (!(it->second.expr() == x.expected)) return ret(boolean(false), sigma);
          State s = sigma;
          s.heap.insert_or_assign(l->loc, *Val::of(x.desired));
          return ret(boolean(true), std::move(s));
        } else if constexpr (std::is_same_v<T, Rand>) {
          auto n = as_bound(x.bound);
          if (!n) return stuck();
          return uniform(*n, sigma);
        } else if constexpr (std::is_same_v<T, RandLbl>) {
          const auto* l = x.label.template as<LblLit>();
          auto n = as_bound(x.bound);
          if (!l || !n) return stuck();
          auto it = sigma.tapes.find(l->lbl);
          if (it == sigma.tapes.end()) return stuck();
          const Tape& t = it->second;
          if (t.bound != *n || t.contents.empty()) return uniform(*n, sigma);
          State s = sigma;
          Tape& st = s.tapes.at(l->lbl);
          nat head = st.contents.front();
          st.contents.erase(st.contents.begin());
          return ret(integer(mpz_class(static_cast<unsigned long>(head))), std::move(s));
        } else if constexpr (std::is_same_v<T, AllocTape>) {
          auto n = as_bound(x.bound);
          if (!n) return stuck();
          State s = sigma;
          Lbl l = s.fresh_lbl();
          s.tapes.emplace(l, Tape{*n, {}});
          return ret(lbl(l), std::move(s));
        } else if constexpr (std::is_same_v<T, Fork>) {
          return dret(StepOutcome{unit(), sigma, {x.body}});
        } else {
          // values, free variables, and non-value injections/pairs never head-reduce
          return stuck();
        }
      },
      r.node());
}

Dist<StepOutcome> step(const Expr& e, const State& sigma) {
  auto d = decompose(e);
  if (!d) throw std::invalid_argument("step: expression is a value");
  const auto& [k, r] = *d;
  Dist<StepOutcome> head = head_step(r, sigma);
  if (k.empty()) return head;
  return dmap(
      [&](const StepOutcome& o) {
        return StepOutcome{fill(k, o.expr), o.state, o.forked};
      },
      head);
}

bool reducible(const Expr& e, const State& sigma) {
  return !e.is_value() && step(e, sigma).mass() == 1;
}

namespace {

Dist<Config> thread_step(const Config& rho, nat j) {
  if (j >= rho.threads.size() || rho.threads[j].is_value()) return dret(rho);
  return dmap(
      [&](const StepOutcome& o) {
        Config next{rho.threads, o.state};
        next.threads[j] = o.expr;
        next.threads.insert(next.threads.end(), o.forked.begin(), o.forked.end());
        return next;
      },
      step(rho.threads[j], rho.state));
}

}  // namespace

Dist<Config> tp_step(const Config& rho, nat j) {
  if (is_final(rho)) return dzero<Config>();
  return thread_step(rho, j);
}

Dist<Config> fi_tp_step(const Config& rho, nat j) { return thread_step(rho, j); }

// ---------------------------------------------------------------------------
// canonical keys

namespace {

class Renamer {
 public:
  explicit Renamer(const State& s) : state_(s) {}

  std::uint64_t loc(Loc l) {
    auto [it, inserted] = locs_.try_emplace(l.id, locs_.size());
    if (inserted) queue_.push_back(l);
    return it->second;
  }
  std::uint64_t lbl(Lbl l) {
    auto [it, inserted] = lbls_.try_emplace(l.id, lbls_.size());
    return it->second;
  }

  // Visits reachable cells breadth first, then the unreachable rest.
  template <class Visit>
  void drain_heap(Visit&& visit) {
    auto run_queue = [&] {
      while (!queue_.empty()) {
        Loc l = queue_.front();
        queue_.pop_front();
        auto it = state_.heap.find(l);
        if (it != state_.heap.end()) visit(locs_.at(l.id), it->second.expr());
      }
    };
    run_queue();
    for (const auto& [l, v] : state_.heap) {
      if (!locs_.count(l.id)) {
        loc(l);
        run_queue();
      }
    }
  }

  template <class Visit>
  void drain_tapes(Visit&& visit) {
    for (const auto& [l, t] : state_.tapes) lbl(l);
    std::vector<std::pair<std::uint64_t, const Tape*>> order;
    for (const auto& [l, t] : state_.tapes) order.emplace_back(lbls_.at(l.id), &t);
    std::sort(order.begin(), order.end());
    for (const auto& [id, t] : order) visit(id, *t);
  }

 private:
  const State& state_;
  std::map<std::uint64_t, std::uint64_t> locs_;
  std::map<std::uint64_t, std::uint64_t> lbls_;
  std::deque<Loc> queue_;
};

void write_name(std::string& out, const std::string& s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
}

void serialize(const Expr& e, Renamer& ren, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += 'i';
          out += x.value.get_str();
          out += ';';
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += x.value ? 'T' : 'F';
        } else if constexpr (std::is_same_v<T, UnitLit>) {
          out += 'u';
        } else if constexpr (std::is_same_v<T, LocLit>) {
          out += 'l';
          out += std::to_string(ren.loc(x.loc));
          out += ';';
        } else if constexpr (std::is_same_v<T, LblLit>) {
          out += 't';
          out += std::to_string(ren.lbl(x.lbl));
          out += ';';
        } else if constexpr (std::is_same_v<T, Var>) {
          out += 'v';
          write_name(out, x.name);
        } else if constexpr (std::is_same_v<T, Rec>) {
          out += 'R';
          write_name(out, x.f);
          write_name(out, x.x);
          serialize(x.body, ren, out);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          out += 'B';
          out += static_cast<char>('0' + static_cast<int>(x.op));
          serialize(x.lhs, ren, out);
          serialize(x.rhs, ren, out);
        } else {
          // tag by variant index; arity is fixed per index
          out += static_cast<char>('A' + e.node().index());
          for (const Expr& c : children(e)) serialize(c, ren, out);
        }
      },
      e.node());
}

Expr rename(const Expr& e, const std::map<std::uint64_t, std::uint64_t>& locs,
            const std::map<std::uint64_t, std::uint64_t>& lbls) {
  if (const auto* l = e.as<LocLit>()) {
    auto it = locs.find(l->loc.id);
    return it == locs.end() ? e : build::loc(Loc{it->second});
  }
  if (const auto* l = e.as<LblLit>()) {
    auto it = lbls.find(l->lbl.id);
    return it == lbls.end() ? e : build::lbl(Lbl{it->second});
  }
  Expr out = e;
  std::vector<Expr> kids = children(e);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    Expr k = rename(kids[i], locs, lbls);
    if (!k.same(kids[i])) out = replace_child(out, i, std::move(k));
  }
  return out;
}

}  // namespace

std::string canonical_key(const Config& rho) {
  Renamer ren(rho.state);
  std::string out;
  out.reserve(256);
  for (const Expr& t : rho.threads) {
    serialize(t, ren, out);
    out += '|';
  }
  out += 'H';
  ren.drain_heap([&](std::uint64_t id, const Expr& v) {
    out += std::to_string(id);
    out += '=';
    serialize(v, ren, out);
    out += ',';
  });
  out += 'P';
  ren.drain_tapes([&](std::uint64_t id, const Tape& t) {
    out += std::to_string(id);
    out += '/';
    out += std::to_string(t.bound);
    out += ':';
    for (nat n : t.contents) {
      out += std::to_string(n);
      out += '.';
    }
    out += ',';
  });
  return out;
}

Config canonicalize(const Config& rho) {
  // Recover the renaming by replaying the traversal order of canonical_key.
  std::map<std::uint64_t, std::uint64_t> locs;
  std::map<std::uint64_t, std::uint64_t> lbls;
  std::deque<Loc> queue;
  std::function<void(const Expr&)> visit = [&](const Expr& e) {
    if (const auto* l = e.as<LocLit>()) {
      if (locs.try_emplace(l->loc.id, locs.size()).second) queue.push_back(l->loc);
      return;
    }
    if (const auto* l = e.as<LblLit>()) {
      lbls.try_emplace(l->lbl.id, lbls.size());
      return;
    }
    for (const Expr& c : children(e)) visit(c);
  };
  auto run_queue = [&] {
    while (!queue.empty()) {
      Loc l = queue.front();
      queue.pop_front();
      auto it = rho.state.heap.find(l);
      if (it != rho.state.heap.end()) visit(it->second.expr());
    }
  };
  for (const Expr& t : rho.threads) visit(t);
  run_queue();
  for (const auto& [l, v] : rho.state.heap) {
    if (locs.try_emplace(l.id, locs.size()).second) {
      queue.push_back(l);
      run_queue();
    }
  }
  for (const auto& [l, t] : rho.state.tapes) lbls.try_emplace(l.id, lbls.size());

  Config out;
  for (const Expr& t : rho.threads) out.threads.push_back(rename(t, locs, lbls));
  for (const auto& [l, v] : rho.state.heap)
    out.state.heap.emplace(Loc{locs.at(l.id)}, *Val::of(rename(v.expr(), locs, lbls)));
  for (const auto& [l, t] : rho.state.tapes) out.state.tapes.emplace(Lbl{lbls.at(l.id)}, t);
  return out;
}

namespace {

struct Reach {
  std::set<std::uint64_t> locs;
  std::set<std::uint64_t> lbls;

  bool meets(const Reach& o) const {
    for (auto l : o.locs)
      if (locs.count(l)) return true;
    for (auto l : o.lbls)
      if (lbls.count(l)) return true;
    return false;
  }
};

void scan(const Expr& e, Reach& r, std::vector<Loc>& todo) {
  if (const auto* l = e.as<LocLit>()) {
    if (r.locs.insert(l->loc.id).second) todo.push_back(l->loc);
    return;
  }
  if (const auto* l = e.as<LblLit>()) {
    r.lbls.insert(l->lbl.id);
    return;
  }
  for (const Expr& c : children(e)) scan(c, r, todo);
}

Reach reach_of(const Expr& e, const State& s) {
  Reach r;
  std::vector<Loc> todo;
  scan(e, r, todo);
  while (!todo.empty()) {
    Loc l = todo.back();
    todo.pop_back();
    if (auto it = s.heap.find(l); it != s.heap.end()) scan(it->second.expr(), r, todo);
  }
  return r;
}

}  // namespace

Config collect_garbage(const Config& rho) {
  const auto& ts = rho.threads;
  std::vector<Reach> reach(ts.size());
  std::vector<bool> keep(ts.size(), false);
  keep[0] = true;
  reach[0] = reach_of(ts[0], rho.state);
  Reach live = reach[0];
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!ts[i].is_value()) reach[i] = reach_of(ts[i], rho.state);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 1; i < ts.size(); ++i) {
      if (keep[i] || ts[i].is_value() || !live.meets(reach[i])) continue;
      keep[i] = true;
      changed = true;
      live.locs.insert(reach[i].locs.begin(), reach[i].locs.end());
      live.lbls.insert(reach[i].lbls.begin(), reach[i].lbls.end());
    }
  }
  Config out;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (keep[i]) out.threads.push_back(ts[i]);
  for (const auto& [l, v] : rho.state.heap)
    if (live.locs.count(l.id)) out.state.heap.emplace(l, v);
  for (const auto& [l, t] : rho.state.tapes)
    if (live.lbls.count(l.id)) out.state.tapes.emplace(l, t);
  return out;
}

}  // namespace fox
