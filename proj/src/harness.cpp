#include "fox/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "fox/coupling.hpp"
#include "fox/fisch_check.hpp"
#include "fox/parse.hpp"
#include "fox/typecheck.hpp"

namespace fox {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Probe contexts

std::string Probe::label() const {
  switch (kind) {
    case ProbeKind::Value: return "value=" + value;
    case ProbeKind::Termination: return "terminates";
    case ProbeKind::Interference: return "interfered value=" + value;
  }
  return "?";
}

Expr diverge_expr() {
  using namespace build;
  return app(rec("f", "_", app(var("f"), unit())), unit());
}

Expr value_probe(const Expr& e, const Expr& k) {
  using namespace build;
  return if_(binop(BinOpKind::Eq, e, k), unit(), diverge_expr());
}

Expr termination_probe(const Expr& e) { return build::let("_", e, build::unit()); }

Expr interference_probe(const Expr& e, const Expr& k) {
  using namespace build;
  // the probe's own cell is named apart from anything in e since e is closed
  return let("%r", alloc(integer(0)),
             seq(fork(store(var("%r"), integer(1))), value_probe(e, k)));
}

Expr parse_value(const std::string& text) {
  Expr e = parse(text);
  if (!e.is_value()) throw std::invalid_argument("not a value literal: " + text);
  return e;
}

Expr apply_probe(const Probe& p, const Expr& e) {
  switch (p.kind) {
    case ProbeKind::Value: return value_probe(e, parse_value(p.value));
    case ProbeKind::Termination: return termination_probe(e);
    case ProbeKind::Interference: return interference_probe(e, parse_value(p.value));
  }
  return e;
}

std::vector<Probe> standard_probes(const std::vector<std::string>& values) {
  std::vector<Probe> out;
  for (const auto& v : values) out.push_back({ProbeKind::Value, v});
  out.push_back({ProbeKind::Termination, ""});
  if (!values.empty()) out.push_back({ProbeKind::Interference, values.front()});
  return out;
}

Expr load_program(const std::string& source) {
  Expr e = parse(source);
  typecheck(e);
  return e;
}

// ---------------------------------------------------------------------------
// Loop costs and residuals

std::vector<Rat> greedy_term_series(const Expr& e, nat max_steps) {
  std::vector<Rat> out;
  Rat done = 0;
  Dist<Config> frontier = dret(initial_config(e));
  for (nat n = 0; n <= max_steps; ++n) {
    Dist<Config> next;
    for (const auto& [rho, w] : frontier) {
      if (is_final(rho)) {
        done += w;
        continue;
      }
      nat j = 0;
      while (j < rho.threads.size() && !reducible(rho.threads[j], rho.state)) ++j;
      if (j == rho.threads.size()) continue;  // stuck everywhere
      next.add_scaled(tp_step(rho, j), w);
    }
    out.push_back(done);
    frontier = std::move(next);
  }
  return out;
}

namespace {

Expr terminating_variant(const Probe& p, const Expr& e) {
  using namespace build;
  switch (p.kind) {
    case ProbeKind::Value:
      return if_(binop(BinOpKind::Eq, e, parse_value(p.value)), unit(), unit());
    case ProbeKind::Termination: return termination_probe(e);
    case ProbeKind::Interference:
      return let("%r", alloc(integer(0)),
                 seq(fork(store(var("%r"), integer(1))),
                     if_(binop(BinOpKind::Eq, e, parse_value(p.value)), unit(), unit())));
  }
  return e;
}

}  // namespace

std::optional<nat> measure_loop_cost(const Expr& program, const Probe& probe, const Rat& reject,
                                     nat max_steps) {
  auto series = greedy_term_series(terminating_variant(probe, program), max_steps);
  Rat t1 = 1 - reject;
  Rat t2 = 1 - reject * reject;
  std::optional<nat> d1, d2;
  for (nat n = 0; n < series.size(); ++n) {
    if (!d1 && series[n] >= t1) d1 = n;
    if (!d2 && series[n] >= t2) d2 = n;
  }
  if (!d1 || !d2) return std::nullopt;
  return std::max(*d1, *d2 - *d1);
}

Residual residual_for(const SupResult& r, nat depth, const std::optional<LoopSpec>& loop,
                      std::optional<nat> loop_cost) {
  if (r.saturated) return {"zero", Rat(0), 0};
  if (loop && loop_cost && *loop_cost > 0) {
    return {"geometric", rat_pow(loop->reject, depth / *loop_cost), *loop_cost};
  }
  if (r.limit) return {"exact", Rat(*r.limit - r.value), 0};
  return {"trivial", Rat(1 - r.value), 0};
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0, bool timing) {
  if (!timing) return 0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

}  // namespace

RefineReport refine_report(const std::string& name, const Expr& left, const Expr& right, nat depth,
                           const std::vector<Probe>& probes,
                           const std::optional<LoopSpec>& left_loop,
                           const std::optional<LoopSpec>& right_loop, const ReportOptions& opts) {
  (void)left_loop;
  auto t0 = std::chrono::steady_clock::now();
  RefineReport rep;
  rep.name = name;
  rep.depth = depth;
  SupOptions so;
  so.workers = opts.workers;
  for (const Probe& p : probes) {
    Expr l = apply_probe(p, left);
    Expr r = apply_probe(p, right);
    SupResult lr = sup_term(depth, initial_config(l), so);
    SupResult rr = sup_term(depth, initial_config(r), so);
    std::optional<nat> cost;
    if (right_loop && !rr.saturated) cost = measure_loop_cost(right, p, right_loop->reject);
    ProbeRow row;
    row.probe = p.label();
    row.left = lr.value;
    row.right = rr.value;
    row.left_saturated = lr.saturated;
    row.right_saturated = rr.saturated;
    row.residual = residual_for(rr, depth, right_loop, cost);
    row.pass = lr.value <= rr.value + row.residual.value;
    row.nodes = lr.nodes + rr.nodes;
    rep.nodes += row.nodes;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  rep.ms = elapsed_ms(t0, opts.timing);
  return rep;
}

EquivReport equiv_report(const std::string& name, const Expr& left, const Expr& right, nat depth,
                         const std::vector<Probe>& probes,
                         const std::optional<LoopSpec>& left_loop,
                         const std::optional<LoopSpec>& right_loop, const ReportOptions& opts) {
  EquivReport rep;
  rep.name = name;
  rep.forward = refine_report(name, left, right, depth, probes, left_loop, right_loop, opts);
  rep.backward = refine_report(name, right, left, depth, probes, right_loop, left_loop, opts);
  rep.pass = rep.forward.pass && rep.backward.pass;
  return rep;
}

EntryResult run_entry(const CorpusEntry& entry, std::optional<nat> depth,
                      const ReportOptions& opts) {
  EntryResult res;
  res.name = entry.name;
  res.claim = entry.claim;
  res.expected_fail = entry.expected_fail;
  Expr l = load_program(entry.left);
  Expr r = load_program(entry.right);
  nat d = depth.value_or(entry.depth);
  auto probes = standard_probes(entry.probes);
  if (entry.claim == Claim::Equiv) {
    res.equiv = equiv_report(entry.name, l, r, d, probes, entry.left_loop, entry.right_loop, opts);
    res.pass = res.equiv->pass;
  } else {
    res.refine = refine_report(entry.name, l, r, d, probes, entry.left_loop, entry.right_loop, opts);
    res.pass = res.refine->pass;
  }
  res.ok = entry.expected_fail ? !res.pass : res.pass;
  return res;
}

namespace {

json row_json(const ProbeRow& row) {
  json j;
  j["probe"] = row.probe;
  j["L"] = to_fraction(row.left);
  j["R"] = to_fraction(row.right);
  j["L_saturated"] = row.left_saturated;
  j["R_saturated"] = row.right_saturated;
  j["residual"] = to_fraction(row.residual.value);
  j["residual_kind"] = row.residual.kind;
  if (row.residual.kind == "geometric") j["loop_cost"] = row.residual.loop_cost;
  j["verdict"] = row.pass ? "PASS" : "FAIL";
  j["nodes"] = row.nodes;
  return j;
}

json refine_json(const RefineReport& r) {
  json j;
  j["name"] = r.name;
  j["depth"] = r.depth;
  j["note"] = "finite-depth bracket over a probe family; lower bounds of the true suprema";
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  j["probes"] = rows;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  j["nodes"] = r.nodes;
  j["ms"] = r.ms;
  return j;
}

std::string fmt(const Rat& r, bool decimal) {
  return decimal ? to_string(r) + " (" + to_decimal(r) + ")" : to_string(r);
}

}  // namespace

std::string report_json(const RefineReport& r) { return refine_json(r).dump(2) + "\n"; }

std::string report_json(const EquivReport& r) {
  json j;
  j["name"] = r.name;
  j["forward"] = refine_json(r.forward);
  j["backward"] = refine_json(r.backward);
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  return j.dump(2) + "\n";
}

std::string report_text(const RefineReport& r, bool decimal) {
  std::ostringstream os;
  os << "refine " << r.name << " at depth " << r.depth
     << " (finite-depth lower bounds over a probe family)\n";
  for (const auto& row : r.rows) {
    os << "  " << row.probe << ": L = " << fmt(row.left, decimal) << (row.left_saturated ? "" : "+")
       << ", R = " << fmt(row.right, decimal) << (row.right_saturated ? "" : "+")
       << ", residual = " << fmt(row.residual.value, decimal) << " [" << row.residual.kind;
    if (row.residual.kind == "geometric") os << ", c = " << row.residual.loop_cost;
    os << "] " << (row.pass ? "PASS" : "FAIL") << "\n";
  }
  os << "  verdict: " << (r.pass ? "PASS" : "FAIL") << ", nodes " << r.nodes << ", ms " << r.ms
     << "\n";
  return os.str();
}

std::string report_text(const EquivReport& r, bool decimal) {
  return report_text(r.forward, decimal) + report_text(r.backward, decimal) +
         "equiv verdict: " + (r.pass ? "PASS" : "FAIL") + "\n";
}

std::string sup_report_json(const std::string& program, const Expr& e, nat depth,
                            const std::vector<std::string>& probes, const ReportOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  SupOptions so;
  so.workers = opts.workers;
  Config rho = initial_config(e);
  SupResult t = sup_term(depth, rho, so);
  std::uint64_t nodes = t.nodes;
  json ps = json::array();
  for (const auto& p : probes) {
    Expr k = parse_value(p);
    SupResult m = sup_value_mass(depth, rho, [&](const Val& v) { return v.expr() == k; }, so);
    nodes += m.nodes;
    json pj;
    pj["value"] = p;
    pj["mass"] = to_fraction(m.value);
    ps.push_back(pj);
  }
  json j;
  j["program"] = program;
  j["depth"] = depth;
  j["sup_term"] = to_fraction(t.value);
  j["saturated"] = t.saturated;
  j["probes"] = ps;
  j["nodes"] = nodes;
  j["ms"] = elapsed_ms(t0, opts.timing);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Algebraic suite

namespace {

struct SideSeries {
  Rat value;
  bool saturated;
  nat depth;
};

// Value at the first saturated depth, or at max_depth.
SideSeries settle(const Expr& e, const std::string& leaf, nat max_depth) {
  Expr k = parse_value(leaf);
  auto series = sup_value_series(max_depth, initial_config(e),
                                 [&](const Val& v) { return v.expr() == k; });
  for (nat d = 0; d < series.size(); ++d)
    if (series[d].saturated) return {series[d].value, true, d};
  return {series.back().value, false, max_depth};
}

}  // namespace

std::vector<LawResult> algebraic_suite(const Rat& p, const Rat& q,
                                       const std::vector<std::string>& leaves, nat max_depth) {
  if (leaves.size() != 3) throw std::invalid_argument("algebraic_suite: needs three leaves");
  const std::string& e1 = leaves[0];
  const std::string& e2 = leaves[1];
  const std::string& e3 = leaves[2];
  Rat one(1);
  Rat zero(0);
  struct Law {
    std::string name, left, right;
    bool both;
    // expected masses per leaf for left and right
    std::vector<Rat> left_mass, right_mass;
  };
  std::vector<Law> laws;
  laws.push_back({"prob-idempotence", prob_choice(p, e1, e1), e1, true, {one, zero, zero},
                  {one, zero, zero}});
  laws.push_back({"prob-commutativity", prob_choice(p, e1, e2), prob_choice(one - p, e2, e1), true,
                  {p, one - p, zero}, {p, one - p, zero}});
  if (p * q != 1) {
    Rat inner = (q - p * q) / (one - p * q);
    Rat m1 = p * q, m2 = q * (one - p), m3 = one - q;
    laws.push_back({"prob-associativity", prob_choice(q, prob_choice(p, e1, e2), e3),
                    prob_choice(p * q, e1, prob_choice(inner, e2, e3)), true, {m1, m2, m3},
                    {m1, m2, m3}});
  }
  laws.push_back({"nd-idempotence", nd_choice(e1, e1), e1, true, {one, zero, zero},
                  {one, zero, zero}});
  laws.push_back({"nd-commutativity", nd_choice(e1, e2), nd_choice(e2, e1), true, {one, one, zero},
                  {one, one, zero}});
  laws.push_back({"nd-associativity", nd_choice(e1, nd_choice(e2, e3)),
                  nd_choice(nd_choice(e1, e2), e3), true, {one, one, one}, {one, one, one}});
  laws.push_back({"nd-unit", nd_choice(e1, "diverge ()"), e1, true, {one, zero, zero},
                  {one, zero, zero}});
  laws.push_back({"distributivity", nd_choice(prob_choice(p, e1, e2), prob_choice(p, e1, e3)),
                  prob_choice(p, e1, nd_choice(e2, e3)), false, {p, one - p, one - p},
                  {p, one - p, one - p}});

  std::vector<LawResult> out;
  for (const Law& law : laws) {
    LawResult lr;
    lr.law = law.name;
    lr.left = law.left;
    lr.right = law.right;
    lr.both_directions = law.both;
    Expr l = load_program(prelude() + law.left);
    Expr r = load_program(prelude() + law.right);
    // the expressions are observed directly through value probes
    lr.pass = true;
    lr.saturated = true;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      // a leaf repeated in the list is probed once
      if (std::find(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(i), leaves[i]) !=
          leaves.begin() + static_cast<std::ptrdiff_t>(i))
        continue;
      Rat exp_l = 0, exp_r = 0;
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        if (leaves[k] != leaves[i]) continue;
        exp_l = std::max(exp_l, law.left_mass[k]);
        exp_r = std::max(exp_r, law.right_mass[k]);
      }
      SideSeries ls = settle(l, leaves[i], max_depth);
      SideSeries rs = settle(r, leaves[i], max_depth);
      lr.depth = std::max({lr.depth, ls.depth, rs.depth});
      lr.saturated = lr.saturated && ls.saturated && rs.saturated;
      bool ok = ls.value == exp_l && rs.value == exp_r && ls.value <= rs.value;
      if (law.both) ok = ok && rs.value <= ls.value;
      lr.pass = lr.pass && ok;
      lr.masses.emplace_back(leaves[i], ls.value, rs.value, law.both ? exp_l : exp_r);
    }
    out.push_back(std::move(lr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counterexample suite

nat no_optimal_depth(nat k) { return 5 * k + 9; }

GapSuite counterexample_suite() {
  GapSuite g;
  struct P {
    std::string name;
    std::string src;
  };
  std::vector<P> progs = {{"progA", prog_a_source()},
                          {"progB", prog_b_source()},
                          {"progC", prog_c_source()},
                          {"progD", prog_d_source()}};
  std::map<std::string, Rat> at10;
  for (const auto& p : progs) {
    Expr e = load_program(p.src);
    // nondet () makes the reachable state space infinite, so no limit solve
    auto series =
        sup_value_series(30, initial_config(e), [](const Val&) { return true; }, false, false);
    for (nat d : {1, 3, 10, 30}) {
      g.presampling.emplace_back(p.name, d, series[d].value, series[d].saturated);
    }
    at10[p.name] = series[10].value;
  }
  g.gap = at10["progA"] - at10["progD"];
  g.notes.push_back("progA <= progB holds operationally: nondet () can match the sample");
  g.notes.push_back(
      "progB <= progC fails operationally: with right-to-left evaluation nondet () runs before "
      "the labelled sample, so progC stays at 1/2; this is the link the unsound rule asserts");
  g.notes.push_back("progC <= progD holds operationally");
  bool ok = g.gap == make_rat(1, 2);

  Expr lhs = load_program(no_optimal_source());
  auto series = sup_value_series(no_optimal_depth(8), initial_config(lhs),
                                 [](const Val&) { return true; }, false, false);
  Rat prev = -1;
  for (nat k = 1; k <= 8; ++k) {
    nat d = no_optimal_depth(k);
    Rat v = series[d].value;
    g.no_optimal.emplace_back(k, d, v);
    Rat bound = 1 - make_rat(1, k + 1);
    ok = ok && v >= bound && v <= 1 && v > prev;
    prev = v;
  }
  g.pass = ok;
  return g;
}

// ---------------------------------------------------------------------------
// Selftest

SelftestSummary selftest(const ReportOptions& opts) {
  SelftestSummary s;
  auto line = [&](bool ok, const std::string& text, bool expected_fail = false) {
    std::string tag = ok ? (expected_fail ? "EXPECTED-FAIL" : "PASS") : "FAIL";
    s.lines.push_back(tag + "  " + text);
    s.ok = s.ok && ok;
  };
  // entries are independent: fan them out, report in corpus order
  const auto& entries = corpus();
  std::vector<EntryResult> results(entries.size());
  {
    ReportOptions inner = opts;
    inner.workers = 1;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next++) < entries.size();)
        results[i] = run_entry(entries[i], std::nullopt, inner);
    };
    unsigned n = std::max(1U, std::min<unsigned>(opts.workers, entries.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& entry = entries[i];
    const EntryResult& r = results[i];
    std::string detail = entry.name + " (" + to_string(entry.claim) + ", depth " +
                         std::to_string(entry.depth) + ")";
    if (r.equiv) {
      for (const auto* side : {&r.equiv->forward, &r.equiv->backward})
        for (const auto& row : side->rows)
          if (row.probe.rfind("value=", 0) == 0 && !(row.left == row.right))
            detail += " [" + row.probe + " " + to_string(row.left) + " vs " +
                      to_string(row.right) + "]";
    }
    line(r.ok, detail, entry.expected_fail);
  }
  for (auto [p, q] : {std::pair<Rat, Rat>{make_rat(1, 2), make_rat(1, 3)},
                      {make_rat(1, 3), make_rat(1, 2)}}) {
    for (const auto& law : algebraic_suite(p, q, {"0", "1", "2"})) {
      line(law.pass, "law " + law.law + " p=" + to_string(p) + " q=" + to_string(q) +
                         (law.saturated ? " (saturated)" : " (unsaturated lower bounds)"));
    }
  }
  GapSuite g = counterexample_suite();
  line(g.pass, "counterexamples: progA/progD gap " + to_string(g.gap) +
                   ", no-optimal series bounded and increasing");
  bool premises = true;
  for (const auto& pr : all_rule_premises()) premises = premises && pr.holds;
  line(premises, "coupling rule premises at eps = 0");
  for (const auto& c : validate_fisch_lemmas().checks) {
    line(c.pass(), "fisch " + c.property + ": " + std::to_string(c.comparisons) + " comparisons over " +
                       std::to_string(c.instances) + " instances" +
                       (c.failures ? ", first failure " + c.first_failure : ""));
  }
  return s;
}

}  // namespace fox
