#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "fox/corpus.hpp"
#include "fox/sched.hpp"
#include "fox/syntax.hpp"

namespace fox {

// ---------------------------------------------------------------------------
// Probe contexts

enum class ProbeKind { Value, Termination, Interference };

struct Probe {
  ProbeKind kind = ProbeKind::Value;
  std::string value;  // literal source, unused for termination probes

  std::string label() const;
};

/// diverge () as an expression.
Expr diverge_expr();

/// if e = k then () else diverge ()
Expr value_probe(const Expr& e, const Expr& k);
/// let _ = e in ()
Expr termination_probe(const Expr& e);
/// let r = ref 0 in fork (r := 1); if e = k then () else diverge ()
Expr interference_probe(const Expr& e, const Expr& k);

/// Parses a value literal ("0", "true", "()", "(1, 2)").
Expr parse_value(const std::string& text);

Expr apply_probe(const Probe& p, const Expr& e);

/// Value probes for each literal, plus one termination probe and one
/// interference probe on the first literal.
std::vector<Probe> standard_probes(const std::vector<std::string>& values);

// ---------------------------------------------------------------------------
// Programs

/// Parses and typechecks; throws ParseError / TypeError.
Expr load_program(const std::string& source);

// ---------------------------------------------------------------------------
// Loop costs and residuals

/// Termination mass of `e` under the greedy scheduler after n steps, for
/// n = 0..max_steps.
std::vector<Rat> greedy_term_series(const Expr& e, nat max_steps);

/// Per-iteration cost c of a rejection loop: with d1 the first depth at which
/// the greedy termination mass of the terminating variant reaches 1 - rho and
/// d2 the first at which it reaches 1 - rho^2, c = max(d1, d2 - d1). The
/// terminating variant replaces the probe's diverge branch by ().
/// Returns nullopt if either threshold is not reached within max_steps.
std::optional<nat> measure_loop_cost(const Expr& program, const Probe& probe, const Rat& reject,
                                     nat max_steps = 400);

struct Residual {
  std::string kind;  // "zero" (saturated), "geometric", "exact" (solved limit), "trivial"
  Rat value;
  nat loop_cost = 0;  // geometric only
};

/// Bound on V_inf - V_D for one side.
Residual residual_for(const SupResult& r, nat depth, const std::optional<LoopSpec>& loop,
                      std::optional<nat> loop_cost);

// ---------------------------------------------------------------------------
// Reports

struct ReportOptions {
  unsigned workers = 1;
  bool timing = false;  // with timing off, ms is reported as 0
};

struct ProbeRow {
  std::string probe;
  Rat left;
  Rat right;
  bool left_saturated = false;
  bool right_saturated = false;
  Residual residual;  // on the right side
  bool pass = false;
  std::uint64_t nodes = 0;
};

struct RefineReport {
  std::string name;
  nat depth = 0;
  std::vector<ProbeRow> rows;
  bool pass = true;
  std::uint64_t nodes = 0;
  std::int64_t ms = 0;
};

struct EquivReport {
  std::string name;
  RefineReport forward;
  RefineReport backward;
  bool pass = true;
};

/// For every probe C: L = sup_term(depth, C[left]), R = sup_term(depth,
/// C[right]), residual r on the right, PASS iff L <= R + r. The loop specs
/// describe rejection loops of the respective sides.
RefineReport refine_report(const std::string& name, const Expr& left, const Expr& right, nat depth,
                           const std::vector<Probe>& probes,
                           const std::optional<LoopSpec>& left_loop = std::nullopt,
                           const std::optional<LoopSpec>& right_loop = std::nullopt,
                           const ReportOptions& opts = {});

EquivReport equiv_report(const std::string& name, const Expr& left, const Expr& right, nat depth,
                         const std::vector<Probe>& probes,
                         const std::optional<LoopSpec>& left_loop = std::nullopt,
                         const std::optional<LoopSpec>& right_loop = std::nullopt,
                         const ReportOptions& opts = {});

/// Runs the entry's claim at its desk depth (or `depth` when given).
struct EntryResult {
  std::string name;
  Claim claim;
  bool expected_fail = false;
  std::optional<RefineReport> refine;
  std::optional<EquivReport> equiv;
  bool pass = false;
  /// pass, or failure on an expected-fail entry
  bool ok = false;
};

EntryResult run_entry(const CorpusEntry& entry, std::optional<nat> depth = std::nullopt,
                      const ReportOptions& opts = {});

std::string report_json(const RefineReport& r);
std::string report_json(const EquivReport& r);
std::string report_text(const RefineReport& r, bool decimal = false);
std::string report_text(const EquivReport& r, bool decimal = false);

/// {"program","depth","sup_term","probes":[{"value","mass"}],"nodes","ms"}
std::string sup_report_json(const std::string& program, const Expr& e, nat depth,
                            const std::vector<std::string>& probes, const ReportOptions& opts = {});

// ---------------------------------------------------------------------------
// Suites

struct LawResult {
  std::string law;
  std::string left;
  std::string right;
  bool both_directions = true;
  /// probe literal -> (L, R, expected)
  std::vector<std::tuple<std::string, Rat, Rat, Rat>> masses;
  bool saturated = false;
  nat depth = 0;
  bool pass = false;
};

/// The convex-algebra and semilattice laws over value leaves, plus the
/// single stated direction of the distributive law. Expected masses are
/// derived from p and q by hand-expanding each side.
std::vector<LawResult> algebraic_suite(const Rat& p, const Rat& q,
                                       const std::vector<std::string>& leaves, nat max_depth = 40);

struct GapSuite {
  // name -> (depth, sup_term)
  std::vector<std::tuple<std::string, nat, Rat, bool>> presampling;
  Rat gap;
  /// (k, depth(k), sup_term)
  std::vector<std::tuple<nat, nat, Rat>> no_optimal;
  bool pass = false;
  std::vector<std::string> notes;
};

/// Depth at which nondet () can return k in the no-optimal program, under
/// the step accounting of the interpreter.
nat no_optimal_depth(nat k);

GapSuite counterexample_suite();

struct SelftestSummary {
  std::vector<std::string> lines;
  bool ok = true;
};

SelftestSummary selftest(const ReportOptions& opts = {});

}  // namespace fox
