#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "fox/harness.hpp"
#include "fox/parse.hpp"
#include "fox/typecheck.hpp"

using namespace fox;

namespace {

Rat sup_of(const Expr& e, nat depth) { return sup_term(depth, initial_config(e)).value; }

Expr prog(const std::string& body) { return load_program(prelude() + body); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("probe contexts") {
  Expr coin = prog("rand 1");
  CHECK(sup_of(value_probe(coin, parse_value("1")), 10) == make_rat(1, 2));
  CHECK(sup_of(value_probe(coin, parse_value("2")), 10) == 0);
  CHECK(sup_of(termination_probe(coin), 10) == 1);
  CHECK(sup_of(termination_probe(diverge_expr()), 10) == 0);
  CHECK(sup_of(interference_probe(coin, parse_value("0")), 12) == make_rat(1, 2));
  // the interfering write can be observed by a program that reads a shared cell only through it
  CHECK(sup_of(value_probe(prog("let r = ref 0 in fork (r := 1); !r"), parse_value("1")), 10) == 1);

  auto ps = standard_probes({"0", "1"});
  REQUIRE(ps.size() == 4);
  CHECK(ps[0].label() == "value=0");
  CHECK(ps[2].kind == ProbeKind::Termination);
  CHECK(ps[3].kind == ProbeKind::Interference);
  CHECK(to_source(parse_value("(1, true)")) == "(1, true)");
  CHECK_THROWS(parse_value("x + 1"));
}

TEST_CASE("program loading errors") {
  CHECK_THROWS_AS(load_program("let x = in 1"), ParseError);
  CHECK_THROWS_AS(load_program("1 + true"), TypeError);
  CHECK_NOTHROW(load_program(prelude() + "nondet ()"));
}

TEST_CASE("residual kinds") {
  SupResult r;
  r.value = make_rat(3, 8);
  r.saturated = true;
  CHECK(residual_for(r, 10, std::nullopt, std::nullopt).kind == "zero");
  r.saturated = false;
  auto g = residual_for(r, 10, LoopSpec{make_rat(1, 2)}, 3);
  CHECK(g.kind == "geometric");
  CHECK(g.value == make_rat(1, 8));
  r.limit = make_rat(1, 2);
  CHECK(residual_for(r, 10, std::nullopt, std::nullopt).value == make_rat(1, 8));
  CHECK(residual_for(r, 10, std::nullopt, std::nullopt).kind == "exact");
  r.limit.reset();
  CHECK(residual_for(r, 10, std::nullopt, std::nullopt).value == make_rat(5, 8));
}

TEST_CASE("geometric residual covers the true gap of the rejection sampler") {
  // rand 3 accepted when <= 1: the value 0 has limit mass 1/2
  Expr e = load_program(rejection_source(3, 1));
  Probe p{ProbeKind::Value, "0"};
  auto c = measure_loop_cost(e, p, make_rat(1, 2));
  REQUIRE(c);
  CHECK(*c > 0);
  SupOptions so;
  so.certify = false;
  for (nat d = 0; d <= 40; d += 5) {
    SupResult r = sup_term(d, initial_config(apply_probe(p, e)), so);
    Residual res = residual_for(r, d, LoopSpec{make_rat(1, 2)}, c);
    CAPTURE(d);
    CHECK(r.value <= make_rat(1, 2));
    CHECK(r.value + res.value >= make_rat(1, 2));
  }
}

TEST_CASE("refinement reports") {
  Expr impl = load_program(batch_impl_source(1, 1));
  Expr spec = load_program(batch_spec_source(1, 1));
  auto probes = standard_probes({"0", "1", "2", "3"});
  RefineReport rep = refine_report("batch", impl, spec, 24, probes);
  CHECK(rep.pass);
  for (const auto& row : rep.rows) {
    CAPTURE(row.probe);
    if (row.probe.rfind("value=", 0) == 0 || row.probe.rfind("interfered", 0) == 0)
      CHECK(row.left == make_rat(1, 4));
    else
      CHECK(row.left == 1);
    CHECK(row.left == row.right);
  }

  ReportOptions four;
  four.workers = 4;
  CHECK(report_json(refine_report("batch", impl, spec, 24, probes)) ==
        report_json(refine_report("batch", impl, spec, 24, probes, std::nullopt, std::nullopt, four)));

  // a constant does not refine a coin on the value it always returns
  RefineReport bad = refine_report("const", prog("0"), prog("rand 1"), 10, {Probe{ProbeKind::Value, "0"}});
  CHECK(!bad.pass);
  CHECK(bad.rows.at(0).left == 1);
  CHECK(bad.rows.at(0).right == make_rat(1, 2));
  CHECK(bad.rows.at(0).residual.kind == "zero");
  // the other direction holds
  CHECK(refine_report("const", prog("rand 1"), prog("0"), 10, {Probe{ProbeKind::Value, "0"}}).pass);

  EquivReport eq = equiv_report("const", prog("0"), prog("rand 1"), 10, {Probe{ProbeKind::Value, "0"}});
  CHECK(!eq.pass);
  CHECK(!eq.forward.pass);
  CHECK(eq.backward.pass);

  auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j["verdict"] == "PASS");
  CHECK(j["probes"].size() == probes.size());
  CHECK(j["probes"][0]["residual_kind"] == "zero");
  CHECK(report_text(rep).find("PASS") != std::string::npos);
}

TEST_CASE("sup report JSON") {
  auto j = nlohmann::json::parse(sup_report_json("d", load_program(prog_d_source()), 10, {"()"}));
  CHECK(j["sup_term"] == "1/2");
  CHECK(j["probes"][0]["mass"] == "1/2");
  CHECK(j["ms"] == 0);
}

TEST_CASE("algebraic laws") {
  for (auto [p, q] : {std::pair<Rat, Rat>{make_rat(1, 2), make_rat(1, 3)},
                      {make_rat(2, 3), make_rat(3, 4)}}) {
    auto laws = algebraic_suite(p, q, {"0", "1", "2"});
    CHECK(laws.size() == 8);
    for (const auto& law : laws) {
      CAPTURE(law.law);
      CHECK(law.pass);
      // nondet () never saturates; purely probabilistic sides do
      if (law.law.rfind("prob-", 0) == 0) CHECK(law.saturated);
    }
  }
  // prob-choice with p = 1/3 realised as a sample over rand 2
  CHECK(prob_choice(make_rat(1, 3), "0", "1") == "(if rand 2 < 1 then 0 else 1)");
  CHECK_THROWS_AS(prob_choice(make_rat(4, 3), "0", "1"), std::invalid_argument);
  CHECK_THROWS_AS(algebraic_suite(make_rat(1, 2), make_rat(1, 2), {"0"}), std::invalid_argument);
}

TEST_CASE("counterexample suite") {
  GapSuite g = counterexample_suite();
  CHECK(g.pass);
  CHECK(g.gap == make_rat(1, 2));
  for (const auto& [name, d, v, sat] : g.presampling) {
    CAPTURE(name);
    CAPTURE(d);
    if (name == "progA" && d >= 1) CHECK(v == 1);
    // the spinning counter needs a few steps to reach the sampled bit
    if (name == "progB" && d == 30) CHECK(v == 1);
    if (name == "progC") CHECK(v <= make_rat(1, 2));
    if (name == "progD" && d >= 3) CHECK(v == make_rat(1, 2));
  }
  REQUIRE(g.no_optimal.size() == 8);
  for (std::size_t i = 1; i < g.no_optimal.size(); ++i)
    CHECK(std::get<1>(g.no_optimal[i]) > std::get<1>(g.no_optimal[i - 1]));
}

TEST_CASE("corpus files match the builders") {
  const std::string dir = FOX_CORPUS_DIR;
  auto adv = vn_adversaries().at(1).second;
  std::vector<std::pair<std::string, std::string>> files = {
      {"entropy_mixer.fox", entropy_mixer_source()},
      {"rand1.fox", prelude() + "rand 1\n"},
      {"batch_impl.fox", batch_impl_source(1, 1)},
      {"batch_spec.fox", batch_spec_source(1, 1)},
      {"batch_impl_3_1.fox", batch_impl_source(3, 1)},
      {"batch_spec_3_1.fox", batch_spec_source(3, 1)},
      {"rejection.fox", rejection_source(3, 1)},
      {"rejection_spec.fox", rejection_spec_source(1)},
      {"vn_coin_writer.fox", vn_coin_source(1, adv)},
      {"vn_coin_spec.fox", vn_coin_spec_source(adv)},
      {"sodium.fox", sodium_source(8, 3)},
      {"sodium_spec.fox", sodium_spec_source(8, 3)},
      {"otp_impl.fox", otp_impl_source(1)},
      {"otp_spec.fox", otp_spec_source(1)},
      {"progA.fox", prog_a_source()},
      {"progB.fox", prog_b_source()},
      {"progC.fox", prog_c_source()},
      {"progD.fox", prog_d_source()},
      {"no_optimal.fox", no_optimal_source()},
  };
  for (const auto& [file, src] : files) {
    CAPTURE(file);
    CHECK(slurp(dir + "/" + file) == src);
    CHECK_NOTHROW(load_program(src));
  }
}

TEST_CASE("corpus entries") {
  std::set<std::string> names;
  for (const auto& e : corpus()) {
    CHECK(names.insert(e.name).second);
    CHECK_NOTHROW(load_program(e.left));
    CHECK_NOTHROW(load_program(e.right));
  }
  CHECK_THROWS_AS(corpus_entry("nope"), std::out_of_range);
  for (const char* name : {"batch-1-1", "rejection-3-1", "sodium-8-3", "otp-1", "prog-a-vs-d"}) {
    CAPTURE(name);
    EntryResult r = run_entry(corpus_entry(name));
    CHECK(r.ok);
    CHECK(r.pass != r.expected_fail);
  }
}
