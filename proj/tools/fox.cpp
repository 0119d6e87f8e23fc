// fox: command-line front end.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fox/coupling.hpp"
#include "fox/harness.hpp"
#include "fox/parse.hpp"
#include "fox/sched.hpp"
#include "fox/typecheck.hpp"

using namespace fox;
using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nat default_depth() {
  if (const char* env = std::getenv("FOX_DEPTH_DEFAULT")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputError(std::string("FOX_DEPTH_DEFAULT is not a number: ") + env);
    }
  }
  return 20;
}

std::string fmt(const Rat& r, bool decimal) {
  return decimal ? to_string(r) + " (~" + to_decimal(r) + ")" : to_string(r);
}

// (label, weight) rows plus whether the rows form one distribution
struct ValueRows {
  std::string scheduler;
  std::vector<std::pair<std::string, Rat>> rows;
  bool per_value_suprema = false;
};

ValueRows value_rows(const Expr& e, nat depth, const std::string& spec, unsigned workers) {
  Config rho = initial_config(e);
  ValueRows out;
  out.scheduler = spec;
  auto from = [&](const Dist<Val>& d) {
    for (const auto& [v, w] : d) out.rows.emplace_back(to_source(v.expr()), w);
  };
  if (spec == "roundrobin") {
    from(exec(round_robin(), depth, std::uint64_t{0}, rho));
  } else if (spec.rfind("random:", 0) == 0) {
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(spec.substr(7));
    } catch (const std::exception&) {
      throw InputError("bad seed in scheduler spec " + spec);
    }
    from(exec(seeded_random(), depth, seed, rho));
  } else if (spec == "maximal") {
    // the best scheduler depends on the observed value, so each row is its own supremum
    out.per_value_suprema = true;
    SupOptions so;
    so.workers = workers;
    for (const Val& v : reachable_values(depth, rho)) {
      SupResult r = sup_value_mass(depth, rho, [&](const Val& x) { return x == v; }, so);
      out.rows.emplace_back(to_source(v.expr()), r.value);
    }
  } else {
    throw InputError("unknown scheduler " + spec + " (roundrobin | random:<seed> | maximal)");
  }
  return out;
}

std::string rows_json(const std::string& file, nat depth, const ValueRows& vr) {
  json j;
  j["program"] = file;
  j["depth"] = depth;
  j["scheduler"] = vr.scheduler;
  j["per_value_suprema"] = vr.per_value_suprema;
  json d = json::array();
  Rat mass = 0;
  for (const auto& [v, w] : vr.rows) {
    d.push_back({{"value", v}, {"p", to_fraction(w)}});
    mass += w;
  }
  j["dist"] = d;
  if (!vr.per_value_suprema) j["mass"] = to_fraction(mass);
  return j.dump(2) + "\n";
}

std::string rows_text(const ValueRows& vr, bool decimal) {
  std::ostringstream os;
  if (vr.per_value_suprema) os << "per-value suprema over schedulers (not one distribution)\n";
  Rat mass = 0;
  for (const auto& [v, w] : vr.rows) {
    os << "  " << v << "  " << fmt(w, decimal) << "\n";
    mass += w;
  }
  if (!vr.per_value_suprema) os << "mass " << fmt(mass, decimal) << "\n";
  return os.str();
}

std::optional<LoopSpec> loop_of(const std::string& text) {
  if (text.empty()) return std::nullopt;
  Rat r;
  try {
    r = parse_rat(text);
  } catch (const std::exception&) {
    throw InputError("bad rejection probability " + text);
  }
  if (!in_unit_interval(r)) throw InputError("rejection probability outside [0,1]: " + text);
  return LoopSpec{r};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fox: interpreter and refinement checker for a concurrent probabilistic language"};
  app.require_subcommand(1);

  nat depth = 0;
  bool depth_given = false;
  std::string scheduler = "roundrobin";
  std::vector<std::string> probes;
  bool as_json = false;
  bool decimal = false;
  bool timing = false;
  unsigned workers = 1;
  std::string file, left, right, left_reject, right_reject;
  bool equiv = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option_function<nat>(
        "--depth", [&](const nat& d) { depth = d, depth_given = true; },
        "step bound (default FOX_DEPTH_DEFAULT or 20)");
    sub->add_flag("--json", as_json, "JSON output");
    sub->add_flag("--decimal", decimal, "add a decimal approximation next to each rational");
    sub->add_flag("--timing", timing, "report wall-clock milliseconds");
    sub->add_option("--workers", workers, "parallel fan-out (results do not depend on it)")
        ->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "value distribution of thread 0 under a scheduler");
  run->add_option("file", file, "program")->required();
  run->add_option("--scheduler", scheduler, "roundrobin | random:<seed> | maximal");
  common(run);

  auto* dist = app.add_subcommand("dist", "as run, JSON output");
  dist->add_option("file", file, "program")->required();
  dist->add_option("--scheduler", scheduler, "roundrobin | random:<seed> | maximal");
  common(dist);

  auto* sup = app.add_subcommand("sup", "depth-bounded supremum of termination over schedulers");
  sup->add_option("file", file, "program")->required();
  sup->add_option("--probe", probes, "value literals whose supremum mass to report");
  common(sup);

  auto* refine = app.add_subcommand("refine", "probe-family refinement report");
  refine->add_option("left", left, "implementation")->required();
  refine->add_option("right", right, "specification")->required();
  refine->add_option("--probe", probes, "value literals");
  refine->add_flag("--equiv", equiv, "check both directions");
  refine->add_option("--left-reject", left_reject, "rejection probability of a loop on the left");
  refine->add_option("--right-reject", right_reject, "rejection probability of a loop on the right");
  common(refine);

  auto* couple = app.add_subcommand("couple", "minimal eps of an approximate coupling query");
  couple->add_option("file", file, "query JSON")->required();
  common(couple);

  auto* self = app.add_subcommand("selftest", "corpus, law suites, counterexamples and lemma checks");
  common(self);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!depth_given) depth = default_depth();
    ReportOptions ro;
    ro.workers = workers;
    ro.timing = timing;

    if (run->parsed() || dist->parsed()) {
      Expr e = load_program(read_file(file));
      ValueRows vr = value_rows(e, depth, scheduler, workers);
      if (dist->parsed() || as_json)
        std::cout << rows_json(file, depth, vr);
      else
        std::cout << rows_text(vr, decimal);
      return 0;
    }
    if (sup->parsed()) {
      Expr e = load_program(read_file(file));
      if (as_json) {
        std::cout << sup_report_json(file, e, depth, probes, ro);
        return 0;
      }
      SupOptions so;
      so.workers = workers;
      Config rho = initial_config(e);
      SupResult t = sup_term(depth, rho, so);
      std::cout << fmt(t.value, decimal) << (t.saturated ? "" : "  (lower bound, not saturated)")
                << "\n";
      for (const auto& p : probes) {
        Expr k = parse_value(p);
        SupResult m = sup_value_mass(depth, rho, [&](const Val& v) { return v.expr() == k; }, so);
        std::cout << "  value=" << p << "  " << fmt(m.value, decimal)
                  << (m.saturated ? "" : "  (lower bound)") << "\n";
      }
      return 0;
    }
    if (refine->parsed()) {
      Expr l = load_program(read_file(left));
      Expr r = load_program(read_file(right));
      auto ps = probes.empty() ? std::vector<Probe>{Probe{ProbeKind::Termination, ""}}
                               : standard_probes(probes);
      auto ll = loop_of(left_reject);
      auto rl = loop_of(right_reject);
      std::string name = left + " vs " + right;
      if (equiv) {
        EquivReport rep = equiv_report(name, l, r, depth, ps, ll, rl, ro);
        std::cout << (as_json ? report_json(rep) : report_text(rep, decimal));
        return rep.pass ? 0 : 1;
      }
      RefineReport rep = refine_report(name, l, r, depth, ps, ll, rl, ro);
      std::cout << (as_json ? report_json(rep) : report_text(rep, decimal));
      return rep.pass ? 0 : 1;
    }
    if (couple->parsed()) {
      StringQuery q = parse_coupling_query(read_file(file));
      Rat eps = arcoupl_min_eps(q.mu1, q.mu2, q.rel);
      bool pass = eps <= q.eps;
      if (as_json) {
        json j;
        j["query"] = file;
        j["min_eps"] = to_fraction(eps);
        j["eps"] = to_fraction(q.eps);
        j["verdict"] = pass ? "PASS" : "FAIL";
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "min eps = " << fmt(eps, decimal) << ", budget " << fmt(q.eps, decimal) << ": "
                  << (pass ? "PASS" : "FAIL") << "\n";
      }
      return pass ? 0 : 1;
    }
    if (self->parsed()) {
      SelftestSummary s = selftest(ro);
      if (as_json) {
        json j;
        j["lines"] = s.lines;
        j["ok"] = s.ok;
        std::cout << j.dump(2) << "\n";
      } else {
        for (const auto& line : s.lines) std::cout << line << "\n";
        std::cout << (s.ok ? "selftest: ok" : "selftest: FAIL") << "\n";
      }
      return s.ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
