// Python module _fox. Rationals cross the boundary as "n/d" strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fox/coupling.hpp"
#include "fox/fisch_check.hpp"
#include "fox/harness.hpp"
#include "fox/parse.hpp"
#include "fox/sched.hpp"
#include "fox/typecheck.hpp"

namespace py = pybind11;
using namespace fox;

namespace {

py::dict sup_dict(const SupResult& r) {
  py::dict d;
  d["value"] = to_fraction(r.value);
  d["saturated"] = r.saturated;
  d["limit"] = r.limit ? py::object(py::str(to_fraction(*r.limit))) : py::object(py::none());
  d["nodes"] = r.nodes;
  return d;
}

Dist<std::string> dist_of(const std::map<std::string, std::string>& weights) {
  Dist<std::string> d;
  for (const auto& [k, w] : weights) d.add(k, parse_rat(w));
  if (!in_unit_interval(d.mass())) throw std::invalid_argument("weights sum outside [0,1]");
  return d;
}

}  // namespace

PYBIND11_MODULE(_fox, m) {
  m.doc() = "interpreter and refinement checker for a concurrent probabilistic language";
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TypeError>(m, "TypeError", PyExc_ValueError);

  m.def("typecheck", [](const std::string& src) { return typecheck(parse(src)).str(); },
        "Type of a program, raising ParseError or TypeError.");

  m.def(
      "sup_term",
      [](const std::string& src, nat depth, unsigned workers) {
        SupOptions so;
        so.workers = workers;
        Expr e = load_program(src);
        SupResult r;
        {
          py::gil_scoped_release nogil;
          r = sup_term(depth, initial_config(e), so);
        }
        return sup_dict(r);
      },
      py::arg("source"), py::arg("depth"), py::arg("workers") = 1);

  m.def(
      "sup_value",
      [](const std::string& src, const std::string& value, nat depth) {
        Expr k = parse_value(value);
        Expr e = load_program(src);
        return sup_dict(
            sup_value_mass(depth, initial_config(e), [&](const Val& v) { return v.expr() == k; }));
      },
      py::arg("source"), py::arg("value"), py::arg("depth"));

  m.def(
      "run",
      [](const std::string& src, nat depth, std::uint64_t seed, bool random) {
        Config rho = initial_config(load_program(src));
        Dist<Val> d = random ? exec(seeded_random(), depth, seed, rho)
                             : exec(round_robin(), depth, std::uint64_t{0}, rho);
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [v, w] : d) out.emplace_back(to_source(v.expr()), to_fraction(w));
        return out;
      },
      py::arg("source"), py::arg("depth"), py::arg("seed") = 0, py::arg("random") = false);

  m.def(
      "refine_json",
      [](const std::string& left, const std::string& right, nat depth,
         const std::vector<std::string>& probes, bool equiv) {
        Expr l = load_program(left), r = load_program(right);
        auto ps = probes.empty() ? std::vector<Probe>{Probe{ProbeKind::Termination, ""}}
                                 : standard_probes(probes);
        return equiv ? report_json(equiv_report("left vs right", l, r, depth, ps))
                     : report_json(refine_report("left vs right", l, r, depth, ps));
      },
      py::arg("left"), py::arg("right"), py::arg("depth"), py::arg("probes") = std::vector<std::string>{},
      py::arg("equiv") = false);

  m.def(
      "min_eps",
      [](const std::map<std::string, std::string>& mu1, const std::map<std::string, std::string>& mu2,
         const std::set<std::pair<std::string, std::string>>& rel) {
        return to_fraction(arcoupl_min_eps(dist_of(mu1), dist_of(mu2), rel));
      },
      py::arg("mu1"), py::arg("mu2"), py::arg("rel"));

  m.def("min_eps_query", [](const std::string& json_text) {
    StringQuery q = parse_coupling_query(json_text);
    return std::make_pair(to_fraction(arcoupl_min_eps(q.mu1, q.mu2, q.rel)), to_fraction(q.eps));
  });

  m.def("corpus", [] {
    std::vector<py::dict> out;
    for (const auto& e : corpus()) {
      py::dict d;
      d["name"] = e.name;
      d["summary"] = e.summary;
      d["left"] = e.left;
      d["right"] = e.right;
      d["claim"] = to_string(e.claim);
      d["probes"] = e.probes;
      d["depth"] = e.depth;
      d["expected_fail"] = e.expected_fail;
      out.push_back(d);
    }
    return out;
  });

  m.def(
      "validate_fisch_lemmas",
      [](nat instances, nat max_depth) {
        std::vector<py::dict> out;
        for (const auto& c : validate_fisch_lemmas(instances, max_depth).checks) {
          py::dict d;
          d["property"] = c.property;
          d["comparisons"] = c.comparisons;
          d["nontrivial"] = c.nontrivial;
          d["failures"] = c.failures;
          out.push_back(d);
        }
        return out;
      },
      py::arg("instances") = 50, py::arg("max_depth") = 4);
}
