// Copyright 2026 The kdistinct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kdistinct/combinatorics.hpp"
#include "kdistinct/experiments.hpp"
#include "kdistinct/full_walk.hpp"
#include "kdistinct/reduced_model.hpp"
#include "kdistinct/two_register.hpp"

namespace py = pybind11;
using namespace kdistinct;

namespace {

StepMode mode_of(const std::string& s) { return parse_step_mode(s); }

py::object json_to_py(const nlohmann::ordered_json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Staggered quantum walk simulator for element k-distinctness";
  m.attr("__version__") = kToolVersion;

  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_MemoryError);

  m.def("nearest_r", &nearest_r, py::arg("n"), py::arg("k"));
  m.def("binomial", &binomial, py::arg("n"), py::arg("m"));

  py::class_<ProblemParams>(m, "ProblemParams")
      .def(py::init([](int n, int k, std::optional<int> r, std::optional<int> mm) {
             return ProblemParams::make(n, k, r, mm);
           }),
           py::arg("n"), py::arg("k") = 2, py::arg("r") = py::none(), py::arg("m") = py::none())
      .def_readonly("n", &ProblemParams::n)
      .def_readonly("k", &ProblemParams::k)
      .def_readonly("r", &ProblemParams::r)
      .def_readonly("m", &ProblemParams::m)
      .def_property_readonly("reduced_regime", &ProblemParams::reduced_regime)
      .def("__repr__", [](const ProblemParams& p) {
        return "ProblemParams(n=" + std::to_string(p.n) + ", k=" + std::to_string(p.k) +
               ", r=" + std::to_string(p.r) + ", m=" + std::to_string(p.m) + ")";
      });

  py::class_<KDistinctnessInstance>(m, "Instance")
      .def_static("from_values", &KDistinctnessInstance::from_values, py::arg("values"),
                  py::arg("k"))
      .def_static("random_unique", &KDistinctnessInstance::random_unique, py::arg("n"),
                  py::arg("k"), py::arg("m"), py::arg("seed"))
      .def_readonly("values", &KDistinctnessInstance::values)
      .def_readonly("colliding_set", &KDistinctnessInstance::colliding_set);

  m.def("classical_k_collision",
        [](const std::vector<long long>& v, int k) { return classical_k_collision(v, k); },
        py::arg("values"), py::arg("k"));

  m.def("step_parameters",
        [](const ProblemParams& p, const std::string& mode) {
          const auto s = step_parameters(p, mode_of(mode));
          return py::make_tuple(s.t1, s.t2);
        },
        py::arg("params"), py::arg("mode") = "closed");
  m.def("success_probability", &success_probability, py::arg("params"), py::arg("t1"),
        py::arg("t2"));
  m.def("success_trajectory", &success_trajectory, py::arg("params"), py::arg("t2"),
        py::arg("t1_max"));
  m.def("eigenphases", &eigenphases, py::arg("params"));
  m.def("overlaps_k0", &overlaps_k0, py::arg("params"));
  m.def("asymptotic_success", &asymptotic_success, py::arg("params"));
  m.def("reduced_step_matrix", [](const ProblemParams& p) { return build_reduced_walk(p).step; },
        py::arg("params"));
  m.def("initial_reduced_state",
        [](const ProblemParams& p) { return initial_reduced_state(p).amplitudes; },
        py::arg("params"));

  m.def("run_full",
        [](const ProblemParams& p, const KDistinctnessInstance& inst, int t1, int t2,
           std::uint64_t cap) {
          auto res = run_full_algorithm(p, inst, t1, t2, cap);
          return py::make_tuple(std::move(res.state.amplitudes), res.marked_probability);
        },
        py::arg("params"), py::arg("instance"), py::arg("t1"), py::arg("t2"),
        py::arg("cap") = kDefaultStateCap,
        "Returns (amplitudes, marked_probability) in canonical vertex order.");
  m.def("run_two_register",
        [](const ProblemParams& p, const KDistinctnessInstance& inst, int t1, int t2) {
          const auto res = run_two_register_microsim(p, inst, t1, t2);
          py::dict d;
          d["marginal"] = res.marginal;
          d["marked_probability"] = res.marked_probability;
          d["violations"] = res.setup_violations + res.oracle_violations +
                            res.beta_violations + res.restore_violations;
          d["oracle_queries"] = res.oracle_queries;
          return d;
        },
        py::arg("params"), py::arg("instance"), py::arg("t1"), py::arg("t2"));
  m.def("vertices",
        [](int n, int r) {
          VertexTable t(n, r);
          std::vector<std::pair<std::vector<int>, int>> out;
          out.reserve(t.size());
          for (std::size_t i = 0; i < t.size(); ++i) {
            auto v = t.vertex(i);
            out.emplace_back(std::move(v.subset), v.y);
          }
          return out;
        },
        py::arg("n"), py::arg("r"));

  m.def("params_report",
        [](int n, int k, std::optional<int> r, const std::string& mode) {
          ExperimentConfig c;
          c.n = n;
          c.k = k;
          c.r = r;
          c.mode = mode_of(mode);
          return json_to_py(params_report(c));
        },
        py::arg("n"), py::arg("k") = 2, py::arg("r") = py::none(), py::arg("mode") = "closed");
  m.def("sample",
        [](const ProblemParams& p, const KDistinctnessInstance& inst, int t1, int t2,
           long long samples, std::uint64_t seed) {
          const auto s = sample_run(p, inst, {t1, t2}, samples, seed);
          py::dict d;
          d["exact_probability"] = s.exact_probability;
          d["samples"] = s.samples;
          d["successes"] = s.successes;
          d["empirical_rate"] = s.empirical_rate;
          d["z_score"] = s.z_score;
          d["within_3_sigma"] = s.within_3_sigma;
          return d;
        },
        py::arg("params"), py::arg("instance"), py::arg("t1"), py::arg("t2"),
        py::arg("samples"), py::arg("seed") = 1);
  m.def("verify",
        [](std::optional<double> tol, std::vector<std::string> skip, std::uint64_t seed) {
          VerifyOptions o;
          o.tolerance = tol;
          o.skip = std::move(skip);
          o.seed = seed;
          py::list out;
          for (const auto& c : run_verification(o)) {
            py::dict d;
            d["name"] = c.name;
            d["tolerance"] = c.tolerance;
            d["measured"] = c.measured;
            d["passed"] = c.passed;
            out.append(d);
          }
          return out;
        },
        py::arg("tolerance") = py::none(), py::arg("skip") = std::vector<std::string>{},
        py::arg("seed") = 1);
}
