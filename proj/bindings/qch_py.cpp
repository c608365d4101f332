//
// Python module exposing the main operations: model builders, history
// families, consistency analysis, the brute-force evolve oracle and the
// reflectivity sweep.
//

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qch/protocols.hpp"
#include "qch/report.hpp"

namespace py = pybind11;
using namespace qch;

namespace {

HistoryFamily make_family(const CircuitModel& model, const std::string& name) {
  if (name == "FpA") return family_FpA(model);
  if (name == "FC") return family_FC(model, false);
  if (name == "FC-refined") return family_FC(model, true);
  if (name == "Y") return family_Y(model, false);
  if (name == "Y-refined") return family_Y(model, true);
  if (name == "two-cycle-1") return family_two_cycle(model, 1);
  if (name == "two-cycle-2") return family_two_cycle(model, 2);
  throw InvalidArgument("unknown family: " + name);
}

py::dict analyze(const CircuitModel& model, const HistoryFamily& family, double tolerance) {
  ConsistencyReport report = gram_matrix(family, tolerance);
  py::dict out;
  out["consistent"] = report.consistent;
  out["max_offdiag"] = report.max_offdiag;
  out["max_offdiag_all_branches"] = report.max_offdiag_full;
  out["histories"] = report.num_histories;
  out["stated_histories"] = report.unflagged_count;
  out["tolerance"] = report.tolerance;
  py::list kets;
  for (long idx = 0; idx < report.num_histories; ++idx) {
    bool flagged = report.flagged[idx] != 0;
    double n = report.norms[idx];
    if (flagged && n <= tolerance) continue;
    History h = family.history_at(idx);
    py::dict row;
    row["history"] = family.history_label(h);
    row["choices"] = h.choices;
    row["completion"] = flagged;
    row["norm"] = n;
    kets.append(row);
  }
  out["chain_kets"] = kets;
  if (report.consistent)
    out["p_comm_channel_given_final"] =
        channel_visit_probability(model, family, report, model.comm_channel);
  return out;
}

py::list evolve_py(const CircuitModel& model) {
  py::list out;
  for (const auto& state : evolve(model)) {
    py::dict entry;
    entry["norm"] = norm(state);
    py::dict amps;
    for (const auto& [idx, amp] : state.amplitudes())
      if (std::abs(amp) > 1e-12)
        amps[py::str(model.space->basis_label(idx))] = amp;
    entry["amplitudes"] = amps;
    out.append(entry);
  }
  return out;
}

py::dict sweep_fc(bool refined, double lo, double hi, int steps, double inner_r,
                  double tolerance) {
  auto family_at = [&](double r) {
    return family_FC(build_griffiths_mzi(MziConfig::from_reflectivities(r, inner_r)), refined);
  };
  SweepResult result = sweep_consistency(family_at, lo, hi, steps, tolerance);
  py::list rows;
  for (const auto& row : result.rows)
    rows.append(py::make_tuple(row.reflectivity, row.max_offdiag, row.consistent));
  py::list crossings;
  for (const auto& c : result.crossings)
    crossings.append(py::make_tuple(c.reflectivity, c.max_offdiag));
  py::dict out;
  out["rows"] = rows;
  out["crossings"] = crossings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_qch, m) {
  m.doc() = "consistent-histories analysis of nested-interferometer protocols";
  m.attr("__version__") = kToolVersion;

  py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
  py::register_exception<InconsistentFamilyError>(m, "InconsistentFamilyErr",
                                                  PyExc_RuntimeError);

  py::class_<CircuitModel>(m, "CircuitModel")
      .def_property_readonly("channels",
                             [](const CircuitModel& model) { return model.space->channels(); })
      .def_property_readonly("num_steps", &CircuitModel::num_steps)
      .def_property_readonly("comm_channel",
                             [](const CircuitModel& model) { return model.comm_channel; })
      .def_property_readonly("cycles", [](const CircuitModel& model) { return model.cycles; });

  py::class_<HistoryFamily>(m, "HistoryFamily")
      .def_property_readonly("num_slots", &HistoryFamily::num_slots)
      .def_property_readonly("num_histories", &HistoryFamily::num_histories)
      .def("history_label", [](const HistoryFamily& family, const std::vector<int>& choices) {
        return family.history_label(History{choices});
      });

  m.def(
      "mzi", [](int m_, int n_) { return build_griffiths_mzi(MziConfig::protocol(m_, n_)); },
      py::arg("M") = 2, py::arg("N") = 2,
      "Nested Mach-Zehnder at protocol reflectivities cos^2(pi/2M), cos^2(pi/2N)");
  m.def(
      "mzi_reflectivity",
      [](double outer, double inner) {
        return build_griffiths_mzi(MziConfig::from_reflectivities(outer, inner));
      },
      py::arg("outer"), py::arg("inner") = 0.5,
      "Nested Mach-Zehnder with free-form beam-splitter reflectivities");
  m.def(
      "michelson",
      [](int m_, int n_, bool bob_blocks, int cycles) {
        MichelsonConfig config;
        config.m = m_;
        config.n = n_;
        config.bob_blocks = bob_blocks;
        config.outer_cycles = cycles;
        return build_michelson(config);
      },
      py::arg("M") = 2, py::arg("N") = 2, py::arg("bob_blocks") = false, py::arg("cycles") = 1,
      "Michelson outer cycle(s) in the sequential layout");

  m.def("family", &make_family, py::arg("model"), py::arg("name"),
        "FpA | FC | FC-refined | Y | Y-refined | two-cycle-1 | two-cycle-2");
  m.def("analyze", &analyze, py::arg("model"), py::arg("family"),
        py::arg("tolerance") = kAmpTol, "Consistency report for a history family");
  m.def("chain_ket_norms",
        [](const HistoryFamily& family, const std::vector<int>& choices) {
          std::vector<double> norms;
          for (const auto& stage : chain_ket_stages(family, History{choices}))
            norms.push_back(norm(stage));
          return norms;
        },
        py::arg("family"), py::arg("choices"),
        "Norm of the partial chain-ket product after each slot");
  m.def("evolve", &evolve_py, py::arg("model"),
        "Unprojected state at every time, as {basis label: amplitude}");
  m.def("sweep_fc", &sweep_fc, py::arg("refined"), py::arg("lo"), py::arg("hi"),
        py::arg("steps"), py::arg("inner_reflectivity") = 0.5, py::arg("tolerance") = kAmpTol,
        "Sweep the outer reflectivity for the F_C family; returns rows and crossings");
}
