#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dfrc/designs.hpp"
#include "dfrc/experiments.hpp"
#include "dfrc/sim.hpp"
#include "dfrc/verify.hpp"

namespace py = pybind11;
using namespace dfrc;

namespace {

py::dict table_dict(const ResultTable& t) {
  py::dict d;
  d["columns"] = t.columns;
  d["rows"] = t.rows;
  py::dict meta;
  for (const auto& [k, v] : t.metadata) meta[py::str(k)] = v;
  d["metadata"] = meta;
  return d;
}

ExperimentConfig config_arg(const py::object& cfg) {
  if (py::isinstance<py::str>(cfg)) return config_from_json(cfg.cast<std::string>());
  py::object dumps = py::module_::import("json").attr("dumps");
  return config_from_json(dumps(cfg).cast<std::string>());
}

const char* status_name(DesignStatus s) { return s == DesignStatus::Optimal ? "optimal" : "rank-excess"; }

}  // namespace

PYBIND11_MODULE(_dfrc, m) {
  m.doc() = "Joint radar-communication transmit beamforming";

  py::register_exception<Error>(m, "DfrcError", PyExc_RuntimeError);

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def(py::init<>())
      .def(py::init<int, int>(), py::arg("n_tx"), py::arg("n_rx"))
      .def_readonly("n_tx", &ArrayGeometry::n_tx)
      .def_readonly("n_rx", &ArrayGeometry::n_rx);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("geometry", &Scenario::geometry)
      .def_readwrite("channels", &Scenario::channels)
      .def_readwrite("sinr_thresholds", &Scenario::sinr_thresholds)
      .def_readwrite("power_budget", &Scenario::power_budget)
      .def_readwrite("noise_comm", &Scenario::noise_comm)
      .def_readwrite("noise_radar", &Scenario::noise_radar)
      .def_readwrite("frame_len", &Scenario::frame_len)
      .def_property(
          "theta", [](const Scenario& s) { return s.point.theta; },
          [](Scenario& s, double v) { s.point.theta = v; })
      .def_property(
          "alpha", [](const Scenario& s) { return s.point.alpha; },
          [](Scenario& s, Complex v) { s.point.alpha = v; })
      .def_readwrite("extended_response", &Scenario::extended_response)
      .def_property_readonly("users", &Scenario::users)
      .def("validate", &Scenario::validate, py::arg("strict") = false);

  py::class_<DesignSolution>(m, "DesignSolution")
      .def_readonly("comm_beamformers", &DesignSolution::comm_beamformers)
      .def_readonly("aux_beamformer", &DesignSolution::aux_beamformer)
      .def_readonly("covariance", &DesignSolution::covariance)
      .def_readonly("achieved_sinrs", &DesignSolution::achieved_sinrs)
      .def_readonly("objective", &DesignSolution::objective)
      .def_readonly("relaxed_blocks", &DesignSolution::relaxed_blocks)
      .def_property_readonly("status", [](const DesignSolution& d) { return status_name(d.diagnostics.status); })
      .def_property_readonly("solver_status", [](const DesignSolution& d) { return d.diagnostics.solver_status; })
      .def_property_readonly("iterations", [](const DesignSolution& d) { return d.diagnostics.iterations; })
      .def_property_readonly("rank_ratios", [](const DesignSolution& d) { return d.diagnostics.rank_ratios; })
      .def_property_readonly("notes", [](const DesignSolution& d) { return d.diagnostics.notes; });

  m.def(
      "make_scenario",
      [](int users, double sinr_db, const py::object& cfg) {
        ExperimentConfig c = cfg.is_none() ? ExperimentConfig{} : config_arg(cfg);
        return make_scenario(c, users, sinr_db);
      },
      py::arg("users"), py::arg("sinr_db"), py::arg("config") = py::none(),
      "Scenario with seeded Rayleigh channels; config is a dict or JSON string of experiment keys.");

  m.def("steering", &steering, py::arg("theta"), py::arg("n"));
  m.def("steering_deriv", &steering_deriv, py::arg("theta"), py::arg("n"));

  m.def("crb_point_theta", &crb_point_theta, py::arg("R"), py::arg("theta"), py::arg("alpha"), py::arg("scenario"));
  m.def("crb_point_alpha", &crb_point_alpha, py::arg("R"), py::arg("theta"), py::arg("alpha"), py::arg("scenario"));
  m.def("crb_extended", &crb_extended, py::arg("R"), py::arg("scenario"));
  m.def("achieved_sinrs", &achieved_sinrs, py::arg("solution"), py::arg("scenario"));
  m.def(
      "beampattern",
      [](const CMatrix& R, const std::vector<double>& grid, const ArrayGeometry& g) { return beampattern(R, grid, g); },
      py::arg("R"), py::arg("theta_grid"), py::arg("geometry"));

  auto nogil = py::call_guard<py::gil_scoped_release>();
  m.def("design_point_single", py::overload_cast<const Scenario&>(&design_point_single), py::arg("scenario"), nogil);
  m.def("design_extended_single", py::overload_cast<const Scenario&>(&design_extended_single), py::arg("scenario"),
        nogil);
  m.def(
      "design_point_multi", [](const Scenario& s) { return design_point_multi(s); }, py::arg("scenario"), nogil);
  m.def(
      "design_extended_multi", [](const Scenario& s) { return design_extended_multi(s); }, py::arg("scenario"), nogil);
  m.def("eig_truncation_baseline", &eig_truncation_baseline, py::arg("relaxed"), py::arg("scenario"));

  m.def(
      "check_schur",
      [](const CMatrix& R, double theta, const ArrayGeometry& g) {
        SchurCheck c = check_schur(R, theta, g);
        return py::dict(py::arg("t_lmi") = c.t_lmi, py::arg("t_closed") = c.t_closed,
                        py::arg("relative_difference") = c.relative_difference());
      },
      py::arg("R"), py::arg("theta"), py::arg("geometry"));
  m.def("eig_F", &eig_F, py::arg("beta"), py::arg("geometry"), py::arg("theta") = 0.0);
  m.def(
      "check_rank_condition",
      [](const CMatrix& H, double theta, const ArrayGeometry& g) {
        RankReport r = check_theorem2_condition(H, theta, g);
        return py::dict(py::arg("full_column_rank") = r.full_column_rank, py::arg("rank") = r.rank,
                        py::arg("singular_values") = r.singular_values);
      },
      py::arg("H"), py::arg("theta"), py::arg("geometry"));
  m.def(
      "check_kkt_point",
      [](const DesignSolution& d, const Scenario& s) {
        if (!d.duals) throw Error(ErrorCode::InvalidArgument, "solution carries no multipliers");
        KktReport r = check_kkt_point(d, *d.duals, s);
        return py::make_tuple(r.ok(1e-6), format_report(r));
      },
      py::arg("solution"), py::arg("scenario"));

  m.def(
      "run_experiment",
      [](const py::object& cfg) {
        ExperimentConfig c = config_arg(cfg);
        ResultTable t;
        {
          py::gil_scoped_release release;
          t = run_experiment(c);
        }
        return table_dict(t);
      },
      py::arg("config"), "Run a figure experiment; returns {'columns', 'rows', 'metadata'}.");
  m.def(
      "config_hash", [](const py::object& cfg) { return config_hash(config_arg(cfg)); }, py::arg("config"));
}
