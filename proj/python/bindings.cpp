#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>

#include "trimqdt/angular.hpp"
#include "trimqdt/geom.hpp"
#include "trimqdt/levels.hpp"
#include "trimqdt/longrange.hpp"
#include "trimqdt/pipeline.hpp"
#include "trimqdt/qdefect.hpp"
#include "trimqdt/units.hpp"

namespace py = pybind11;
using namespace trimqdt;

PYBIND11_MODULE(_trimqdt, m) {
  m.doc() = "trimqdt core bindings";
  m.attr("__version__") = pipe::version();
  m.attr("HARTREE_CM") = to_cm(1.0);

  m.def("clebsch_gordan", &angular::clebsch_gordan, py::arg("j1"), py::arg("m1"), py::arg("j2"), py::arg("m2"),
        py::arg("J"), py::arg("M"));
  m.def("wigner_d", &angular::wigner_d, py::arg("j"), py::arg("mp"), py::arg("m"), py::arg("beta"));
  m.def("tilde_coefficient", &angular::tilde_coefficient, py::arg("Nplus"), py::arg("Kplus"), py::arg("l"),
        py::arg("Lambda"), py::arg("N"));

  m.def(
      "interparticle",
      [](double R, double theta, double phi) {
        const auto d = geom::to_interparticle({R, theta, phi});
        return py::make_tuple(d.r12, d.r23, d.r31);
      },
      py::arg("R"), py::arg("theta"), py::arg("phi"), "(r12, r23, r31) in bohr");
  m.def(
      "hyperspherical",
      [](double r12, double r23, double r31) {
        const auto p = geom::to_hyperspherical({r12, r23, r31});
        return py::make_tuple(p.R, p.theta, p.phi);
      },
      py::arg("r12"), py::arg("r23"), py::arg("r31"));

  m.def("hydrogenic_moment", [](int n, int l, int power) { return lr::hydrogenic_moment(n, l, power); },
        py::arg("n"), py::arg("l"), py::arg("power"));
  m.def("hydrogenic_moment_exact", &lr::hydrogenic_moment_exact, py::arg("n"), py::arg("l"), py::arg("power"));

  m.def(
      "equilibrium_nu",
      [](int n, const std::string& defects) {
        const auto p = qd::load_params(defects);
        return qd::effective_nu(n, qd::mu_body(geom::SymCoords{}, p));
      },
      py::arg("n"), py::arg("defects"), "effective quantum numbers at the equilibrium geometry");

  m.def(
      "find_levels",
      [](const Eigen::MatrixXd& K, const Eigen::VectorXd& thresholds, double nu_lo, double nu_hi, int threads) {
        const auto w = mqdt::nu_window(thresholds, nu_lo, nu_hi);
        mqdt::FindOptions o;
        o.threads = threads;
        const auto r = mqdt::find_levels(K, thresholds, w.first, w.second, o);
        std::vector<double> E;
        for (const auto& l : r.levels) E.push_back(l.E);
        return E;
      },
      py::arg("K"), py::arg("thresholds"), py::arg("nu_lo"), py::arg("nu_hi"), py::arg("threads") = 1,
      "bound-state energies (hartree) with nu of the lowest threshold in [nu_lo, nu_hi]");

  m.def("tasks", &pipe::tasks);
  m.def(
      "run",
      [](const std::string& task, const std::map<std::string, std::string>& values, const std::string& out_dir,
         int threads, std::optional<double> tolerance, const std::string& base_dir) {
        py::gil_scoped_release release;
        return pipe::run(pipe::make_config(task, values, base_dir), out_dir, threads, tolerance);
      },
      py::arg("task"), py::arg("values"), py::arg("out_dir"), py::arg("threads") = 1,
      py::arg("tolerance") = py::none(), py::arg("base_dir") = ".",
      "run one task; returns 0 or 1 (comparison over tolerance)");
  m.def(
      "run_config",
      [](const std::string& path, const std::string& out_dir, int threads, std::optional<double> tolerance) {
        py::gil_scoped_release release;
        return pipe::run(pipe::load_config(path), out_dir, threads, tolerance);
      },
      py::arg("path"), py::arg("out_dir"), py::arg("threads") = 1, py::arg("tolerance") = py::none());

}
