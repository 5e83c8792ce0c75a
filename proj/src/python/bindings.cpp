#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "loveres/cli.hpp"
#include "loveres/errors.hpp"
#include "loveres/inversion.hpp"
#include "loveres/resonances.hpp"

namespace py = pybind11;
using namespace loveres;

namespace {

Rectangle rect_of(const std::vector<double>& r) {
  if (r.size() != 4) throw DomainError("region must be [re_min, re_max, im_min, im_max]");
  return {r[0], r[1], r[2], r[3]};
}

py::dict zero_dict(const Zero& z) {
  py::dict d;
  d["k"] = z.k;
  d["residual"] = z.residual;
  d["multiplicity"] = z.multiplicity;
  d["near_real"] = z.near_real;
  return d;
}

}  // namespace

PYBIND11_MODULE(_loveres, m) {
  m.doc() = "Jost functions, resonances and Marchenko inversion for Love-wave potentials";
  m.attr("__version__") = cli::kVersion;

  // translators run newest first, so the base goes in before the subclasses
  const auto base = py::register_exception<Error>(m, "LoveresError");
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ClassViolationError>(m, "ClassViolationError", base);
  py::register_exception<SymmetryError>(m, "SymmetryError", base);
  py::register_exception<CalibrationError>(m, "CalibrationError", base);

  py::class_<ShearProfile>(m, "ShearProfile")
      .def(py::init<>())
      .def(py::init([](std::vector<double> depth, std::vector<double> mu, double mu_tail, double x_I) {
             return ShearProfile{std::move(depth), std::move(mu), mu_tail, x_I};
           }),
           py::arg("depth_grid"), py::arg("mu"), py::arg("mu_tail"), py::arg("x_I"))
      .def_readwrite("depth_grid", &ShearProfile::depth_grid)
      .def_readwrite("mu", &ShearProfile::mu)
      .def_readwrite("mu_tail", &ShearProfile::mu_tail)
      .def_readwrite("x_I", &ShearProfile::x_I);

  py::class_<PotentialProfile>(m, "PotentialProfile")
      .def(py::init<>())
      .def_readwrite("grid", &PotentialProfile::grid)
      .def_readwrite("values", &PotentialProfile::values)
      .def_readwrite("x_I", &PotentialProfile::x_I)
      .def_readwrite("h", &PotentialProfile::h)
      .def_readwrite("omega", &PotentialProfile::omega);

  m.def("make_potential", &make_potential, py::arg("x_I"), py::arg("n_intervals"), py::arg("V"), py::arg("h"));
  m.def("calibrate", &calibrate, py::arg("profile"), py::arg("omega"), py::arg("n_intervals") = 2048);
  m.def("robin_coefficient", &robin_coefficient, py::arg("profile"));
  m.def("recover_shear", &recover_shear, py::arg("V1"), py::arg("V2"), py::arg("omega1"), py::arg("omega2"),
        py::arg("mu_tail"), py::arg("singular_tol") = 1e-12);

  py::class_<JostSolver, std::shared_ptr<JostSolver>>(m, "JostSolver")
      .def(py::init([](const PotentialProfile& V) { return std::make_shared<JostSolver>(V); }), py::arg("V"))
      .def("fh", &JostSolver::fh, py::arg("k"))
      .def("fh_dk", &JostSolver::fh_dk, py::arg("k"))
      .def("wronskian_residual", &JostSolver::wronskian_residual, py::arg("k"), py::arg("x"))
      .def("eigenvalues", [](const JostSolver& js) { return eigenvalues(js, js.h()); });

  m.def(
      "find_zeros",
      [](std::shared_ptr<JostSolver> js, const std::vector<double>& region, double tol, unsigned workers) {
        FinderOptions fo;
        fo.workers = workers;
        ResonanceSet set;
        {
          py::gil_scoped_release nogil;
          set = find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), rect_of(region), tol, fo);
        }
        py::dict out;
        py::list ev, res;
        for (const Zero& z : set.eigenvalues) ev.append(zero_dict(z));
        for (const Zero& z : set.resonances) res.append(zero_dict(z));
        out["eigenvalues"] = ev;
        out["resonances"] = res;
        out["region_count"] = set.region_count;
        out["complete"] = set.complete();
        out["zeros"] = set.all_zeros();
        return out;
      },
      py::arg("solver"), py::arg("region"), py::arg("tol") = 1e-10, py::arg("workers") = 0);

  py::class_<ScatteringData>(m, "ScatteringData")
      .def("S", [](const ScatteringData& d, double k) { return d.S(k); }, py::arg("k"))
      .def_readonly("k_bound", &ScatteringData::k_bound)
      .def_readonly("m", &ScatteringData::m)
      .def_readonly("N", &ScatteringData::N)
      .def_readonly("tail_coeff", &ScatteringData::tail_coeff);

  m.def(
      "forward_scattering_data",
      [](std::shared_ptr<JostSolver> js) { return forward_scattering_data(js); }, py::arg("solver"));

  py::class_<InversionResult>(m, "InversionResult")
      .def_readonly("V", &InversionResult::V)
      .def_readonly("data", &InversionResult::data)
      .def_property_readonly("R", [](const InversionResult& r) { return r.diagnostics.R; })
      .def_property_readonly("zeros_used", [](const InversionResult& r) { return r.diagnostics.zeros_used; })
      .def_property_readonly("f0", [](const InversionResult& r) { return r.diagnostics.f0; })
      .def_property_readonly("max_condition", [](const InversionResult& r) { return r.diagnostics.max_condition; })
      .def_property_readonly("decay_certificate",
                             [](const InversionResult& r) { return r.diagnostics.decay_certificate; });

  m.def(
      "invert",
      [](const std::vector<Complex>& zeros, double x_I, double R, unsigned workers) {
        InvertOptions o;
        o.R = R;
        o.marchenko.workers = workers;
        return invert(zeros, x_I, o);
      },
      py::arg("zeros"), py::arg("x_I"), py::arg("R") = 0.0, py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());
}
