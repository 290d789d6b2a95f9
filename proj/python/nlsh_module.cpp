#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlsh/engine.hpp"
#include "nlsh/harness.hpp"
#include "nlsh/hermite.hpp"
#include "nlsh/io.hpp"
#include "nlsh/norms.hpp"
#include "nlsh/profiles.hpp"
#include "nlsh/propagators.hpp"
#include "nlsh/variational.hpp"

namespace py = pybind11;
using namespace nlsh;

namespace {

Field field_from_array(const Grid& g,
                       py::array_t<cplx, py::array::c_style | py::array::forcecast> a) {
  py::buffer_info info = a.request();
  if (static_cast<std::size_t>(info.size) != g.size())
    throw std::invalid_argument("array size must equal n^d");
  Field f(g);
  const cplx* src = static_cast<const cplx*>(info.ptr);
  std::copy(src, src + g.size(), f.values.begin());
  return f;
}

py::array_t<cplx> field_to_array(const Field& f) {
  std::vector<py::ssize_t> shape(f.grid.d, f.grid.n);
  py::array_t<cplx> out(shape);
  std::copy(f.values.begin(), f.values.end(),
            static_cast<cplx*>(out.request().ptr));
  return out;
}

py::array_t<double> series_to_array(const DiagnosticsSeries& s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.rows.size()), py::ssize_t(8)});
  auto w = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(s.rows.size()); ++i) {
    const DiagnosticsRow& r = s.rows[i];
    w(i, 0) = r.t;
    w(i, 1) = r.mass;
    w(i, 2) = r.energy;
    w(i, 3) = r.e_delta;
    w(i, 4) = r.sigma_norm;
    w(i, 5) = r.sup_norm;
    w(i, 6) = r.virial_f;
    w(i, 7) = r.strichartz_cum;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_nlshosc, m) {
  m.doc() = "Spectral NLS engine with harmonic confinement";

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double, int>(), py::arg("d"), py::arg("L"), py::arg("n"))
      .def_readonly("d", &Grid::d)
      .def_readonly("L", &Grid::L)
      .def_readonly("n", &Grid::n)
      .def_property_readonly("dx", &Grid::dx)
      .def("__repr__", [](const Grid& g) {
        return "Grid(d=" + std::to_string(g.d) + ", L=" + std::to_string(g.L) +
               ", n=" + std::to_string(g.n) + ")";
      });

  py::class_<Field>(m, "Field")
      .def(py::init(&field_from_array), py::arg("grid"), py::arg("values"))
      .def_readonly("grid", &Field::grid)
      .def("to_numpy", &field_to_array)
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__mul__", [](const Field& a, cplx c) { return c * a; })
      .def("__rmul__", [](const Field& a, cplx c) { return c * a; });

  m.def("zero_field", [](const Grid& g) { return Field(g); }, py::arg("grid"));

  // Norms.
  m.def("l2_norm", &l2_norm);
  m.def("lp_norm", &lp_norm, py::arg("f"), py::arg("p"));
  m.def("h1dot_norm", &h1dot_norm);
  m.def("sigma_norm", &sigma_norm);
  m.def("inner", &inner);

  // Propagators.
  m.def("harmonic_propagate", &harmonic_propagate, py::arg("f"), py::arg("t"));
  m.def("free_propagate", &free_propagate, py::arg("f"), py::arg("t"));
  m.def("dispersive_ratio", &dispersive_ratio, py::arg("f"), py::arg("times"));

  // Engine.
  py::enum_<PotentialKind>(m, "PotentialKind")
      .value("Harmonic", PotentialKind::Harmonic)
      .value("Bounded", PotentialKind::Bounded)
      .value("Stark", PotentialKind::Stark);

  py::enum_<RunStatus>(m, "RunStatus")
      .value("Completed", RunStatus::Completed)
      .value("BlowupDetected", RunStatus::BlowupDetected)
      .value("StepUnderflow", RunStatus::StepUnderflow);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("mu", &SolverConfig::mu)
      .def_readwrite("p", &SolverConfig::p)
      .def_readwrite("dt", &SolverConfig::dt)
      .def_readwrite("t_end", &SolverConfig::t_end)
      .def_readwrite("order", &SolverConfig::order)
      .def_readwrite("potential", &SolverConfig::potential)
      .def_readwrite("bounded_v", &SolverConfig::bounded_v)
      .def_readwrite("stark_e", &SolverConfig::stark_e)
      .def_readwrite("grad_factor", &SolverConfig::grad_factor)
      .def_readwrite("dt_min", &SolverConfig::dt_min)
      .def_readwrite("energy_defect_tol", &SolverConfig::energy_defect_tol)
      .def_readwrite("tail_tol", &SolverConfig::tail_tol);

  py::class_<EvolutionResult>(m, "EvolutionResult")
      .def_readonly("field", &EvolutionResult::field)
      .def_readonly("status", &EvolutionResult::status)
      .def_readonly("t_reached", &EvolutionResult::t_reached)
      .def_property_readonly(
          "series", [](const EvolutionResult& r) { return series_to_array(r.series); })
      .def_property_readonly_static("series_columns", [](py::object) {
        return std::vector<std::string>{"t",          "mass",     "energy",
                                        "e_delta",    "sigma_norm", "sup_norm",
                                        "virial_f",   "strichartz_cum"};
      });

  m.def("evolve", &evolve, py::arg("u0"), py::arg("config"));
  m.def("strang_step", &strang_step, py::arg("u"), py::arg("config"), py::arg("dt"));
  m.def("strichartz_exponent", &strichartz_exponent, py::arg("d"));

  // Variational.
  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("mass", &EnergyReport::mass)
      .def_readonly("energy", &EnergyReport::energy)
      .def_readonly("e_delta", &EnergyReport::e_delta)
      .def_readonly("gradnorm", &EnergyReport::gradnorm)
      .def_readonly("potnorm", &EnergyReport::potnorm);
  m.def("energy_functionals", &energy_functionals, py::arg("u"), py::arg("mu"),
        py::arg("p"));
  m.def("ground_state_W", &ground_state_W, py::arg("grid"),
        py::arg("alt_normalization") = false);

  // Profiles.
  py::class_<Frame>(m, "Frame")
      .def_readonly("t", &Frame::t)
      .def_readonly("x0", &Frame::x0)
      .def_readonly("N", &Frame::N)
      .def_readonly("Nprime", &Frame::Nprime);
  m.def("concentrating_frame", &concentrating_frame, py::arg("t"), py::arg("x0"),
        py::arg("N"), py::arg("d"));
  m.def("frame_apply", &frame_apply, py::arg("frame"), py::arg("phi"));
  m.def("frame_unapply", &frame_unapply, py::arg("frame"), py::arg("f"));

  py::class_<ProfileItem>(m, "ProfileItem")
      .def_readonly("frame", &ProfileItem::frame)
      .def_readonly("phi", &ProfileItem::phi)
      .def_readonly("sigma_share", &ProfileItem::sigma_share);
  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("items", &Decomposition::items)
      .def_readonly("remainder", &Decomposition::remainder);
  m.def("profile_decompose", &profile_decompose, py::arg("f"), py::arg("jmax"),
        py::arg("eps"), py::arg("t0") = 0.0, py::arg("t1") = 1.0);

  // Harness.
  m.def("write_field", &write_field, py::arg("path"), py::arg("f"));
  m.def("read_field", &read_field, py::arg("path"));
  m.def("strichartz_norm", &strichartz_norm, py::arg("states"), py::arg("times"));

  py::class_<SmoothingReport>(m, "SmoothingReport")
      .def_readonly("functional", &SmoothingReport::functional)
      .def_readonly("ratio", &SmoothingReport::ratio);
  m.def("local_smoothing_functional", &local_smoothing_functional, py::arg("states"),
        py::arg("times"), py::arg("z"), py::arg("R"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"nlsh"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  });
}
