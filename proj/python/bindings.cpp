#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

#include "riesz_ep/config.hpp"
#include "riesz_ep/harness.hpp"
#include "riesz_ep/mollify.hpp"
#include "riesz_ep/reporting.hpp"
#include "riesz_ep/riesz.hpp"
#include "riesz_ep/thermo.hpp"

namespace py = pybind11;
using namespace riesz_ep;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridFunction from_array(const Array& a, double half_width) {
    if (a.ndim() < 1) throw std::invalid_argument("grid array needs at least one axis");
    const auto n = a.shape(0);
    for (py::ssize_t k = 1; k < a.ndim(); ++k)
        if (a.shape(k) != n) throw std::invalid_argument("grid array must have equal extent on every axis");
    const GridSpec spec = GridSpec::make(static_cast<int>(a.ndim()), static_cast<int>(n), half_width);
    return GridFunction(spec, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const GridFunction& f) {
    std::vector<py::ssize_t> shape(static_cast<std::size_t>(f.spec().d), f.spec().n);
    Array out(shape);
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Riesz-potential Euler-Poisson toolkit: operators, energies, mollifier and verification suites";
    m.attr("__version__") = version_string();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<MollifyUnattainable>(m, "MollifyUnattainable", PyExc_RuntimeError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init(&GridSpec::make), py::arg("d"), py::arg("n"), py::arg("half_width"))
        .def_readonly("d", &GridSpec::d)
        .def_readonly("n", &GridSpec::n)
        .def_readonly("half_width", &GridSpec::half_width)
        .def_property_readonly("spacing", &GridSpec::spacing)
        .def_property_readonly("cell_volume", &GridSpec::cell_volume)
        .def("centers", [](const GridSpec& s) {
            std::vector<double> c;
            for (int i = 0; i < s.n; ++i) c.push_back(s.center(i));
            return c;
        })
        .def("__repr__", [](const GridSpec& s) {
            return "GridSpec(d=" + std::to_string(s.d) + ", n=" + std::to_string(s.n) +
                   ", half_width=" + std::to_string(s.half_width) + ")";
        });

    py::class_<GridFunction>(m, "Grid")
        .def(py::init(&from_array), py::arg("values"), py::arg("half_width"),
             "Cell values on [-L, L]^d; the array shape is (n,) * d.")
        .def_property_readonly("spec", &GridFunction::spec)
        .def_property_readonly("values", &to_array, "copy of the cell values as an (n,)*d array");

    m.def("read_grid", &read_grid, py::arg("path"));
    m.def("write_grid", &write_grid, py::arg("path"), py::arg("grid"));
    m.def("lp_norm", &lp_norm, py::arg("grid"), py::arg("p"), "discrete L^p norm; p = inf for the max norm");
    m.def("integrate", &integrate, py::arg("grid"));

    m.def("newton_constant", &newton_constant, py::arg("d"));
    m.def("hls_exponents", &hls_exponents, py::arg("d"), py::arg("alpha"), py::arg("p"));
    m.def("riesz_apply_fast", &riesz_apply_fast, py::arg("grid"), py::arg("alpha"),
          py::call_guard<py::gil_scoped_release>());
    m.def("riesz_apply_direct", &riesz_apply_direct, py::arg("grid"), py::arg("alpha"),
          py::call_guard<py::gil_scoped_release>());
    m.def("electric_potential", &electric_potential, py::arg("rho"), py::call_guard<py::gil_scoped_release>());

    m.def("relative_power", &relative_power, py::arg("rho"), py::arg("rho_bar"), py::arg("gamma"),
          "Bregman remainder of s -> s^gamma at rho_bar");

    py::class_<MollifyResult>(m, "MollifyResult")
        .def_readonly("phi", &MollifyResult::phi)
        .def_readonly("delta", &MollifyResult::delta)
        .def_readonly("l1_error", &MollifyResult::l1_error)
        .def_readonly("lgamma_error", &MollifyResult::lgamma_error)
        .def_readonly("range_level", &MollifyResult::range_level)
        .def_readonly("support_radius", &MollifyResult::support_radius)
        .def_readonly("attained", &MollifyResult::attained)
        .def_property_readonly("combined", &MollifyResult::combined)
        .def_property_readonly("ladder", [](const MollifyResult& r) {
            py::list out;
            for (const auto& s : r.ladder) out.append(py::make_tuple(s.delta, s.l1, s.lgamma));
            return out;
        });
    m.def("mollify_ladder", &mollify_ladder, py::arg("grid"), py::arg("gamma"), py::arg("epsilon"),
          py::call_guard<py::gil_scoped_release>(), "best attempt; check .attained");
    m.def("mollify_approximate", &mollify_approximate, py::arg("grid"), py::arg("gamma"), py::arg("epsilon"),
          py::call_guard<py::gil_scoped_release>(), "raises MollifyUnattainable when the grid is too coarse");

    m.def("suite_names", &suite_names);
    m.def(
        "verify",
        [](const std::string& suite, const std::optional<std::filesystem::path>& config) {
            const VerifyConfig vc = config ? load_verify_config(*config) : VerifyConfig{};
            validate(vc);
            InequalityReport rep;
            {
                py::gil_scoped_release release;
                TrajectoryCache cache;
                rep = run_suite(suite, vc, cache);
            }
            return to_python(report_json(rep));
        },
        py::arg("suite"), py::arg("config") = py::none(), "runs one verification suite and returns its report dict");
    m.def(
        "simulate",
        [](const std::optional<std::filesystem::path>& config) {
            const ScenarioConfig c = config ? load_scenario_config(*config) : ScenarioConfig{};
            c.validate();
            Trajectory t;
            {
                py::gil_scoped_release release;
                t = c.role == Role::reference ? make_reference(c) : run(c);
            }
            return to_python(simulation_summary(t, std::nullopt));
        },
        py::arg("config") = py::none(), "evolves a scenario and returns the run summary dict");
}
