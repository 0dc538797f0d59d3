#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "biphoton/entanglement.hpp"
#include "biphoton/error.hpp"
#include "biphoton/io.hpp"
#include "biphoton/kernel.hpp"
#include "biphoton/schmidt.hpp"
#include "biphoton/sweep.hpp"

namespace py = pybind11;
using namespace biphoton;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Schmidt decomposition and entanglement entropy of multiplexed biphoton spectra";

    auto base_error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base_error.ptr());
    py::register_exception<NullKernelError>(m, "NullKernelError", base_error.ptr());
    py::register_exception<DecompositionError>(m, "DecompositionError", base_error.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base_error.ptr());
    py::register_exception<ParseError>(m, "ParseError", base_error.ptr());

    py::class_<EnsembleShift>(m, "EnsembleShift")
        .def(py::init<double, double, double>(), py::arg("delta_p") = 0.0, py::arg("delta_q") = 0.0,
             py::arg("theta") = 0.0)
        .def_property("delta_p", &EnsembleShift::delta_p, &EnsembleShift::set_delta_p)
        .def_property("delta_q", &EnsembleShift::delta_q, &EnsembleShift::set_delta_q)
        .def_property("theta", &EnsembleShift::theta, &EnsembleShift::set_theta)
        .def(py::self == py::self)
        .def("__repr__", [](const EnsembleShift& e) {
            return "EnsembleShift(delta_p=" + std::to_string(e.delta_p()) + ", delta_q=" + std::to_string(e.delta_q()) +
                   ", theta=" + std::to_string(e.theta()) + ")";
        });

    py::class_<MultiplexConfig>(m, "MultiplexConfig")
        .def(py::init<std::vector<EnsembleShift>, double, double>(), py::arg("ensembles"),
             py::arg("gamma3N") = MultiplexConfig::default_gamma3N, py::arg("tau") = MultiplexConfig::default_tau)
        .def_property_readonly("ensembles", py::overload_cast<>(&MultiplexConfig::ensembles, py::const_))
        .def_property_readonly("gamma3N", &MultiplexConfig::gamma3N)
        .def_property_readonly("tau", &MultiplexConfig::tau)
        .def("validate", &MultiplexConfig::validate)
        .def("digest", &MultiplexConfig::digest)
        .def("__len__", &MultiplexConfig::size)
        .def(py::self == py::self);

    py::enum_<QuadratureScheme>(m, "QuadratureScheme")
        .value("Midpoint", QuadratureScheme::Midpoint)
        .value("GaussLegendre", QuadratureScheme::GaussLegendre);

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("min") = -300.0, py::arg("max") = 300.0)
        .def_readwrite("min", &Interval::min)
        .def_readwrite("max", &Interval::max);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("s_range", &GridSpec::s_range)
        .def_readwrite("i_range", &GridSpec::i_range)
        .def_readwrite("n_s", &GridSpec::n_s)
        .def_readwrite("n_i", &GridSpec::n_i)
        .def_readwrite("scheme", &GridSpec::scheme)
        .def_readwrite("panels", &GridSpec::panels)
        .def(py::self == py::self);

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init<const GridSpec&>())
        .def_property_readonly("spec", &FrequencyGrid::spec)
        .def_property_readonly("signal_nodes", [](const FrequencyGrid& g) { return as_array(g.signal().nodes); })
        .def_property_readonly("signal_weights", [](const FrequencyGrid& g) { return as_array(g.signal().weights); })
        .def_property_readonly("idler_nodes", [](const FrequencyGrid& g) { return as_array(g.idler().nodes); })
        .def_property_readonly("idler_weights", [](const FrequencyGrid& g) { return as_array(g.idler().weights); })
        .def("refined", &FrequencyGrid::refined, py::arg("factor"));

    m.def("build_grid", &build_grid, py::arg("s_range") = Interval{}, py::arg("i_range") = Interval{},
          py::arg("n_s") = 1024, py::arg("n_i") = 1024, py::arg("scheme") = QuadratureScheme::Midpoint,
          py::arg("panels") = 0);

    m.def("eval_spectral_amplitude", py::vectorize([](MultiplexConfig& c, double ws, double wi) {
              return eval_spectral_amplitude(c, ws, wi);
          }),
          py::arg("config"), py::arg("dws"), py::arg("dwi"));

    py::class_<DiscretizedKernel>(m, "DiscretizedKernel")
        .def_property_readonly("matrix", &DiscretizedKernel::matrix)
        .def_property_readonly("norm_constant", &DiscretizedKernel::norm_constant)
        .def_property_readonly("grid", &DiscretizedKernel::grid)
        .def_property_readonly("config", &DiscretizedKernel::config);
    m.def("build_kernel", &build_kernel, py::arg("config"), py::arg("grid"), py::call_guard<py::gil_scoped_release>());

    py::class_<SchmidtSpectrum>(m, "SchmidtSpectrum")
        .def_property_readonly("eigenvalues", [](const SchmidtSpectrum& s) { return as_array(s.eigenvalues); })
        .def_readonly("signal_modes", &SchmidtSpectrum::signal_modes)
        .def_readonly("idler_modes", &SchmidtSpectrum::idler_modes)
        .def_readonly("grid", &SchmidtSpectrum::grid)
        .def_property_readonly("retained_count", &SchmidtSpectrum::retained_count);
    m.def("schmidt_decompose", &schmidt_decompose, py::arg("kernel"), py::arg("retained") = default_retained_count,
          py::call_guard<py::gil_scoped_release>());
    m.def("schmidt_eigenvalues", &schmidt_eigenvalues, py::arg("kernel"), py::call_guard<py::gil_scoped_release>());
    m.def("oracle_reduced_density", py::overload_cast<const DiscretizedKernel&>(&oracle_reduced_density),
          py::arg("kernel"), py::call_guard<py::gil_scoped_release>());

    py::class_<ModeDensity>(m, "ModeDensity")
        .def_property_readonly("signal", [](const ModeDensity& d) { return as_array(d.signal); })
        .def_property_readonly("idler", [](const ModeDensity& d) { return as_array(d.idler); });
    m.def("mode_density", &mode_density, py::arg("spectrum"), py::arg("n"));

    py::class_<DegeneracyReport>(m, "DegeneracyReport")
        .def_readonly("groups", &DegeneracyReport::groups)
        .def_readonly("rel_tol", &DegeneracyReport::rel_tol);
    m.def("detect_degeneracy",
          py::overload_cast<const std::vector<double>&, double, std::size_t>(&detect_degeneracy),
          py::arg("eigenvalues"), py::arg("rel_tol"), py::arg("K"));
    m.def("count_peaks", &count_peaks, py::arg("samples"), py::arg("rel_prominence") = 0.01);

    py::class_<EntropyResult>(m, "EntropyResult")
        .def_readonly("S", &EntropyResult::S)
        .def_readonly("lambda_tail", &EntropyResult::lambda_tail)
        .def_readonly("config_digest", &EntropyResult::config_digest);
    m.def("entropy_bits", [](const std::vector<double>& l) { return entropy_bits(l); }, py::arg("eigenvalues"));
    m.def("entropy_of_entanglement", &entropy_of_entanglement, py::arg("spectrum"), py::arg("config"));
    m.def("entropy_for", &entropy_for, py::arg("config"), py::arg("grid"), py::call_guard<py::gil_scoped_release>());
    m.def("qudit_entropy", &qudit_entropy, py::arg("n_mp"));

    py::class_<AdditivityResult>(m, "AdditivityResult")
        .def_readonly("S_multi", &AdditivityResult::S_multi)
        .def_readonly("S_single", &AdditivityResult::S_single)
        .def_readonly("S_d", &AdditivityResult::S_d)
        .def_readonly("deviation", &AdditivityResult::deviation);
    m.def("additivity_check", &additivity_check, py::arg("config"), py::arg("grid"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ConfigTemplate>(m, "ConfigTemplate")
        .def_property_readonly("name", &ConfigTemplate::name)
        .def_property_readonly("base", &ConfigTemplate::base)
        .def_property_readonly("free_params", [](const ConfigTemplate& t) {
            std::vector<std::string> names;
            for (const auto& p : t.free_params()) names.push_back(p.name);
            return names;
        })
        .def("assign", [](ConfigTemplate t, const std::string& name, double v) { return t.assign(name, v); },
             py::arg("name"), py::arg("value"))
        .def("set_physics", [](ConfigTemplate t, double g, double tau) { return t.set_physics(g, tau); },
             py::arg("gamma3N"), py::arg("tau"))
        .def("instantiate", [](const ConfigTemplate& t) { return t.instantiate(); });
    m.def("preset", &preset, py::arg("name"));

    py::class_<SweepAxis>(m, "SweepAxis")
        .def_readonly("name", &SweepAxis::name)
        .def_property_readonly("values", [](const SweepAxis& a) { return as_array(a.values); });
    m.def("make_axis",
          [](const ConfigTemplate& t, const std::string& name, std::vector<double> values) {
              return make_axis(t, name, std::move(values));
          },
          py::arg("template"), py::arg("name"), py::arg("values"));
    m.def("linspace", &linspace, py::arg("start"), py::arg("stop"), py::arg("count"));

    py::class_<EntropyMap>(m, "EntropyMap")
        .def_readonly("axis1", &EntropyMap::axis1)
        .def_readonly("axis2", &EntropyMap::axis2)
        .def_property_readonly("values",
                               [](const EntropyMap& map) {
                                   py::array_t<double> out({map.n1(), map.n2()});
                                   std::copy(map.values.begin(), map.values.end(), out.mutable_data());
                                   return out;
                               })
        .def_property_readonly("status", [](const EntropyMap& map) {
            std::vector<std::string> s;
            for (auto c : map.status) s.emplace_back(to_string(c));
            return s;
        });
    m.def("sweep_entropy",
          [](const ConfigTemplate& t, const SweepAxis& a1, std::optional<SweepAxis> a2, const FrequencyGrid& g,
             unsigned workers) { return sweep_entropy(t, a1, a2, g, SweepOptions{workers}); },
          py::arg("template"), py::arg("axis1"), py::arg("axis2") = py::none(), py::arg("grid"),
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<ExtremumPoint>(m, "ExtremumPoint")
        .def_readonly("i1", &ExtremumPoint::i1)
        .def_readonly("i2", &ExtremumPoint::i2)
        .def_readonly("x1", &ExtremumPoint::x1)
        .def_readonly("x2", &ExtremumPoint::x2)
        .def_readonly("S", &ExtremumPoint::S);
    py::class_<ExtremaReport>(m, "ExtremaReport")
        .def_readonly("maxima", &ExtremaReport::maxima)
        .def_readonly("minima", &ExtremaReport::minima)
        .def_readonly("global_max", &ExtremaReport::global_max)
        .def_readonly("global_min", &ExtremaReport::global_min);
    m.def("find_extrema", &find_extrema, py::arg("map"));

    py::class_<ConvergenceResult>(m, "ConvergenceResult")
        .def_readonly("S_coarse", &ConvergenceResult::S_coarse)
        .def_readonly("S_fine", &ConvergenceResult::S_fine)
        .def_readonly("delta", &ConvergenceResult::delta);
    m.def("convergence_check", &convergence_check, py::arg("config"), py::arg("grid"), py::arg("factor") = 2,
          py::call_guard<py::gil_scoped_release>());
    m.attr("convergence_tolerance_bits") = convergence_tolerance_bits;

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("config", &RunConfig::config)
        .def_readonly("grid", &RunConfig::grid)
        .def_readonly("preset", &RunConfig::preset)
        .def_readonly("axes", &RunConfig::axes)
        .def("make_template", &RunConfig::make_template);
    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("write_config", &write_config, py::arg("run"));
}
