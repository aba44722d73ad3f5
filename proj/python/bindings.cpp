// Python bindings: a thin layer over the C++ library. Library errors surface
// as anosov_spectral.AnosovError with the error code as its first argument.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anosov/escape.hpp"
#include "anosov/fbi.hpp"
#include "anosov/io.hpp"
#include "anosov/orbits.hpp"
#include "anosov/resonance.hpp"
#include "anosov/spectra.hpp"
#include "anosov/zeta.hpp"

namespace py = pybind11;
using namespace anosov;

namespace {

py::dict series_dict(const zeta::SeriesValue& s) {
    py::dict d;
    d["value"] = s.value;
    d["tail_bound"] = s.tail_bound;
    return d;
}

std::vector<Complex> array_column(const fbi::PhaseSpaceArray& T) { return T.data; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Periodic orbits, dynamical zeta functions and resonances of model Anosov flows";
    m.attr("__version__") = io::kToolVersion;

    // Created once and kept alive for the life of the interpreter.
    static PyObject* error_type = PyErr_NewException("anosov_spectral.AnosovError", PyExc_RuntimeError, nullptr);
    m.attr("AnosovError") = py::reinterpret_borrow<py::object>(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(to_string(e.code()), e.what());
            exc.attr("code") = to_string(e.code());
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    m.def("set_threads", &set_thread_count, py::arg("n"));

    // ---- orbits ----
    py::class_<orbits::HyperbolicToralMap>(m, "CatMap")
        .def_readonly("a", &orbits::HyperbolicToralMap::a)
        .def_readonly("b", &orbits::HyperbolicToralMap::b)
        .def_readonly("c", &orbits::HyperbolicToralMap::c)
        .def_readonly("d", &orbits::HyperbolicToralMap::d)
        .def_readonly("trace", &orbits::HyperbolicToralMap::trace)
        .def_readonly("expansion_log", &orbits::HyperbolicToralMap::expansion_log);

    m.def("cat_map", &orbits::validate_cat_map, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
    m.def("fixed_point_count", &orbits::fixed_point_count, py::arg("map"), py::arg("k"));
    m.def("primitive_orbit_counts", &orbits::primitive_orbit_counts, py::arg("N"));

    py::class_<orbits::PeriodicOrbit>(m, "PeriodicOrbit")
        .def_readonly("length", &orbits::PeriodicOrbit::length)
        .def_readonly("primitive_length", &orbits::PeriodicOrbit::primitive_length)
        .def_readonly("potential_integral", &orbits::PeriodicOrbit::potential_integral)
        .def_readonly("log_det_factor", &orbits::PeriodicOrbit::log_det_factor)
        .def_readonly("multiplicity", &orbits::PeriodicOrbit::multiplicity)
        .def("__repr__", [](const orbits::PeriodicOrbit& o) {
            return "PeriodicOrbit(T=" + io::format_double(o.length) + ", mult=" + std::to_string(o.multiplicity) + ")";
        });

    py::class_<orbits::OrbitCatalog>(m, "OrbitCatalog")
        .def_readonly("model_id", &orbits::OrbitCatalog::model_id)
        .def_readonly("orbits", &orbits::OrbitCatalog::orbits)
        .def_readonly("horizon_T", &orbits::OrbitCatalog::horizon_T)
        .def_readonly("complete", &orbits::OrbitCatalog::complete)
        .def_readonly("topological_entropy_estimate", &orbits::OrbitCatalog::topological_entropy_estimate)
        .def("to_json", [](const orbits::OrbitCatalog& c) { return io::catalog_to_json(c).dump(); })
        .def_static("from_json", [](const std::string& s) { return io::catalog_from_json(io::Json::parse(s)); })
        .def("__len__", [](const orbits::OrbitCatalog& c) { return c.orbits.size(); });

    m.def(
        "suspension_catalog",
        [](const orbits::HyperbolicToralMap& map, double horizon, double roof, double potential) {
            return orbits::enumerate_suspension_orbits({map, roof, potential}, horizon);
        },
        py::arg("map"), py::arg("horizon"), py::arg("roof") = 1.0, py::arg("potential") = 0.0);
    m.def(
        "geodesic_catalog",
        [](const std::vector<orbits::Mat2>& gens, double horizon, int max_word_len) {
            orbits::FuchsianModel model;
            model.generators = gens;
            model.max_word_len = max_word_len;
            return orbits::enumerate_geodesic_orbits(model, horizon);
        },
        py::arg("generators"), py::arg("horizon"), py::arg("max_word_len") = 6);

    // ---- zeta ----
    m.def("log_zeta", [](const orbits::OrbitCatalog& c, Complex z) { return series_dict(zeta::log_zeta_direct(c, z)); },
          py::arg("catalog"), py::arg("z"));
    m.def("log_ruelle_zeta",
          [](const orbits::OrbitCatalog& c, Complex z) { return series_dict(zeta::log_ruelle_zeta_direct(c, z)); },
          py::arg("catalog"), py::arg("z"));
    m.def("closed_form_cat_zeta", &zeta::closed_form_cat_zeta, py::arg("z"), py::arg("potential") = 0.0,
          py::arg("roof") = 1.0);
    m.def(
        "cycle_expansion",
        [](const orbits::OrbitCatalog& c) {
            const auto ce = zeta::cycle_expansion(c);
            return py::make_tuple(ce.quantum, ce.coeffs);
        },
        py::arg("catalog"), "(quantum, coefficients) of the determinant as a polynomial in exp(-quantum z)");

    // ---- resonances ----
    m.def(
        "locate_zeros",
        [](const std::function<Complex(Complex)>& f, std::array<double, 4> box, double tol) {
            const auto res = resonance::locate_zeros(f, {box[0], box[1], box[2], box[3]}, tol);
            std::vector<std::pair<Complex, int>> out;
            for (const auto& r : res) out.emplace_back(r.value, r.multiplicity);
            return out;
        },
        py::arg("f"), py::arg("box"), py::arg("tol") = 1e-10,
        "Zeros of f in box = (re_min, re_max, im_min, im_max) as (value, multiplicity) pairs");
    m.def(
        "catalog_resonances",
        [](const orbits::OrbitCatalog& c, std::array<double, 4> box, double tol) {
            const auto ce = zeta::cycle_expansion(c);
            const auto res = resonance::locate_zeros([&ce](Complex z) { return ce(z); },
                                                     {box[0], box[1], box[2], box[3]}, tol);
            std::vector<std::pair<Complex, int>> out;
            for (const auto& r : res) out.emplace_back(r.value, r.multiplicity);
            return out;
        },
        py::arg("catalog"), py::arg("box"), py::arg("tol") = 1e-8);
    m.def(
        "hausdorff_dz",
        [](const std::vector<Complex>& A, const std::vector<Complex>& B, Complex z, bool with_infinity) {
            std::vector<resonance::ExtPoint> a, b;
            for (const auto& v : A) a.push_back(resonance::ExtPoint::finite(v));
            for (const auto& v : B) b.push_back(resonance::ExtPoint::finite(v));
            if (with_infinity) {
                a.push_back(resonance::ExtPoint::infinity());
                b.push_back(resonance::ExtPoint::infinity());
            }
            return resonance::hausdorff_dz(a, b, z);
        },
        py::arg("A"), py::arg("B"), py::arg("z"), py::arg("with_infinity") = true);

    // ---- escape function ----
    m.def(
        "escape_scan",
        [](std::int64_t samples, double radius_min, double T1) {
            escape::EscapeParams p;
            p.T1 = T1;
            escape::ScanOptions opt;
            opt.sample_count = samples;
            opt.radius_min = radius_min;
            const auto split = escape::splitting(orbits::validate_cat_map(2, 1, 1, 1));
            return io::scan_report_to_json(escape::property_scan(p, split, opt)).dump();
        },
        py::arg("samples") = 2000, py::arg("radius_min") = 10.0, py::arg("T1") = escape::EscapeParams{}.T1,
        "Property scan on the (2,1,1,1) suspension; returns the report as a JSON string");

    // ---- FBI ----
    m.def(
        "fbi_transform",
        [](double s, double c, int L, double h, std::array<double, 2> x_range, std::vector<double> xi,
           const std::string& variant) {
            const auto u = fbi::make_gevrey_signal(s, c, L);
            auto g = fbi::make_grid(h, x_range[0], x_range[1], 0.0, 1.0, 2, fbi::variant_from_string(variant));
            g.xi_nodes = std::move(xi);
            const auto T = fbi::fbi_transform_modal(u, g);
            return py::make_tuple(g.x_nodes, g.xi_nodes, array_column(T));
        },
        py::arg("s"), py::arg("c"), py::arg("L"), py::arg("h"), py::arg("x_range"), py::arg("xi"),
        py::arg("variant") = "flat", "Returns (x_nodes, xi_nodes, values) with values in x-major order");
    m.def("single_mode_transform",
          [](const std::string& v, double h, int l, double x, double xi) {
              return fbi::single_mode_transform(fbi::variant_from_string(v), h, l, x, xi);
          },
          py::arg("variant"), py::arg("h"), py::arg("l"), py::arg("x"), py::arg("xi"));

    // ---- spectra ----
    m.def(
        "stochastic_stability",
        [](const std::vector<double>& eps, double z, double R) {
            const auto rows = spectra::stochastic_stability_experiment(orbits::validate_cat_map(2, 1, 1, 1), eps, z, R);
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["eps"] = r.eps;
                d["d_zH"] = r.d_zH;
                d["n_eigs_in_disk"] = r.n_eigs_in_disk;
                d["in_disk"] = r.in_disk;
                out.append(d);
            }
            return out;
        },
        py::arg("eps_list"), py::arg("z") = 10.0, py::arg("R") = 15.0);
}
