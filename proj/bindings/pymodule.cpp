// Python bindings for the core pipeline: families, singular-point scans,
// intermediate-map solving, measures, classification, and Choi utilities.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dmsing/bloch.hpp"
#include "dmsing/divisibility.hpp"
#include "dmsing/errors.hpp"
#include "dmsing/measures.hpp"
#include "dmsing/models.hpp"
#include "dmsing/report.hpp"
#include "dmsing/version.hpp"

#include <optional>

namespace py = pybind11;
using namespace dmsing;

namespace {

ScanConfig make_scan_config(double t_max, int grid_points, double rank_tol) {
    ScanConfig cfg;
    cfg.t_max = t_max;
    cfg.grid_points = grid_points;
    cfg.rank_tol = rank_tol;
    return cfg;
}

MeasureConfig make_measure_config(double t_max, int outer_grid) {
    MeasureConfig cfg;
    cfg.t_max = t_max;
    cfg.outer_grid = outer_grid;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_dmsing, m) {
    m.doc() = "Singular points and non-Markovianity of dynamical maps";
    m.attr("__version__") = kVersion;

    py::register_exception<NotAStateError>(m, "NotAStateError", PyExc_ValueError);
    py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

    // ---- affine maps and families ------------------------------------------

    py::class_<AffineMap>(m, "AffineMap")
        .def(py::init([](const RealMatrix& D, const RealVector& f) {
                 if (D.rows() != D.cols() || D.rows() != f.size()) {
                     throw py::value_error("D must be square with matching f length");
                 }
                 AffineMap map;
                 map.d = D.rows() == 3 ? 2 : 0;
                 map.D = D;
                 map.f = f;
                 return map;
             }),
             py::arg("D"), py::arg("f"))
        .def_static("identity", &AffineMap::identity, py::arg("d"))
        .def_readonly("d", &AffineMap::d)
        .def_readonly("D", &AffineMap::D)
        .def_readonly("f", &AffineMap::f)
        .def("__repr__", [](const AffineMap& map) {
            return "AffineMap(d=" + std::to_string(map.d) + ")";
        });

    py::class_<MapFamily>(m, "MapFamily")
        .def_readonly("d", &MapFamily::d)
        .def_readonly("name", &MapFamily::name)
        .def_readonly("params", &MapFamily::params)
        .def_readonly("t_horizon", &MapFamily::t_horizon)
        .def_readonly("period_hint", &MapFamily::period_hint)
        .def("evaluate", &MapFamily::evaluate, py::arg("t"))
        .def("has_closed_form", &MapFamily::has_closed_form)
        .def(
            "closed_form_singular_point",
            [](const MapFamily& family, int n) {
                if (!family.has_closed_form()) {
                    throw py::value_error("family has no closed-form singular times");
                }
                return family.closed_form_singular_points(n);
            },
            py::arg("n"))
        .def("__repr__", [](const MapFamily& family) {
            return "MapFamily('" + family.name + "')";
        });

    m.def(
        "dephasing_family",
        [](double A, int N) { return dephasing_family({A, N}); }, py::arg("A") = 1.0,
        py::arg("N") = 1, "Spin-bath dephasing family, D = diag(C, C, 1)");
    m.def(
        "jc_family",
        [](double gamma0, double lam) { return jc_family({gamma0, lam}); },
        py::arg("gamma0") = 1.0, py::arg("lambda_") = 1.0,
        "Damped Jaynes-Cummings family, D = diag(D11, D11, D11^2)");
    m.def("load_tabulated_family", &load_tabulated_family, py::arg("path"));
    m.def("family_from_kraus", &family_from_kraus, py::arg("path"));
    m.def("dephasing_coherence",
          [](double A, int N, double t) { return dephasing_coherence({A, N}, t); },
          py::arg("A"), py::arg("N"), py::arg("t"));
    m.def("jc_amplitude",
          [](double gamma0, double lam, double t) { return jc_c({gamma0, lam}, t); },
          py::arg("gamma0"), py::arg("lambda_"), py::arg("t"));

    // ---- singular points and decomposition ---------------------------------

    py::class_<SingularPoint>(m, "SingularPoint")
        .def_readonly("t_c", &SingularPoint::t_c)
        .def_readonly("sigma_min", &SingularPoint::sigma_min)
        .def_readonly("rank_deficit", &SingularPoint::rank_deficit)
        .def_readonly("confirmed", &SingularPoint::confirmed)
        .def("__repr__", [](const SingularPoint& p) {
            return "SingularPoint(t_c=" + std::to_string(p.t_c) + ")";
        });

    m.def(
        "find_singular_points",
        [](const MapFamily& family, double t_max, int grid_points, double rank_tol) {
            return find_singular_points(family,
                                        make_scan_config(t_max, grid_points, rank_tol));
        },
        py::arg("family"), py::arg("t_max"), py::arg("grid_points") = 2000,
        py::arg("rank_tol") = 1e-8,
        "Times at which the family's homogeneous part loses rank");

    py::class_<DecompositionResult>(m, "DecompositionResult")
        .def_property_readonly(
            "exists",
            [](const DecompositionResult& r) {
                return r.status == DecompositionStatus::Exists;
            })
        .def_readonly("V", &DecompositionResult::V)
        .def_readonly("r", &DecompositionResult::r)
        .def_readonly("unique", &DecompositionResult::unique)
        .def_readonly("residual", &DecompositionResult::residual)
        .def_readonly("rank_c", &DecompositionResult::rank_c)
        .def_readonly("rank_stacked", &DecompositionResult::rank_stacked)
        .def("__repr__", [](const DecompositionResult& r) {
            return std::string("DecompositionResult(exists=") +
                   (r.status == DecompositionStatus::Exists ? "True" : "False") + ")";
        });

    m.def(
        "solve_decomposition",
        [](const AffineMap& map_c, const AffineMap& map_t, double rel_tol) {
            return solve_decomposition(map_c, map_t, rel_tol);
        },
        py::arg("map_c"), py::arg("map_t"), py::arg("rel_tol") = 1e-8,
        "Intermediate map V with V * map_c = map_t, when one exists");
    m.def(
        "decompose_interval",
        [](const MapFamily& family, double t1, double t2) {
            return solve_decomposition(family.evaluate(t1), family.evaluate(t2));
        },
        py::arg("family"), py::arg("t1"), py::arg("t2"));

    m.def(
        "classify_interval",
        [](const MapFamily& family, double t1, double t2, std::uint64_t seed) {
            ClassificationConfig cfg;
            cfg.seed = seed;
            return to_string(classify_interval(family, t1, t2, cfg));
        },
        py::arg("family"), py::arg("t1"), py::arg("t2"), py::arg("seed") = 42,
        "One of 'CP-divisible', 'positive-only', 'not-positive', 'no-decomposition'");

    // ---- measures ----------------------------------------------------------

    py::class_<MeasureResult>(m, "MeasureResult")
        .def_readonly("t_c", &MeasureResult::t_c)
        .def_readonly("S", &MeasureResult::S)
        .def_readonly("argmax_T", &MeasureResult::argmax_T)
        .def_readonly("argmax_n0", &MeasureResult::argmax_n0)
        .def_readonly("outer_evaluations", &MeasureResult::outer_evaluations)
        .def_readonly("inner_solver", &MeasureResult::inner_solver)
        .def("__repr__", [](const MeasureResult& r) {
            return "MeasureResult(t_c=" + std::to_string(r.t_c) +
                   ", S=" + std::to_string(r.S) + ")";
        });

    m.def(
        "singularity_measure",
        [](const MapFamily& family, double t_c, std::optional<double> t_max,
           int outer_grid) {
            const double horizon =
                t_max ? *t_max : default_measure_horizon(family, t_c);
            return singularity_measure(family, t_c,
                                       make_measure_config(horizon, outer_grid));
        },
        py::arg("family"), py::arg("t_c"), py::arg("t_max") = std::nullopt,
        py::arg("outer_grid") = 400,
        "Largest trace distance between the direct and restarted evolutions");

    py::class_<NonMarkovianityResult>(m, "NonMarkovianityResult")
        .def_readonly("N_M", &NonMarkovianityResult::N_M)
        .def_readonly("points", &NonMarkovianityResult::points)
        .def_readonly("terms", &NonMarkovianityResult::terms)
        .def("__repr__", [](const NonMarkovianityResult& r) {
            return "NonMarkovianityResult(N_M=" + std::to_string(r.N_M) + ")";
        });

    m.def(
        "non_markovianity",
        [](const MapFamily& family, double horizon, int grid_points, double rank_tol,
           int outer_grid) {
            return non_markovianity(family,
                                    make_scan_config(horizon, grid_points, rank_tol),
                                    make_measure_config(horizon, outer_grid));
        },
        py::arg("family"), py::arg("horizon"), py::arg("grid_points") = 2000,
        py::arg("rank_tol") = 1e-8, py::arg("outer_grid") = 400,
        "Sum of singularity measures over all confirmed singular points");

    py::class_<BallMaxResult>(m, "BallMaxResult")
        .def_readonly("value", &BallMaxResult::value)
        .def_readonly("argmax", &BallMaxResult::argmax)
        .def_readonly("solver", &BallMaxResult::solver);

    m.def("max_norm_affine_over_ball", &max_norm_affine_over_ball, py::arg("M"),
          py::arg("b"), py::arg("tol") = 1e-10,
          "max over the unit ball of ||M n + b|| with an attaining point");
    m.def("restart_trajectory", &restart_trajectory, py::arg("family"),
          py::arg("t_mid"), py::arg("T"));
    m.def("deviation_affine", &deviation_affine, py::arg("family"), py::arg("t_mid"),
          py::arg("T"));
    m.def("default_measure_horizon", &default_measure_horizon, py::arg("family"),
          py::arg("t_c"));

    // ---- Choi form and reports ---------------------------------------------

    m.def(
        "choi_matrix",
        [](const AffineMap& map) { return choi_from_affine(map.D, map.f).entries; },
        py::arg("map"), "Choi operator of a qubit affine map (trace 2)");
    m.def(
        "is_completely_positive",
        [](const AffineMap& map, double tol) {
            return is_completely_positive(choi_from_affine(map.D, map.f), tol);
        },
        py::arg("map"), py::arg("tol") = 1e-10);
    m.def("is_positive_map", &is_positive_map, py::arg("D"), py::arg("f"),
          py::arg("n_samples") = 2048, py::arg("tol") = 1e-10, py::arg("seed") = 42);

    m.def(
        "scan_report_json",
        [](const MapFamily& family, double t_max, int grid_points, double rank_tol,
           std::uint64_t seed, bool with_measures) {
            RunScanOptions options;
            options.scan = make_scan_config(t_max, grid_points, rank_tol);
            options.seed = seed;
            options.with_measures = with_measures;
            return report_to_json(run_scan(family, options));
        },
        py::arg("family"), py::arg("t_max"), py::arg("grid_points") = 2000,
        py::arg("rank_tol") = 1e-8, py::arg("seed") = 42,
        py::arg("with_measures") = true,
        "Full scan report as deterministic JSON text");
}
