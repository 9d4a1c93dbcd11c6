#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncbasis/serialize.hpp"
#include "ncbasis/tensorprod.hpp"

namespace py = pybind11;
using namespace ncbasis;

namespace {

PExp pexp_from_object(const py::object& p) {
    if (py::isinstance<py::str>(p)) return PExp::parse(p.cast<std::string>());
    const double v = p.cast<double>();
    return std::isinf(v) ? PExp::inf() : PExp::finite(v);
}

NormSpec spec_from(const py::object& p, const std::string& side) {
    return NormSpec{pexp_from_object(p), side_parse(side)};
}

EstimationStrategy strategy_from(const std::string& method, int restarts,
                                 int samples_per_restart, int iterations,
                                 std::uint64_t seed) {
    EstimationStrategy s;
    s.method = method_parse(method);
    s.restarts = restarts;
    s.samples_per_restart = samples_per_restart;
    s.ascent_iterations = iterations;
    s.seed = seed;
    return s;
}

py::dict report_to_dict(const NormReport& r) {
    py::list rows;
    for (const NormReportRow& row : r.rows) {
        py::dict d;
        d["alpha"] = row.alpha;
        d["level"] = row.level;
        d["p"] = row.p.str();
        d["side"] = side_name(row.norm_side);
        d["m"] = row.m;
        d["estimate"] = row.estimate;
        d["bound"] = row.bound;
        d["method"] = method_name(row.method);
        d["samples"] = row.samples;
        d["seed"] = row.seed;
        d["pass"] = row.pass;
        d["counted"] = row.counted;
        if (!row.error.empty()) d["error"] = row.error;
        rows.append(d);
    }
    py::dict out;
    out["suite"] = r.suite;
    out["system_side"] = side_name(r.system_side);
    out["bound_kind"] = r.bound_kind;
    out["tolerance"] = r.tolerance;
    out["notes"] = r.notes;
    out["rows"] = rows;
    out["all_pass"] = r.all_pass();
    return out;
}

}  // namespace

PYBIND11_MODULE(_ncbasis, m) {
    m.doc() = "Haar systems in weighted matrix algebras: construction, expansion and "
              "partial-sum norm certification";

    m.def("kron", &kron, py::arg("a"), py::arg("b"));
    m.def("singular_values", &singular_values, py::arg("x"));
    m.def(
        "schatten_norm",
        [](const Mat& x, const py::object& p) { return schatten_norm(x, pexp_from_object(p)); },
        py::arg("x"), py::arg("p"));
    m.def(
        "weighted_norm",
        [](const Mat& x, const RealVec& w, const py::object& p, const std::string& side) {
            return weighted_norm(x, Diagonal(w), spec_from(p, side));
        },
        py::arg("x"), py::arg("weight"), py::arg("p"), py::arg("side"));
    m.def(
        "diag_power",
        [](const RealVec& w, Complex z) { return diag_power(Diagonal(w), z); },
        py::arg("weight"), py::arg("z"));

    py::class_<Weight>(m, "Weight")
        .def(py::init<double, int>(), py::arg("alpha"), py::arg("level"))
        .def(py::init<double, double, int>(), py::arg("alpha"), py::arg("one_minus_alpha"),
             py::arg("level"))
        .def_property_readonly("alpha", &Weight::alpha)
        .def_property_readonly("level", &Weight::level)
        .def_property_readonly("lam", &Weight::lambda)
        .def_property_readonly("dim", &Weight::dim)
        .def_property_readonly("density",
                               [](const Weight& w) { return w.density().values(); });

    m.def("state", &state, py::arg("weight"), py::arg("x"));
    m.def("embed", &embed, py::arg("x"));
    m.def(
        "modular_flow",
        [](const Weight& w, double t, const Mat& x) { return modular_flow(w, t, x); },
        py::arg("weight"), py::arg("t"), py::arg("x"));
    m.def("kms_function", &kms_function, py::arg("weight"), py::arg("x"), py::arg("y"),
          py::arg("z"));
    m.def("expect_level", &expect_level, py::arg("weight_next"), py::arg("x"));
    m.def("expect_diagonal", &expect_diagonal, py::arg("x"));

    py::class_<RademacherQuad>(m, "RademacherQuad")
        .def(py::init([](std::array<Mat, 4> r, double alpha, const std::string& side) {
                 return RademacherQuad(std::move(r), alpha, 1.0 - alpha, side_parse(side));
             }),
             py::arg("r"), py::arg("alpha"), py::arg("side"))
        .def_property_readonly("alpha", &RademacherQuad::alpha)
        .def_property_readonly("side",
                               [](const RademacherQuad& q) { return side_name(q.side()); })
        .def_property_readonly("gram_residual", &RademacherQuad::gram_residual)
        .def_property_readonly("r0_norm_exceeds_one", &RademacherQuad::r0_norm_exceeds_one)
        .def("r", &RademacherQuad::r, py::arg("j"));

    m.def(
        "standard_quad",
        [](double alpha, const std::string& side) {
            return standard_quad(alpha, side_parse(side));
        },
        py::arg("alpha"), py::arg("side") = "left");

    m.def("shell_index", &shell_index, py::arg("j"), py::arg("k"));
    m.def("shell_pair", &shell_pair, py::arg("s"));
    m.def("matrix_units_shell", &matrix_units_shell, py::arg("nu"));

    py::class_<HaarSystem>(m, "HaarSystem")
        .def(py::init([](double alpha, int level, const std::string& side) {
                 return HaarSystem::standard(alpha, level, side_parse(side));
             }),
             py::arg("alpha"), py::arg("level"), py::arg("side") = "left")
        .def_static(
            "standard",
            [](double alpha, int level, const std::string& side) {
                return HaarSystem::standard(alpha, level, side_parse(side));
            },
            py::arg("alpha"), py::arg("level"), py::arg("side") = "left")
        .def_property_readonly("alpha", &HaarSystem::alpha)
        .def_property_readonly("level", &HaarSystem::level)
        .def_property_readonly("dim", &HaarSystem::dim)
        .def_property_readonly("side",
                               [](const HaarSystem& s) { return side_name(s.side()); })
        .def_property_readonly("r0_norm_warning", &HaarSystem::r0_norm_warning)
        .def("__len__", &HaarSystem::size)
        .def("element", &HaarSystem::element, py::arg("j"))
        .def("elements", &HaarSystem::elements)
        .def("analyze", &HaarSystem::analyze, py::arg("x"))
        .def("synthesize", &HaarSystem::synthesize, py::arg("coeffs"))
        .def("to_json", [](const HaarSystem& s) { return haar_to_json(s).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return haar_from_json(json::parse(text));
        });

    m.def(
        "distorted_measure",
        [](double alpha, int level) { return distorted_measure(alpha, level).masses; },
        py::arg("alpha"), py::arg("level"));
    m.def(
        "commutative_haar",
        [](double alpha, int level) {
            CommutativeSystem cs = commutative_haar(alpha, level);
            py::dict d;
            d["chi"] = cs.chi;
            d["step_values"] = cs.step_values;
            d["masses"] = cs.measure.masses;
            return d;
        },
        py::arg("alpha"), py::arg("level"));
    m.def("classical_haar_values", &classical_haar_values, py::arg("j"), py::arg("level"));

    m.def("schur_project", &schur_project, py::arg("nu"), py::arg("m"), py::arg("x"));
    m.def("haar_partial_sum", &haar_partial_sum, py::arg("system"), py::arg("m"), py::arg("x"));
    m.def(
        "theoretical_bound",
        [](const HaarSystem& sys, const py::object& p, const std::string& side) {
            return theoretical_bound(sys, spec_from(p, side));
        },
        py::arg("system"), py::arg("p"), py::arg("side"));
    m.def(
        "estimate_partial_sum_norm",
        [](const HaarSystem& sys, int mm, const py::object& p, const std::string& side,
           const std::string& method, int restarts, int samples_per_restart, int iterations,
           std::uint64_t seed) {
            PartialSumMap map = PartialSumMap::haar(sys, mm, spec_from(p, side));
            return estimate_map_norm(
                map, strategy_from(method, restarts, samples_per_restart, iterations, seed));
        },
        py::arg("system"), py::arg("m"), py::arg("p"), py::arg("side"),
        py::arg("method") = "polar_ascent", py::arg("restarts") = 50,
        py::arg("samples_per_restart") = 200, py::arg("iterations") = 200,
        py::arg("seed") = 0xC0FFEE);
    m.def(
        "certify",
        [](const HaarSystem& sys, const py::object& p, const std::string& side,
           const std::string& method, int restarts, int samples_per_restart, int iterations,
           std::uint64_t seed, double tolerance) {
            CertifyOptions opt;
            opt.tolerance = tolerance;
            NormReport r =
                certify(sys, spec_from(p, side),
                        strategy_from(method, restarts, samples_per_restart, iterations, seed),
                        opt);
            return report_to_dict(r);
        },
        py::arg("system"), py::arg("p"), py::arg("side"), py::arg("method") = "polar_ascent",
        py::arg("restarts") = 50, py::arg("samples_per_restart") = 200,
        py::arg("iterations") = 200, py::arg("seed") = 0xC0FFEE,
        py::arg("tolerance") = 1e-6);
    m.def(
        "certify_schur",
        [](int nu, const Weight& w, const py::object& p, const std::string& side,
           const std::string& method, int restarts, int samples_per_restart, int iterations,
           std::uint64_t seed, double tolerance) {
            CertifyOptions opt;
            opt.tolerance = tolerance;
            NormReport r = certify_schur(
                nu, w, spec_from(p, side),
                strategy_from(method, restarts, samples_per_restart, iterations, seed), opt);
            return report_to_dict(r);
        },
        py::arg("nu"), py::arg("weight"), py::arg("p"), py::arg("side"),
        py::arg("method") = "polar_ascent", py::arg("restarts") = 50,
        py::arg("samples_per_restart") = 200, py::arg("iterations") = 200,
        py::arg("seed") = 0xC0FFEE, py::arg("tolerance") = 1e-6);

    m.def(
        "expect_left_factor",
        [](const RealVec& left_density, const RealVec& right_density, const Mat& z) {
            ProductAlgebra pa{FactorState::explicit_density(Diagonal(left_density)),
                              FactorState::explicit_density(Diagonal(right_density))};
            return expect_left_factor(pa, z);
        },
        py::arg("left_density"), py::arg("right_density"), py::arg("z"));
    m.def("product_basis", &product_basis, py::arg("a"), py::arg("b"));
    m.def(
        "lp_embed",
        [](const Mat& x, const py::object& p, double alpha) {
            return lp_embed(x, pexp_from_object(p), alpha);
        },
        py::arg("x"), py::arg("p"), py::arg("alpha"));
    m.def(
        "product_certify",
        [](const HaarSystem& a, const HaarSystem& b, const py::object& p,
           const std::string& side, const std::string& method, int restarts,
           int samples_per_restart, int iterations, std::uint64_t seed, double tolerance) {
            NormSpec spec = spec_from(p, side);
            CertifyOptions opt;
            opt.tolerance = tolerance;
            NormReport r = product_partial_sum_certify(
                FactorSystem::from_haar(a, spec), FactorSystem::from_haar(b, spec), spec,
                strategy_from(method, restarts, samples_per_restart, iterations, seed), opt);
            return report_to_dict(r);
        },
        py::arg("a"), py::arg("b"), py::arg("p"), py::arg("side"),
        py::arg("method") = "polar_ascent", py::arg("restarts") = 50,
        py::arg("samples_per_restart") = 200, py::arg("iterations") = 200,
        py::arg("seed") = 0xC0FFEE, py::arg("tolerance") = 1e-6);

    m.def("matrix_to_json", [](const Mat& x) { return matrix_to_json(x).dump(); });
    m.def("matrix_from_json",
          [](const std::string& text) { return matrix_from_json(json::parse(text)); });
    m.def("parse_alpha", [](const std::string& text) {
        double oma = 0.0;
        const double alpha = parse_alpha(text, &oma);
        return py::make_tuple(alpha, oma);
    });
}
