#include "einbulk/embed.hpp"
#include "einbulk/errors.hpp"
#include "einbulk/expr.hpp"
#include "einbulk/geometry.hpp"
#include "einbulk/glue.hpp"
#include "einbulk/homotopy.hpp"
#include "einbulk/report.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace einbulk;

namespace {

SeedMetric seed_from_exprs(const std::vector<std::vector<std::string>>& comps,
                           const std::vector<double>& center, int order) {
    int d = static_cast<int>(comps.size());
    SymJets g(d, static_cast<int>(center.size()), order);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) g(i, j) = expand(*parse(comps[i][j]), center, order);
    SeedMetric s;
    s.n = d;
    s.g = make_chart_metric(d, g);
    return s;
}

py::dict einstein_check(const std::vector<std::vector<std::string>>& metric,
                        const std::vector<double>& center, double lambda, int order) {
    SeedMetric seed = seed_from_exprs(metric, center, order);
    RicciField res = einstein_residual(seed.g, lambda);
    Jet R = scalar_curvature(seed.g, ricci(christoffel(seed.g)));
    py::dict out;
    out["scalar_curvature"] = R.constant_term();
    out["residual_norm"] = residual_norm(res, std::max(order - 2, 0));
    out["residual_by_degree"] = residual_by_degree(res, std::max(order - 2, 0));
    return out;
}

py::dict embed_local(const std::vector<std::vector<std::string>>& metric,
                     const std::vector<double>& center, double lambda, double epsilon,
                     int order) {
    SeedMetric seed = seed_from_exprs(metric, center, order);
    EmbeddingResult res = extend_metric(seed, lambda, epsilon, order);
    CertifyReport cert = certify(res, seed);
    py::dict out;
    out["residual_norm"] = cert.residual_norm;
    out["constraint_norm"] = cert.constraint_norm;
    out["slice_max_deviation"] = cert.slice_max_deviation;
    out["residual_by_degree"] = cert.residual_by_degree;
    out["block_form_ok"] = cert.block_form_ok;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Einstein-bulk embedding toolkit: jets, curvature residuals, local "
              "extensions, glued product metrics and homotopy splitting";

    py::register_exception<Error>(m, "EinbulkError");

    py::class_<Jet>(m, "Jet")
        .def(py::init<int, int>(), py::arg("nvars"), py::arg("order"))
        .def_property_readonly("nvars", &Jet::nvars)
        .def_property_readonly("order", &Jet::order)
        .def("coeff", &Jet::coeff)
        .def("set_coeff", &Jet::set_coeff)
        .def("eval", [](const Jet& j, const std::vector<double>& p) { return jet_eval(j, p); })
        .def("__add__", [](const Jet& a, const Jet& b) { return jet_add(a, b); })
        .def("__sub__", [](const Jet& a, const Jet& b) { return jet_sub(a, b); })
        .def("__mul__", [](const Jet& a, const Jet& b) { return jet_mul(a, b); });

    m.def("variable", &Jet::variable, py::arg("nvars"), py::arg("order"), py::arg("var"),
          py::arg("center") = 0.0, "coordinate jet expanded about `center`");
    m.def("constant", &Jet::constant, py::arg("nvars"), py::arg("order"), py::arg("value"));
    m.def("reciprocal", &jet_reciprocal);
    m.def("diff", &jet_diff, py::arg("jet"), py::arg("var"));

    m.def(
        "expand",
        [](const std::string& src, const std::vector<double>& center, int order) {
            return expand(*parse(src), center, order);
        },
        py::arg("src"), py::arg("center"), py::arg("order"),
        "parse a metric-component formula and expand it about `center`");
    m.def("parse_shape",
          [](const std::string& src) { return to_string(*parse(src)); });

    m.def("bell_value",
          [](const std::vector<double>& center, double radius, const std::vector<double>& p) {
              return bell_eval(BellFunction{"", center, radius}, p);
          });

    m.def("einstein_check", &einstein_check, py::arg("metric"), py::arg("center"),
          py::arg("lambda_"), py::arg("order"),
          "Einstein residual of a metric given as component formulas");
    m.def("embed_local", &embed_local, py::arg("metric"), py::arg("center"), py::arg("lambda_"),
          py::arg("epsilon"), py::arg("order"),
          "codimension-1 Einstein extension with certification numbers");

    m.def("count_equations", &count_equations);
    m.def("split_product",
          [](const std::string& m_id, const std::string& f_id, int level) {
              return to_string(split_product(m_id, f_id, level));
          });
    m.def("homotopy_group", [](const std::string& id, int level) {
        return to_string(normalize(homotopy_group(id, level)));
    });

    m.def(
        "run_manifest",
        [](const std::string& manifest_json, const std::string& verb) {
            RunOptions opts;
            opts.verb = verb;
            RunResult r = run_manifest(nlohmann::ordered_json::parse(manifest_json), opts);
            return py::make_tuple(r.exit_code, r.report.dump());
        },
        py::arg("manifest_json"), py::arg("verb") = "",
        "run a manifest (JSON string); returns (exit_code, report_json)");
}
