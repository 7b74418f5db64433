#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rddym/parser.hpp"
#include "rddym/suite.hpp"

namespace py = pybind11;
using namespace rddym;

namespace {

struct PyWorkbench {
    Catalog catalog;
    SuiteRunner runner;

    explicit PyWorkbench(const std::string& dir)
        : catalog(Catalog::load(find_catalog_dir(dir))), runner(catalog) {}

    const Workspace& ws() const { return catalog.workspace(); }
};

py::dict report_to_dict(const CheckReport& c) {
    py::dict d;
    d["id"] = c.id;
    d["suite"] = c.suite;
    d["status"] = status_name(c.status);
    d["residual"] = c.residual;
    d["factor"] = c.factor;
    d["diagnostic"] = c.diagnostic;
    d["paper_eq"] = c.paper_eq;
    d["trace_len"] = c.trace_len;
    d["time_ms"] = c.time_ms;
    py::list rows;
    for (const auto& r : c.rows) {
        py::dict row;
        row["h"] = r.h;
        row["delta"] = r.delta;
        row["residual"] = r.residual;
        row["slope"] = r.slope;
        rows.append(row);
    }
    d["rows"] = rows;
    return d;
}

py::dict outcome_to_dict(const CheckOutcome& o) {
    py::dict d;
    d["status"] = status_name(o.status);
    d["residual"] = o.residual;
    d["factor"] = o.factor;
    d["diagnostic"] = o.diagnostic;
    d["trace_len"] = o.trace_len;
    return d;
}

}  // namespace

PYBIND11_MODULE(rddym, m) {
    m.doc() = "symbolic and numeric verification workbench for the two-component rdDym system";

    py::register_exception<Error>(m, "RddymError");

    py::class_<PyWorkbench>(m, "Workbench")
        .def(py::init<const std::string&>(), py::arg("catalog_dir") = "",
             "Load the catalog (default: $RDDYM_CATALOG_DIR or ./catalog).")
        .def("ids", [](const PyWorkbench& w) { return w.catalog.ids(); })
        .def("show", [](const PyWorkbench& w, const std::string& id) { return w.catalog.show(id); },
             py::arg("id"))
        .def("paper_eq",
             [](const PyWorkbench& w, const std::string& id) { return w.catalog.get(id).paper_eq; },
             py::arg("id"))
        .def(
            "normalize",
            [](const PyWorkbench& w, const std::string& text) {
                return normalize(parse_expression(text, w.ws()), w.ws()).str(w.ws());
            },
            py::arg("text"), "Parse an expression and return its canonical normal form.")
        .def(
            "is_zero",
            [](const PyWorkbench& w, const std::string& text) {
                return normalize(parse_expression(text, w.ws()), w.ws()).is_zero();
            },
            py::arg("text"))
        .def(
            "total_derivative",
            [](const PyWorkbench& w, const std::string& text, const std::string& coord,
               const std::string& covering_id) {
                auto c = coord_from_char(coord.empty() ? '?' : coord[0]);
                if (!c || coord.size() != 1) throw ValidationError("coordinate must be one of t, x, y");
                const Covering* cov =
                    covering_id.empty() ? nullptr : &w.catalog.covering(covering_id);
                Expr d = total_derivative(parse_expression(text, w.ws()), *c, w.ws(), cov);
                return normalize(d, w.ws()).str(w.ws());
            },
            py::arg("text"), py::arg("coord"), py::arg("covering_id") = "",
            "Total derivative; fiber t/y-derivatives are rewritten through the named covering.")
        .def(
            "reduce_modulo",
            [](const PyWorkbench& w, const std::string& text, const std::string& system_id) {
                return reduce_modulo(parse_expression(text, w.ws()), w.catalog.system(system_id), w.ws())
                    .str(w.ws());
            },
            py::arg("text"), py::arg("system_id"))
        .def(
            "compatibility_residual",
            [](const PyWorkbench& w, const std::string& covering_id) {
                return to_string(compatibility_residual(w.catalog.covering(covering_id), w.ws()), w.ws());
            },
            py::arg("covering_id"))
        .def(
            "verify_covering",
            [](const PyWorkbench& w, const std::string& covering_id, const std::string& system_id) {
                return outcome_to_dict(
                    verify_covering(w.catalog.covering(covering_id), w.catalog.system(system_id), w.ws()));
            },
            py::arg("covering_id"), py::arg("system_id"))
        .def(
            "implicit_parameter_swap",
            [](const PyWorkbench& w, const std::string& covering_id, const std::string& new_fiber) {
                Covering c = implicit_parameter_swap(w.catalog.covering(covering_id),
                                                     w.ws().require(new_fiber), w.ws());
                py::dict d;
                d["fiber"] = new_fiber;
                d["eq_t"] = normalize(c.equation(Coord::T), w.ws()).str(w.ws());
                d["eq_y"] = normalize(c.equation(Coord::Y), w.ws()).str(w.ws());
                return d;
            },
            py::arg("covering_id"), py::arg("new_fiber"))
        .def(
            "run_suite",
            [](const PyWorkbench& w, const std::string& suite, int parallel) {
                SuiteResult r = w.runner.run(suite, parallel);
                py::dict d;
                d["suite"] = r.suite;
                py::list checks;
                for (const auto& c : r.checks) checks.append(report_to_dict(c));
                d["checks"] = checks;
                py::dict summary;
                summary["pass"] = r.passed;
                summary["fail"] = r.failed;
                summary["error"] = r.errored;
                summary["total"] = static_cast<int>(r.checks.size());
                d["summary"] = summary;
                d["exit_code"] = r.exit_code();
                return d;
            },
            py::arg("suite") = "all", py::arg("parallel") = 1)
        .def(
            "run_suite_json",
            [](const PyWorkbench& w, const std::string& suite, int parallel) {
                return emit_json(w.runner.run(suite, parallel));
            },
            py::arg("suite") = "all", py::arg("parallel") = 1);

    m.def("suite_names", [] { return SuiteRunner::suite_names(); });
}
