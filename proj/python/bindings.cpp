#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "ensctl/cli.hpp"
#include "ensctl/config.hpp"
#include "ensctl/error.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/optimizer.hpp"
#include "ensctl/reduced.hpp"

namespace py = pybind11;
using namespace ensctl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Controls cross the boundary as (nt + 1, 2 d) arrays.
Array to_array(const ControlPath& u) {
    Array a({u.nodes(), u.components()});
    std::copy(u.data().begin(), u.data().end(), a.mutable_data());
    return a;
}

ControlPath from_array(const Problem& p, const Array& a) {
    ControlPath u = p.zero_control();
    if (a.ndim() != 2 || a.shape(0) != u.nodes() || a.shape(1) != u.components()) {
        throw Error(ErrorKind::SchemaError, "control must have shape (" + std::to_string(u.nodes()) + ", " +
                                                std::to_string(u.components()) + ")");
    }
    std::copy(a.data(), a.data() + a.size(), u.data().begin());
    return u;
}

Array field_array(const ScalarField& f) {
    const GridSpec& g = f.grid;
    std::vector<py::ssize_t> shape;
    for (int d = g.dim() - 1; d >= 0; --d) shape.push_back(g.n(d));
    Array a(shape);
    std::copy(f.values.begin(), f.values.end(), a.mutable_data());
    return a;
}

py::dict cost_dict(const CostBreakdown& c) {
    py::dict d;
    d["running"] = c.running;
    d["terminal"] = c.terminal;
    d["total"] = c.total;
    return d;
}

py::dict kkt_dict(const KktResidual& k) {
    py::dict d;
    d["stationarity"] = k.stationarity;
    d["complement_upper"] = k.complement_upper;
    d["complement_lower"] = k.complement_lower;
    d["sign_consistency"] = k.sign_consistency;
    d["vi_residual"] = k.vi_residual;
    d["max"] = k.max();
    return d;
}

}  // namespace

PYBIND11_MODULE(_ensctl, m) {
    m.doc() = "Ensemble optimal control for the Liouville equation";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
    error.call_once_and_store_result([&]() { return py::exception<Error>(m, "Error"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
            py::set_error(error.get_stored(), msg.c_str());
        }
    });

    m.def(
        "run", [](const std::vector<std::string>& args) { return run_command(args); }, py::arg("args"),
        "Runs a CLI command and returns its exit code.");

    py::class_<RunConfig>(m, "Config")
        .def_static("from_json", &parse_config, py::arg("text"))
        .def("to_json", &emit_config)
        .def_property_readonly("dim", [](const RunConfig& c) { return c.grid.dim(); })
        .def_property_readonly("nt", [](const RunConfig& c) { return c.time.nt; })
        .def_property_readonly("T", [](const RunConfig& c) { return c.time.T; });

    py::class_<Problem>(m, "Problem")
        .def(py::init([](const RunConfig& c) { return make_problem(c); }), py::arg("config"))
        .def_property_readonly("dim", [](const Problem& p) { return p.grid.dim(); })
        .def_property_readonly("nodes", [](const Problem& p) { return p.timegrid.nodes(); })
        .def_property_readonly("times", [](const Problem& p) {
            std::vector<double> t(p.timegrid.nodes());
            for (int n = 0; n < p.timegrid.nodes(); ++n) t[n] = p.timegrid.time(n);
            return t;
        })
        .def("zero_control", [](const Problem& p) { return to_array(p.zero_control()); })
        .def_property_readonly("rho0", [](const Problem& p) { return field_array(p.rho0); });

    m.def(
        "initial_control",
        [](const RunConfig& c, const std::string& base_dir) { return to_array(make_control(c, base_dir)); },
        py::arg("config"), py::arg("base_dir") = "");

    m.def(
        "forward",
        [](const Problem& p, const Array& u) {
            const ControlPath path = from_array(p, u);
            const StateTrajectory tr = solve_forward(p.rho0, p.drift(path), p.source_ptr(), p.timegrid, p.forward);
            std::vector<double> mass, min;
            for (const StepDiagnostics& d : tr.diagnostics()) {
                mass.push_back(d.mass);
                min.push_back(d.min);
            }
            py::dict out;
            out["mass"] = mass;
            out["min"] = min;
            out["final"] = field_array(tr.final());
            out["leak"] = boundary_leak(tr);
            return out;
        },
        py::arg("problem"), py::arg("control"));

    m.def(
        "cost", [](const Problem& p, const Array& u) { return cost_dict(evaluate_cost(from_array(p, u), p)); },
        py::arg("problem"), py::arg("control"));

    m.def(
        "gradient",
        [](const Problem& p, const Array& u) {
            const GradientReport g = reduced_gradient(from_array(p, u), p);
            py::dict out;
            out["l2"] = to_array(g.l2);
            out["cost"] = cost_dict(g.cost);
            out["ibp_discrepancy"] = g.ibp_discrepancy;
            return out;
        },
        py::arg("problem"), py::arg("control"));

    m.def(
        "optimize",
        [](const Problem& p, const RunConfig& c, py::object initial) {
            const ControlPath u0 = initial.is_none() ? p.zero_control() : from_array(p, initial.cast<Array>());
            const OptimResult r = optimize(p, c.optim, u0);
            std::vector<double> costs;
            for (const IterationRecord& it : r.history) costs.push_back(it.cost);
            py::dict out;
            out["control"] = to_array(r.control);
            out["iterations"] = r.iterations;
            out["reason"] = to_string(r.reason);
            out["feasible"] = r.feasible;
            out["kkt"] = kkt_dict(r.kkt);
            out["costs"] = costs;
            return out;
        },
        py::arg("problem"), py::arg("config"), py::arg("initial") = py::none());
}
