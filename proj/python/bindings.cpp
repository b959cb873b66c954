#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "localgain/analysis.hpp"
#include "localgain/certify.hpp"
#include "localgain/errors.hpp"
#include "localgain/study.hpp"

namespace py = pybind11;
using namespace localgain;

namespace {

const char* verdict_name(RouthVerdict v) {
    switch (v) {
        case RouthVerdict::kHurwitz:
            return "hurwitz";
        case RouthVerdict::kNotHurwitz:
            return "not_hurwitz";
        case RouthVerdict::kMarginal:
            return "marginal";
    }
    return "?";
}

py::dict run_command(const std::string& command, const std::string& config, const std::string& out_dir,
                     std::size_t workers) {
    StudyConfig cfg = load_config(config);
    cfg.execution.workers = workers;
    if (!out_dir.empty()) cfg.execution.output = out_dir;
    RunReport report;
    if (command == "certify") {
        report = cmd_certify(cfg);
    } else if (command == "sweep") {
        report = cmd_sweep(cfg);
    } else if (command == "poles") {
        report = cmd_poles(cfg);
    } else if (command == "simulate") {
        report = cmd_simulate(cfg);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    if (!out_dir.empty()) write_outputs(out_dir, cfg, report);
    std::ostringstream text;
    write_report(text, cfg, report);

    py::dict out;
    out["command"] = report.command;
    out["verdict"] = report.verdict;
    out["exit_code"] = report.exit_code;
    out["digest"] = report.digest;
    out["report"] = text.str();
    out["margins"] = report.margins;
    if (report.poles) out["poles"] = *report.poles;
    py::dict masks;
    for (const auto& [i, mask] : report.masks) masks[py::str(cfg.devices[i].name)] = mask;
    out["masks"] = masks;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Decentralized local-gain damping certificates for inverter-based power systems";
    m.attr("__version__") = version();

    py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CertificateInapplicableError>(m, "CertificateInapplicableError");
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
    py::register_exception<PoleAtPointError>(m, "PoleAtPointError", PyExc_ArithmeticError);

    py::class_<Polynomial>(m, "Polynomial")
        .def(py::init([](std::vector<double> c) { return Polynomial(std::move(c)); }), py::arg("coeffs"))
        .def_property_readonly("coeffs", [](const Polynomial& p) { return std::vector<double>(p.coeffs().begin(), p.coeffs().end()); })
        .def_property_readonly("degree", &Polynomial::degree)
        .def("__call__", [](const Polynomial& p, Complex s) { return poly_eval(p, s); })
        .def("__repr__", [](const Polynomial& p) {
            std::ostringstream os;
            os << "Polynomial([";
            for (std::size_t k = 0; k < p.coeffs().size(); ++k) os << (k ? ", " : "") << p.coeffs()[k];
            os << "])";
            return os.str();
        });

    py::class_<RationalFunction>(m, "RationalFunction")
        .def(py::init([](std::vector<double> num, std::vector<double> den) {
                 return RationalFunction(Polynomial(std::move(num)), Polynomial(std::move(den)));
             }),
             py::arg("num"), py::arg("den"))
        .def_property_readonly("num", &RationalFunction::num)
        .def_property_readonly("den", &RationalFunction::den)
        .def_property_readonly("strictly_proper", &RationalFunction::is_strictly_proper)
        .def("__call__", [](const RationalFunction& r, Complex s) { return rf_eval(r, s); });

    m.def("poly_eval", &poly_eval, py::arg("p"), py::arg("s"));
    m.def("poly_roots", &poly_roots, py::arg("p"));
    m.def("shift_poly", &shift_poly, py::arg("p"), py::arg("sigma"));
    m.def("routh_strictly_hurwitz", &routh_strictly_hurwitz, py::arg("p"));
    m.def("routh_classify", [](const Polynomial& p) { return verdict_name(routh_classify(p)); }, py::arg("p"));
    m.def("rf_eval", &rf_eval, py::arg("r"), py::arg("s"));

    py::class_<ProhibitedDomain>(m, "ProhibitedDomain")
        .def(py::init<double, double, double, double, double, double>(), py::arg("sigma") = 0.35,
             py::arg("xi") = 0.37, py::arg("eps1") = 1e-3, py::arg("eps2") = 0.1, py::arg("eta1") = 10.0,
             py::arg("eta2") = 10.0)
        .def_property_readonly("sigma", &ProhibitedDomain::sigma)
        .def_property_readonly("xi", &ProhibitedDomain::xi)
        .def_property_readonly("tan_gamma", &ProhibitedDomain::tan_gamma)
        .def("contains", [](const ProhibitedDomain& d, Complex s) { return in_prohibited(s, d); }, py::arg("s"));

    m.def("in_prohibited", &in_prohibited, py::arg("s"), py::arg("dom"));
    m.def("boundary_length", &boundary_length, py::arg("dom"));
    m.def(
        "discretize_boundary",
        [](const ProhibitedDomain& d, double spacing) { return discretize_boundary(d, spacing).points; },
        py::arg("dom"), py::arg("spacing") = 0.01);

    py::class_<GfmParams>(m, "GfmParams")
        .def(py::init([](double mm, double d) { return GfmParams{mm, d}; }), py::arg("m"), py::arg("d"))
        .def_readwrite("m", &GfmParams::m)
        .def_readwrite("d", &GfmParams::d);
    py::class_<GflParams>(m, "GflParams")
        .def(py::init([](double H, double D, double Kp, double Ki, double V0) { return GflParams{H, D, Kp, Ki, V0}; }),
             py::arg("H"), py::arg("D"), py::arg("Kp"), py::arg("Ki"), py::arg("V0") = 1.0)
        .def_readwrite("H", &GflParams::H)
        .def_readwrite("D", &GflParams::D)
        .def_readwrite("Kp", &GflParams::Kp)
        .def_readwrite("Ki", &GflParams::Ki)
        .def_readwrite("V0", &GflParams::V0);

    py::class_<DeviceEntry>(m, "DeviceEntry")
        .def_readonly("d_entry", &DeviceEntry::d_entry)
        .def_readonly("d_inverse", &DeviceEntry::d_inverse);
    m.def("gfm_entry", &gfm_entry, py::arg("params"));
    m.def("gfl_entry", &gfl_entry, py::arg("params"));
    m.def(
        "custom_entry",
        [](std::vector<double> num, std::vector<double> den) {
            return custom_entry({RationalFunction(Polynomial(std::move(num)), Polynomial(std::move(den)))});
        },
        py::arg("num"), py::arg("den"));
    m.def("check_device_nonsingular", &check_device_nonsingular, py::arg("entry"), py::arg("dom"));
    m.def("check_entry_analytic", &check_entry_analytic, py::arg("entry"), py::arg("dom"));

    m.def(
        "static_network",
        [](const std::vector<std::pair<std::string, std::string>>& devices, const std::vector<std::string>& interior,
           const std::vector<std::tuple<std::string, std::string, double>>& lines, double omega0) {
            std::vector<DeviceNodeSpec> nodes;
            for (const auto& [id, role] : devices) nodes.push_back({id, role == "gfl" ? DeviceRole::kGfl : DeviceRole::kGfm});
            std::vector<LineSpec> specs;
            for (const auto& [a, b, l] : lines) specs.push_back({a, b, LineParams{l, 0.0, 1.0}});
            return static_network(GridTopology(nodes, interior, specs, omega0));
        },
        py::arg("devices"), py::arg("interior"), py::arg("lines"), py::arg("omega0") = 1.0,
        "Kron-reduced s = 0 network for devices [(id, 'gfm'|'gfl')], interior ids and lines [(from, to, l)].");

    py::class_<LgcValue>(m, "LgcValue").def_readonly("lhs", &LgcValue::lhs).def_readonly("rhs", &LgcValue::rhs);
    m.def(
        "lgc_pointwise",
        [](const DeviceEntry& e, Complex diag, double offdiag, Complex s) {
            return lgc_pointwise(e, NetworkRow{diag, offdiag}, s);
        },
        py::arg("entry"), py::arg("diag"), py::arg("offdiag_abs_sum"), py::arg("s"));
    m.def(
        "nonvanishing_diagonal",
        [](const DeviceEntry& e, double n_ii, const ProhibitedDomain& dom) { return nonvanishing_diagonal(e, n_ii, dom); },
        py::arg("entry"), py::arg("n_ii"), py::arg("dom"));

    py::class_<MarginReport>(m, "MarginReport")
        .def_readonly("device", &MarginReport::device)
        .def_readonly("min_lhs", &MarginReport::min_lhs)
        .def_readonly("max_rhs", &MarginReport::max_rhs)
        .def_readonly("worst_margin", &MarginReport::worst_margin)
        .def_readonly("worst_point", &MarginReport::worst_point)
        .def_readonly("nonvanishing", &MarginReport::nonvanishing)
        .def_readonly("passed", &MarginReport::passed)
        .def_readonly("tail_ok", &MarginReport::tail_ok)
        .def_readonly("warnings", &MarginReport::warnings);
    m.def(
        "lgbc_check",
        [](const DeviceEntry& e, std::size_t device, const RealMatrix& n, const ProhibitedDomain& dom, double spacing,
           double margin_tol) {
            StaticNetwork net(n);
            return lgbc_check(e, device, net, dom, discretize_boundary(dom, spacing), CertifyOptions{margin_tol});
        },
        py::arg("entry"), py::arg("device"), py::arg("network"), py::arg("dom"), py::arg("spacing") = 0.01,
        py::arg("margin_tol") = 1e-6);

    py::class_<FeasibilityMask>(m, "FeasibilityMask")
        .def_readonly("device", &FeasibilityMask::device)
        .def_property_readonly("axes",
                               [](const FeasibilityMask& mk) {
                                   py::dict d;
                                   for (const auto& a : mk.grid.axes) d[py::str(a.name)] = a.values;
                                   return d;
                               })
        .def_property_readonly("flags", [](const FeasibilityMask& mk) { return std::vector<int>(mk.flags.begin(), mk.flags.end()); })
        .def_readonly("margins", &FeasibilityMask::margins)
        .def_property_readonly("feasible_count", &FeasibilityMask::feasible_count);

    py::class_<PoleReport>(m, "PoleReport")
        .def_readonly("poles", &PoleReport::poles)
        .def_readonly("damping", &PoleReport::damping)
        .def_readonly("in_domain", &PoleReport::in_domain)
        .def_readonly("origin_pole_count", &PoleReport::origin_pole_count);
    m.def(
        "closed_loop_poles",
        [](const std::vector<DeviceEntry>& entries, const RealMatrix& n, std::optional<ProhibitedDomain> dom) {
            return closed_loop_poles(entries, n, dom);
        },
        py::arg("entries"), py::arg("network"), py::arg("dom") = std::nullopt);
    m.def("damping_ratio", &damping_ratio, py::arg("p"));
    m.def("screen_poles", &screen_poles, py::arg("report"), py::arg("dom"));

    py::class_<StepResponse>(m, "StepResponse")
        .def_readonly("time", &StepResponse::time)
        .def_readonly("angles", &StepResponse::angles)
        .def_readonly("powers", &StepResponse::powers)
        .def_readonly("dt", &StepResponse::dt)
        .def_readonly("divergent", &StepResponse::divergent);
    m.def(
        "step_response",
        [](const std::vector<DeviceEntry>& entries, const RealMatrix& n, std::size_t device, double magnitude,
           double start, double horizon, double dt) {
            return step_response(entries, n, Disturbance{device, magnitude, start}, horizon, dt);
        },
        py::arg("entries"), py::arg("network"), py::arg("device"), py::arg("magnitude"), py::arg("start") = 0.0,
        py::arg("horizon") = 60.0, py::arg("dt") = 0.01);

    m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("out_dir") = "", py::arg("workers") = 1,
          "Run certify|sweep|poles|simulate on a JSON study file; writes outputs when out_dir is given.");
}
