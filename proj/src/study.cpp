#include "localgain/study.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>

#include "localgain/errors.hpp"

#ifndef LOCALGAIN_VERSION
#define LOCALGAIN_VERSION "0.0.0"
#endif

namespace localgain {

using nlohmann::json;

const char* version() { return LOCALGAIN_VERSION; }

namespace {

// One JSON object being read; tracks consumed keys so leftovers can be reported.
class Section {
   public:
    Section(json j, std::string path) : j_(std::move(j)), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_ + ": " + msg); }
    std::string       path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw ConfigError(path(key) + ": required field missing");
        return j_.at(key);
    }

    const json* find(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : (used_.insert(key), fallback); }

    std::string text(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : (used_.insert(key), fallback);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        const json& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(path(key) + ": expected a non-negative integer");
        }
        return v.get<std::size_t>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) throw ConfigError(path(it.key()) + ": unknown field");
        }
    }

   private:
    json                  j_;
    std::string           path_;
    std::set<std::string> used_;
};

const json& require_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path + ": expected an array");
    return v;
}

std::vector<double> number_list(const json& v, const std::string& path) {
    std::vector<double> out;
    for (std::size_t k = 0; k < require_array(v, path).size(); ++k) {
        if (!v[k].is_number()) throw ConfigError(path + "[" + std::to_string(k) + "]: expected a number");
        out.push_back(v[k].get<double>());
    }
    return out;
}

DeviceRole parse_role(const std::string& s, const std::string& path) {
    if (s == "gfm") return DeviceRole::kGfm;
    if (s == "gfl") return DeviceRole::kGfl;
    throw ConfigError(path + ": role must be \"gfm\" or \"gfl\"");
}

// Re-raises module validation errors with the config path prefixed.
template <class Fn>
auto at_path(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw ConfigError(path + ": " + msg);
    } catch (const DegenerateInputError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

DeviceSpec parse_device(const json& j, const std::string& path) {
    Section     s(j, path);
    DeviceSpec  dev;
    dev.name = s.text("name");
    const auto type = s.text("type");
    if (type == "gfm") {
        dev.role = DeviceRole::kGfm;
        GfmParams p{s.number("m"), s.number("d")};
        at_path(path, [&] { validate(p); });
        dev.model = p;
    } else if (type == "gfl") {
        dev.role = DeviceRole::kGfl;
        GflParams p{s.number("H"), s.number("D"), s.number("Kp"), s.number("Ki"), s.number("V0", 1.0)};
        at_path(path, [&] { validate(p); });
        dev.model = p;
    } else if (type == "custom") {
        dev.role = parse_role(s.text("role"), s.path("role"));
        auto num = number_list(s.at("num"), s.path("num"));
        auto den = number_list(s.at("den"), s.path("den"));
        CustomRational c = at_path(path, [&] { return CustomRational{RationalFunction(Polynomial(num), Polynomial(den))}; });
        at_path(path, [&] { return custom_entry(c); });
        dev.model = c;
    } else {
        throw ConfigError(s.path("type") + ": expected \"gfm\", \"gfl\" or \"custom\"");
    }
    s.finish();
    return dev;
}

std::vector<AxisConfig> parse_axes(const json& v, const std::string& path) {
    std::vector<AxisConfig> out;
    for (std::size_t k = 0; k < require_array(v, path).size(); ++k) {
        const std::string p = path + "[" + std::to_string(k) + "]";
        Section           s(v[k], p);
        AxisConfig        a;
        a.name = s.text("name");
        a.min = s.number("min", a.min);
        a.max = s.number("max", a.max);
        a.count = s.count("count", a.count);
        const auto scale = s.text("scale", "linear");
        if (scale != "linear" && scale != "log") throw ConfigError(s.path("scale") + ": expected \"linear\" or \"log\"");
        a.log_scale = scale == "log";
        s.finish();
        if (!(a.min > 0.0)) throw ConfigError(s.path("min") + ": device parameters must be > 0");
        at_path(p, [&] { return make_axis(a.name, a.min, a.max, a.count, a.log_scale); });
        out.push_back(a);
    }
    return out;
}

std::vector<AxisConfig> default_axes(DeviceRole role) {
    if (role == DeviceRole::kGfm) return {{"m", 0.1, 20.0, 40, false}, {"d", 0.1, 20.0, 40, false}};
    return {{"H", 0.1, 20.0, 40, false}, {"D", 0.1, 20.0, 40, false}};
}

json axes_json(const std::vector<AxisConfig>& axes) {
    json out = json::array();
    for (const auto& a : axes) {
        out.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count},
                       {"scale", a.log_scale ? "log" : "linear"}});
    }
    return out;
}

std::string format_num(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string format_complex(Complex s) {
    std::ostringstream os;
    os << std::setprecision(10) << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "j";
    return os.str();
}

std::unique_ptr<NetworkProvider> make_provider(const StudyConfig& cfg) {
    if (cfg.network == NetworkMode::kDynamic) return std::make_unique<DynamicNetwork>(cfg.topology);
    return std::make_unique<StaticNetwork>(static_network(cfg.topology));
}

class PhaseTimer {
   public:
    explicit PhaseTimer(RunReport& report) : report_(report) {}
    template <class Fn>
    auto run(const std::string& phase, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        auto       record = [&] {
            report_.timings.emplace_back(
                phase, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        };
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto result = fn();
            record();
            return result;
        }
    }

   private:
    RunReport& report_;
};

RunReport new_report(const StudyConfig& cfg, std::string command) {
    RunReport r;
    r.command = std::move(command);
    r.effective_config = to_json(cfg);
    r.digest = config_digest(cfg);
    return r;
}

PoleReport oracle_poles(const StudyConfig& cfg, const std::vector<DeviceEntry>& entries, RunReport& report) {
    if (cfg.network == NetworkMode::kDynamic) {
        report.notes.push_back("pole oracle uses the static (s = 0) network; dynamic line poles are not included");
    }
    return closed_loop_poles(entries, static_network(cfg.topology), cfg.domain);
}

}  // namespace

StudyConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                          e.what());
    }

    Section top(root, "");

    // devices
    std::vector<DeviceSpec> devices;
    {
        const json& arr = require_array(top.at("devices"), "devices");
        for (std::size_t k = 0; k < arr.size(); ++k) devices.push_back(parse_device(arr[k], "devices[" + std::to_string(k) + "]"));
        if (devices.empty()) throw ConfigError("devices: at least one device is required");
    }

    // topology
    Section                     topo(top.at("topology"), "topology");
    const double                omega0 = topo.number("omega0", 1.0);
    std::vector<DeviceNodeSpec> nodes;
    if (const json* dn = topo.find("devices")) {
        for (std::size_t k = 0; k < require_array(*dn, "topology.devices").size(); ++k) {
            const std::string p = "topology.devices[" + std::to_string(k) + "]";
            Section           s((*dn)[k], p);
            nodes.push_back({s.text("id"), parse_role(s.text("role"), s.path("role"))});
            s.finish();
        }
    } else {
        for (const auto& d : devices) nodes.push_back({d.name, d.role});
    }
    std::vector<std::string> interior;
    if (const json* in = topo.find("interior")) {
        for (std::size_t k = 0; k < require_array(*in, "topology.interior").size(); ++k) {
            if (!(*in)[k].is_string()) throw ConfigError("topology.interior[" + std::to_string(k) + "]: expected a string");
            interior.push_back((*in)[k].get<std::string>());
        }
    }
    std::vector<LineSpec> lines;
    {
        const json& arr = require_array(topo.at("lines"), "topology.lines");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string p = "topology.lines[" + std::to_string(k) + "]";
            Section           s(arr[k], p);
            LineSpec          l;
            l.from = s.text("from");
            l.to = s.text("to");
            l.params.l = s.number("l");
            l.params.rho = s.number("rho", 0.0);
            l.params.stiffness = s.number("stiffness", 1.0);
            s.finish();
            lines.push_back(std::move(l));
        }
    }
    topo.finish();
    GridTopology topology = at_path("topology", [&] { return GridTopology(nodes, interior, lines, omega0); });
    at_path("devices", [&] { return device_matrix(devices, topology); });

    // domain
    double           spacing = 0.01;
    ProhibitedDomain domain = [&] {
        Section s(top.find("domain") ? top.at("domain") : json::object(), "domain");
        const double sigma = s.number("sigma", 0.35);
        const double xi = s.number("xi", 0.37);
        const double eps1 = s.number("eps1", 1e-3);
        const double eps2 = s.number("eps2", 0.1);
        const double eta1 = s.number("eta1", 10.0);
        const double eta2 = s.number("eta2", 10.0);
        spacing = s.number("spacing", spacing);
        s.finish();
        if (!(spacing > 0.0)) throw ConfigError("domain.spacing: must be > 0");
        return at_path("domain", [&] { return ProhibitedDomain(sigma, xi, eps1, eps2, eta1, eta2); });
    }();

    CertifyOptions certify;
    NetworkMode    network = NetworkMode::kStatic;
    {
        Section s(top.find("certify") ? top.at("certify") : json::object(), "certify");
        certify.margin_tol = s.number("margin_tol", certify.margin_tol);
        const auto mode = s.text("network", "static");
        if (mode == "dynamic") {
            network = NetworkMode::kDynamic;
        } else if (mode != "static") {
            throw ConfigError("certify.network: expected \"static\" or \"dynamic\"");
        }
        s.finish();
        if (!(certify.margin_tol >= 0.0)) throw ConfigError("certify.margin_tol: must be >= 0");
    }

    std::optional<SweepConfig> sweep;
    if (const json* sj = top.find("sweep")) {
        Section     s(*sj, "sweep");
        SweepConfig sc;
        sc.gfm = s.has("gfm") ? parse_axes(s.at("gfm"), "sweep.gfm") : default_axes(DeviceRole::kGfm);
        sc.gfl = s.has("gfl") ? parse_axes(s.at("gfl"), "sweep.gfl") : default_axes(DeviceRole::kGfl);
        s.find("gfm");
        s.find("gfl");
        if (const json* per = s.find("devices")) {
            Section ps(*per, "sweep.devices");
            for (auto it = per->begin(); it != per->end(); ++it) {
                const bool known = std::any_of(devices.begin(), devices.end(), [&](const DeviceSpec& d) { return d.name == it.key(); });
                if (!known) throw ConfigError("sweep.devices." + it.key() + ": unknown device");
                sc.devices[it.key()] = parse_axes(ps.at(it.key()), "sweep.devices." + it.key());
            }
            ps.finish();
        }
        s.finish();
        sweep = sc;
    }

    std::optional<SimulationConfig> simulation;
    if (const json* sj = top.find("simulation")) {
        Section          s(*sj, "simulation");
        SimulationConfig sc;
        sc.device = s.text("device", devices.front().name);
        sc.magnitude = s.number("magnitude", sc.magnitude);
        sc.start = s.number("start", sc.start);
        sc.horizon = s.number("horizon", sc.horizon);
        sc.dt = s.number("dt", sc.dt);
        s.finish();
        const bool known = std::any_of(devices.begin(), devices.end(), [&](const DeviceSpec& d) { return d.name == sc.device; });
        if (!known) throw ConfigError("simulation.device: unknown device '" + sc.device + "'");
        if (!(sc.horizon > 0.0)) throw ConfigError("simulation.horizon: must be > 0");
        if (!(sc.dt > 0.0)) throw ConfigError("simulation.dt: must be > 0");
        if (!(sc.start >= 0.0)) throw ConfigError("simulation.start: must be >= 0");
        simulation = sc;
    }

    ExecutionConfig execution;
    if (const json* ej = top.find("execution")) {
        Section s(*ej, "execution");
        execution.workers = s.count("workers", execution.workers);
        execution.output = s.text("output", execution.output);
        s.finish();
    }
    top.finish();

    return StudyConfig{std::move(topology), std::move(devices), domain, spacing, certify, network,
                       std::move(sweep),     std::move(simulation), std::move(execution)};
}

StudyConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

json to_json(const StudyConfig& cfg) {
    json devices = json::array();
    for (const auto& d : cfg.devices) {
        json j{{"name", d.name}};
        if (const auto* g = std::get_if<GfmParams>(&d.model)) {
            j["type"] = "gfm";
            j["m"] = g->m;
            j["d"] = g->d;
        } else if (const auto* f = std::get_if<GflParams>(&d.model)) {
            j["type"] = "gfl";
            j["H"] = f->H;
            j["D"] = f->D;
            j["Kp"] = f->Kp;
            j["Ki"] = f->Ki;
            j["V0"] = f->V0;
        } else {
            const auto& c = std::get<CustomRational>(d.model);
            j["type"] = "custom";
            j["role"] = to_string(d.role);
            j["num"] = std::vector<double>(c.entry.num().coeffs().begin(), c.entry.num().coeffs().end());
            j["den"] = std::vector<double>(c.entry.den().coeffs().begin(), c.entry.den().coeffs().end());
        }
        devices.push_back(j);
    }

    json topo_devices = json::array();
    for (const auto& n : cfg.topology.devices()) topo_devices.push_back({{"id", n.id}, {"role", to_string(n.role)}});
    json lines = json::array();
    for (const auto& l : cfg.topology.lines()) {
        lines.push_back({{"from", cfg.topology.node_name(l.a)},
                         {"to", cfg.topology.node_name(l.b)},
                         {"l", l.params.l},
                         {"rho", l.params.rho},
                         {"stiffness", l.params.stiffness}});
    }

    const auto& dom = cfg.domain;
    json        out{
        {"devices", devices},
        {"topology",
                {{"omega0", cfg.topology.omega0()}, {"devices", topo_devices}, {"interior", cfg.topology.interior()}, {"lines", lines}}},
        {"domain",
                {{"sigma", dom.sigma()},
                 {"xi", dom.xi()},
                 {"eps1", dom.eps1()},
                 {"eps2", dom.eps2()},
                 {"eta1", dom.eta1()},
                 {"eta2", dom.eta2()},
                 {"spacing", cfg.spacing}}},
        {"certify",
                {{"margin_tol", cfg.certify.margin_tol}, {"network", cfg.network == NetworkMode::kStatic ? "static" : "dynamic"}}},
        {"execution", {{"workers", cfg.execution.workers}, {"output", cfg.execution.output}}},
    };
    if (cfg.sweep) {
        json per = json::object();
        for (const auto& [name, axes] : cfg.sweep->devices) per[name] = axes_json(axes);
        out["sweep"] = {{"gfm", axes_json(cfg.sweep->gfm)}, {"gfl", axes_json(cfg.sweep->gfl)}, {"devices", per}};
    }
    if (cfg.simulation) {
        const auto& s = *cfg.simulation;
        out["simulation"] = {
            {"device", s.device}, {"magnitude", s.magnitude}, {"start", s.start}, {"horizon", s.horizon}, {"dt", s.dt}};
    }
    return out;
}

std::string config_digest(const StudyConfig& cfg) {
    json payload = to_json(cfg);
    // Worker count and output location do not change results.
    payload.erase("execution");
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : payload.dump()) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::map<std::size_t, ParameterGrid> sweep_grids(const StudyConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("sweep: section required for the sweep command");
    std::map<std::size_t, ParameterGrid> grids;
    for (std::size_t i = 0; i < cfg.devices.size(); ++i) {
        const auto&                    dev = cfg.devices[i];
        const std::vector<AxisConfig>* axes = nullptr;
        if (auto it = cfg.sweep->devices.find(dev.name); it != cfg.sweep->devices.end()) {
            axes = &it->second;
        } else if (std::holds_alternative<CustomRational>(dev.model)) {
            continue;
        } else {
            axes = dev.role == DeviceRole::kGfm ? &cfg.sweep->gfm : &cfg.sweep->gfl;
        }
        ParameterGrid grid;
        for (const auto& a : *axes) {
            at_path("sweep (" + dev.name + ")", [&] { return get_parameter(dev.model, a.name); });
            grid.axes.push_back(make_axis(a.name, a.min, a.max, a.count, a.log_scale));
        }
        grids.emplace(i, std::move(grid));
    }
    return grids;
}

RunReport cmd_certify(const StudyConfig& cfg) {
    RunReport  report = new_report(cfg, "certify");
    PhaseTimer timer(report);

    const auto entries = device_matrix(cfg.devices, cfg.topology);
    const auto provider = make_provider(cfg);
    report.boundary = discretize_boundary(cfg.domain, cfg.spacing);
    const auto network = timer.run("network_sampling", [&] {
        return sample_network(*provider, cfg.domain, report.boundary, cfg.execution.workers);
    });

    bool all_passed = true;
    timer.run("certificate", [&] {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            try {
                report.margins.push_back(lgbc_check(entries[i], i, network, cfg.domain, cfg.certify));
                all_passed = all_passed && report.margins.back().passed;
            } catch (const Error& e) {
                report.device_errors.emplace(i, e.what());
                all_passed = false;
            }
        }
    });

    report.poles = timer.run("pole_oracle", [&] { return oracle_poles(cfg, entries, report); });
    const bool clean = screen_poles(*report.poles, cfg.domain);

    if (all_passed && cfg.network == NetworkMode::kStatic && !clean) {
        report.verdict = "INCONSISTENT: certificate passed but the pole oracle found poles in the prohibited domain";
        report.exit_code = kExitInconsistent;
    } else if (all_passed) {
        report.verdict = "PASS: every device satisfies the local gain boundary condition";
        report.exit_code = kExitOk;
    } else {
        report.verdict = "FAIL: at least one device violates the local gain boundary condition";
        report.exit_code = kExitCertificateFail;
    }
    return report;
}

RunReport cmd_sweep(const StudyConfig& cfg) {
    RunReport  report = new_report(cfg, "sweep");
    PhaseTimer timer(report);

    const auto grids = sweep_grids(cfg);
    const auto provider = make_provider(cfg);
    report.boundary = discretize_boundary(cfg.domain, cfg.spacing);
    const auto network = timer.run("network_sampling", [&] {
        return sample_network(*provider, cfg.domain, report.boundary, cfg.execution.workers);
    });

    std::vector<DeviceModel> models;
    for (const auto& d : cfg.devices) models.push_back(d.model);
    auto result = timer.run("sweep", [&] {
        return sweep_all(models, grids, network, cfg.domain, cfg.certify, cfg.execution.workers);
    });
    report.masks = std::move(result.masks);
    report.device_errors = std::move(result.errors);
    for (const auto& [i, mask] : report.masks) {
        report.timings.emplace_back("sweep_device_" + cfg.devices[i].name, mask.wall_seconds);
    }
    if (report.device_errors.empty()) {
        report.verdict = "COMPLETE";
        report.exit_code = kExitOk;
    } else {
        report.verdict = "ERRORS: " + std::to_string(report.device_errors.size()) + " device(s) failed to sweep";
        report.exit_code = kExitConfigError;
    }
    return report;
}

RunReport cmd_poles(const StudyConfig& cfg) {
    RunReport  report = new_report(cfg, "poles");
    PhaseTimer timer(report);
    const auto entries = device_matrix(cfg.devices, cfg.topology);
    report.poles = timer.run("pole_oracle", [&] { return oracle_poles(cfg, entries, report); });
    if (screen_poles(*report.poles, cfg.domain)) {
        report.verdict = "CLEAN: no closed-loop pole in the prohibited domain";
        report.exit_code = kExitOk;
    } else {
        report.verdict = "VIOLATION: closed-loop poles in the prohibited domain";
        report.exit_code = kExitCertificateFail;
    }
    return report;
}

RunReport cmd_simulate(const StudyConfig& cfg) {
    if (!cfg.simulation) throw ConfigError("simulation: section required for the simulate command");
    RunReport  report = new_report(cfg, "simulate");
    PhaseTimer timer(report);
    const auto entries = device_matrix(cfg.devices, cfg.topology);
    const auto n = static_network(cfg.topology);
    const auto& sim = *cfg.simulation;

    std::size_t device = 0;
    while (cfg.devices[device].name != sim.device) ++device;

    report.poles = closed_loop_poles(entries, n, cfg.domain);
    report.response = timer.run("simulation", [&] {
        return step_response(entries, n, Disturbance{device, sim.magnitude, sim.start}, sim.horizon, sim.dt);
    });
    const auto& resp = *report.response;
    for (Eigen::Index i = 0; i < resp.powers.cols(); ++i) {
        std::vector<double> signal(resp.powers.rows());
        for (Eigen::Index k = 0; k < resp.powers.rows(); ++k) signal[static_cast<std::size_t>(k)] = resp.powers(k, i);
        report.settling.push_back(settling_metrics(resp.time, signal, sim.start));
    }
    report.verdict = resp.divergent ? "DIVERGENT: closed loop has unstable modes" : "COMPLETE";
    report.exit_code = kExitOk;
    return report;
}

void write_report(std::ostream& os, const StudyConfig& cfg, const RunReport& report) {
    os << "localgain report\n";
    os << "command = " << report.command << "\n";
    os << "version = " << version() << "\n";
    os << "config_digest = " << report.digest << "\n";
    os << "verdict = " << report.verdict << "\n";
    os << "exit_code = " << report.exit_code << "\n";

    auto name = [&](std::size_t i) { return cfg.devices[i].name; };

    if (!report.boundary.points.empty()) {
        os << "\n[boundary]\n";
        os << "samples = " << report.boundary.points.size() << "\n";
        os << "spacing = " << format_num(report.boundary.spacing) << "\n";
        os << "arc_length = " << format_num(boundary_length(cfg.domain)) << "\n";
    }

    if (!report.margins.empty()) {
        os << "\n[certificate]\n";
        os << "device\tpassed\tnonvanishing\tmin_lhs\tmax_rhs\tworst_margin\tworst_point\ttail_ok\n";
        for (const auto& m : report.margins) {
            os << name(m.device) << '\t' << (m.passed ? "yes" : "no") << '\t' << (m.nonvanishing ? "yes" : "no") << '\t'
               << format_num(m.min_lhs) << '\t' << format_num(m.max_rhs) << '\t' << format_num(m.worst_margin) << '\t'
               << format_complex(m.worst_point) << '\t' << (m.tail_ok ? "yes" : "no") << '\n';
        }
        for (const auto& m : report.margins) {
            for (const auto& w : m.warnings) os << "warning[" << name(m.device) << "] " << w << '\n';
        }
    }

    if (!report.device_errors.empty()) {
        os << "\n[errors]\n";
        for (const auto& [i, msg] : report.device_errors) os << name(i) << ": " << msg << '\n';
    }

    if (!report.masks.empty()) {
        os << "\n[sweep]\n";
        os << "device\tfeasible\ttotal\tfile\n";
        for (const auto& [i, mask] : report.masks) {
            os << name(i) << '\t' << mask.feasible_count() << '\t' << mask.flags.size() << "\tmask_" << name(i)
               << ".tsv\n";
        }
    }

    if (report.poles) {
        const auto& p = *report.poles;
        os << "\n[poles]\n";
        os << "count = " << p.poles.size() << "\n";
        os << "origin_poles = " << p.origin_pole_count << "\n";
        os << "cancelled_modes = " << p.cancelled_count << "\n";
        std::size_t inside = 0;
        for (bool b : p.in_domain) inside += b;
        os << "in_domain = " << inside << "\n";
        if (const auto dom = dominant_pole(p)) {
            os << "dominant = " << format_complex(*dom) << "\n";
            os << "dominant_damping = " << format_num(damping_ratio(*dom).value_or(1.0)) << "\n";
        }
        double min_damping = 1.0;
        for (std::size_t k = 0; k < p.poles.size(); ++k) {
            if (p.poles[k] != Complex{0.0, 0.0}) min_damping = std::min(min_damping, p.damping[k]);
        }
        os << "min_damping = " << format_num(min_damping) << "\n";
    }

    if (report.response) {
        const auto& r = *report.response;
        os << "\n[simulation]\n";
        os << "disturbed_device = " << name(r.disturbance.device) << "\n";
        os << "magnitude = " << format_num(r.disturbance.magnitude) << "\n";
        os << "start = " << format_num(r.disturbance.start) << "\n";
        os << "dt = " << format_num(r.dt) << "\n";
        os << "samples = " << r.time.size() << "\n";
        os << "divergent = " << (r.divergent ? "yes" : "no") << "\n";
        os << "device\tfinal_power\tsettling_time_2pct\tcycles\n";
        for (std::size_t i = 0; i < report.settling.size(); ++i) {
            const auto& m = report.settling[i];
            os << name(i) << '\t' << format_num(m.final_value) << '\t' << format_num(m.settling_time) << '\t'
               << format_num(m.cycles) << '\n';
        }
    }

    if (!report.notes.empty()) {
        os << "\n[notes]\n";
        for (const auto& n : report.notes) os << n << '\n';
    }

    os << "\n[config]\n" << report.effective_config.dump(2) << "\n";

    os << "\n[timing]\n";
    for (const auto& [phase, seconds] : report.timings) os << phase << " = " << format_num(seconds) << "\n";
}

void write_outputs(const std::filesystem::path& dir, const StudyConfig& cfg, const RunReport& report) {
    std::filesystem::create_directories(dir);
    auto open = [&](const std::string& file) {
        std::ofstream out(dir / file);
        if (!out) throw ConfigError("cannot write '" + (dir / file).string() + "'");
        return out;
    };
    {
        auto out = open("report.txt");
        write_report(out, cfg, report);
    }
    if (!report.boundary.points.empty()) {
        auto out = open("boundary.tsv");
        write_boundary_tsv(out, report.boundary);
    }
    for (const auto& [i, mask] : report.masks) {
        auto out = open("mask_" + cfg.devices[i].name + ".tsv");
        write_mask_tsv(out, mask);
    }
    if (report.poles) {
        auto out = open("poles.tsv");
        write_poles_tsv(out, *report.poles);
    }
    if (report.response) {
        auto out = open("response.tsv");
        write_response_tsv(out, *report.response);
    }
}

}  // namespace localgain
