#include "localgain/devices.hpp"

#include "localgain/errors.hpp"

namespace localgain {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool any_root_in_domain(const Polynomial& p, const ProhibitedDomain& dom) {
    if (p.degree() < 1) return false;
    for (const auto& z : poly_roots(p)) {
        if (in_prohibited(z, dom)) return true;
    }
    return false;
}

}  // namespace

void validate(const GfmParams& p) {
    if (!(p.m > 0.0)) throw ConfigError("GfmParams.m must be > 0");
    if (!(p.d > 0.0)) throw ConfigError("GfmParams.d must be > 0");
}

void validate(const GflParams& p) {
    if (!(p.H > 0.0)) throw ConfigError("GflParams.H must be > 0");
    if (!(p.D > 0.0)) throw ConfigError("GflParams.D must be > 0");
    if (!(p.Kp > 0.0)) throw ConfigError("GflParams.Kp must be > 0");
    if (!(p.Ki > 0.0)) throw ConfigError("GflParams.Ki must be > 0");
    if (!(p.V0 > 0.0)) throw ConfigError("GflParams.V0 must be > 0");
}

DeviceEntry gfm_entry(const GfmParams& p) {
    validate(p);
    // 1 / (s (m s + d))
    RationalFunction entry(Polynomial::constant(1.0), Polynomial({0.0, p.d, p.m}));
    return {entry, entry.reciprocal()};
}

DeviceEntry gfl_entry(const GflParams& p) {
    validate(p);
    const double     kp = p.V0 * p.Kp;
    const double     ki = p.V0 * p.Ki;
    const Polynomial pll({ki, kp});
    // (s^2 + V0 Kp s + V0 Ki) / (s (D + H s) (V0 Kp s + V0 Ki))
    RationalFunction entry(Polynomial({ki, kp, 1.0}), Polynomial({0.0, p.D, p.H}) * pll);
    return {entry, entry.reciprocal()};
}

DeviceEntry custom_entry(const CustomRational& c) {
    if (c.entry.num().is_zero()) {
        throw ConfigError("custom device entry has a zero numerator");
    }
    if (!c.entry.is_strictly_proper()) {
        throw ConfigError("custom device entry must be strictly proper (deg num < deg den)");
    }
    return {c.entry, c.entry.reciprocal()};
}

DeviceEntry make_entry(const DeviceModel& model) {
    return std::visit(Overloaded{[](const GfmParams& p) { return gfm_entry(p); },
                                 [](const GflParams& p) { return gfl_entry(p); },
                                 [](const CustomRational& c) { return custom_entry(c); }},
                      model);
}

std::vector<DeviceEntry> device_matrix(const std::vector<DeviceSpec>& devices, const GridTopology& topology) {
    if (devices.empty()) {
        throw ConfigError("device list is empty");
    }
    if (devices.size() != topology.device_count()) {
        throw ConfigError("device list has " + std::to_string(devices.size()) + " entries but the topology has " +
                          std::to_string(topology.device_count()) + " device nodes");
    }
    std::vector<DeviceEntry> out;
    out.reserve(devices.size());
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const auto& node = topology.devices()[i];
        const auto& dev = devices[i];
        if (dev.name != node.id || dev.role != node.role) {
            throw ConfigError("device " + std::to_string(i) + " ('" + dev.name + "', " + to_string(dev.role) +
                              ") does not match topology node '" + node.id + "' (" + to_string(node.role) + ")");
        }
        const bool role_ok = std::visit(Overloaded{[&](const GfmParams&) { return dev.role == DeviceRole::kGfm; },
                                                   [&](const GflParams&) { return dev.role == DeviceRole::kGfl; },
                                                   [](const CustomRational&) { return true; }},
                                        dev.model);
        if (!role_ok) {
            throw ConfigError("device '" + dev.name + "': model type contradicts its role tag");
        }
        out.push_back(make_entry(dev.model));
    }
    return out;
}

std::vector<std::string> parameter_names(const DeviceModel& model) {
    return std::visit(Overloaded{[](const GfmParams&) { return std::vector<std::string>{"m", "d"}; },
                                 [](const GflParams&) { return std::vector<std::string>{"H", "D", "Kp", "Ki", "V0"}; },
                                 [](const CustomRational&) { return std::vector<std::string>{}; }},
                      model);
}

namespace {

double* parameter_slot(DeviceModel& model, std::string_view name) {
    if (auto* g = std::get_if<GfmParams>(&model)) {
        if (name == "m") return &g->m;
        if (name == "d") return &g->d;
    } else if (auto* f = std::get_if<GflParams>(&model)) {
        if (name == "H") return &f->H;
        if (name == "D") return &f->D;
        if (name == "Kp") return &f->Kp;
        if (name == "Ki") return &f->Ki;
        if (name == "V0") return &f->V0;
    }
    throw ConfigError("unknown or non-sweepable device parameter '" + std::string(name) + "'");
}

}  // namespace

double get_parameter(const DeviceModel& model, std::string_view name) {
    DeviceModel copy = model;
    return *parameter_slot(copy, name);
}

DeviceModel with_parameter(const DeviceModel& model, std::string_view name, double value) {
    DeviceModel copy = model;
    *parameter_slot(copy, name) = value;
    return copy;
}

bool check_device_nonsingular(const DeviceEntry& entry, const ProhibitedDomain& dom) {
    return !any_root_in_domain(entry.d_entry.num(), dom);
}

bool check_entry_analytic(const DeviceEntry& entry, const ProhibitedDomain& dom) {
    return !any_root_in_domain(entry.d_inverse.den(), dom) && !any_root_in_domain(entry.d_entry.den(), dom);
}

std::vector<Complex> closed_rhp_numerator_zeros(const DeviceEntry& entry) {
    std::vector<Complex> out;
    if (entry.d_entry.num().degree() < 1) return out;
    for (const auto& z : poly_roots(entry.d_entry.num())) {
        if (z.real() >= 0.0) out.push_back(z);
    }
    return out;
}

}  // namespace localgain
