#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "localgain/domain.hpp"
#include "localgain/netmodel.hpp"
#include "localgain/ratcalc.hpp"

namespace localgain {

// Grid-forming virtual swing dynamics.
struct GfmParams {
    double m = 1.0;  // virtual inertia, s
    double d = 1.0;  // virtual damping, pu
};

// Grid-following unit with a PI phase-locked loop.
struct GflParams {
    double H  = 1.0;  // virtual inertia, s
    double D  = 1.0;  // virtual damping, pu
    double Kp = 1.0;
    double Ki = 1.0;
    double V0 = 1.0;  // voltage setpoint, pu
};

// Any strictly proper power-to-angle response.
struct CustomRational {
    RationalFunction entry;
};

using DeviceModel = std::variant<GfmParams, GflParams, CustomRational>;

struct DeviceSpec {
    std::string name;
    DeviceRole  role = DeviceRole::kGfm;
    DeviceModel model;
};

/**
 * Diagonal element of the device matrix.
 *
 * `d_entry` maps electrical power drawn by the network to the device angle
 * (theta_i = -d_entry * P_e,i), so the closed loop is det(I + D N) = 0 and a
 * lone GFM on a tie b gives m s^2 + d s + b.
 */
struct DeviceEntry {
    RationalFunction d_entry;
    RationalFunction d_inverse;
};

void validate(const GfmParams& p);
void validate(const GflParams& p);

DeviceEntry gfm_entry(const GfmParams& p);
DeviceEntry gfl_entry(const GflParams& p);
// Rejects improper entries and zero numerators.
DeviceEntry custom_entry(const CustomRational& c);
DeviceEntry make_entry(const DeviceModel& model);

/// One entry per device; order and roles must match the topology's device nodes.
std::vector<DeviceEntry> device_matrix(const std::vector<DeviceSpec>& devices, const GridTopology& topology);

// Names a sweep may vary: m, d for GFM; H, D, Kp, Ki, V0 for GFL.
std::vector<std::string> parameter_names(const DeviceModel& model);
double                   get_parameter(const DeviceModel& model, std::string_view name);
DeviceModel              with_parameter(const DeviceModel& model, std::string_view name, double value);

// No zero of d_entry.num lies in the domain.
bool check_device_nonsingular(const DeviceEntry& entry, const ProhibitedDomain& dom);

// No pole of d_inverse or d_entry lies in the domain (the origin is not part of it).
bool check_entry_analytic(const DeviceEntry& entry, const ProhibitedDomain& dom);

// Zeros of d_entry.num with Re >= 0, including the origin.
std::vector<Complex> closed_rhp_numerator_zeros(const DeviceEntry& entry);

}  // namespace localgain
