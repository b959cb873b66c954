#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "localgain/devices.hpp"
#include "localgain/domain.hpp"
#include "localgain/netmodel.hpp"

namespace localgain {

/// Closed loop of the diagonal device matrix with a static network:
/// x' = A x + B w, angles = C x, electrical power = N C x.
struct ClosedLoop {
    RealMatrix a;
    RealMatrix b;
    RealMatrix c;
    RealMatrix n;
};

// Controllable canonical realization per entry, loop closed through -N.
ClosedLoop build_closed_loop(const std::vector<DeviceEntry>& entries, const RealMatrix& n);

struct PoleReport {
    std::vector<Complex> poles;
    std::vector<double>  damping;
    std::vector<bool>    in_domain;
    std::size_t          origin_pole_count = 0;
    std::size_t          cancelled_count = 0;  // hidden modes dropped by the residue filter
};

/**
 * Eigenvalues of the closed-loop state matrix, sorted by descending real part
 * then descending imaginary part. Modes whose residue (output gain times
 * input gain of the unit eigenvector pair) is below 1e-9 are dropped; poles
 * within 1e-8 of the origin are snapped to 0 and counted separately.
 */
PoleReport closed_loop_poles(const std::vector<DeviceEntry>& entries, const RealMatrix& n,
                             const std::optional<ProhibitedDomain>& dom = std::nullopt);

// -Re(p)/|p|; empty for p = 0.
std::optional<double> damping_ratio(Complex p);

// True iff no pole lies in the domain. The origin is not part of it.
bool screen_poles(const PoleReport& report, const ProhibitedDomain& dom);

/// Slowest non-origin pole: largest real part, ties broken by larger |Im|.
std::optional<Complex> dominant_pole(const PoleReport& report);

struct Disturbance {
    std::size_t device = 0;
    double      magnitude = 0.0;  // pu power step
    double      start = 0.0;      // s
};

struct StepResponse {
    std::vector<double> time;
    RealMatrix          angles;  // [sample][device], rad
    RealMatrix          powers;  // [sample][device], pu
    Disturbance         disturbance;
    double              dt = 0.0;
    bool                divergent = false;
};

/// Fixed-step RK4 with dt capped at 0.1 / max|pole|. Unstable loops still run and are tagged divergent.
StepResponse step_response(const std::vector<DeviceEntry>& entries, const RealMatrix& n, const Disturbance& dist,
                           double horizon, double dt);

struct SettlingMetrics {
    double final_value = 0.0;
    double settling_time = 0.0;  // s after the disturbance
    double cycles = 0.0;         // oscillation cycles before entering the band
};

/**
 * 2% band settling of one signal after `start`. The final value is the mean of
 * the last fifth of the record; cycles count sign changes of the error outside
 * the band, two per cycle.
 */
SettlingMetrics settling_metrics(const std::vector<double>& time, const std::vector<double>& signal, double start,
                                 double band = 0.02);

void write_poles_tsv(std::ostream& os, const PoleReport& report);
void write_response_tsv(std::ostream& os, const StepResponse& response);

}  // namespace localgain
