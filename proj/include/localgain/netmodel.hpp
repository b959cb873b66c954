#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "localgain/ratcalc.hpp"

namespace localgain {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix    = Eigen::MatrixXd;

enum class DeviceRole { kGfm, kGfl };

const char* to_string(DeviceRole role);

struct LineParams {
    double l   = 1.0;  // per-unit inductance
    double rho = 0.0;  // resistance-inductance ratio, 1/s
    // Linearization factor for non-flat operating angles (1 = flat).
    double stiffness = 1.0;
};

// Node id reserved for the infinite bus; lines to it add to the diagonal only.
inline constexpr const char* kGroundNode = "ground";

struct LineSpec {
    std::string from;
    std::string to;
    LineParams  params;
};

struct DeviceNodeSpec {
    std::string id;
    DeviceRole  role;
};

struct Line {
    std::size_t a;
    std::size_t b;  // == GridTopology::kGround for ties to the infinite bus
    LineParams  params;
};

/**
 * Device buses, interior buses and the lines joining them.
 *
 * Node indices are assigned device nodes first (GFM block, then GFL block, in
 * the given order) followed by interior nodes, which fixes the row/column
 * order of every matrix derived from the topology.
 */
class GridTopology {
   public:
    static constexpr std::size_t kGround = static_cast<std::size_t>(-1);

    GridTopology(std::vector<DeviceNodeSpec> devices, std::vector<std::string> interior, std::vector<LineSpec> lines,
                 double omega0 = 1.0);

    std::size_t device_count() const { return devices_.size(); }
    std::size_t node_count() const { return devices_.size() + interior_.size(); }
    double      omega0() const { return omega0_; }

    const std::vector<DeviceNodeSpec>& devices() const { return devices_; }
    const std::vector<std::string>&    interior() const { return interior_; }
    const std::vector<Line>&           lines() const { return lines_; }
    std::vector<std::size_t>           interior_indices() const;
    const std::string&                 node_name(std::size_t index) const;

    // True when every line shares the same rho, so N(s) is a scalar multiple of N(0).
    bool uniform_rho() const;

   private:
    std::vector<DeviceNodeSpec> devices_;
    std::vector<std::string>    interior_;
    std::vector<Line>           lines_;
    double                      omega0_;
};

// omega0 / ((s^2 + 2 rho s + omega0^2 + rho^2) l), scaled by the line stiffness.
Complex line_admittance(const LineParams& line, double omega0, Complex s);

// The same admittance as a rational function of s.
RationalFunction line_admittance_rational(const LineParams& line, double omega0);

ComplexMatrix assemble_y(const GridTopology& topology, Complex s);

/// Schur complement of Y onto the nodes not listed in `interior`, by sequential pivoting.
ComplexMatrix kron_reduce(const ComplexMatrix& y, std::span<const std::size_t> interior);

// assemble_y followed by kron_reduce of every interior node.
ComplexMatrix reduced_network(const GridTopology& topology, Complex s);

// The s = 0 network used for low-frequency studies.
RealMatrix static_network(const GridTopology& topology);

struct NetworkRow {
    Complex diag;
    double  offdiag_abs_sum = 0.0;
};

NetworkRow network_row(const ComplexMatrix& n, std::size_t i);

}  // namespace localgain
