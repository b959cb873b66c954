#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "localgain/devices.hpp"
#include "localgain/domain.hpp"
#include "localgain/netmodel.hpp"

namespace localgain {

/// Source of the Kron-reduced network N(s) seen by the device rows.
class NetworkProvider {
   public:
    virtual ~NetworkProvider() = default;

    virtual std::size_t             device_count() const = 0;
    virtual std::vector<NetworkRow> rows_at(Complex s) const = 0;
    // N_ii(s) in closed form, for the half-plane zero test.
    virtual RationalFunction diagonal(std::size_t i) const = 0;
    // Poles of N(s); empty for a static network.
    virtual std::vector<Complex> poles() const = 0;
    virtual bool                 is_static() const = 0;
};

class StaticNetwork final : public NetworkProvider {
   public:
    explicit StaticNetwork(RealMatrix n);

    std::size_t             device_count() const override { return static_cast<std::size_t>(n_.rows()); }
    std::vector<NetworkRow> rows_at(Complex) const override { return rows_; }
    RationalFunction        diagonal(std::size_t i) const override;
    std::vector<Complex>    poles() const override { return {}; }
    bool                    is_static() const override { return true; }

    const RealMatrix& matrix() const { return n_; }

   private:
    RealMatrix              n_;
    std::vector<NetworkRow> rows_;
};

/**
 * Pointwise dynamic network: assemble Y(s) from the line model and reduce it at
 * every requested s. The closed-form diagonal needs a common rho on all lines,
 * where N(s) = N(0) (omega0^2 + rho^2) / (s^2 + 2 rho s + omega0^2 + rho^2).
 */
class DynamicNetwork final : public NetworkProvider {
   public:
    explicit DynamicNetwork(GridTopology topology);

    std::size_t             device_count() const override { return topology_.device_count(); }
    std::vector<NetworkRow> rows_at(Complex s) const override;
    RationalFunction        diagonal(std::size_t i) const override;
    std::vector<Complex>    poles() const override;
    bool                    is_static() const override { return false; }

   private:
    GridTopology topology_;
    RealMatrix   static_;
};

/// Network rows evaluated once at every boundary and closing-edge sample, shared by all devices.
struct SampledNetwork {
    const NetworkProvider*               provider = nullptr;
    BoundarySamples                      boundary;
    BoundarySamples                      edges;
    std::vector<std::vector<NetworkRow>> boundary_rows;  // [device][sample]
    std::vector<std::vector<NetworkRow>> edge_rows;      // [device][sample]
};

SampledNetwork sample_network(const NetworkProvider& provider, const ProhibitedDomain& dom,
                              const BoundarySamples& boundary, std::size_t workers = 1);

struct CertifyOptions {
    double margin_tol = 1e-6;
};

struct LgcValue {
    double lhs = 0.0;
    double rhs = 0.0;
};

// |D_i^{-1}(s) + N_ii(s)| against the off-diagonal row sum.
LgcValue lgc_pointwise(const DeviceEntry& entry, const NetworkRow& row, Complex s);

/**
 * True iff D_i^{-1}(s) + N_ii(s) has no zero in the prohibited domain.
 *
 * The numerator of the sum (origin roots stripped) is first tested with the
 * Routh array shifted by sigma; a Hurwitz verdict there proves the claim for
 * all Re(s) > -sigma. Otherwise the zeros are located explicitly and any zero
 * within 1e-9 of the domain's closure fails the check.
 */
bool nonvanishing_diagonal(const DeviceEntry& entry, const RationalFunction& n_ii, const ProhibitedDomain& dom);
bool nonvanishing_diagonal(const DeviceEntry& entry, double n_ii, const ProhibitedDomain& dom);

struct MarginReport {
    std::size_t device = 0;
    double      min_lhs = 0.0;
    double      max_rhs = 0.0;
    double      worst_margin = 0.0;  // min over samples of lhs - rhs
    Complex     worst_point;
    bool        nonvanishing = false;
    bool        passed = false;
    double      tail_margin = 0.0;  // min of lhs - rhs on the truncation edges
    bool        tail_ok = false;
    std::vector<std::string> warnings;
};

/// Boundary form of the local gain condition for one device.
/// Throws CertificateInapplicableError if the entry or network has a pole in the domain or on a sample.
MarginReport lgbc_check(const DeviceEntry& entry, std::size_t device, const SampledNetwork& network,
                        const ProhibitedDomain& dom, const CertifyOptions& opts = {});

MarginReport lgbc_check(const DeviceEntry& entry, std::size_t device, const NetworkProvider& provider,
                        const ProhibitedDomain& dom, const BoundarySamples& samples, const CertifyOptions& opts = {});

struct ParameterAxis {
    std::string         name;
    std::vector<double> values;  // strictly increasing
};

ParameterAxis make_axis(std::string name, double lo, double hi, std::size_t count, bool log_scale = false);

/// Cartesian product of axes in row-major order (last axis fastest).
struct ParameterGrid {
    std::vector<ParameterAxis> axes;

    std::size_t         size() const;
    std::vector<double> point(std::size_t k) const;
};

enum class PointStatus : std::uint8_t { kPassed, kMarginFailed, kNonvanishingFailed, kInapplicable };

const char* to_string(PointStatus status);

struct FeasibilityMask {
    std::size_t               device = 0;
    ParameterGrid             grid;
    std::vector<std::uint8_t> flags;
    std::vector<double>       margins;  // NaN where the certificate is inapplicable
    std::vector<PointStatus>  status;
    double                    wall_seconds = 0.0;

    std::size_t feasible_count() const;
};

FeasibilityMask feasible_region(std::size_t device, const DeviceModel& base, const ParameterGrid& grid,
                                const SampledNetwork& network, const ProhibitedDomain& dom,
                                const CertifyOptions& opts = {}, std::size_t workers = 1);

struct SweepResult {
    std::map<std::size_t, FeasibilityMask> masks;
    std::map<std::size_t, std::string>     errors;
};

/// Independent per-device regions; devices without a grid are skipped only if absent from `grids`.
SweepResult sweep_all(const std::vector<DeviceModel>& devices, const std::map<std::size_t, ParameterGrid>& grids,
                      const SampledNetwork& network, const ProhibitedDomain& dom, const CertifyOptions& opts = {},
                      std::size_t workers = 1);

void write_mask_tsv(std::ostream& os, const FeasibilityMask& mask);

}  // namespace localgain
