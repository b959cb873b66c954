#include "localgain/certify.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "localgain/errors.hpp"
#include "localgain/parallel.hpp"

namespace localgain {

namespace {

std::vector<NetworkRow> rows_of(const ComplexMatrix& n) {
    std::vector<NetworkRow> rows;
    rows.reserve(static_cast<std::size_t>(n.rows()));
    for (Eigen::Index i = 0; i < n.rows(); ++i) rows.push_back(network_row(n, static_cast<std::size_t>(i)));
    return rows;
}

std::vector<std::vector<NetworkRow>> transpose_rows(const std::vector<std::vector<NetworkRow>>& by_sample,
                                                    std::size_t devices) {
    std::vector<std::vector<NetworkRow>> by_device(devices, std::vector<NetworkRow>(by_sample.size()));
    for (std::size_t k = 0; k < by_sample.size(); ++k) {
        for (std::size_t i = 0; i < devices; ++i) by_device[i][k] = by_sample[k][i];
    }
    return by_device;
}

std::string format_point(Complex s) {
    std::ostringstream os;
    os << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "j";
    return os.str();
}

struct Extremes {
    double  min_lhs = std::numeric_limits<double>::infinity();
    double  max_rhs = 0.0;
    double  worst = std::numeric_limits<double>::infinity();
    Complex worst_point;
};

Extremes scan(const DeviceEntry& entry, const std::vector<Complex>& points, const std::vector<NetworkRow>& rows) {
    Extremes e;
    for (std::size_t k = 0; k < points.size(); ++k) {
        LgcValue v;
        try {
            v = lgc_pointwise(entry, rows[k], points[k]);
        } catch (const PoleAtPointError& err) {
            throw CertificateInapplicableError("device inverse has a pole on the boundary at s = " +
                                               format_point(err.point()));
        }
        e.min_lhs = std::min(e.min_lhs, v.lhs);
        e.max_rhs = std::max(e.max_rhs, v.rhs);
        if (v.lhs - v.rhs < e.worst) {
            e.worst = v.lhs - v.rhs;
            e.worst_point = points[k];
        }
    }
    return e;
}

}  // namespace

StaticNetwork::StaticNetwork(RealMatrix n) : n_(std::move(n)) {
    if (n_.rows() != n_.cols() || n_.rows() == 0) {
        throw ConfigError("static network matrix must be square and non-empty");
    }
    rows_ = rows_of(n_.cast<Complex>());
}

RationalFunction StaticNetwork::diagonal(std::size_t i) const {
    const auto k = static_cast<Eigen::Index>(i);
    return RationalFunction(Polynomial::constant(n_(k, k)), Polynomial::constant(1.0));
}

DynamicNetwork::DynamicNetwork(GridTopology topology)
    : topology_(std::move(topology)), static_(static_network(topology_)) {}

std::vector<NetworkRow> DynamicNetwork::rows_at(Complex s) const { return rows_of(reduced_network(topology_, s)); }

RationalFunction DynamicNetwork::diagonal(std::size_t i) const {
    if (!topology_.uniform_rho()) {
        throw CertificateInapplicableError(
            "dynamic network with non-uniform rho: N_ii(s) has no closed form for the half-plane zero test");
    }
    const double rho = topology_.lines().front().params.rho;
    const double w0 = topology_.omega0();
    const double dc = w0 * w0 + rho * rho;
    const auto   k = static_cast<Eigen::Index>(i);
    return RationalFunction(Polynomial::constant(static_(k, k) * dc), Polynomial({dc, 2.0 * rho, 1.0}));
}

std::vector<Complex> DynamicNetwork::poles() const {
    std::vector<Complex> out;
    for (const auto& line : topology_.lines()) {
        const Complex p{-line.params.rho, topology_.omega0()};
        bool          dup = false;
        for (const auto& q : out) dup = dup || q == p;
        if (!dup) {
            out.push_back(p);
            out.push_back(std::conj(p));
        }
    }
    return out;
}

SampledNetwork sample_network(const NetworkProvider& provider, const ProhibitedDomain& dom,
                              const BoundarySamples& boundary, std::size_t workers) {
    SampledNetwork out;
    out.provider = &provider;
    out.boundary = boundary;
    const auto edges = closing_edges(dom);
    out.edges = discretize_segments(edges, boundary.spacing);

    auto evaluate = [&](const std::vector<Complex>& points) {
        std::vector<std::vector<NetworkRow>> by_sample(points.size());
        if (provider.is_static()) {
            const auto rows = provider.rows_at(Complex{0.0, 0.0});
            std::fill(by_sample.begin(), by_sample.end(), rows);
        } else {
            parallel_for(points.size(), workers, [&](std::size_t k) { by_sample[k] = provider.rows_at(points[k]); });
        }
        return transpose_rows(by_sample, provider.device_count());
    };
    out.boundary_rows = evaluate(out.boundary.points);
    out.edge_rows = evaluate(out.edges.points);
    return out;
}

LgcValue lgc_pointwise(const DeviceEntry& entry, const NetworkRow& row, Complex s) {
    return {std::abs(rf_eval(entry.d_inverse, s) + row.diag), row.offdiag_abs_sum};
}

bool nonvanishing_diagonal(const DeviceEntry& entry, const RationalFunction& n_ii, const ProhibitedDomain& dom) {
    const auto& inv = entry.d_inverse;
    Polynomial  p = inv.num() * n_ii.den() + n_ii.num() * inv.den();
    if (p.is_zero()) {
        return false;
    }
    // The origin is excluded from the domain; strip exact origin roots.
    while (p.degree() >= 1 && std::abs(p[0]) <= kTrimEpsilon * p.max_abs_coeff()) {
        const auto c = p.coeffs();
        p = Polynomial(std::vector<double>(c.begin() + 1, c.end()));
    }
    if (p.degree() == 0 || routh_strictly_hurwitz(shift_poly(p, dom.sigma()))) {
        return true;
    }
    constexpr double kGuard = 1e-9;
    for (const auto& z : poly_roots(p)) {
        for (const Complex nudge : {Complex{0, 0}, Complex{kGuard, 0}, Complex{-kGuard, 0}, Complex{0, kGuard},
                                    Complex{0, -kGuard}}) {
            if (in_prohibited(z + nudge, dom)) return false;
        }
    }
    return true;
}

bool nonvanishing_diagonal(const DeviceEntry& entry, double n_ii, const ProhibitedDomain& dom) {
    return nonvanishing_diagonal(entry, RationalFunction(Polynomial::constant(n_ii), Polynomial::constant(1.0)), dom);
}

MarginReport lgbc_check(const DeviceEntry& entry, std::size_t device, const SampledNetwork& network,
                        const ProhibitedDomain& dom, const CertifyOptions& opts) {
    if (network.provider == nullptr || device >= network.boundary_rows.size()) {
        throw ConfigError("lgbc_check: device index out of range");
    }
    if (!check_entry_analytic(entry, dom)) {
        throw CertificateInapplicableError("device " + std::to_string(device) +
                                           ": entry or its inverse has a pole inside the prohibited domain");
    }
    for (const auto& p : network.provider->poles()) {
        if (in_prohibited(p, dom)) {
            throw CertificateInapplicableError("network has a pole inside the prohibited domain at s = " +
                                               format_point(p));
        }
    }

    MarginReport report;
    report.device = device;
    report.nonvanishing = nonvanishing_diagonal(entry, network.provider->diagonal(device), dom);

    const auto b = scan(entry, network.boundary.points, network.boundary_rows[device]);
    report.min_lhs = b.min_lhs;
    report.max_rhs = b.max_rhs;
    report.worst_margin = b.worst;
    report.worst_point = b.worst_point;
    report.passed = report.nonvanishing && report.worst_margin > opts.margin_tol;

    const auto t = scan(entry, network.edges.points, network.edge_rows[device]);
    report.tail_margin = t.worst;
    report.tail_ok = t.worst > opts.margin_tol;
    if (!report.tail_ok) {
        report.warnings.push_back("local gain condition fails on the truncation edges near s = " +
                                  format_point(t.worst_point) + "; raise eta1/eta2");
    }
    for (const auto& z : closed_rhp_numerator_zeros(entry)) {
        report.warnings.push_back("device entry numerator has a zero in the closed right half-plane at s = " +
                                  format_point(z));
    }
    return report;
}

MarginReport lgbc_check(const DeviceEntry& entry, std::size_t device, const NetworkProvider& provider,
                        const ProhibitedDomain& dom, const BoundarySamples& samples, const CertifyOptions& opts) {
    return lgbc_check(entry, device, sample_network(provider, dom, samples), dom, opts);
}

ParameterAxis make_axis(std::string name, double lo, double hi, std::size_t count, bool log_scale) {
    if (count == 0) {
        throw ConfigError("axis '" + name + "': count must be >= 1");
    }
    if (!(lo <= hi) || (count > 1 && !(lo < hi))) {
        throw ConfigError("axis '" + name + "': require min < max");
    }
    if (log_scale && !(lo > 0.0)) {
        throw ConfigError("axis '" + name + "': log scale requires min > 0");
    }
    ParameterAxis axis{std::move(name), {}};
    axis.values.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        axis.values.push_back(log_scale ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
    }
    if (count > 1) axis.values.back() = hi;
    return axis;
}

std::size_t ParameterGrid::size() const {
    if (axes.empty()) return 0;
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
}

std::vector<double> ParameterGrid::point(std::size_t k) const {
    std::vector<double> out(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
        const std::size_t len = axes[a].values.size();
        out[a] = axes[a].values[k % len];
        k /= len;
    }
    return out;
}

const char* to_string(PointStatus status) {
    switch (status) {
        case PointStatus::kPassed:
            return "passed";
        case PointStatus::kMarginFailed:
            return "margin";
        case PointStatus::kNonvanishingFailed:
            return "nonvanishing";
        case PointStatus::kInapplicable:
            return "inapplicable";
    }
    return "?";
}

std::size_t FeasibilityMask::feasible_count() const {
    std::size_t n = 0;
    for (auto f : flags) n += f;
    return n;
}

FeasibilityMask feasible_region(std::size_t device, const DeviceModel& base, const ParameterGrid& grid,
                                const SampledNetwork& network, const ProhibitedDomain& dom,
                                const CertifyOptions& opts, std::size_t workers) {
    const std::size_t count = grid.size();
    if (count == 0) {
        throw ConfigError("device " + std::to_string(device) + ": parameter grid is empty");
    }
    for (const auto& axis : grid.axes) {
        for (std::size_t k = 1; k < axis.values.size(); ++k) {
            if (!(axis.values[k] > axis.values[k - 1])) {
                throw ConfigError("axis '" + axis.name + "' values must be strictly increasing");
            }
        }
        (void)get_parameter(base, axis.name);
    }

    const auto      start = std::chrono::steady_clock::now();
    FeasibilityMask mask;
    mask.device = device;
    mask.grid = grid;
    mask.flags.assign(count, 0);
    mask.margins.assign(count, 0.0);
    mask.status.assign(count, PointStatus::kInapplicable);

    parallel_for(count, workers, [&](std::size_t k) {
        DeviceModel model = base;
        const auto  values = grid.point(k);
        for (std::size_t a = 0; a < values.size(); ++a) model = with_parameter(model, grid.axes[a].name, values[a]);
        const DeviceEntry entry = make_entry(model);
        try {
            const auto report = lgbc_check(entry, device, network, dom, opts);
            mask.margins[k] = report.worst_margin;
            mask.flags[k] = report.passed ? 1 : 0;
            mask.status[k] = report.passed         ? PointStatus::kPassed
                             : !report.nonvanishing ? PointStatus::kNonvanishingFailed
                                                    : PointStatus::kMarginFailed;
        } catch (const CertificateInapplicableError&) {
            mask.margins[k] = std::numeric_limits<double>::quiet_NaN();
            mask.status[k] = PointStatus::kInapplicable;
        }
    });

    mask.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return mask;
}

SweepResult sweep_all(const std::vector<DeviceModel>& devices, const std::map<std::size_t, ParameterGrid>& grids,
                      const SampledNetwork& network, const ProhibitedDomain& dom, const CertifyOptions& opts,
                      std::size_t workers) {
    SweepResult result;
    for (const auto& [device, grid] : grids) {
        try {
            if (device >= devices.size()) {
                throw ConfigError("sweep grid for device index " + std::to_string(device) + " out of range");
            }
            result.masks.emplace(device, feasible_region(device, devices[device], grid, network, dom, opts, workers));
        } catch (const Error& err) {
            result.errors.emplace(device, err.what());
        }
    }
    return result;
}

void write_mask_tsv(std::ostream& os, const FeasibilityMask& mask) {
    for (const auto& axis : mask.grid.axes) os << axis.name << '\t';
    os << "flag\tmargin\tstatus\n" << std::setprecision(12);
    for (std::size_t k = 0; k < mask.flags.size(); ++k) {
        for (double v : mask.grid.point(k)) os << v << '\t';
        os << int(mask.flags[k]) << '\t' << mask.margins[k] << '\t' << to_string(mask.status[k]) << '\n';
    }
}

}  // namespace localgain
