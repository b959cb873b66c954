#include "localgain/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "localgain/errors.hpp"

namespace localgain {

ClosedLoop build_closed_loop(const std::vector<DeviceEntry>& entries, const RealMatrix& n) {
    const auto devices = static_cast<Eigen::Index>(entries.size());
    if (n.rows() != devices || n.cols() != devices) {
        throw ConfigError("network matrix is " + std::to_string(n.rows()) + "x" + std::to_string(n.cols()) +
                          " but there are " + std::to_string(devices) + " devices");
    }
    Eigen::Index states = 0;
    for (const auto& e : entries) {
        if (!e.d_entry.is_strictly_proper()) {
            throw ConfigError("closed_loop_poles requires strictly proper device entries");
        }
        states += e.d_entry.den().degree();
    }

    ClosedLoop loop;
    RealMatrix a = RealMatrix::Zero(states, states);
    loop.b = RealMatrix::Zero(states, devices);
    loop.c = RealMatrix::Zero(devices, states);
    Eigen::Index offset = 0;
    for (Eigen::Index i = 0; i < devices; ++i) {
        const auto&        entry = entries[static_cast<std::size_t>(i)].d_entry;
        const Eigen::Index order = entry.den().degree();
        for (Eigen::Index k = 0; k + 1 < order; ++k) a(offset + k, offset + k + 1) = 1.0;
        for (Eigen::Index k = 0; k < order; ++k) {
            a(offset + order - 1, offset + k) = -entry.den()[static_cast<std::size_t>(k)];
            loop.c(i, offset + k) = entry.num()[static_cast<std::size_t>(k)];
        }
        loop.b(offset + order - 1, i) = 1.0;
        offset += order;
    }
    loop.a = a - loop.b * n * loop.c;
    loop.n = n;
    return loop;
}

PoleReport closed_loop_poles(const std::vector<DeviceEntry>& entries, const RealMatrix& n,
                             const std::optional<ProhibitedDomain>& dom) {
    const ClosedLoop loop = build_closed_loop(entries, n);
    PoleReport       report;
    if (loop.a.rows() == 0) return report;

    Eigen::EigenSolver<RealMatrix> solver(loop.a, true);
    const Eigen::VectorXcd&        values = solver.eigenvalues();
    const Eigen::MatrixXcd         vectors = solver.eigenvectors();
    const Eigen::MatrixXcd         left = vectors.fullPivLu().inverse();
    const double                   origin_tol = 1e-8 * std::max(1.0, loop.a.cwiseAbs().rowwise().sum().maxCoeff());

    const Eigen::MatrixXcd c = loop.c.cast<Complex>();
    const Eigen::MatrixXcd b = loop.b.cast<Complex>();
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double residue = (c * vectors.col(k)).norm() * (left.row(k) * b).norm();
        if (residue < 1e-9) {
            ++report.cancelled_count;
            continue;
        }
        Complex p = values[k];
        if (std::abs(p) <= origin_tol) {
            p = Complex{0.0, 0.0};
            ++report.origin_pole_count;
        }
        report.poles.push_back(p);
    }
    std::sort(report.poles.begin(), report.poles.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    for (const auto& p : report.poles) {
        report.damping.push_back(damping_ratio(p).value_or(1.0));
        report.in_domain.push_back(dom ? in_prohibited(p, *dom) : false);
    }
    return report;
}

std::optional<double> damping_ratio(Complex p) {
    if (p == Complex{0.0, 0.0}) return std::nullopt;
    return std::clamp(-p.real() / std::abs(p), -1.0, 1.0);
}

bool screen_poles(const PoleReport& report, const ProhibitedDomain& dom) {
    return std::none_of(report.poles.begin(), report.poles.end(), [&](Complex p) { return in_prohibited(p, dom); });
}

std::optional<Complex> dominant_pole(const PoleReport& report) {
    std::optional<Complex> best;
    for (const auto& p : report.poles) {
        if (p == Complex{0.0, 0.0}) continue;
        if (!best || p.real() > best->real() ||
            (p.real() == best->real() && std::abs(p.imag()) > std::abs(best->imag()))) {
            best = p;
        }
    }
    return best;
}

StepResponse step_response(const std::vector<DeviceEntry>& entries, const RealMatrix& n, const Disturbance& dist,
                           double horizon, double dt) {
    if (dist.device >= entries.size()) {
        throw ConfigError("disturbance device index out of range");
    }
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw ConfigError("simulation horizon and dt must be > 0");
    }
    const ClosedLoop loop = build_closed_loop(entries, n);
    const PoleReport poles = closed_loop_poles(entries, n);

    StepResponse out;
    out.disturbance = dist;
    double max_pole = 0.0;
    for (const auto& p : poles.poles) {
        max_pole = std::max(max_pole, std::abs(p));
        if (p.real() > 1e-9) out.divergent = true;
    }
    out.dt = max_pole > 0.0 ? std::min(dt, 0.1 / max_pole) : dt;

    const auto       steps = static_cast<std::size_t>(std::ceil(horizon / out.dt - 1e-9));
    const auto       devices = static_cast<Eigen::Index>(entries.size());
    const RealMatrix output_power = n * loop.c;
    out.time.resize(steps + 1);
    out.angles = RealMatrix::Zero(static_cast<Eigen::Index>(steps + 1), devices);
    out.powers = RealMatrix::Zero(static_cast<Eigen::Index>(steps + 1), devices);

    const Eigen::VectorXd drive = loop.b.col(static_cast<Eigen::Index>(dist.device)) * dist.magnitude;
    Eigen::VectorXd       x = Eigen::VectorXd::Zero(loop.a.rows());
    auto                  deriv = [&](const Eigen::VectorXd& state, double u) -> Eigen::VectorXd {
        return loop.a * state + drive * u;
    };
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * out.dt;
        out.time[k] = t;
        out.angles.row(static_cast<Eigen::Index>(k)) = (loop.c * x).transpose();
        out.powers.row(static_cast<Eigen::Index>(k)) = (output_power * x).transpose();
        if (k == steps) break;
        const double          u = t >= dist.start ? 1.0 : 0.0;
        const Eigen::VectorXd k1 = deriv(x, u);
        const Eigen::VectorXd k2 = deriv(x + 0.5 * out.dt * k1, u);
        const Eigen::VectorXd k3 = deriv(x + 0.5 * out.dt * k2, u);
        const Eigen::VectorXd k4 = deriv(x + out.dt * k3, u);
        x += out.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            out.divergent = true;
            x.setZero();
        }
    }
    return out;
}

SettlingMetrics settling_metrics(const std::vector<double>& time, const std::vector<double>& signal, double start,
                                 double band) {
    SettlingMetrics m;
    if (time.empty() || time.size() != signal.size()) return m;

    const std::size_t tail = std::max<std::size_t>(1, signal.size() / 5);
    m.final_value = std::accumulate(signal.end() - static_cast<std::ptrdiff_t>(tail), signal.end(), 0.0) /
                    static_cast<double>(tail);

    const auto first = static_cast<std::size_t>(std::lower_bound(time.begin(), time.end(), start) - time.begin());
    if (first >= signal.size()) return m;
    double peak = 0.0;
    for (std::size_t k = first; k < signal.size(); ++k) peak = std::max(peak, std::abs(signal[k] - m.final_value));
    const double scale = std::max(std::abs(m.final_value - signal[first]), 1e-3 * peak);
    const double limit = band * scale;

    std::size_t last_outside = first;
    bool        ever_outside = false;
    for (std::size_t k = first; k < signal.size(); ++k) {
        if (std::abs(signal[k] - m.final_value) > limit) {
            last_outside = k;
            ever_outside = true;
        }
    }
    const std::size_t settle = ever_outside ? std::min(last_outside + 1, signal.size() - 1) : first;
    m.settling_time = time[settle] - time[first];

    int prev = 0;
    int crossings = 0;
    for (std::size_t k = first; k < settle; ++k) {
        const double e = signal[k] - m.final_value;
        const int    side = e > limit ? 1 : (e < -limit ? -1 : 0);
        if (side == 0) continue;
        if (prev != 0 && side != prev) ++crossings;
        prev = side;
    }
    m.cycles = crossings / 2.0;
    return m;
}

void write_poles_tsv(std::ostream& os, const PoleReport& report) {
    os << "re\tim\tdamping\tin_domain\n" << std::setprecision(12);
    for (std::size_t k = 0; k < report.poles.size(); ++k) {
        os << report.poles[k].real() << '\t' << report.poles[k].imag() << '\t' << report.damping[k] << '\t'
           << (report.in_domain[k] ? 1 : 0) << '\n';
    }
}

void write_response_tsv(std::ostream& os, const StepResponse& response) {
    const auto devices = response.angles.cols();
    os << "t";
    for (Eigen::Index i = 0; i < devices; ++i) os << "\ttheta_" << i;
    for (Eigen::Index i = 0; i < devices; ++i) os << "\tp_" << i;
    os << '\n' << std::setprecision(10);
    for (std::size_t k = 0; k < response.time.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        os << response.time[k];
        for (Eigen::Index i = 0; i < devices; ++i) os << '\t' << response.angles(row, i);
        for (Eigen::Index i = 0; i < devices; ++i) os << '\t' << response.powers(row, i);
        os << '\n';
    }
}

}  // namespace localgain
