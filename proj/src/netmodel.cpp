#include "localgain/netmodel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "localgain/errors.hpp"

namespace localgain {

const char* to_string(DeviceRole role) { return role == DeviceRole::kGfm ? "gfm" : "gfl"; }

GridTopology::GridTopology(std::vector<DeviceNodeSpec> devices, std::vector<std::string> interior,
                           std::vector<LineSpec> lines, double omega0)
    : devices_(std::move(devices)), interior_(std::move(interior)), omega0_(omega0) {
    if (!(omega0_ > 0.0)) {
        throw ConfigError("topology.omega0 must be > 0");
    }
    if (devices_.empty()) {
        throw ConfigError("topology must contain at least one device node");
    }
    bool seen_gfl = false;
    for (const auto& d : devices_) {
        if (d.role == DeviceRole::kGfl) {
            seen_gfl = true;
        } else if (seen_gfl) {
            throw ConfigError("device node '" + d.id + "': GFM nodes must precede GFL nodes");
        }
    }

    std::map<std::string, std::size_t> index;
    auto                               add = [&](const std::string& id) {
        if (id == kGroundNode) {
            throw ConfigError("node id '" + id + "' is reserved for the infinite bus");
        }
        if (!index.emplace(id, index.size()).second) {
            throw ConfigError("duplicate node id '" + id + "'");
        }
    };
    for (const auto& d : devices_) add(d.id);
    for (const auto& id : interior_) add(id);

    auto lookup = [&](const std::string& id) -> std::size_t {
        if (id == kGroundNode) return kGround;
        auto it = index.find(id);
        if (it == index.end()) {
            throw ConfigError("line references unknown node '" + id + "'");
        }
        return it->second;
    };

    for (const auto& spec : lines) {
        const std::size_t a = lookup(spec.from);
        const std::size_t b = lookup(spec.to);
        if (a == b) {
            throw ConfigError("self-loop on node '" + spec.from + "'");
        }
        if (!(spec.params.l > 0.0)) {
            throw ConfigError("line " + spec.from + "-" + spec.to + ": l must be > 0");
        }
        if (!(spec.params.rho >= 0.0)) {
            throw ConfigError("line " + spec.from + "-" + spec.to + ": rho must be >= 0");
        }
        if (!(spec.params.stiffness > 0.0)) {
            throw ConfigError("line " + spec.from + "-" + spec.to + ": stiffness must be > 0");
        }
        lines_.push_back(a == kGround ? Line{b, a, spec.params} : Line{a, b, spec.params});
    }

    // Connectivity over all buses, the infinite bus counting as one more node.
    const std::size_t        n = node_count();
    std::vector<std::size_t> parent(n + 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& line : lines_) {
        const std::size_t b = line.b == kGround ? n : line.b;
        parent[find(line.a)] = find(b);
    }
    const std::size_t root = find(0);
    for (std::size_t k = 1; k < n; ++k) {
        if (find(k) != root) {
            throw ConfigError("topology is not connected: node '" + node_name(k) + "' is unreachable");
        }
    }
    if (n == 1 && lines_.empty()) {
        throw ConfigError("topology is not connected: no lines");
    }
}

std::vector<std::size_t> GridTopology::interior_indices() const {
    std::vector<std::size_t> idx(interior_.size());
    std::iota(idx.begin(), idx.end(), devices_.size());
    return idx;
}

const std::string& GridTopology::node_name(std::size_t index) const {
    static const std::string ground = kGroundNode;
    if (index == kGround) return ground;
    return index < devices_.size() ? devices_[index].id : interior_.at(index - devices_.size());
}

bool GridTopology::uniform_rho() const {
    return std::all_of(lines_.begin(), lines_.end(),
                       [&](const Line& l) { return l.params.rho == lines_.front().params.rho; });
}

Complex line_admittance(const LineParams& line, double omega0, Complex s) {
    const Complex den = s * s + 2.0 * line.rho * s + omega0 * omega0 + line.rho * line.rho;
    const double  scale = std::max({1.0, std::norm(s), omega0 * omega0 + line.rho * line.rho});
    if (std::abs(den) <= 1e-12 * scale) {
        std::ostringstream msg;
        msg << "line resonance at s = " << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "j";
        throw LineResonanceError(msg.str(), s);
    }
    return line.stiffness * omega0 / (den * line.l);
}

RationalFunction line_admittance_rational(const LineParams& line, double omega0) {
    return RationalFunction(Polynomial::constant(line.stiffness * omega0 / line.l),
                            Polynomial({omega0 * omega0 + line.rho * line.rho, 2.0 * line.rho, 1.0}));
}

ComplexMatrix assemble_y(const GridTopology& topology, Complex s) {
    const auto    n = static_cast<Eigen::Index>(topology.node_count());
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    for (const auto& line : topology.lines()) {
        const Complex b = line_admittance(line.params, topology.omega0(), s);
        const auto    i = static_cast<Eigen::Index>(line.a);
        y(i, i) += b;
        if (line.b != GridTopology::kGround) {
            const auto j = static_cast<Eigen::Index>(line.b);
            y(j, j) += b;
            y(i, j) -= b;
            y(j, i) -= b;
        }
    }
    return y;
}

ComplexMatrix kron_reduce(const ComplexMatrix& y, std::span<const std::size_t> interior) {
    if (interior.empty()) {
        return y;
    }
    const double  threshold = 1e-10 * y.cwiseAbs().rowwise().sum().maxCoeff();
    ComplexMatrix work = y;
    const auto    n = work.rows();

    std::vector<bool> eliminated(static_cast<std::size_t>(n), false);
    for (std::size_t k : interior) {
        const auto kk = static_cast<Eigen::Index>(k);
        if (kk >= n || eliminated[k]) {
            throw ConfigError("kron_reduce: invalid interior index " + std::to_string(k));
        }
        const Complex pivot = work(kk, kk);
        if (std::abs(pivot) < threshold) {
            throw ReductionSingularError("singular interior block at node " + std::to_string(k), k);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == kk || eliminated[static_cast<std::size_t>(i)]) continue;
            const Complex factor = work(i, kk) / pivot;
            if (factor == Complex{0.0, 0.0}) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == kk || eliminated[static_cast<std::size_t>(j)]) continue;
                work(i, j) -= factor * work(kk, j);
            }
        }
        eliminated[k] = true;
    }

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!eliminated[static_cast<std::size_t>(i)]) keep.push_back(i);
    }
    const auto    m = static_cast<Eigen::Index>(keep.size());
    ComplexMatrix out(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            out(i, j) = work(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

ComplexMatrix reduced_network(const GridTopology& topology, Complex s) {
    const auto interior = topology.interior_indices();
    return kron_reduce(assemble_y(topology, s), interior);
}

RealMatrix static_network(const GridTopology& topology) { return reduced_network(topology, Complex{0.0, 0.0}).real(); }

NetworkRow network_row(const ComplexMatrix& n, std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    NetworkRow out{n(row, row), 0.0};
    for (Eigen::Index j = 0; j < n.cols(); ++j) {
        if (j != row) out.offdiag_abs_sum += std::abs(n(row, j));
    }
    return out;
}

}  // namespace localgain
