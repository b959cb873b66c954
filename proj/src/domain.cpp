#include "localgain/domain.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>

#include "localgain/errors.hpp"

namespace localgain {

ProhibitedDomain::ProhibitedDomain(double sigma, double xi, double eps1, double eps2, double eta1, double eta2)
    : sigma_(sigma), xi_(xi), eps1_(eps1), eps2_(eps2), eta1_(eta1), eta2_(eta2) {
    if (!(sigma_ > 0.0)) throw ConfigError("domain.sigma must be > 0");
    if (!(xi_ > 0.0 && xi_ < 1.0)) throw ConfigError("domain.xi must lie in (0, 1)");
    if (!(eps1_ > 0.0)) throw ConfigError("domain.eps1 must be > 0");
    if (!(eps2_ > 0.0)) throw ConfigError("domain.eps2 must be > 0");
    if (!(eta1_ > 0.0) || !(eta2_ > 0.0)) throw ConfigError("domain.eta1 and domain.eta2 must be > 0");
    tan_gamma_ = std::sqrt(1.0 - xi_ * xi_) / xi_;
    if (!(eps1_ < eta2_)) throw ConfigError("domain: eps1 must be < eta2 (degenerate real-axis segment)");
    if (!(sigma_ * tan_gamma_ + eps2_ < eta1_)) {
        throw ConfigError("domain: sigma*tan(gamma) + eps2 must be < eta1 (degenerate vertical segment)");
    }
}

bool in_prohibited(Complex s, const ProhibitedDomain& dom) {
    const double re = s.real();
    const double im = std::abs(s.imag());
    if (re >= 0.0) {
        return re != 0.0 || im != 0.0;
    }
    return re >= -dom.sigma() && im >= -re * dom.tan_gamma();
}

std::array<BoundarySegment, 5> boundary_segments(const ProhibitedDomain& dom) {
    const double sigma = dom.sigma();
    const double e1 = dom.eps1();
    const double e2 = dom.eps2();
    const double knee = sigma * dom.tan_gamma() + e2;
    return {{
        {{-sigma, knee}, {-sigma, dom.eta1()}},
        {{-sigma, knee}, {0.0, e2}},
        {{0.0, e2}, {e1, e2}},
        {{e1, 0.0}, {e1, e2}},
        {{e1, 0.0}, {dom.eta2(), 0.0}},
    }};
}

std::array<BoundarySegment, 2> closing_edges(const ProhibitedDomain& dom) {
    return {{
        {{-dom.sigma(), dom.eta1()}, {dom.eta2(), dom.eta1()}},
        {{dom.eta2(), 0.0}, {dom.eta2(), dom.eta1()}},
    }};
}

double boundary_length(const ProhibitedDomain& dom) {
    const auto segs = boundary_segments(dom);
    return std::accumulate(segs.begin(), segs.end(), 0.0,
                           [](double acc, const BoundarySegment& s) { return acc + s.length(); });
}

BoundarySamples discretize_segments(std::span<const BoundarySegment> segments, double spacing) {
    if (!(spacing > 0.0)) {
        throw ConfigError("boundary spacing must be > 0");
    }
    BoundarySamples out;
    out.spacing = spacing;
    auto seen = [&](Complex p) {
        for (const auto& q : out.points) {
            if (std::abs(p - q) <= 1e-12) return true;
        }
        return false;
    };
    for (const auto& seg : segments) {
        const double length = seg.length();
        if (!(length > 0.0)) {
            throw ConfigError("degenerate boundary segment of zero length");
        }
        // Power-of-two interval counts make halving the spacing refine the
        // previous sample set instead of replacing it.
        std::size_t intervals = 1;
        while (length / static_cast<double>(intervals) > spacing * (1.0 + 1e-12)) intervals *= 2;
        for (std::size_t k = 0; k <= intervals; ++k) {
            const double  t = static_cast<double>(k) / static_cast<double>(intervals);
            const Complex p = k == intervals ? seg.end : seg.start + t * (seg.end - seg.start);
            // Only segment endpoints can coincide with earlier points.
            if ((k == 0 || k == intervals) && seen(p)) continue;
            out.points.push_back(p);
        }
    }
    return out;
}

BoundarySamples discretize_boundary(const ProhibitedDomain& dom, double spacing) {
    const auto segs = boundary_segments(dom);
    return discretize_segments(segs, spacing);
}

bool in_enclosed_region(Complex s, const ProhibitedDomain& dom) {
    const double re = s.real();
    const double im = s.imag();
    if (im < 0.0 || im > dom.eta1() || re < -dom.sigma() || re > dom.eta2()) return false;
    if (re < 0.0) return im >= dom.eps2() - re * dom.tan_gamma();
    if (re < dom.eps1()) return im >= dom.eps2();
    return true;
}

void write_boundary_tsv(std::ostream& os, const BoundarySamples& samples) {
    os << "re\tim\n" << std::setprecision(17);
    for (const auto& p : samples.points) {
        os << p.real() << '\t' << p.imag() << '\n';
    }
}

}  // namespace localgain
