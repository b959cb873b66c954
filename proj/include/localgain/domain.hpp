#pragma once

#include <array>
#include <ostream>
#include <span>
#include <vector>

#include "localgain/ratcalc.hpp"

namespace localgain {

/**
 * Region of the s-plane that closed-loop poles must avoid: the closed right
 * half-plane without the origin, plus the left-half-plane wedge with damping
 * ratio below `xi` and real part at least `-sigma`.
 *
 * eps1/eps2 size the notch around the origin on the finite boundary and
 * eta1/eta2 truncate its imaginary and real extents.
 */
class ProhibitedDomain {
   public:
    ProhibitedDomain(double sigma, double xi, double eps1, double eps2, double eta1, double eta2);

    double sigma() const { return sigma_; }
    double xi() const { return xi_; }
    double eps1() const { return eps1_; }
    double eps2() const { return eps2_; }
    double eta1() const { return eta1_; }
    double eta2() const { return eta2_; }
    double tan_gamma() const { return tan_gamma_; }

   private:
    double sigma_;
    double xi_;
    double eps1_;
    double eps2_;
    double eta1_;
    double eta2_;
    double tan_gamma_;
};

// Evaluated on |Im(s)|, so the lower half-plane mirrors the upper one.
bool in_prohibited(Complex s, const ProhibitedDomain& dom);

/// Straight boundary piece from `start` to `end`.
struct BoundarySegment {
    Complex start;
    Complex end;
    double  length() const { return std::abs(end - start); }
};

/**
 * The five finite-boundary segments, in this order:
 *   0: Re = -sigma,          Im in [sigma tan(gamma) + eps2, eta1]
 *   1: Im = eps2 - Re tan(gamma), Re in [-sigma, 0]
 *   2: Im = eps2,            Re in [0, eps1]
 *   3: Re = eps1,            Im in [0, eps2]
 *   4: Im = 0,               Re in [eps1, eta2]
 */
std::array<BoundarySegment, 5> boundary_segments(const ProhibitedDomain& dom);

// Top (Im = eta1) and right (Re = eta2) edges that close the truncated region.
std::array<BoundarySegment, 2> closing_edges(const ProhibitedDomain& dom);

double boundary_length(const ProhibitedDomain& dom);

struct BoundarySamples {
    std::vector<Complex> points;
    double               spacing = 0.0;
};

/// Uniform arc-length sampling of each segment with both endpoints kept and
/// 2^k intervals per segment (smallest k meeting the spacing), so halving the
/// spacing yields a superset. Points shared between segments appear once.
BoundarySamples discretize_boundary(const ProhibitedDomain& dom, double spacing);

BoundarySamples discretize_segments(std::span<const BoundarySegment> segments, double spacing);

/// Upper-half-plane part of the region enclosed by the sampled boundary and the
/// truncation edges (the notch and the eps2 strip along the wedge are outside).
bool in_enclosed_region(Complex s, const ProhibitedDomain& dom);

void write_boundary_tsv(std::ostream& os, const BoundarySamples& samples);

}  // namespace localgain
