#include <random>
#include <sstream>

#include "doctest.h"
#include "localgain/certify.hpp"
#include "localgain/domain.hpp"
#include "localgain/errors.hpp"

using namespace localgain;

namespace {

const ProhibitedDomain kDefault(0.35, 0.37, 1e-3, 0.1, 10.0, 10.0);

// Distance from p to the segment [a, b].
double segment_distance(Complex p, Complex a, Complex b) {
    const Complex d = b - a;
    const double  t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

}  // namespace

TEST_CASE("ProhibitedDomain validation") {
    CHECK(kDefault.tan_gamma() == doctest::Approx(2.510896632519247));
    CHECK_THROWS_AS(ProhibitedDomain(0.0, 0.37, 1e-3, 0.1, 10, 10), ConfigError);
    CHECK_THROWS_AS(ProhibitedDomain(0.35, 1.0, 1e-3, 0.1, 10, 10), ConfigError);
    CHECK_THROWS_AS(ProhibitedDomain(0.35, 0.0, 1e-3, 0.1, 10, 10), ConfigError);
    CHECK_THROWS_AS(ProhibitedDomain(0.35, 0.37, 0.0, 0.1, 10, 10), ConfigError);
    CHECK_THROWS_AS(ProhibitedDomain(0.35, 0.37, 1e-3, 0.1, 10, 1e-3), ConfigError);
    // sigma tan(gamma) + eps2 = 0.979 >= eta1
    CHECK_THROWS_AS(ProhibitedDomain(0.35, 0.37, 1e-3, 0.1, 0.9, 10), ConfigError);
}

TEST_CASE("in_prohibited") {
    CHECK(in_prohibited(Complex(-0.078, 0.627), kDefault));
    CHECK(in_prohibited(Complex(-0.078, -0.627), kDefault));
    CHECK_FALSE(in_prohibited(Complex(0.0, 0.0), kDefault));
    CHECK(in_prohibited(Complex(1.0, 1.0), kDefault));
    CHECK(in_prohibited(Complex(0.0, 2.0), kDefault));
    CHECK(in_prohibited(Complex(0.5, 0.0), kDefault));
    CHECK_FALSE(in_prohibited(Complex(-1.0, 0.5), kDefault));
    CHECK_FALSE(in_prohibited(Complex(-0.5, 0.866), kDefault));   // xi = 0.5
    CHECK_FALSE(in_prohibited(Complex(-0.36, 5.0), kDefault));    // left of -sigma
    CHECK_FALSE(in_prohibited(Complex(-0.2, 0.4), kDefault));     // 0.4/0.2 = 2 < tan(gamma)
    CHECK(in_prohibited(Complex(-0.2, 0.6), kDefault));           // 3 > tan(gamma)
}

TEST_CASE("boundary_segments") {
    const auto segs = boundary_segments(kDefault);
    CHECK(segs[0].start.real() == doctest::Approx(-0.35));
    CHECK(segs[0].start.imag() == doctest::Approx(0.9788138213817363));
    CHECK(segs[0].end.imag() == doctest::Approx(10.0));
    CHECK(segs[3].start == Complex(1e-3, 0.0));
    CHECK(segs[3].end == Complex(1e-3, 0.1));
    CHECK(segs[4].end == Complex(10.0, 0.0));
    CHECK(boundary_length(kDefault) == doctest::Approx(20.06713212456421).epsilon(1e-12));

    SUBCASE("segment (ii) lies on Im = eps2 - Re tan(gamma)") {
        const auto& s = segs[1];
        for (double t : {0.0, 0.25, 0.5, 1.0}) {
            const Complex p = s.start + t * (s.end - s.start);
            CHECK(p.imag() == doctest::Approx(0.1 - p.real() * kDefault.tan_gamma()));
        }
    }
}

TEST_CASE("discretize_boundary") {
    SUBCASE("default domain values at spacing 0.1") {
        const auto b = discretize_boundary(kDefault, 0.1);
        CHECK(b.points.size() == 275);
        CHECK(b.points.size() >= static_cast<std::size_t>(std::ceil(boundary_length(kDefault) / 0.1)));
    }
    SUBCASE("coarse spacing keeps only the distinct endpoints") {
        CHECK(discretize_boundary(kDefault, 100.0).points.size() == 6);
    }
    SUBCASE("invalid spacing") {
        CHECK_THROWS_AS(discretize_boundary(kDefault, 0.0), ConfigError);
        CHECK_THROWS_AS(discretize_boundary(kDefault, -1.0), ConfigError);
    }
    SUBCASE("every point sits on a segment and on the closure of the domain") {
        const auto segs = boundary_segments(kDefault);
        for (const auto& p : discretize_boundary(kDefault, 0.05).points) {
            double best = 1e300;
            for (const auto& s : segs) best = std::min(best, segment_distance(p, s.start, s.end));
            CHECK(best <= 1e-12);
            CHECK(p.imag() >= 0.0);
            bool near = in_prohibited(p, kDefault);
            for (Complex d : {Complex(1e-9, 0), Complex(-1e-9, 0), Complex(0, 1e-9), Complex(0, -1e-9)})
                near = near || in_prohibited(p + d, kDefault);
            CHECK(near);
        }
    }
    SUBCASE("only segment (v) points are real") {
        for (const auto& p : discretize_boundary(kDefault, 0.05).points) {
            if (p.imag() == 0.0) {
                CHECK(p.real() >= kDefault.eps1());
            } else {
                CHECK(p.imag() > 0.0);
            }
        }
    }
    SUBCASE("arc step never exceeds the spacing") {
        const auto b = discretize_segments(boundary_segments(kDefault), 0.3);
        for (std::size_t k = 1; k < b.points.size(); ++k) {
            const double gap = std::abs(b.points[k] - b.points[k - 1]);
            // consecutive points on the same segment
            if (gap < 0.5) CHECK(gap <= 0.3 + 1e-12);
        }
    }
    SUBCASE("halving the spacing refines the sample set") {
        for (double h : {0.4, 0.1, 0.037}) {
            const auto coarse = discretize_boundary(kDefault, h);
            const auto fine = discretize_boundary(kDefault, h / 2);
            CHECK(fine.points.size() >= 2 * coarse.points.size() - 10);
            for (const auto& p : coarse.points) {
                bool found = false;
                for (const auto& q : fine.points) found = found || std::abs(p - q) <= 1e-12;
                CHECK(found);
            }
        }
    }
    SUBCASE("shrinking eps brings the samples closer to the wedge apex") {
        double previous = 1e300;
        for (double eps : {0.2, 0.05, 0.01, 0.001}) {
            const ProhibitedDomain dom(0.35, 0.37, eps, eps, 10, 10);
            double                 closest = 1e300;
            for (const auto& p : discretize_boundary(dom, 0.01).points) closest = std::min(closest, std::abs(p));
            CHECK(closest < previous);
            previous = closest;
        }
    }
}

TEST_CASE("finer sampling is never less pessimistic") {
    const StaticNetwork net(RealMatrix{{1.0, -1.0}, {-1.0, 1.0}});
    for (const auto& model : {GfmParams{1.0, 5.0}, GfmParams{4.0, 2.5}, GfmParams{0.3, 0.8}}) {
        const auto entry = gfm_entry(model);
        double     previous = 1e300;
        for (double h : {0.8, 0.4, 0.2, 0.1, 0.05, 0.025}) {
            const auto report = lgbc_check(entry, 0, net, kDefault, discretize_boundary(kDefault, h));
            CHECK(report.worst_margin <= previous + 1e-9);
            previous = report.worst_margin;
        }
    }
}

TEST_CASE("in_enclosed_region") {
    CHECK(in_enclosed_region(Complex(-0.078, 0.627), kDefault));
    CHECK(in_enclosed_region(Complex(5.0, 5.0), kDefault));
    CHECK_FALSE(in_enclosed_region(Complex(-0.078, 0.2), kDefault));
    CHECK_FALSE(in_enclosed_region(Complex(0.0005, 0.05), kDefault));  // inside the origin notch
    CHECK_FALSE(in_enclosed_region(Complex(11.0, 1.0), kDefault));
    CHECK_FALSE(in_enclosed_region(Complex(1.0, -1.0), kDefault));
}

TEST_CASE("boundary export") {
    std::ostringstream os;
    write_boundary_tsv(os, discretize_boundary(kDefault, 100.0));
    std::string line;
    std::istringstream in(os.str());
    std::getline(in, line);
    CHECK(line == "re\tim");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
}
