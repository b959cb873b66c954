#include "localgain/ratcalc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "localgain/errors.hpp"

namespace localgain {

namespace {

// Parlett-Reinsch balancing with radix 2, applied in place.
void balance(Eigen::MatrixXd& a) {
    constexpr double kRadix = 2.0;
    const Eigen::Index n = a.rows();
    bool               done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) {
                continue;
            }
            double       g = r / kRadix;
            double       f = 1.0;
            const double total = c + r;
            while (c < g) {
                f *= kRadix;
                c *= kRadix * kRadix;
            }
            g = r * kRadix;
            while (c > g) {
                f /= kRadix;
                c /= kRadix * kRadix;
            }
            if ((c + r) / f < 0.95 * total) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

Complex poly_derivative_eval(const Polynomial& p, Complex s) {
    const auto c = p.coeffs();
    Complex    acc{0.0, 0.0};
    for (int k = p.degree(); k >= 1; --k) {
        acc = acc * s + c[static_cast<std::size_t>(k)] * static_cast<double>(k);
    }
    return acc;
}

// Descending-order Routh run; eps_sign chooses the substitute for zero pivots.
// Returns kMarginal only when a zero pivot was hit (caller resolves).
RouthVerdict routh_run(std::vector<double> desc, double eps_sign, bool& hit_zero_pivot) {
    const std::size_t n = desc.size() - 1;
    const double      scale = std::max(1.0, std::abs(desc.front()));
    const double      tol = 1e-12 * [&] {
        double m = 0.0;
        for (double v : desc) m = std::max(m, std::abs(v));
        return m;
    }();

    std::vector<double> upper;
    std::vector<double> lower;
    for (std::size_t k = 0; k <= n; k += 2) upper.push_back(desc[k]);
    for (std::size_t k = 1; k <= n; k += 2) lower.push_back(desc[k]);
    lower.resize(upper.size(), 0.0);

    if (upper.front() <= 0.0) {
        return RouthVerdict::kNotHurwitz;
    }
    for (std::size_t row = 1; row <= n; ++row) {
        double pivot = lower.front();
        if (std::abs(pivot) <= tol) {
            hit_zero_pivot = true;
            const bool whole_row_zero =
                std::all_of(lower.begin(), lower.end(), [&](double v) { return std::abs(v) <= tol; });
            if (whole_row_zero) {
                // Roots symmetric about the origin: at least one has Re >= 0.
                return RouthVerdict::kNotHurwitz;
            }
            pivot = eps_sign * 1e-9 * scale;
            lower.front() = pivot;
        }
        if (pivot < 0.0) {
            return RouthVerdict::kNotHurwitz;
        }
        std::vector<double> next(upper.size(), 0.0);
        for (std::size_t k = 0; k + 1 < upper.size(); ++k) {
            next[k] = (pivot * upper[k + 1] - upper.front() * lower[k + 1]) / pivot;
        }
        upper = std::move(lower);
        lower = std::move(next);
    }
    return RouthVerdict::kHurwitz;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs, double trim_eps) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && std::abs(coeffs_.back()) <= trim_eps) {
        coeffs_.pop_back();
    }
}

Polynomial Polynomial::monomial(int k, double c) {
    std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Polynomial Polynomial::scaled(double factor) const {
    std::vector<double> v(coeffs_);
    for (double& c : v) c *= factor;
    return Polynomial(std::move(v));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + b[k];
    return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b.scaled(-1.0); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) {
        return {};
    }
    std::vector<double> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
            v[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return Polynomial(std::move(v));
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) {
        throw DegenerateInputError("rational function denominator is the zero polynomial");
    }
    const double lead = den_.leading();
    if (lead != 1.0) {
        num_ = num_.scaled(1.0 / lead);
        den_ = den_.scaled(1.0 / lead);
    }
}

RationalFunction RationalFunction::reciprocal() const {
    if (num_.is_zero()) {
        throw DegenerateInputError("cannot invert a zero rational function");
    }
    return RationalFunction(den_, num_);
}

Complex poly_eval(const Polynomial& p, Complex s) {
    const auto c = p.coeffs();
    Complex    acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

std::vector<Complex> poly_roots(const Polynomial& p) {
    if (p.degree() < 1) {
        throw DegenerateInputError("poly_roots requires degree >= 1");
    }
    const auto c = p.coeffs();

    std::size_t zeros = 0;
    while (c[zeros] == 0.0) ++zeros;

    std::vector<Complex> roots(zeros, Complex{0.0, 0.0});
    const std::size_t    n = c.size() - 1 - zeros;
    if (n == 0) {
        return roots;
    }

    const double    lead = c.back();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        companion(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n - 1)) = -c[zeros + k] / lead;
        if (k + 1 < n) {
            companion(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) = 1.0;
        }
    }
    balance(companion);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const Eigen::VectorXcd&             eig = solver.eigenvalues();
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        Complex    z = eig[k];
        double     residual = std::abs(poly_eval(p, z));
        for (int iter = 0; iter < 3 && residual > 0.0; ++iter) {
            const Complex dp = poly_derivative_eval(p, z);
            if (dp == Complex{0.0, 0.0}) break;
            const Complex candidate = z - poly_eval(p, z) / dp;
            const double  cand_residual = std::abs(poly_eval(p, candidate));
            if (!(cand_residual < residual)) break;
            z = candidate;
            residual = cand_residual;
        }
        // Keep real roots exactly real.
        if (eig[k].imag() == 0.0) z.imag(0.0);
        roots.push_back(z);
    }
    return roots;
}

Polynomial shift_poly(const Polynomial& p, double sigma) {
    const auto       c = p.coeffs();
    const Polynomial shift({-sigma, 1.0}, 0.0);
    Polynomial       acc;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * shift + Polynomial::constant(*it);
    }
    return acc;
}

RouthVerdict routh_classify(const Polynomial& p) {
    if (p.is_zero()) {
        throw DegenerateInputError("Routh test on the zero polynomial");
    }
    if (p.degree() == 0) {
        return RouthVerdict::kHurwitz;
    }
    std::vector<double> desc(p.coeffs().rbegin(), p.coeffs().rend());
    if (desc.front() < 0.0) {
        for (double& v : desc) v = -v;
    }

    bool       hit_zero = false;
    const auto plus = routh_run(desc, +1.0, hit_zero);
    if (!hit_zero) {
        return plus;
    }
    bool       ignored = false;
    const auto minus = routh_run(desc, -1.0, ignored);
    return plus == minus ? plus : RouthVerdict::kMarginal;
}

bool routh_strictly_hurwitz(const Polynomial& p) { return routh_classify(p) == RouthVerdict::kHurwitz; }

Complex rf_eval(const RationalFunction& r, Complex s) {
    const Complex den = poly_eval(r.den(), s);
    double        scale = 0.0;
    double        power = 1.0;
    for (double c : r.den().coeffs()) {
        scale += std::abs(c) * power;
        power *= std::abs(s);
    }
    if (std::abs(den) <= 1e-12 * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << "pole at evaluation point s = " << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag())
            << "j";
        throw PoleAtPointError(msg.str(), s);
    }
    return poly_eval(r.num(), s) / den;
}

}  // namespace localgain
