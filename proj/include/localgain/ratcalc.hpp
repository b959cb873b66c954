#pragma once

#include <complex>
#include <span>
#include <vector>

namespace localgain {

using Complex = std::complex<double>;

inline constexpr double kTrimEpsilon = 1e-12;

/**
 * Real-coefficient polynomial in the Laplace variable.
 *
 * Coefficients are stored in ascending degree (coeffs()[k] multiplies s^k).
 * Highest-degree coefficients with magnitude <= trim epsilon are dropped on
 * construction, so the zero polynomial has an empty coefficient list and
 * degree() == -1.
 */
class Polynomial {
   public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs, double trim_eps = kTrimEpsilon);

    static Polynomial constant(double c) { return Polynomial({c}); }
    // s^k
    static Polynomial monomial(int k, double c = 1.0);

    std::span<const double> coeffs() const { return coeffs_; }
    int                     degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool                    is_zero() const { return coeffs_.empty(); }
    double                  leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
    double                  operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
    double                  max_abs_coeff() const;

    Polynomial scaled(double factor) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool       operator==(const Polynomial& a, const Polynomial& b) = default;

   private:
    std::vector<double> coeffs_;
};

/// Ratio num/den with a monic denominator.
class RationalFunction {
   public:
    RationalFunction(Polynomial num, Polynomial den);

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool              is_strictly_proper() const { return num_.degree() < den_.degree(); }

    // Swaps numerator and denominator; throws DegenerateInputError for a zero numerator.
    RationalFunction reciprocal() const;

   private:
    Polynomial num_;
    Polynomial den_;
};

Complex poly_eval(const Polynomial& p, Complex s);

/**
 * All deg(p) roots, with multiplicity.
 *
 * Exact zero roots (vanishing low-order coefficients) are split off first; the
 * rest come from the eigenvalues of the balanced companion matrix followed by
 * a guarded Newton polish.
 */
std::vector<Complex> poly_roots(const Polynomial& p);

// q(w) = p(w - sigma): zeros with Re(s) > -sigma become zeros with Re(w) > 0.
Polynomial shift_poly(const Polynomial& p, double sigma);

enum class RouthVerdict { kHurwitz, kNotHurwitz, kMarginal };

/**
 * Routh-array classification of the open-left-half-plane property.
 *
 * A first-column pivot that is zero within tolerance is re-run with +eps and
 * -eps substitutes; disagreement between the two runs is reported as
 * kMarginal. Nonzero constants have no zeros and are kHurwitz.
 */
RouthVerdict routh_classify(const Polynomial& p);

// Marginal counts as false.
bool routh_strictly_hurwitz(const Polynomial& p);

Complex rf_eval(const RationalFunction& r, Complex s);

}  // namespace localgain
