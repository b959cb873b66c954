#pragma once

// Reference computations that deliberately avoid the library's own algorithms:
// plain coefficient-vector polynomials, Leibniz determinant expansion,
// Durand-Kerner root finding and dense-inverse Kron reduction.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Coeffs = std::vector<double>;  // ascending powers

inline Coeffs add(const Coeffs& a, const Coeffs& b) {
    Coeffs r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) r[k] += b[k];
    return r;
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {};
    Coeffs r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline Coeffs scale(Coeffs a, double f) {
    for (auto& c : a) c *= f;
    return a;
}

inline Coeffs trim(Coeffs a) {
    double big = 0.0;
    for (double c : a) big = std::max(big, std::abs(c));
    while (!a.empty() && std::abs(a.back()) <= 1e-13 * big) a.pop_back();
    return a;
}

inline cd eval(const Coeffs& p, cd s) {
    cd acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
    return acc;
}

// Durand-Kerner iteration followed by Newton polishing in long double.
inline std::vector<cd> roots(Coeffs p) {
    p = trim(p);
    const std::size_t n = p.size() - 1;
    std::vector<cd>   z;
    // exact zero roots first
    std::size_t zeros = 0;
    while (zeros < n && p[zeros] == 0.0) ++zeros;
    Coeffs q(p.begin() + static_cast<long>(zeros), p.end());
    const std::size_t m = q.size() - 1;
    const double      lead = q.back();
    for (auto& c : q) c /= lead;
    double radius = 0.0;
    for (std::size_t k = 0; k < m; ++k) radius = std::max(radius, std::pow(std::abs(q[k]), 1.0 / double(m - k)));
    radius = 2.0 * std::max(radius, 1e-3);
    std::vector<cd> w(m);
    for (std::size_t k = 0; k < m; ++k) w[k] = std::polar(radius, 0.4 + 2.0 * M_PI * double(k) / double(m));
    for (int it = 0; it < 5000; ++it) {
        double change = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            cd denom = 1.0;
            for (std::size_t j = 0; j < m; ++j)
                if (j != k) denom *= (w[k] - w[j]);
            const cd step = eval(q, w[k]) / denom;
            w[k] -= step;
            change = std::max(change, std::abs(step) / std::max(1.0, std::abs(w[k])));
        }
        if (change < 1e-15) break;
    }
    using ld = std::complex<long double>;
    for (auto& r : w) {
        ld x{r.real(), r.imag()};
        for (int it = 0; it < 4; ++it) {
            ld f = 0, df = 0;
            for (auto c = q.rbegin(); c != q.rend(); ++c) {
                df = df * x + f;
                f = f * x + static_cast<long double>(*c);
            }
            if (std::abs(df) == 0) break;
            const ld nx = x - f / df;
            if (!std::isfinite(static_cast<double>(std::abs(nx)))) break;
            x = nx;
        }
        r = cd(static_cast<double>(x.real()), static_cast<double>(x.imag()));
    }
    z.assign(zeros, cd{0.0, 0.0});
    z.insert(z.end(), w.begin(), w.end());
    return z;
}

// det(diag(den_i) + diag(num_i) * N) expanded over permutations.
inline Coeffs closed_loop_determinant(const std::vector<Coeffs>& num, const std::vector<Coeffs>& den,
                                      const Eigen::MatrixXd& n) {
    const std::size_t      dim = num.size();
    std::vector<std::size_t> perm(dim);
    std::iota(perm.begin(), perm.end(), 0);
    Coeffs total;
    do {
        int sign = 1;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i + 1; j < dim; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        Coeffs term{static_cast<double>(sign)};
        for (std::size_t i = 0; i < dim; ++i) {
            const std::size_t j = perm[i];
            Coeffs            entry = scale(num[i], n(static_cast<long>(i), static_cast<long>(j)));
            if (i == j) entry = add(entry, den[i]);
            term = mul(term, entry);
        }
        total = add(total, term);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return trim(total);
}

// Greedy nearest matching; returns the largest relative mismatch.
inline double match_error(std::vector<cd> a, std::vector<cd> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cd p, cd q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
        b.erase(it);
    }
    return worst;
}

// Schur complement through an explicit dense inverse.
inline Eigen::MatrixXcd dense_kron(const Eigen::MatrixXcd& y, const std::vector<std::size_t>& interior) {
    std::vector<long> keep, drop;
    for (long i = 0; i < y.rows(); ++i) {
        if (std::find(interior.begin(), interior.end(), static_cast<std::size_t>(i)) != interior.end())
            drop.push_back(i);
        else
            keep.push_back(i);
    }
    auto block = [&](const std::vector<long>& r, const std::vector<long>& c) {
        Eigen::MatrixXcd out(r.size(), c.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) out(long(i), long(j)) = y(r[i], c[j]);
        return out;
    };
    if (drop.empty()) return y;
    return block(keep, keep) - block(keep, drop) * block(drop, drop).inverse() * block(drop, keep);
}

}  // namespace oracle
