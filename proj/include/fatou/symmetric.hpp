#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fatou/polynomial.hpp"
#include "fatou/roots.hpp"

namespace fatou {

/// Elementary symmetric values e_0..e_n and power sums P_1..P_k of a root set.
struct SymmetricStats {
    std::vector<Complex> e;  // e[0] == 1
    std::vector<Complex> p;  // p[k-1] holds P_k
};

/// P_k = sum of k-th powers, k = 1..k_max.
inline std::vector<Complex> power_sums(const std::vector<Complex>& roots, int k_max) {
    std::vector<Complex> p(static_cast<std::size_t>(k_max));
    std::vector<Complex> pow(roots.size(), Complex(1.0));
    for (int k = 1; k <= k_max; ++k) {
        Complex s(0.0);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            pow[i] *= roots[i];
            s += pow[i];
        }
        p[static_cast<std::size_t>(k - 1)] = s;
    }
    return p;
}

/// e_k via the generating product prod_i (1 + r_i t).
inline std::vector<Complex> elementary_from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> e{Complex(1.0)};
    e.reserve(roots.size() + 1);
    for (Complex r : roots) {
        e.push_back(Complex(0.0));
        for (std::size_t k = e.size() - 1; k >= 1; --k) e[k] += r * e[k - 1];
    }
    return e;
}

/// e_k from power sums by the Newton-Girard recursion,
/// e_k = (-1)^{k+1}/k * sum_{l=0}^{k-1} (-1)^l e_l P_{k-l}.
inline std::vector<Complex> elementary_from_power_sums(const std::vector<Complex>& p, int n) {
    std::vector<Complex> e(static_cast<std::size_t>(n) + 1, Complex(0.0));
    e[0] = Complex(1.0);
    for (int k = 1; k <= n; ++k) {
        Complex s(0.0);
        double sign = 1.0;
        for (int l = 0; l < k; ++l) {
            s += sign * e[static_cast<std::size_t>(l)] * p[static_cast<std::size_t>(k - l - 1)];
            sign = -sign;
        }
        double outer = (k % 2 == 0) ? -1.0 : 1.0;
        e[static_cast<std::size_t>(k)] = outer * s / static_cast<double>(k);
    }
    return e;
}

/// P_k from elementary symmetric values by the same recursion,
/// P_k = sum_{l=1}^{k-1} (-1)^{l+1} e_l P_{k-l} + (-1)^{k+1} k e_k.
inline std::vector<Complex> power_sums_from_elementary(const std::vector<Complex>& e, int k_max) {
    auto e_at = [&](int k) {
        return k < static_cast<int>(e.size()) ? e[static_cast<std::size_t>(k)] : Complex(0.0);
    };
    std::vector<Complex> p(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        Complex s(0.0);
        double sign = 1.0;  // (-1)^{l+1} for l = 1
        for (int l = 1; l < k; ++l) {
            s += sign * e_at(l) * p[static_cast<std::size_t>(k - l - 1)];
            sign = -sign;
        }
        double outer = (k % 2 == 0) ? -1.0 : 1.0;
        p[static_cast<std::size_t>(k - 1)] = s + outer * static_cast<double>(k) * e_at(k);
    }
    return p;
}

/// Residual of the k-th Newton-Girard identity,
/// sum_{l=0}^{k-1} (-1)^l e_l P_{k-l} + (-1)^k k e_k.
inline Complex newton_girard_residual(const std::vector<Complex>& e, const std::vector<Complex>& p,
                                      int k) {
    auto e_at = [&](int l) {
        return l < static_cast<int>(e.size()) ? e[static_cast<std::size_t>(l)] : Complex(0.0);
    };
    Complex s(0.0);
    double sign = 1.0;
    for (int l = 0; l < k; ++l) {
        s += sign * e_at(l) * p[static_cast<std::size_t>(k - l - 1)];
        sign = -sign;
    }
    double outer = (k % 2 == 0) ? 1.0 : -1.0;
    return s + outer * static_cast<double>(k) * e_at(k);
}

/// Power sums directly from the roots plus elementary values computed two
/// ways (root product and Newton-Girard); the two routes must agree.
inline SymmetricStats symmetric_stats(const RootSet& roots, int k_max) {
    if (k_max < 1) throw std::invalid_argument("symmetric_stats: k_max must be >= 1");
    const int n = static_cast<int>(roots.roots.size());
    SymmetricStats stats;
    stats.p = power_sums(roots.roots, std::max(k_max, n));
    stats.e = elementary_from_roots(roots.roots);

    std::vector<Complex> e_ng = elementary_from_power_sums(stats.p, n);
    double scale = 1.0;
    for (Complex v : stats.e) scale = std::max(scale, std::abs(v));
    for (int k = 0; k <= n; ++k) {
        double diff = std::abs(stats.e[static_cast<std::size_t>(k)] - e_ng[static_cast<std::size_t>(k)]);
        if (diff > 1e-6 * scale)
            throw solver_error("symmetric_stats: Newton-Girard cross-check failed");
    }
    stats.p.resize(static_cast<std::size_t>(k_max));
    return stats;
}

/// Elementary symmetric values straight from the coefficients,
/// e_k = (-1)^k a_{n-k} / a_n, with power sums derived by recursion.
inline SymmetricStats vieta_from_coeffs(const Polynomial& poly, int k_max = -1) {
    const int n = poly.degree();
    if (n < 1 || poly.leading() == Complex(0.0))
        throw std::invalid_argument("vieta_from_coeffs: need degree >= 1 and nonzero lead");
    if (k_max < 1) k_max = n;
    SymmetricStats stats;
    stats.e.resize(static_cast<std::size_t>(n) + 1);
    double sign = 1.0;
    for (int k = 0; k <= n; ++k) {
        stats.e[static_cast<std::size_t>(k)] = sign * poly.coeff(n - k) / poly.leading();
        sign = -sign;
    }
    stats.p = power_sums_from_elementary(stats.e, k_max);
    return stats;
}

}  // namespace fatou
