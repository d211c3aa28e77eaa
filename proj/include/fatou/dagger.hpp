#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fatou/dynamics.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/roots.hpp"

namespace fatou {

// Coefficient data are literals; root sums carry accumulated solver error.
inline constexpr double kCoeffTol = 1e-12;
inline constexpr double kRootSumTol = 1e-8;

enum class ConditionSystem { dagger, ddagger };

inline const char* system_name(ConditionSystem s) {
    return s == ConditionSystem::dagger ? "dagger" : "ddagger";
}

namespace detail {

inline bool is_real_root(Complex zeta) {
    return std::abs(zeta.imag()) <= 1e-8 * std::max(1.0, std::abs(zeta));
}

}  // namespace detail

// Fiber sums over the solutions of p(zeta) = c. The count condition
// (sum_one = degree) holds by construction; the verdict tests the remaining
// two equations of the chosen system.
struct ConditionWitness {
    Complex point;
    ConditionSystem system = ConditionSystem::ddagger;
    int m = 0;
    Complex sum_one;
    Complex sum_zeta;
    Complex sum_zeta_sq;
    double sum_mod_sq = 0.0;
    bool all_real = false;
    double deviation = 0.0;
    bool satisfied = false;
};

// Exact coefficient test: a_{n-1} = 0 and a_{n-2} = -n a_n / 2. Degrees
// below 3 are outside the test's scope and report in_scope = false.
struct DdaggerCoeffs {
    bool in_scope = false;
    bool a_nm1_zero = false;
    bool a_nm2_ok = false;
    bool satisfied = false;
};

inline DdaggerCoeffs check_ddagger_coeffs(const Polynomial& p) {
    DdaggerCoeffs v;
    const int n = p.degree();
    v.in_scope = n >= 3;
    if (!v.in_scope) return v;
    v.a_nm1_zero = std::abs(p.coeff(n - 1)) <= kCoeffTol;
    v.a_nm2_ok = std::abs(p.coeff(n - 2) + 0.5 * static_cast<double>(n) * p.coeff(n)) <= kCoeffTol;
    v.satisfied = v.a_nm1_zero && v.a_nm2_ok;
    return v;
}

inline ConditionWitness check_point_condition(const Polynomial& p, Complex c,
                                              ConditionSystem system,
                                              const RootOptions& opts = {}) {
    const RootSet fiber = find_roots(p, c, opts);
    ConditionWitness w;
    w.point = c;
    w.system = system;
    w.m = static_cast<int>(fiber.roots.size());
    w.sum_one = Complex(static_cast<double>(w.m));
    w.all_real = true;
    for (Complex zeta : fiber.roots) {
        w.sum_zeta += zeta;
        w.sum_zeta_sq += zeta * zeta;
        w.sum_mod_sq += std::norm(zeta);
        if (!detail::is_real_root(zeta)) w.all_real = false;
    }
    const double n = static_cast<double>(p.degree());
    const double second = system == ConditionSystem::ddagger
                              ? std::abs(w.sum_zeta_sq - Complex(n))
                              : std::abs(w.sum_mod_sq - n);
    w.deviation = std::max(std::abs(w.sum_zeta), second);
    w.satisfied = w.deviation <= kRootSumTol;
    return w;
}

inline bool real_solution_probe(const Polynomial& p, Complex c, const RootOptions& opts = {}) {
    const RootSet fiber = find_roots(p, c, opts);
    return std::all_of(fiber.roots.begin(), fiber.roots.end(), detail::is_real_root);
}

// A scan refutes; it never proves. A clean scan means no counterexample was
// found among the sampled points.
struct DaggerReport {
    DdaggerCoeffs ddagger_exact;
    ConditionSystem system = ConditionSystem::ddagger;
    int points_tested = 0;
    double worst_deviation = 0.0;
    std::vector<ConditionWitness> failures;
    std::vector<ConditionWitness> per_point;
};

inline DaggerReport scan_basin(const Polynomial& p, ConditionSystem system, int samples,
                               std::uint64_t seed, const BoundingBox& bbox = {}) {
    DaggerReport report;
    report.ddagger_exact = check_ddagger_coeffs(p);
    report.system = system;
    const std::vector<Complex> points = sample_basin(p, samples, seed, bbox);
    report.per_point.reserve(points.size());
    for (Complex c : points) {
        ConditionWitness w = check_point_condition(p, c, system);
        report.worst_deviation = std::max(report.worst_deviation, w.deviation);
        if (!w.satisfied) report.failures.push_back(w);
        report.per_point.push_back(std::move(w));
    }
    report.points_tested = static_cast<int>(points.size());
    std::stable_sort(report.failures.begin(), report.failures.end(),
                     [](const ConditionWitness& a, const ConditionWitness& b) {
                         const double ma = std::abs(a.point);
                         const double mb = std::abs(b.point);
                         if (ma != mb) return ma < mb;
                         if (a.point.real() != b.point.real()) return a.point.real() < b.point.real();
                         return a.point.imag() < b.point.imag();
                     });
    return report;
}

struct ProductCheck {
    Polynomial product;
    DdaggerCoeffs report;
};

// The product of two polynomials passing the coefficient test passes it too;
// callers must establish the precondition.
inline ProductCheck ddagger_product_check(const Polynomial& p, const Polynomial& q) {
    if (!check_ddagger_coeffs(p).satisfied || !check_ddagger_coeffs(q).satisfied)
        throw std::invalid_argument(
            "ddagger_product_check: both factors must pass the coefficient test");
    ProductCheck pc;
    pc.product = multiply(p, q);
    pc.report = check_ddagger_coeffs(pc.product);
    return pc;
}

// Random member of the classified family: a_0 = 0, |a_1| < 1, a_{n-1} = 0,
// a_{n-2} = -n a_n / 2. Magnitudes are kept small enough that the basin has
// sampleable area in the default bounding box.
inline Polynomial ddagger_family_sample(int n, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("ddagger_family_sample: degree must be at least 3");
    std::mt19937_64 rng(seed);
    auto draw = [&rng](double lo, double hi) {
        const double m = lo + detail::uniform01(rng) * (hi - lo);
        const double theta = 2.0 * std::numbers::pi * detail::uniform01(rng);
        return std::polar(m, theta);
    };
    std::vector<Complex> c(static_cast<std::size_t>(n) + 1, Complex(0.0));
    if (n == 3) {
        c[3] = draw(0.15, 0.55);
        c[1] = -1.5 * c[3];
    } else {
        c[static_cast<std::size_t>(n)] = draw(0.2 / n, 0.8 / n);
        c[static_cast<std::size_t>(n - 2)] =
            -0.5 * static_cast<double>(n) * c[static_cast<std::size_t>(n)];
        c[1] = draw(0.0, 0.8);
        for (int k = 2; k <= n - 3; ++k) c[static_cast<std::size_t>(k)] = draw(0.0, 0.3);
    }
    return Polynomial{std::move(c)};
}

}  // namespace fatou
