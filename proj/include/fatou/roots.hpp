#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fatou/polynomial.hpp"

namespace fatou {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RootOptions {
    int max_iterations = 500;
    double tol_scale = 1e-10;      // root_tol = tol_scale * max(1, |shift|)
    double cluster_radius = 1e-6;  // numeric multiple roots are merged within this radius
};

/// All solutions of p(z) = shift, multiplicity-repeated.
struct RootSet {
    enum class Method { iterative, companion_oracle };

    std::vector<Complex> roots;
    double residual = 0.0;  // max |p(root) - shift|
    Method method = Method::iterative;
};

namespace detail {

inline double max_residual(const Polynomial& q, const std::vector<Complex>& roots) {
    double worst = 0.0;
    for (Complex r : roots) worst = std::max(worst, std::abs(q(r)));
    return worst;
}

inline void newton_polish(const Polynomial& q, std::vector<Complex>& roots, int steps = 2) {
    for (Complex& r : roots) {
        for (int s = 0; s < steps; ++s) {
            auto [v, d] = q.eval_with_derivative(r);
            if (std::abs(d) < 1e-300) break;
            Complex step = v / d;
            if (!is_finite(step)) break;
            Complex next = r - step;
            if (std::abs(q(next)) <= std::abs(v)) r = next;
        }
    }
}

// Simultaneous iteration.  aberth=true uses the Ehrlich-Aberth correction,
// aberth=false plain Durand-Kerner; both update in place (Gauss-Seidel).
inline bool simultaneous_solve(const Polynomial& q, std::vector<Complex>& z, bool aberth,
                               double angle_offset, int max_iterations) {
    const int n = q.degree();
    double radius = 0.0;
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(q.coeff(k) / q.leading()));
    radius += 1.0;

    z.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double theta = 2.0 * std::numbers::pi * j / n + angle_offset;
        double rj = radius * (1.0 + 0.05 * j / std::max(1, n));  // slight spiral breaks symmetry
        z[static_cast<std::size_t>(j)] = Complex(rj * std::cos(theta), rj * std::sin(theta));
    }

    const Complex lead = q.leading();
    for (int iter = 0; iter < max_iterations; ++iter) {
        double worst_step = 0.0;
        for (int j = 0; j < n; ++j) {
            Complex& zj = z[static_cast<std::size_t>(j)];
            auto [v, d] = q.eval_with_derivative(zj);
            if (v == Complex(0.0)) continue;

            Complex correction;
            if (aberth) {
                if (std::abs(d) < 1e-300) {
                    zj += Complex(1e-6 * (1.0 + radius), 1e-6);
                    worst_step = 1.0;
                    continue;
                }
                Complex newton = v / d;
                Complex s(0.0);
                bool collision = false;
                for (int k = 0; k < n; ++k) {
                    if (k == j) continue;
                    Complex diff = zj - z[static_cast<std::size_t>(k)];
                    if (diff == Complex(0.0)) {
                        collision = true;
                        break;
                    }
                    s += Complex(1.0) / diff;
                }
                if (collision) {
                    zj += Complex(1e-6 * (1.0 + radius), -1e-6);
                    worst_step = 1.0;
                    continue;
                }
                Complex denom = Complex(1.0) - newton * s;
                correction = (denom == Complex(0.0)) ? newton : newton / denom;
            } else {
                Complex denom = lead;
                bool collision = false;
                for (int k = 0; k < n; ++k) {
                    if (k == j) continue;
                    Complex diff = zj - z[static_cast<std::size_t>(k)];
                    if (diff == Complex(0.0)) {
                        collision = true;
                        break;
                    }
                    denom *= diff;
                }
                if (collision || std::abs(denom) < 1e-300) {
                    zj += Complex(-1e-6, 1e-6 * (1.0 + radius));
                    worst_step = 1.0;
                    continue;
                }
                correction = v / denom;
            }
            if (!is_finite(correction)) {
                zj *= 0.5;
                worst_step = 1.0;
                continue;
            }
            zj -= correction;
            worst_step = std::max(worst_step, std::abs(correction) / (1.0 + std::abs(zj)));
        }
        if (worst_step < 1e-14) return true;
    }
    return false;
}

// Eigenvalues of the companion matrix of q (monic-normalized).
inline std::vector<Complex> companion_roots(const Polynomial& q) {
    const int n = q.degree();
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) c(i, n - 1) = -q.coeff(i) / q.leading();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(c, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw solver_error("companion eigensolver failed");
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return roots;
}

// Merge roots closer than `radius` into centroid clusters, repeated with
// multiplicity.  Single-linkage, so a chain merges into one cluster.
inline void cluster_roots(std::vector<Complex>& roots, double radius) {
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(roots[i] - roots[j]) <= radius) parent[find(i)] = find(j);

    std::vector<Complex> sum(n, Complex(0.0));
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        sum[r] += roots[i];
        ++count[r];
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        roots[i] = sum[r] / static_cast<double>(count[r]);
    }
}

inline void sort_roots(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

}  // namespace detail

/// Solve p(z) = shift by Ehrlich-Aberth simultaneous iteration, falling back
/// to Durand-Kerner and then to the companion-matrix eigenvalue oracle.
inline RootSet find_roots(const Polynomial& p, Complex shift = Complex(0.0),
                          const RootOptions& opts = {}) {
    if (p.degree() < 1) throw std::invalid_argument("find_roots: degree must be >= 1");
    if (!is_finite(shift)) throw std::invalid_argument("find_roots: non-finite shift");

    std::vector<Complex> qc = p.coeffs();
    qc[0] -= shift;
    const Polynomial q(std::move(qc));
    const double tol = opts.tol_scale * std::max(1.0, std::abs(shift));

    auto finish = [&](std::vector<Complex> roots, RootSet::Method method) {
        detail::newton_polish(q, roots);
        detail::cluster_roots(roots, opts.cluster_radius);
        detail::sort_roots(roots);
        RootSet rs;
        rs.roots = std::move(roots);
        rs.residual = detail::max_residual(q, rs.roots);
        rs.method = method;
        return rs;
    };

    std::vector<Complex> z;
    detail::simultaneous_solve(q, z, /*aberth=*/true, 0.4, opts.max_iterations);
    RootSet rs = finish(z, RootSet::Method::iterative);
    if (rs.residual <= tol) return rs;

    detail::simultaneous_solve(q, z, /*aberth=*/false, 0.9, opts.max_iterations);
    rs = finish(z, RootSet::Method::iterative);
    if (rs.residual <= tol) return rs;

    rs = finish(detail::companion_roots(q), RootSet::Method::companion_oracle);
    if (rs.residual <= tol) return rs;
    throw solver_error("root solver failed to reach residual tolerance");
}

/// Companion-matrix route only, exposed as an independent cross-check.
inline RootSet find_roots_companion(const Polynomial& p, Complex shift = Complex(0.0),
                                    const RootOptions& opts = {}) {
    if (p.degree() < 1) throw std::invalid_argument("find_roots: degree must be >= 1");
    std::vector<Complex> qc = p.coeffs();
    qc[0] -= shift;
    const Polynomial q(std::move(qc));
    std::vector<Complex> roots = detail::companion_roots(q);
    detail::newton_polish(q, roots);
    detail::cluster_roots(roots, opts.cluster_radius);
    detail::sort_roots(roots);
    RootSet rs;
    rs.roots = std::move(roots);
    rs.residual = detail::max_residual(q, rs.roots);
    rs.method = RootSet::Method::companion_oracle;
    return rs;
}

}  // namespace fatou
