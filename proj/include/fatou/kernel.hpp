#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fatou/dynamics.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

// Truncation stopped by max_depth before the tail certificate fired. Carries
// the partial product so callers can still report something.
class tail_error : public std::runtime_error {
public:
    tail_error(const std::string& what, Complex partial_value, int depth_reached)
        : std::runtime_error(what), partial(partial_value), depth(depth_reached) {}
    Complex partial;
    int depth;
};

class solve_error : public std::runtime_error {
public:
    solve_error(const std::string& what, double condition)
        : std::runtime_error(what), condition_estimate(condition) {}
    double condition_estimate;
};

struct KernelValue {
    Complex value;
    int depth = 0;
};

struct KernelOptions {
    double tail_tol = 1e-10;
    int max_depth = 10000;
};

// Evaluates the product kernel K(z,w) = prod_n (1 + P^n(z) conj(P^n(w))) by
// truncation. Once both orbits sit inside the certified contraction disk
// their moduli decay with ratio q, so with t = |z_N| |w_N| the dropped tail
// multiplies the result by at most exp(t / (1 - q^2)); truncation stops when
// that factor deviates from 1 by less than tail_tol.
class KernelEngine {
public:
    explicit KernelEngine(Polynomial p, KernelOptions opts = {})
        : poly_(std::move(p)), opts_(opts), contraction_(analyze_fixed_point(poly_)) {
        if (opts_.tail_tol <= 0.0)
            throw std::invalid_argument("KernelEngine: tail tolerance must be positive");
        if (opts_.max_depth < 1)
            throw std::invalid_argument("KernelEngine: depth limit must be at least 1");
        if (!contraction_.attracting)
            throw hypothesis_error("KernelEngine: fixed point at 0 is not attracting");
        escape_ = escape_radius(poly_);
    }

    const Polynomial& polynomial() const { return poly_; }
    const KernelOptions& options() const { return opts_; }
    const FixedPointReport& contraction() const { return contraction_; }

    KernelValue eval(Complex z, Complex w) const {
        const double r = contraction_.contraction_radius;
        const double q = contraction_.contraction_factor;
        Complex prod(1.0);
        Complex zi = z;
        Complex wi = w;
        for (int depth = 0; depth < opts_.max_depth; ++depth) {
            const double az = std::abs(zi);
            const double aw = std::abs(wi);
            if (az <= r && aw <= r) {
                const double bound = std::expm1(az * aw / (1.0 - q * q));
                if (bound < opts_.tail_tol) return {prod, depth};
            }
            if (az > escape_ || aw > escape_ || std::isnan(az) || std::isnan(aw))
                throw std::domain_error("kernel_eval: orbit escaped; input not in basin");
            prod *= Complex(1.0) + zi * std::conj(wi);
            zi = poly_(zi);
            wi = poly_(wi);
        }
        throw tail_error("kernel_eval: depth limit " + std::to_string(opts_.max_depth) +
                             " reached before tail certificate",
                         prod, opts_.max_depth);
    }

private:
    Polynomial poly_;
    KernelOptions opts_;
    FixedPointReport contraction_;
    double escape_ = 0.0;
};

// |K(z,w) - (1 + z conj(w)) K(P(z), P(w))|; zero in exact arithmetic.
inline double functional_equation_check(const KernelEngine& engine, Complex z, Complex w) {
    const Complex lhs = engine.eval(z, w).value;
    const Complex rhs =
        (Complex(1.0) + z * std::conj(w)) * engine.eval(engine.polynomial()(z), engine.polynomial()(w)).value;
    return std::abs(lhs - rhs);
}

struct GramMatrix {
    std::vector<Complex> points;
    Eigen::MatrixXcd entries;
    double ridge = 0.0;
};

// One triangle computed, the other mirrored, so Hermitian symmetry is exact.
// A negative ridge asks for the default 1e-10 trace(G)/m.
inline GramMatrix gram_matrix(const KernelEngine& engine, const std::vector<Complex>& points,
                              double ridge = -1.0) {
    if (points.empty()) throw std::invalid_argument("gram_matrix: no points");
    const Eigen::Index m = static_cast<Eigen::Index>(points.size());
    GramMatrix gram;
    gram.points = points;
    gram.entries.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        gram.entries(i, i) =
            std::real(engine.eval(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(i)]).value);
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const Complex k =
                engine.eval(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]).value;
            gram.entries(i, j) = k;
            gram.entries(j, i) = std::conj(k);
        }
    }
    gram.ridge = ridge >= 0.0 ? ridge : 1e-10 * gram.entries.real().trace() / static_cast<double>(m);
    return gram;
}

inline double min_eigenvalue(const GramMatrix& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram.entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// Applies (G + ridge I)^{-1} through a Hermitian eigendecomposition. Kernel
// Grams are positive semidefinite up to rounding, so eigenvalues below the
// ridge are treated as zero rather than divided by near-noise; anything
// negative beyond rounding slack means the input was no Gram at all and is
// refused. Solves are deterministic and single-threaded.
class GramSolver {
public:
    explicit GramSolver(const GramMatrix& gram) {
        es_.compute(gram.entries);
        if (es_.info() != Eigen::Success)
            throw solve_error("gram solve: eigendecomposition failed",
                              std::numeric_limits<double>::infinity());
        const Eigen::VectorXd& lam = es_.eigenvalues();
        const double lam_max = lam.cwiseAbs().maxCoeff();
        if (lam.minCoeff() < -1e-8 * lam_max) {
            const double lam_min_abs = lam.cwiseAbs().minCoeff();
            const double cond = lam_min_abs > 0.0 ? lam_max / lam_min_abs
                                                  : std::numeric_limits<double>::infinity();
            throw solve_error(
                "gram solve: matrix is indefinite beyond rounding slack; condition estimate " +
                    std::to_string(cond),
                cond);
        }
        Eigen::ArrayXd denom = lam.array() + gram.ridge;
        if (gram.ridge > 0.0) denom = denom.max(gram.ridge);
        if (!(denom.minCoeff() > 0.0))
            throw solve_error("gram solve: singular without a positive ridge; condition estimate " +
                                  std::to_string(std::numeric_limits<double>::infinity()),
                              std::numeric_limits<double>::infinity());
        condition_ = denom.maxCoeff() / denom.minCoeff();
        inv_denom_ = denom.inverse().cast<Complex>();
    }

    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
        const Eigen::VectorXcd y = es_.eigenvectors().adjoint() * rhs;
        return es_.eigenvectors() * (y.array() * inv_denom_).matrix();
    }

    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const {
        Eigen::MatrixXcd y = es_.eigenvectors().adjoint() * rhs;
        y = inv_denom_.matrix().asDiagonal() * y;
        return es_.eigenvectors() * y;
    }

    double condition_estimate() const { return condition_; }

private:
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_;
    Eigen::ArrayXcd inv_denom_;
    double condition_ = 0.0;
};

// g* (G + ridge I)^{-1} f: linear in f, conjugate-linear in g.
inline Complex empirical_inner_product(const GramMatrix& gram, const Eigen::VectorXcd& f,
                                       const Eigen::VectorXcd& g) {
    if (f.size() != gram.entries.rows() || g.size() != gram.entries.rows())
        throw std::invalid_argument("empirical_inner_product: value vectors must match the points");
    GramSolver solver(gram);
    return g.dot(solver.solve(f));
}

}  // namespace fatou
