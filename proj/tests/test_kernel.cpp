#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "fatou/dynamics.hpp"
#include "fatou/kernel.hpp"
#include "fatou/polynomial.hpp"
#include "support/oracles.hpp"

using fatou::Complex;
using fatou::KernelEngine;
using fatou::KernelOptions;
using fatou::Polynomial;
using fatou::parse_polynomial;

namespace {
const Polynomial kQuartic = parse_polynomial("iz^4 - 2iz^2 - (0.5+0.5i)z");
const Polynomial kCubic = parse_polynomial("0.5z^3 + 0.75z");

// depth-200 long products, frozen as regression constants
constexpr double kRefCubicReal = 2.124819548159405;
const Complex kRefQuartic(0.97740087675065546, -0.096002298662853605);

Complex brute_force_kernel(const Polynomial& p, Complex z, Complex w, int depth) {
    Complex prod(1.0);
    for (int n = 0; n < depth; ++n) {
        prod *= Complex(1.0) + z * std::conj(w);
        z = oracles::naive_eval(p, z);
        w = oracles::naive_eval(p, w);
    }
    return prod;
}
}

TEST_CASE("kernel: zero arguments give exactly one") {
    KernelEngine engine(kCubic);
    fatou::KernelValue at_origin = engine.eval(Complex(0.0), Complex(0.0));
    CHECK(at_origin.value == Complex(1.0));
    CHECK(at_origin.depth == 0);

    std::vector<Complex> pts = fatou::sample_basin(kCubic, 30, 42);
    for (Complex z : pts) {
        CHECK(engine.eval(z, Complex(0.0)).value == Complex(1.0));
        CHECK(engine.eval(Complex(0.0), z).value == Complex(1.0));
    }
}

TEST_CASE("kernel: regression values match the long-product oracle") {
    KernelEngine cubic(kCubic);
    Complex kq = cubic.eval(Complex(0.5), Complex(0.5)).value;
    CHECK(std::abs(kq - Complex(kRefCubicReal)) < 5e-9);
    CHECK(std::abs(kq - brute_force_kernel(kCubic, Complex(0.5), Complex(0.5), 200)) < 1e-9);

    KernelEngine quartic(kQuartic);
    const Complex z(0.2, 0.1);
    const Complex w(-0.1, 0.3);
    Complex kr = quartic.eval(z, w).value;
    CHECK(std::abs(kr - kRefQuartic) < 5e-9);
    CHECK(std::abs(kr - brute_force_kernel(kQuartic, z, w, 200)) < 1e-9);
}

TEST_CASE("kernel: Hermitian symmetry") {
    KernelEngine engine(kQuartic);
    std::vector<Complex> pts = fatou::sample_basin(kQuartic, 20, 7);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        Complex a = engine.eval(pts[i], pts[i + 1]).value;
        Complex b = engine.eval(pts[i + 1], pts[i]).value;
        CHECK(std::abs(a - std::conj(b)) < 1e-12);
    }
}

TEST_CASE("kernel: functional equation residuals") {
    for (const Polynomial* p : {&kQuartic, &kCubic}) {
        KernelEngine engine(*p);
        CHECK(fatou::functional_equation_check(engine, Complex(0.0), Complex(0.0)) == 0.0);
        std::vector<Complex> pts = fatou::sample_basin(*p, 200, 42);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
            worst = std::max(worst, fatou::functional_equation_check(engine, pts[i], pts[i + 1]));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("kernel: truncation is stable under deeper limits") {
    KernelOptions base;
    KernelOptions doubled;
    doubled.max_depth = 2 * base.max_depth;
    KernelEngine a(kCubic, base);
    KernelEngine b(kCubic, doubled);
    KernelOptions fine;
    fine.tail_tol = 1e-12;
    KernelEngine c(kCubic, fine);

    std::vector<Complex> pts = fatou::sample_basin(kCubic, 200, 9);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        Complex va = a.eval(pts[i], pts[i + 1]).value;
        CHECK(std::abs(va - b.eval(pts[i], pts[i + 1]).value) < 2.0 * base.tail_tol);
        Complex vc = c.eval(pts[i], pts[i + 1]).value;
        CHECK(std::abs(va - vc) < 4.0 * base.tail_tol * std::max(1.0, std::abs(va)));
    }
}

TEST_CASE("kernel: depth limit failure carries the partial product") {
    KernelOptions tight;
    tight.max_depth = 1;
    KernelEngine engine(kCubic, tight);
    try {
        engine.eval(Complex(0.5), Complex(0.5));
        FAIL("expected tail_error");
    } catch (const fatou::tail_error& e) {
        CHECK(e.depth == 1);
        CHECK(std::abs(e.partial - Complex(1.25)) < 1e-15);
    }
}

TEST_CASE("kernel: escaped inputs are rejected") {
    KernelEngine engine(kCubic);
    CHECK_THROWS_AS(engine.eval(Complex(10.0), Complex(0.1)), std::domain_error);
}

TEST_CASE("kernel: constructor validation") {
    CHECK_THROWS_AS(KernelEngine(parse_polynomial("z")), fatou::hypothesis_error);
    KernelOptions bad_tol;
    bad_tol.tail_tol = 0.0;
    CHECK_THROWS_AS(KernelEngine(kCubic, bad_tol), std::invalid_argument);
    KernelOptions bad_depth;
    bad_depth.max_depth = 0;
    CHECK_THROWS_AS(KernelEngine(kCubic, bad_depth), std::invalid_argument);
}

TEST_CASE("gram: single origin point") {
    KernelEngine engine(kCubic);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, {Complex(0.0)});
    REQUIRE(gram.entries.rows() == 1);
    CHECK(gram.entries(0, 0) == Complex(1.0));
    CHECK(gram.ridge == Catch::Approx(1e-10));
}

TEST_CASE("gram: Hermitian by construction and positive semidefinite") {
    for (const Polynomial* p : {&kQuartic, &kCubic}) {
        KernelEngine engine(*p);
        std::vector<Complex> pts = fatou::sample_basin(*p, 40, 42);
        fatou::GramMatrix gram = fatou::gram_matrix(engine, pts);
        CHECK((gram.entries - gram.entries.adjoint()).norm() == 0.0);
        const double max_diag = gram.entries.real().diagonal().maxCoeff();
        CHECK(max_diag >= 1.0);
        CHECK(fatou::min_eigenvalue(gram) >= -1e-8 * max_diag);
    }
}

TEST_CASE("gram: duplicated points are rank deficient") {
    KernelEngine engine(kCubic);
    const Complex z(0.3, -0.2);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, {z, z});
    const double lam = fatou::min_eigenvalue(gram);
    CHECK(std::abs(lam) < 1e-12);
}

TEST_CASE("gram: validation and explicit ridge") {
    KernelEngine engine(kCubic);
    CHECK_THROWS_AS(fatou::gram_matrix(engine, {}), std::invalid_argument);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, {Complex(0.0)}, 0.5);
    CHECK(gram.ridge == 0.5);
}

TEST_CASE("inner product: all-ones vector has unit norm when 0 is sampled") {
    KernelEngine engine(kCubic);
    std::vector<Complex> pts = fatou::sample_basin(kCubic, 25, 42);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, pts);
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(gram.entries.rows());
    Complex ip = fatou::empirical_inner_product(gram, ones, ones);
    CHECK(std::abs(ip - Complex(1.0)) < 1e-6);
}

TEST_CASE("inner product: kernel sections reproduce diagonal values") {
    KernelEngine engine(kQuartic);
    std::vector<Complex> pts = fatou::sample_basin(kQuartic, 20, 11);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, pts);
    for (Eigen::Index k : {Eigen::Index(0), Eigen::Index(7), Eigen::Index(19)}) {
        Eigen::VectorXcd col = gram.entries.col(k);
        Complex ip = fatou::empirical_inner_product(gram, col, col);
        Complex diag = gram.entries(k, k);
        CHECK(std::abs(ip - diag) < 1e-6 * std::abs(diag));
    }
}

TEST_CASE("inner product: conjugate symmetry and sesquilinearity") {
    KernelEngine engine(kCubic);
    std::vector<Complex> pts = fatou::sample_basin(kCubic, 15, 3);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, pts);
    const Eigen::Index m = gram.entries.rows();

    std::mt19937_64 rng(29);
    auto random_vec = [&rng, m] {
        Eigen::VectorXcd v(m);
        for (Eigen::Index i = 0; i < m; ++i) v(i) = oracles::random_unit_disk(rng);
        return v;
    };
    Eigen::VectorXcd f1 = random_vec();
    Eigen::VectorXcd f2 = random_vec();
    Eigen::VectorXcd g = random_vec();
    const Complex alpha(0.3, -1.1);
    const Complex beta(-0.7, 0.2);

    Complex fg = fatou::empirical_inner_product(gram, f1, g);
    Complex gf = fatou::empirical_inner_product(gram, g, f1);
    CHECK(std::abs(fg - std::conj(gf)) < 1e-10 * (1.0 + std::abs(fg)));

    Complex lhs = fatou::empirical_inner_product(gram, alpha * f1 + beta * f2, g);
    Complex rhs = alpha * fg + beta * fatou::empirical_inner_product(gram, f2, g);
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));

    Complex gl = fatou::empirical_inner_product(gram, f1, alpha * g);
    CHECK(std::abs(gl - std::conj(alpha) * fg) < 1e-8 * (1.0 + std::abs(gl)));

    Eigen::VectorXcd wrong = Eigen::VectorXcd::Ones(m + 1);
    CHECK_THROWS_AS(fatou::empirical_inner_product(gram, wrong, g), std::invalid_argument);
}

TEST_CASE("inner product: span of sections matches the closed form") {
    KernelEngine engine(kCubic);
    std::vector<Complex> pts = fatou::sample_basin(kCubic, 18, 21);
    fatou::GramMatrix gram = fatou::gram_matrix(engine, pts);
    const Eigen::Index m = gram.entries.rows();

    std::mt19937_64 rng(31);
    Eigen::VectorXcd a(m);
    Eigen::VectorXcd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a(i) = oracles::random_unit_disk(rng);
        b(i) = oracles::random_unit_disk(rng);
    }
    Complex empirical = fatou::empirical_inner_product(gram, gram.entries * a, gram.entries * b);
    Complex closed = (b.adjoint() * gram.entries * a)(0);
    CHECK(std::abs(empirical - closed) < 1e-6 * (1.0 + std::abs(closed)));
}

TEST_CASE("solver: indefinite input is refused with a condition estimate") {
    fatou::GramMatrix bad;
    bad.points = {Complex(0.0), Complex(1.0)};
    bad.entries.resize(2, 2);
    bad.entries << Complex(1.0), Complex(2.0), Complex(2.0), Complex(1.0);
    bad.ridge = 0.0;
    try {
        fatou::GramSolver solver(bad);
        FAIL("expected solve_error");
    } catch (const fatou::solve_error& e) {
        CHECK(e.condition_estimate > 0.0);
    }
}
