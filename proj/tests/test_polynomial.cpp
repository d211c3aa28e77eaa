#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fatou/polynomial.hpp"
#include "support/oracles.hpp"

using fatou::Complex;
using fatou::Polynomial;
using fatou::parse_polynomial;

namespace {
const Polynomial kExampleQuartic = parse_polynomial("iz^4 - 2iz^2 - (0.5+0.5i)z");
const Polynomial kExampleCubic = parse_polynomial("0.5z^3 + 0.75z");
}  // namespace

TEST_CASE("parse: cubic with fractional coefficients") {
    CHECK(kExampleCubic.degree() == 3);
    CHECK(kExampleCubic.coeff(0) == Complex(0.0));
    CHECK(kExampleCubic.coeff(1) == Complex(0.75));
    CHECK(kExampleCubic.coeff(2) == Complex(0.0));
    CHECK(kExampleCubic.coeff(3) == Complex(0.5));
}

TEST_CASE("parse: quartic with imaginary and parenthesized coefficients") {
    CHECK(kExampleQuartic.degree() == 4);
    CHECK(kExampleQuartic.coeff(0) == Complex(0.0));
    CHECK(kExampleQuartic.coeff(1) == Complex(-0.5, -0.5));
    CHECK(kExampleQuartic.coeff(2) == Complex(0.0, -2.0));
    CHECK(kExampleQuartic.coeff(3) == Complex(0.0));
    CHECK(kExampleQuartic.coeff(4) == Complex(0.0, 1.0));
}

TEST_CASE("parse: zero polynomial") {
    Polynomial z = parse_polynomial("0");
    CHECK(z.is_zero());
    CHECK(z.degree() == 0);
}

TEST_CASE("parse: zero leading coefficient collapses degree") {
    Polynomial p = parse_polynomial("0z^5 + z");
    CHECK(p.degree() == 1);
    CHECK(p.coeff(1) == Complex(1.0));
}

TEST_CASE("parse: syntax errors carry a position") {
    CHECK_THROWS_AS(parse_polynomial("2z +"), fatou::parse_error);
    CHECK_THROWS_AS(parse_polynomial("z^"), fatou::parse_error);
    CHECK_THROWS_AS(parse_polynomial("(1+2)z"), fatou::parse_error);
    CHECK_THROWS_AS(parse_polynomial(""), fatou::parse_error);
    try {
        parse_polynomial("z + $");
    } catch (const fatou::parse_error& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("parse accepts whitespace and leading sign") {
    Polynomial p = parse_polynomial("- 0.75 z + 0.5 z^3");
    CHECK(p.coeff(1) == Complex(-0.75));
    CHECK(p.coeff(3) == Complex(0.5));
}

TEST_CASE("evaluate: quartic fixes zero") {
    CHECK(kExampleQuartic(Complex(0.0)) == Complex(0.0));
}

TEST_CASE("evaluate: cubic at i") {
    Complex v = kExampleCubic(Complex(0.0, 1.0));
    CHECK(std::abs(v - Complex(0.0, 0.25)) < 1e-15);
    CHECK(std::abs(oracles::naive_eval(kExampleCubic, Complex(0.0, 1.0)) - v) < 1e-15);
}

TEST_CASE("evaluate: constant polynomial") {
    Polynomial c = Polynomial::constant(Complex(3.0, -2.0));
    CHECK(c(Complex(17.0, 5.0)) == Complex(3.0, -2.0));
}

TEST_CASE("derivative: quartic derivative modulus at 0") {
    Polynomial d = kExampleQuartic.derivative();
    CHECK(std::abs(std::abs(d(Complex(0.0))) - std::sqrt(2.0) / 2.0) < 1e-15);
}

TEST_CASE("derivative: cubic") {
    Polynomial d = kExampleCubic.derivative();
    CHECK(d(Complex(0.0)) == Complex(0.75));
    CHECK(d.degree() == 2);
}

TEST_CASE("derivative: constant goes to zero") {
    CHECK(Polynomial::constant(Complex(5.0)).derivative().is_zero());
}

TEST_CASE("compose: identity is neutral") {
    Polynomial p = parse_polynomial("2z^3 - iz + 1");
    CHECK(fatou::compose(p, Polynomial::identity()) == p);
}

TEST_CASE("compose: binomial expansion") {
    Polynomial sq = parse_polynomial("z^2");
    Polynomial shift = parse_polynomial("z + 1");
    Polynomial c = fatou::compose(sq, shift);
    CHECK(c == parse_polynomial("z^2 + 2z + 1"));
}

TEST_CASE("compose: degree multiplies") {
    Polynomial rr = fatou::compose(kExampleQuartic, kExampleQuartic);
    CHECK(rr.degree() == 16);
    // spot-check against pointwise iteration
    Complex z(0.3, 0.1);
    CHECK(std::abs(rr(z) - kExampleQuartic(kExampleQuartic(z))) < 1e-12);
}

TEST_CASE("compose: degree cap trips") {
    Polynomial p = parse_polynomial("z^80");
    CHECK_THROWS_AS(fatou::compose(p, p), fatou::compose_overflow);
}

TEST_CASE("multiply: matches convolution oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial p = oracles::random_polynomial(rng, 6);
        Polynomial q = oracles::random_polynomial(rng, 6);
        Polynomial prod = p * q;
        auto expect = oracles::convolve(p.coeffs(), q.coeffs());
        REQUIRE(prod.degree() == p.degree() + q.degree());
        for (int k = 0; k <= prod.degree(); ++k)
            CHECK(std::abs(prod.coeff(k) - expect[static_cast<std::size_t>(k)]) < 1e-14);
        CHECK(prod.leading() == p.leading() * q.leading());
    }
    CHECK((parse_polynomial("z") * parse_polynomial("z")) == parse_polynomial("z^2"));
    Polynomial p = parse_polynomial("3z^2 + i");
    CHECK(p * Polynomial::constant(Complex(1.0)) == p);
}

TEST_CASE("iterate_eval: fixed point stays fixed") {
    auto r = fatou::iterate_eval(kExampleQuartic, Complex(0.0), 10);
    CHECK_FALSE(r.escaped);
    CHECK(r.value == Complex(0.0));
}

TEST_CASE("iterate_eval: single step matches evaluation") {
    auto r = fatou::iterate_eval(kExampleCubic, Complex(0.0, 1.0), 1);
    CHECK(std::abs(r.value - Complex(0.0, 0.25)) < 1e-15);
}

TEST_CASE("iterate_eval: zeroth iterate is identity") {
    auto r = fatou::iterate_eval(kExampleCubic, Complex(1.5, -0.25), 0);
    CHECK(r.value == Complex(1.5, -0.25));
    CHECK_FALSE(r.escaped);
}

TEST_CASE("iterate_eval: escape sentinel fires on divergent orbit") {
    auto r = fatou::iterate_eval(kExampleQuartic, Complex(50.0, 0.0), 40);
    CHECK(r.escaped);
    CHECK(std::isfinite(r.value.real()));
}

TEST_CASE("property: Horner agrees with term summation") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Polynomial p = oracles::random_polynomial(rng, 8);
        Complex z = 2.0 * oracles::random_unit_disk(rng);
        Complex a = p(z);
        Complex b = oracles::naive_eval(p, z);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("property: iterate splits additively") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial p = oracles::random_polynomial(rng, 5);
        Complex z = 0.5 * oracles::random_unit_disk(rng);
        int j = static_cast<int>(rng() % 4), k = static_cast<int>(rng() % 4);
        auto whole = fatou::iterate_eval(p, z, j + k);
        auto first = fatou::iterate_eval(p, z, j);
        if (first.escaped || whole.escaped) continue;
        auto second = fatou::iterate_eval(p, first.value, k);
        if (second.escaped) continue;
        CHECK(std::abs(whole.value - second.value) <= 1e-9 * std::max(1.0, std::abs(whole.value)));
    }
}

TEST_CASE("non-finite coefficients are rejected") {
    std::vector<Complex> bad{Complex(1.0), Complex(std::nan(""), 0.0)};
    CHECK_THROWS_AS(Polynomial(std::move(bad)), std::invalid_argument);
}

TEST_CASE("format round-trips the display form") {
    CHECK(fatou::format_polynomial(kExampleQuartic) == "iz^4 - 2iz^2 - (0.5+0.5i)z");
    CHECK(fatou::format_polynomial(kExampleCubic) == "0.5z^3 + 0.75z");
    CHECK(fatou::format_polynomial(Polynomial()) == "0");
    Polynomial p = parse_polynomial(fatou::format_polynomial(kExampleQuartic));
    CHECK(p == kExampleQuartic);
}
