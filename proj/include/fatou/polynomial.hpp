#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fatou {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Thrown on malformed polynomial text; `position` is the byte offset of the offender.
struct parse_error : std::runtime_error {
    std::size_t position;
    parse_error(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct compose_overflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense complex-coefficient polynomial a_0 + a_1 z + ... + a_n z^n.
/// The coefficient vector never has trailing zeros except for the zero
/// polynomial, which is stored as {0} with degree 0.
class Polynomial {
  public:
    Polynomial() : coeffs_{Complex(0.0)} {}

    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
        for (const Complex& c : coeffs_)
            if (!is_finite(c)) throw std::invalid_argument("non-finite polynomial coefficient");
        normalize();
    }

    static Polynomial constant(Complex c) { return Polynomial(std::vector<Complex>{c}); }

    /// The monomial z.
    static Polynomial identity() { return Polynomial({Complex(0.0), Complex(1.0)}); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0.0); }

    /// a_k, zero for k outside the stored range.
    Complex coeff(int k) const {
        if (k < 0 || k >= static_cast<int>(coeffs_.size())) return Complex(0.0);
        return coeffs_[static_cast<std::size_t>(k)];
    }
    Complex leading() const { return coeffs_.back(); }
    const std::vector<Complex>& coeffs() const { return coeffs_; }

    /// Horner evaluation.
    Complex operator()(Complex z) const {
        Complex acc = coeffs_.back();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
        return acc;
    }

    /// Value and derivative in one Horner pass.
    std::pair<Complex, Complex> eval_with_derivative(Complex z) const {
        Complex v = coeffs_.back();
        Complex d(0.0);
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            d = d * z + v;
            v = v * z + coeffs_[k];
        }
        return {v, d};
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial();
        std::vector<Complex> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return Polynomial(std::move(d));
    }

    bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }

  private:
    void normalize() {
        while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
        if (coeffs_.empty()) coeffs_.push_back(Complex(0.0));
    }

    std::vector<Complex> coeffs_;
};

inline Polynomial multiply(const Polynomial& p, const Polynomial& q) {
    if (p.is_zero() || q.is_zero()) return Polynomial();
    std::vector<Complex> c(static_cast<std::size_t>(p.degree() + q.degree()) + 1, Complex(0.0));
    for (int i = 0; i <= p.degree(); ++i)
        for (int j = 0; j <= q.degree(); ++j)
            c[static_cast<std::size_t>(i + j)] += p.coeff(i) * q.coeff(j);
    return Polynomial(std::move(c));
}

inline Polynomial operator*(const Polynomial& p, const Polynomial& q) { return multiply(p, q); }

/// Coefficients of p(q(z)).  Refuses products whose degree would exceed
/// `degree_cap`; deep iterates must be evaluated pointwise instead.
inline Polynomial compose(const Polynomial& p, const Polynomial& q, int degree_cap = 4096) {
    if (p.degree() > 0 && q.degree() > 0 &&
        static_cast<long>(p.degree()) * q.degree() > degree_cap)
        throw compose_overflow("iterate too large -- evaluate pointwise instead");
    Polynomial acc = Polynomial::constant(p.coeff(p.degree()));
    for (int k = p.degree() - 1; k >= 0; --k) {
        acc = multiply(acc, q);
        std::vector<Complex> c = acc.coeffs();
        c[0] += p.coeff(k);
        acc = Polynomial(std::move(c));
    }
    return acc;
}

/// Cauchy-type bound: |z| > escape_radius implies |p(z)| > |z|, so iterates
/// diverge.  Only meaningful for degree >= 2; lower degrees get +inf.
inline double escape_radius(const Polynomial& p) {
    if (p.degree() < 2) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (int k = 0; k < p.degree(); ++k) s += std::abs(p.coeff(k));
    return std::max(2.0, (1.0 + s) / std::abs(p.leading()));
}

struct IterateResult {
    Complex value;
    bool escaped = false;  // |value| crossed the escape radius before completing k steps
    int steps = 0;
};

/// k-fold pointwise iteration p(p(...p(z))).  Never composes coefficients.
inline IterateResult iterate_eval(const Polynomial& p, Complex z, int k) {
    if (k < 0) throw std::invalid_argument("iterate_eval: negative iteration count");
    const double esc = escape_radius(p);
    IterateResult r{z, false, 0};
    for (int i = 0; i < k; ++i) {
        if (std::abs(r.value) > esc) {
            r.escaped = true;
            return r;
        }
        r.value = p(r.value);
        r.steps = i + 1;
    }
    if (std::abs(r.value) > esc && k > 0) r.escaped = true;
    return r;
}

namespace detail {

inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

class PolyParser {
  public:
    explicit PolyParser(std::string_view text) : text_(text) {}

    Polynomial parse() {
        std::vector<Complex> coeffs;
        skip_ws();
        bool first = true;
        while (true) {
            double sign = 1.0;
            if (first) {
                if (accept('-')) sign = -1.0;
                else accept('+');
            } else {
                skip_ws();
                if (pos_ >= text_.size()) break;
                if (accept('-')) sign = -1.0;
                else if (accept('+')) sign = 1.0;
                else fail("expected '+' or '-' between terms");
            }
            auto [c, k] = parse_term();
            if (k >= static_cast<int>(coeffs.size())) coeffs.resize(static_cast<std::size_t>(k) + 1, Complex(0.0));
            coeffs[static_cast<std::size_t>(k)] += sign * c;
            first = false;
            skip_ws();
            if (pos_ >= text_.size()) break;
        }
        if (first) fail("empty polynomial");
        return Polynomial(std::move(coeffs));
    }

  private:
    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    // term := coeff? ('z' ('^' uint)?)?   (at least one of the two parts)
    std::pair<Complex, int> parse_term() {
        Complex c(1.0);
        bool have_coeff = false;
        char ch = peek();
        if (ch == '(' || ch == 'i' || ch == '.' || std::isdigit(static_cast<unsigned char>(ch))) {
            c = parse_coeff();
            have_coeff = true;
        }
        int k = 0;
        if (accept('z')) {
            k = 1;
            if (accept('^')) k = parse_uint();
        } else if (!have_coeff) {
            fail("expected coefficient or 'z'");
        }
        return {c, k};
    }

    Complex parse_coeff() {
        if (accept('(')) {
            double re_sign = accept('-') ? -1.0 : 1.0;
            double re = parse_real();
            double im_sign = 1.0;
            if (accept('-')) im_sign = -1.0;
            else if (!accept('+')) fail("expected '+' or '-' inside complex literal");
            Complex im_part = parse_imag();
            if (!accept(')')) fail("expected ')'");
            return Complex(re_sign * re, im_sign * im_part.imag());
        }
        if (peek() == 'i') {
            ++pos_;
            return Complex(0.0, 1.0);
        }
        double x = parse_real();
        if (peek() == 'i') {
            ++pos_;
            return Complex(0.0, x);
        }
        return Complex(x, 0.0);
    }

    // imag := real? 'i'
    Complex parse_imag() {
        if (peek() == 'i') {
            ++pos_;
            return Complex(0.0, 1.0);
        }
        double x = parse_real();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != 'i') fail("expected 'i'");
        ++pos_;
        return Complex(0.0, x);
    }

    double parse_real() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
            fail("expected number");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // trailing 'e' belongs to something else
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc()) fail("unreadable number");
        return value;
    }

    int parse_uint() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected exponent");
        int value = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc()) fail("exponent out of range");
        return value;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Grammar: expression := term (('+'|'-') term)*; term := coeff? ('z' ('^' uint)?)?;
/// coeff := real | imag | '(' real ('+'|'-') imag ')'; imag := real? 'i'.
/// Whitespace is ignored; a leading sign on the first term is accepted.
inline Polynomial parse_polynomial(std::string_view text) {
    return detail::PolyParser(text).parse();
}

/// Canonical display form, highest-degree term first, e.g. "iz^4 - 2iz^2 - (0.5+0.5i)z".
inline std::string format_polynomial(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int k = p.degree(); k >= 0; --k) {
        Complex c = p.coeff(k);
        if (c == Complex(0.0)) continue;
        bool negate = c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0);
        if (out.empty()) {
            if (negate) out += "-";
        } else {
            out += negate ? " - " : " + ";
        }
        if (negate) c = -c;
        std::string mag;
        if (c.imag() == 0.0) {
            mag = detail::format_real(c.real());
        } else if (c.real() == 0.0) {
            mag = (c.imag() == 1.0) ? "i" : detail::format_real(c.imag()) + "i";
        } else {
            mag = "(" + detail::format_real(c.real()) + (c.imag() < 0.0 ? "-" : "+") +
                  detail::format_real(std::abs(c.imag())) + "i)";
        }
        if (k == 0) {
            out += mag;
        } else {
            if (mag != "1") out += mag;
            out += (k == 1) ? "z" : "z^" + std::to_string(k);
        }
    }
    return out;
}

}  // namespace fatou
