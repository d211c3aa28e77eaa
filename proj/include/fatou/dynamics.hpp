#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fatou/polynomial.hpp"

namespace fatou {

// Raised when a polynomial fails the standing hypothesis: fixed point at the
// origin with derivative modulus below one.
class hypothesis_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when rejection sampling cannot find enough basin points.
class sampling_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FixedPointReport {
    double derivative_modulus = 0.0;
    bool fixes_zero = false;
    bool attracting = false;
    double contraction_radius = 0.0;
    double contraction_factor = 0.0;
};

namespace detail {

// |a_1| + sum_{k>=2} |a_k| r^{k-1}; an upper bound for |P(z)|/|z| on |z| <= r.
inline double contraction_bound(const Polynomial& p, double r) {
    double s = std::abs(p.coeff(1));
    double rk = r;
    for (int k = 2; k <= p.degree(); ++k) {
        s += std::abs(p.coeff(k)) * rk;
        rk *= r;
    }
    return s;
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Exact membership tests on the coefficients, then a certified contraction
// disk: the largest bisection-grid radius r with
// |a_1| + sum_{k>=2} |a_k| r^{k-1} <= q_max. The threshold is 0.95, relaxed
// to (1+|a_1|)/2 when the derivative modulus already exceeds 0.95 so that an
// attracting map always gets a positive radius.
inline FixedPointReport analyze_fixed_point(const Polynomial& p) {
    FixedPointReport rep;
    rep.fixes_zero = p.coeff(0) == Complex(0.0);
    rep.derivative_modulus = std::abs(p.coeff(1));
    rep.attracting = rep.fixes_zero && rep.derivative_modulus < 1.0;
    if (!rep.attracting) return rep;

    const double q_max = std::max(0.95, 0.5 * (1.0 + rep.derivative_modulus));
    const double cap = 16.0;
    if (detail::contraction_bound(p, cap) <= q_max) {
        rep.contraction_radius = cap;
    } else {
        double lo = 0.0;
        double hi = cap;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (detail::contraction_bound(p, mid) <= q_max ? lo : hi) = mid;
        }
        rep.contraction_radius = lo;
    }
    rep.contraction_factor = detail::contraction_bound(p, rep.contraction_radius);
    return rep;
}

enum class Verdict { in_basin, escaped, undecided };

struct PointClass {
    Verdict verdict = Verdict::undecided;
    int iterations_used = 0;
    double final_modulus = 0.0;
};

// Iterates until the orbit enters the certified contraction disk (in_basin),
// exceeds the escape radius (escaped), or the budget runs out (undecided).
inline PointClass classify_point(const Polynomial& p, const FixedPointReport& report,
                                 Complex z, int budget = 512) {
    const double r_esc = escape_radius(p);
    const double r_in = report.contraction_radius;
    for (int used = 0;; ++used) {
        const double m = std::abs(z);
        if (m > r_esc || std::isnan(m)) return {Verdict::escaped, used, m};
        if (m <= r_in) return {Verdict::in_basin, used, m};
        if (used == budget) return {Verdict::undecided, used, m};
        z = p(z);
    }
}

inline PointClass classify_point(const Polynomial& p, Complex z, int budget = 512) {
    return classify_point(p, analyze_fixed_point(p), z, budget);
}

struct BoundingBox {
    double re_min = -2.0;
    double re_max = 2.0;
    double im_min = -2.0;
    double im_max = 2.0;

    [[nodiscard]] bool valid() const {
        return std::isfinite(re_min) && std::isfinite(re_max) && std::isfinite(im_min) &&
               std::isfinite(im_max) && re_min < re_max && im_min < im_max;
    }
};

struct RasterSpec {
    int width = 512;
    int height = 512;
    BoundingBox bbox;
    int budget = 512;
};

struct BasinRaster {
    int width = 0;
    int height = 0;
    BoundingBox bbox;
    std::vector<PointClass> cells;  // row-major, top row at im_max
};

namespace detail {

inline int render_thread_count() {
    if (const char* env = std::getenv("FATOU_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 256) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 32u));
}

}  // namespace detail

// Classifies every pixel center. Rows are distributed over a small thread
// pool; each cell depends only on its own center, so the raster is identical
// for any thread count.
inline BasinRaster render_basin(const Polynomial& p, const RasterSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0)
        throw std::invalid_argument("render_basin: raster dimensions must be positive");
    if (!spec.bbox.valid())
        throw std::invalid_argument("render_basin: bounding box is degenerate");
    const FixedPointReport report = analyze_fixed_point(p);
    if (!report.attracting)
        throw hypothesis_error("render_basin: fixed point at 0 is not attracting");

    BasinRaster raster;
    raster.width = spec.width;
    raster.height = spec.height;
    raster.bbox = spec.bbox;
    raster.cells.resize(static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));

    const double dx = (spec.bbox.re_max - spec.bbox.re_min) / spec.width;
    const double dy = (spec.bbox.im_max - spec.bbox.im_min) / spec.height;
    auto render_row = [&](int i) {
        const double y = spec.bbox.im_max - (i + 0.5) * dy;
        PointClass* row = raster.cells.data() + static_cast<std::size_t>(i) * spec.width;
        for (int j = 0; j < spec.width; ++j) {
            const double x = spec.bbox.re_min + (j + 0.5) * dx;
            row[j] = classify_point(p, report, Complex(x, y), spec.budget);
        }
    };

    const int threads = std::min(detail::render_thread_count(), spec.height);
    if (threads <= 1) {
        for (int i = 0; i < spec.height; ++i) render_row(i);
    } else {
        std::atomic<int> next_row{0};
        auto work = [&] {
            for (;;) {
                const int i = next_row.fetch_add(1, std::memory_order_relaxed);
                if (i >= spec.height) return;
                render_row(i);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads) - 1);
        for (int t = 0; t < threads - 1; ++t) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
    }
    return raster;
}

// Binary PGM, maxval 255: 255 = in_basin, 0 = escaped, 128 = undecided.
inline std::string to_pgm(const BasinRaster& raster) {
    std::string out = "P5\n" + std::to_string(raster.width) + " " +
                      std::to_string(raster.height) + "\n255\n";
    out.reserve(out.size() + raster.cells.size());
    for (const PointClass& cell : raster.cells) {
        switch (cell.verdict) {
            case Verdict::in_basin: out.push_back(static_cast<char>(255)); break;
            case Verdict::escaped: out.push_back(static_cast<char>(0)); break;
            case Verdict::undecided: out.push_back(static_cast<char>(128)); break;
        }
    }
    return out;
}

// Seeded rejection sampling of basin points over the bounding box. The origin
// is always the first point; the remainder are accepted draws. Deterministic
// per seed.
inline std::vector<Complex> sample_basin(const Polynomial& p, int count, std::uint64_t seed,
                                         const BoundingBox& bbox = {}, int budget = 512) {
    if (count < 0) throw std::invalid_argument("sample_basin: count must be nonnegative");
    if (!bbox.valid()) throw std::invalid_argument("sample_basin: bounding box is degenerate");
    const FixedPointReport report = analyze_fixed_point(p);
    if (!report.attracting)
        throw hypothesis_error("sample_basin: fixed point at 0 is not attracting");

    std::vector<Complex> points;
    if (count == 0) return points;
    points.reserve(static_cast<std::size_t>(count));
    points.emplace_back(0.0);

    std::mt19937_64 rng(seed);
    const long attempts_budget = std::max(1000L, 400L * count);
    long attempts = 0;
    while (points.size() < static_cast<std::size_t>(count) && attempts < attempts_budget) {
        ++attempts;
        const double x = bbox.re_min + detail::uniform01(rng) * (bbox.re_max - bbox.re_min);
        const double y = bbox.im_min + detail::uniform01(rng) * (bbox.im_max - bbox.im_min);
        const Complex z(x, y);
        if (classify_point(p, report, z, budget).verdict == Verdict::in_basin)
            points.push_back(z);
    }
    if (points.size() < static_cast<std::size_t>(count))
        throw sampling_error("sample_basin: found " + std::to_string(points.size()) + " of " +
                             std::to_string(count) + " points in " + std::to_string(attempts) +
                             " attempts; basin too thin in bounding box");
    return points;
}

}  // namespace fatou
