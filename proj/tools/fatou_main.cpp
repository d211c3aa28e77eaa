// Command-line front end: classify dagger conditions, render basins, evaluate
// the product kernel, and certify candidate orthonormal bases.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fatou/dagger.hpp>
#include <fatou/dynamics.hpp>
#include <fatou/kernel.hpp>
#include <fatou/onb.hpp>
#include <fatou/polynomial.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

using fatou::Complex;
using ordered_json = nlohmann::ordered_json;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string poly;
    std::uint64_t seed = 42;
    int samples = 100;
    int width = 512;
    int height = 512;
    std::vector<double> bbox;
    int count = 8;
    std::string out;
    double tail_tol = 1e-10;
    double ridge = -1.0;
};

fatou::BoundingBox to_bbox(const std::vector<double>& v) {
    if (v.empty()) return {};
    fatou::BoundingBox box{v[0], v[1], v[2], v[3]};
    if (!box.valid())
        throw std::invalid_argument("bbox: expected re_min < re_max and im_min < im_max");
    return box;
}

// Output lands in one atomic step: temp file in the target directory, then
// rename. An empty path means stdout.
void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty()) {
        std::cout << bytes;
        if (!std::cout) throw io_error("write failed on stdout");
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw io_error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw io_error("cannot move output into place at " + path);
    }
    std::cerr << "wrote " << path << "\n";
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json cpair(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json scan_json(const fatou::DaggerReport& rep) {
    ordered_json s;
    s["system"] = fatou::system_name(rep.system);
    s["points"] = rep.points_tested;
    s["worst_deviation"] = rep.worst_deviation;
    s["failures"] = ordered_json::array();
    for (const fatou::ConditionWitness& w : rep.failures) {
        ordered_json f;
        f["c"] = cpair(w.point);
        f["sum_zeta"] = cpair(w.sum_zeta);
        f["sum_zeta_sq"] = cpair(w.sum_zeta_sq);
        f["sum_mod_sq"] = w.sum_mod_sq;
        s["failures"].push_back(std::move(f));
    }
    return s;
}

void scan_note(const fatou::DaggerReport& rep) {
    std::cerr << fatou::system_name(rep.system) << " scan: ";
    if (rep.failures.empty())
        std::cerr << "no counterexample found in " << rep.points_tested << " samples\n";
    else
        std::cerr << rep.failures.size() << " failing points in " << rep.points_tested
                  << " samples (worst deviation " << rep.worst_deviation << ")\n";
}

ordered_json classify_body(const fatou::Polynomial& p, const fatou::FixedPointReport& fp,
                           const Options& o) {
    ordered_json doc;
    doc["polynomial"] = fatou::format_polynomial(p);
    doc["degree"] = p.degree();
    doc["attracting"] = fp.attracting;
    doc["derivative_modulus"] = fp.derivative_modulus;
    const fatou::DdaggerCoeffs coeffs = fatou::check_ddagger_coeffs(p);
    if (!coeffs.in_scope)
        std::cerr << "note: the ddagger coefficient test needs degree >= 3; "
                     "reporting satisfied = false\n";
    doc["ddagger"] = {{"a_nm1_zero", coeffs.a_nm1_zero},
                      {"a_nm2_ok", coeffs.a_nm2_ok},
                      {"satisfied", coeffs.satisfied}};
    doc["scans"] = ordered_json::array();
    const fatou::BoundingBox box = to_bbox(o.bbox);
    for (fatou::ConditionSystem system :
         {fatou::ConditionSystem::dagger, fatou::ConditionSystem::ddagger}) {
        const fatou::DaggerReport rep = fatou::scan_basin(p, system, o.samples, o.seed, box);
        scan_note(rep);
        doc["scans"].push_back(scan_json(rep));
    }
    return doc;
}

ordered_json kernel_body(const fatou::Polynomial& p, const Options& o) {
    fatou::KernelEngine engine(p, {.tail_tol = o.tail_tol, .max_depth = 10000});
    const std::vector<Complex> pts = fatou::sample_basin(p, o.samples, o.seed, to_bbox(o.bbox));
    ordered_json doc;
    doc["polynomial"] = fatou::format_polynomial(p);
    doc["points"] = ordered_json::array();
    for (Complex z : pts) doc["points"].push_back(cpair(z));
    const fatou::GramMatrix gram = fatou::gram_matrix(engine, pts, o.ridge);
    ordered_json re = ordered_json::array();
    ordered_json im = ordered_json::array();
    for (Eigen::Index i = 0; i < gram.entries.rows(); ++i) {
        ordered_json row_re = ordered_json::array();
        ordered_json row_im = ordered_json::array();
        for (Eigen::Index j = 0; j < gram.entries.cols(); ++j) {
            row_re.push_back(gram.entries(i, j).real());
            row_im.push_back(gram.entries(i, j).imag());
        }
        re.push_back(std::move(row_re));
        im.push_back(std::move(row_im));
    }
    doc["entries_re"] = std::move(re);
    doc["entries_im"] = std::move(im);
    doc["ridge"] = gram.ridge;
    double max_residual = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
        max_residual = std::max(
            max_residual, fatou::functional_equation_check(engine, pts[i], pts[(i + 1) % n]));
    doc["functional_equation_max_residual"] = max_residual;
    doc["psd_min_eigenvalue"] = fatou::min_eigenvalue(gram);
    std::cerr << "kernel: " << n << " points, functional-equation residual " << max_residual
              << ", min eigenvalue " << doc["psd_min_eigenvalue"].get<double>() << "\n";
    return doc;
}

ordered_json onb_body(const fatou::Polynomial& p, const Options& o) {
    fatou::KernelEngine engine(p, {.tail_tol = o.tail_tol, .max_depth = 10000});
    const std::vector<fatou::BasisFunction> basis = fatou::build_basis(p, o.count);
    fatou::OnbOptions opts;
    opts.samples = o.samples;
    opts.seed = o.seed;
    opts.ridge = o.ridge;
    opts.bbox = to_bbox(o.bbox);
    const fatou::OnbCertification cert =
        fatou::certify_basis(engine, basis, fatou::kOnbDefectThreshold, opts);
    ordered_json doc;
    doc["polynomial"] = fatou::format_polynomial(p);
    doc["basis"] = ordered_json::array();
    for (const fatou::BasisFunction& b : basis) {
        ordered_json entry;
        entry["word"] = b.word.letters;
        entry["display"] = b.display;
        entry["degree"] = b.degree;
        doc["basis"].push_back(std::move(entry));
    }
    doc["gram_defect"] = cert.gram.defect;
    doc["samples"] = cert.gram.samples;
    doc["ridge"] = cert.gram.ridge;
    doc["verdict"] = fatou::verdict_name(cert.verdict);
    doc["conditions"] = {{"ddagger_satisfied", cert.coeffs.satisfied},
                         {"dagger_scan_points", cert.dagger_scan_points},
                         {"dagger_scan_failures", cert.dagger_scan_failures}};
    std::cerr << "onb: " << basis.size() << " elements, gram defect " << cert.gram.defect
              << ", verdict " << fatou::verdict_name(cert.verdict) << "\n";
    return doc;
}

fatou::FixedPointReport require_attracting(const fatou::Polynomial& p) {
    const fatou::FixedPointReport fp = fatou::analyze_fixed_point(p);
    if (!fp.fixes_zero)
        throw fatou::hypothesis_error("polynomial does not fix 0 (constant term is nonzero)");
    if (!fp.attracting)
        throw fatou::hypothesis_error("fixed point at 0 is not attracting: |R'(0)| = " +
                                      std::to_string(fp.derivative_modulus));
    return fp;
}

int cmd_classify(const fatou::Polynomial& p, const Options& o) {
    const fatou::FixedPointReport fp = require_attracting(p);
    write_output(o.out, dump(classify_body(p, fp, o)));
    return kExitOk;
}

int cmd_basin(const fatou::Polynomial& p, const Options& o) {
    fatou::RasterSpec spec;
    spec.width = o.width;
    spec.height = o.height;
    spec.bbox = to_bbox(o.bbox);
    const fatou::BasinRaster raster = fatou::render_basin(p, spec);
    write_output(o.out, fatou::to_pgm(raster));
    return kExitOk;
}

int cmd_kernel(const fatou::Polynomial& p, const Options& o) {
    ordered_json doc;
    try {
        doc = kernel_body(p, o);
    } catch (const fatou::tail_error& e) {
        doc["polynomial"] = fatou::format_polynomial(p);
        doc["error"] = e.what();
        write_output(o.out, dump(doc));
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    write_output(o.out, dump(doc));
    return kExitOk;
}

int cmd_onb(const fatou::Polynomial& p, const Options& o) {
    write_output(o.out, dump(onb_body(p, o)));
    return kExitOk;
}

int cmd_report(const fatou::Polynomial& p, const Options& o) {
    const fatou::FixedPointReport fp = require_attracting(p);
    ordered_json doc;
    doc["polynomial"] = fatou::format_polynomial(p);
    doc["classify"] = classify_body(p, fp, o);
    int rc = kExitOk;
    try {
        doc["kernel"] = kernel_body(p, o);
    } catch (const fatou::tail_error& e) {
        doc["kernel"] = ordered_json{{"error", e.what()}};
        rc = kExitNumeric;
    } catch (const fatou::solve_error& e) {
        doc["kernel"] = ordered_json{{"error", e.what()}};
        rc = kExitNumeric;
    }
    try {
        doc["onb"] = onb_body(p, o);
    } catch (const fatou::tail_error& e) {
        doc["onb"] = ordered_json{{"error", e.what()}};
        rc = kExitNumeric;
    } catch (const fatou::solve_error& e) {
        doc["onb"] = ordered_json{{"error", e.what()}};
        rc = kExitNumeric;
    }
    write_output(o.out, dump(doc));
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Toolkit for polynomial maps with an attracting fixed point at 0: dagger/ddagger "
        "classification, basin rendering, product-kernel evaluation, Cuntz-word bases"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "TOML config file with a [command] section per subcommand; give it before "
                   "the subcommand, flags override");
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--poly", o.poly, "Polynomial in z, e.g. \"0.5z^3 + 0.75z\"")->required();
        sub->add_option("--seed", o.seed, "Deterministic sampling seed")->capture_default_str();
        sub->add_option("--out", o.out, "Output path (default: stdout)");
        sub->add_option("--bbox", o.bbox,
                        "Sampling/render box as re_min,re_max,im_min,im_max (default -2,2,-2,2)")
            ->delimiter(',')
            ->expected(4);
        return sub;
    };
    auto add_samples = [&](CLI::App* sub) {
        sub->add_option("--samples", o.samples, "Number of basin sample points")
            ->capture_default_str();
        return sub;
    };
    auto add_kernel_opts = [&](CLI::App* sub) {
        sub->add_option("--tail-tol", o.tail_tol, "Kernel tail truncation tolerance")
            ->capture_default_str();
        sub->add_option("--ridge", o.ridge, "Gram ridge (negative: 1e-10 trace/m default)");
        return sub;
    };

    CLI::App* classify =
        add_samples(add_common(app.add_subcommand("classify", "Dagger condition report")));
    CLI::App* basin = add_common(app.add_subcommand("basin", "Render the basin to a PGM image"));
    basin->add_option("--width", o.width, "Raster width in pixels")->capture_default_str();
    basin->add_option("--height", o.height, "Raster height in pixels")->capture_default_str();
    basin->get_option("--out")->required();
    CLI::App* kernel = add_kernel_opts(
        add_samples(add_common(app.add_subcommand("kernel", "Sampled kernel Gram and checks"))));
    CLI::App* onb = add_kernel_opts(
        add_samples(add_common(app.add_subcommand("onb", "Basis enumeration and certification"))));
    onb->add_option("--count", o.count, "Number of basis elements")->capture_default_str();
    CLI::App* report = add_kernel_opts(add_samples(
        add_common(app.add_subcommand("report", "Bundle classify + kernel + onb in one JSON"))));
    report->add_option("--count", o.count, "Number of basis elements")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        const fatou::Polynomial p = fatou::parse_polynomial(o.poly);
        if (classify->parsed()) return cmd_classify(p, o);
        if (basin->parsed()) return cmd_basin(p, o);
        if (kernel->parsed()) return cmd_kernel(p, o);
        if (onb->parsed()) return cmd_onb(p, o);
        if (report->parsed()) return cmd_report(p, o);
        return kExitUsage;
    } catch (const fatou::parse_error& e) {
        std::cerr << "error: cannot parse polynomial: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fatou::hypothesis_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fatou::sampling_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
