#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rubs/bench.hpp"
#include "rubs/engine.hpp"
#include "rubs/errors.hpp"
#include "rubs/geometry.hpp"
#include "rubs/image_io.hpp"
#include "rubs/oracle.hpp"
#include "rubs/scale_solver.hpp"
#include "rubs/structure_tensor.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kDomain = 3, kInternal = 4 };

struct OutputSpec {
    std::string path;
    std::string format = "auto";
    int maxval = 255;
};

void add_output_flags(CLI::App* cmd, OutputSpec& o) {
    cmd->add_option("-o,--output", o.path, "Output file")->required();
    cmd->add_option("--format", o.format, "auto, pgm or rf64 (auto: by extension)")
        ->check(CLI::IsMember({"auto", "pgm", "rf64"}));
    cmd->add_option("--maxval", o.maxval, "PGM maximum value")->check(CLI::Range(1, 65535));
}

bool wants_pgm(const OutputSpec& o) {
    if (o.format != "auto") return o.format == "pgm";
    const auto dot = o.path.rfind('.');
    if (dot == std::string::npos) return false;
    std::string ext = o.path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == "pgm";
}

void write_output(const OutputSpec& o, const rubs::ImagePlane& f) {
    if (wants_pgm(o))
        rubs::write_pgm(o.path, rubs::quantize(f, o.maxval));
    else
        rubs::write_raw_f64(o.path, f);
}

struct Geometry {
    double s = 1.0, rho = 1.0, theta = 0.0;
    int m = 1;
    double eps = rubs::kDefaultEpsilon;
};

void add_geometry_flags(CLI::App* cmd, Geometry& g) {
    cmd->add_option("-s,--size", g.s, "Kernel size s (trace of the covariance, pixels^2)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("-r,--rho", g.rho, "Elongation (eigenvalue ratio, >= 1)");
    cmd->add_option("-t,--theta", g.theta, "Major-axis orientation in radians");
    cmd->add_option("-m,--iterations", g.m, "Number of box-spline iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--eps", g.eps, "Lower bound on squared scales")->check(CLI::PositiveNumber);
}

rubs::EllipseParams params_of(const Geometry& g) {
    return rubs::EllipseParams(g.s, g.rho, rubs::wrap_orientation(g.theta));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string vec_str(const rubs::ScaleVector& a) {
    return "(" + fmt(a[0]) + ", " + fmt(a[1]) + ", " + fmt(a[2]) + ", " + fmt(a[3]) + ")";
}

int cmd_render_kernel(const Geometry& g, double step, int size, const OutputSpec& out) {
    const rubs::ScaleVector a = rubs::optimize_scale_vector(params_of(g), g.eps);
    const rubs::GeneralBoxSplineSpec spec(a.scaled(1.0 / std::sqrt(static_cast<double>(g.m))), g.m);
    const rubs::Vec2 ext = rubs::oracle::support_half_extent(spec);
    const double half = std::max(ext.x, ext.y);
    if (step <= 0.0) step = 2.5 * half / size;
    const rubs::oracle::SampledKernel k = rubs::oracle::synthesize_kernel(spec, step, size);
    double peak = 0.0;
    for (double v : k.values) peak = std::max(peak, v);
    rubs::ImagePlane img(size, size);
    // Image rows run downwards; the kernel's y axis points up.
    const double top = wants_pgm(out) ? out.maxval : 1.0;
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i)
            img.at(i, size - 1 - j) = std::max(0.0, k.at(i, j)) / peak * top;
    write_output(out, img);
    std::cerr << "scale-vector " << vec_str(a) << ", step " << fmt(step) << "\n";
    return kOk;
}

rubs::ScaleVector scale_vector_for(const Geometry& g, const std::string& lut_path) {
    const rubs::EllipseParams p = params_of(g);
    if (lut_path.empty()) return rubs::optimize_scale_vector(p, g.eps);
    const rubs::ScaleLUT lut = rubs::ScaleLUT::load(lut_path);
    try {
        return lut.lookup(p.s, p.rho, p.theta);
    } catch (const rubs::OutOfGrid&) {
        return rubs::optimize_scale_vector(p, lut.epsilon());
    }
}

int cmd_filter(const std::string& input, const Geometry& g, const std::string& lut_path,
               bool normalize, double floor, const OutputSpec& out) {
    const rubs::ImagePlane f = rubs::read_image(input);
    const rubs::ScaleVector a = scale_vector_for(g, lut_path);
    rubs::FilterOptions fo;
    fo.iterations = g.m;
    fo.normalize = normalize;
    fo.scale_floor = floor;
    write_output(out, rubs::filter_space_invariant(f, a, fo));
    return kOk;
}

int cmd_adapt(const std::string& input, double window_sigma, double noise_sigma, int m,
              const std::string& lut_path, const OutputSpec& out) {
    const rubs::ImagePlane f = rubs::read_image(input);
    rubs::AdaptiveOptions opt;
    std::optional<rubs::ScaleLUT> lut;
    if (!lut_path.empty()) {
        lut = rubs::ScaleLUT::load(lut_path);
        opt.lut = &*lut;
    }
    write_output(out, rubs::adaptive_smooth(f, window_sigma, noise_sigma, m, opt));
    return kOk;
}

int cmd_bench(const std::vector<double>& sizes, const rubs::BenchConfig& cfg) {
    const rubs::BenchResult r = rubs::bench_sizes(sizes, cfg);
    std::printf("%8s %12s %12s %12s\n", "size", "mean_ms", "min_ms", "max_ms");
    for (const auto& row : r.rows)
        std::printf("%8g %12.3f %12.3f %12.3f\n", row.s, row.mean_ms, row.min_ms, row.max_ms);
    std::printf("ratio %.4f\n", r.ratio);
    return kOk;
}

int cmd_stripes(int w, int h, double period, double angle, double psnr_db, std::uint64_t seed,
                const OutputSpec& out) {
    rubs::ImagePlane f = rubs::synthetic_stripes(w, h, period, angle);
    if (psnr_db > 0.0) f = rubs::add_noise_at_psnr(f, psnr_db, 255.0, seed);
    write_output(out, f);
    return kOk;
}

int cmd_lut_build(int n_rho, int n_phi, double rho_max, double eps, const std::string& path) {
    const rubs::ScaleLUT lut = rubs::ScaleLUT::build(rubs::ScaleLUT::default_rho_grid(n_rho, rho_max),
                                                     rubs::ScaleLUT::default_phi_grid(n_phi), eps);
    lut.save(path);
    return kOk;
}

int cmd_lut_inspect(const std::string& path, const std::optional<Geometry>& query) {
    const rubs::ScaleLUT lut = rubs::ScaleLUT::load(path);
    const auto& r = lut.rho_grid();
    const auto& p = lut.phi_grid();
    std::printf("version %u\n", rubs::ScaleLUT::kVersion);
    std::printf("rho %zu points [%.10g, %.10g]\n", r.size(), r.front(), r.back());
    std::printf("phi %zu points [%.10g, %.10g]\n", p.size(), p.front(), p.back());
    std::printf("eps %.10g\n", lut.epsilon());
    if (query) {
        const rubs::EllipseParams e = params_of(*query);
        const rubs::ScaleVector a = lut.lookup(e.s, e.rho, e.theta);
        std::printf("lookup %s\n", vec_str(a).c_str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-variant elliptical filtering with four-directional box splines"};
    app.require_subcommand(1);

    Geometry g;
    OutputSpec out;
    std::string input, lut_path;
    double step = 0.0;
    int size = 256;
    bool raw = false;
    double floor = 0.05;
    double window_sigma = 2.0, noise_sigma = 1.0;
    std::vector<double> sizes{1, 2, 4, 8, 16};
    rubs::BenchConfig bench;
    int n_rho = 64, n_phi = 64;
    double rho_max = 5.8;
    bool query = false;
    int sw = 256, sh = 256;
    double period = 8.0, angle = 0.5235987755982988, psnr_db = 0.0;
    std::uint64_t seed = 7;

    auto* render = app.add_subcommand("render-kernel", "Render the optimized kernel for (s, rho, theta)");
    add_geometry_flags(render, g);
    render->add_option("--step", step, "Sample spacing in pixels (default: fit the support)");
    render->add_option("--width", size, "Output width and height (even)")
        ->check(CLI::Range(8, 8192));
    add_output_flags(render, out);

    auto* filter = app.add_subcommand("filter", "Space-invariant elliptical filtering");
    filter->add_option("input", input, "Input image (PGM or RF64)")->required();
    add_geometry_flags(filter, g);
    filter->add_option("--lut", lut_path, "Scale table (default: exact optimizer)");
    filter->add_flag("--raw", raw, "Skip the division by the filtered all-ones image");
    filter->add_option("--floor", floor, "Minimum scale per direction")->check(CLI::PositiveNumber);
    add_output_flags(filter, out);

    auto* adapt = app.add_subcommand("adapt", "Structure-tensor driven adaptive smoothing");
    adapt->add_option("input", input, "Input image (PGM or RF64)")->required();
    adapt->add_option("--window-sigma", window_sigma, "Structure-tensor window")
        ->check(CLI::PositiveNumber);
    adapt->add_option("--noise-sigma", noise_sigma, "Smoothing strength")->check(CLI::NonNegativeNumber);
    adapt->add_option("-m,--iterations", g.m, "Number of box-spline iterations")
        ->check(CLI::PositiveNumber);
    adapt->add_option("--lut", lut_path, "Scale table (default: built in memory)");
    add_output_flags(adapt, out);

    auto* benchc = app.add_subcommand("bench", "Time filtering for a sweep of kernel sizes");
    benchc->add_option("--sizes", sizes, "Kernel sizes s")->delimiter(',');
    benchc->add_option("--width", bench.width, "Image width")->check(CLI::PositiveNumber);
    benchc->add_option("--height", bench.height, "Image height")->check(CLI::PositiveNumber);
    benchc->add_option("--runs", bench.runs, "Timed runs per size (>= 5)")->check(CLI::Range(5, 100000));
    benchc->add_option("--warmup", bench.warmup, "Untimed runs per size")->check(CLI::NonNegativeNumber);
    benchc->add_option("--threads", bench.threads, "Worker threads (0: RUBS_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    benchc->add_option("--rho", bench.rho, "Elongation");
    benchc->add_option("--theta", bench.theta, "Orientation in radians");

    auto* lut_build = app.add_subcommand("lut-build", "Tabulate optimal scale-vectors");
    lut_build->add_option("--n-rho", n_rho, "Elongation samples")->check(CLI::Range(2, 100000));
    lut_build->add_option("--n-phi", n_phi, "Orientation samples on [0, pi/4]")->check(CLI::Range(2, 100000));
    lut_build->add_option("--rho-max", rho_max, "Largest tabulated elongation");
    lut_build->add_option("--eps", g.eps, "Lower bound on squared scales")->check(CLI::PositiveNumber);
    lut_build->add_option("-o,--output", out.path, "Output table")->required();

    auto* lut_inspect = app.add_subcommand("lut-inspect", "Print a table header and optionally look up a target");
    lut_inspect->add_option("table", lut_path, "Table file")->required();
    lut_inspect->add_flag("--query", query, "Look up (s, rho, theta)");
    lut_inspect->add_option("-s,--size", g.s, "Kernel size s")->check(CLI::PositiveNumber);
    lut_inspect->add_option("-r,--rho", g.rho, "Elongation");
    lut_inspect->add_option("-t,--theta", g.theta, "Orientation in radians");

    auto* stripes = app.add_subcommand("stripes", "Write the synthetic stripe test image (values 0..255)");
    stripes->add_option("--width", sw, "Image width")->check(CLI::PositiveNumber);
    stripes->add_option("--height", sh, "Image height")->check(CLI::PositiveNumber);
    stripes->add_option("--period", period, "Stripe period in pixels")->check(CLI::PositiveNumber);
    stripes->add_option("--angle", angle, "Wave-vector angle in radians");
    stripes->add_option("--psnr", psnr_db, "Add Gaussian noise at this PSNR in dB (0: none)");
    stripes->add_option("--seed", seed, "Noise seed");
    add_output_flags(stripes, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*render) {
            if (size % 2) throw rubs::DomainError("width must be even");
            return cmd_render_kernel(g, step, size, out);
        }
        if (*filter) return cmd_filter(input, g, lut_path, !raw, floor, out);
        if (*adapt) return cmd_adapt(input, window_sigma, noise_sigma, g.m, lut_path, out);
        if (*benchc) return cmd_bench(sizes, bench);
        if (*stripes) return cmd_stripes(sw, sh, period, angle, psnr_db, seed, out);
        if (*lut_build) return cmd_lut_build(n_rho, n_phi, rho_max, g.eps, out.path);
        if (*lut_inspect) return cmd_lut_inspect(lut_path, query ? std::optional<Geometry>(g) : std::nullopt);
    } catch (const rubs::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const rubs::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const rubs::PrecisionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
