#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rubs/engine.hpp"
#include "rubs/errors.hpp"
#include "rubs/oracle.hpp"
#include "rubs/scale_solver.hpp"

using namespace rubs;

namespace {

ImagePlane random_image(int w, int h, uint64_t seed, double lo = -1, double hi = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ImagePlane f(w, h);
    for (double& v : f.samples) v = u(rng);
    return f;
}

ImagePlane impulse(int w, int h, int x, int y) {
    ImagePlane f(w, h);
    f.at(x, y) = 1.0;
    return f;
}

double max_abs_diff(const ImagePlane& a, const ImagePlane& b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
    return m;
}

// Undo the four running sums in reverse order.
std::vector<double> difference(const IntegratedImage& F) {
    const int w = F.width(), h = F.height();
    std::vector<double> g = F.data();
    auto at = [&](int x, int y) -> double& { return g[static_cast<size_t>(y) * w + x]; };
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x) {
            if (y > 0 && x + 1 < w) at(x, y) -= at(x + 1, y - 1);
            at(x, y) /= kSqrt2;
        }
    for (int y = h - 1; y > 0; --y)
        for (int x = 0; x < w; ++x) at(x, y) -= at(x, y - 1);
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x) {
            if (y > 0 && x > 0) at(x, y) -= at(x - 1, y - 1);
            at(x, y) /= kSqrt2;
        }
    for (int y = 0; y < h; ++y)
        for (int x = w - 1; x > 0; --x) at(x, y) -= at(x - 1, y);
    return g;
}

}  // namespace

TEST(FDMesh, ZwartPowellHasNoShift) {
    const FDMesh m = fd_mesh(ScaleVector::base());
    EXPECT_NEAR(m.tau.x, 0.0, 1e-15);
    EXPECT_NEAR(m.tau.y, 0.0, 1e-15);
    for (int i = 0; i < 16; ++i) EXPECT_NEAR(std::abs(m.weight[i]), 0.5, 1e-15);
}

TEST(FDMesh, DoubledBaseVertices) {
    const FDMesh m = fd_mesh(ScaleVector(2, 2 * kSqrt2, 2, 2 * kSqrt2));
    EXPECT_NEAR(m.weight[0], 1.0 / 32, 1e-16);
    EXPECT_NEAR(m.vertex[15].x, 2.0, 1e-14);
    EXPECT_NEAR(m.vertex[15].y, 6.0, 1e-14);
    EXPECT_NEAR(m.vertex[1].x, 2.0, 1e-15);
    EXPECT_NEAR(m.vertex[8].x, -2.0, 1e-14);
    EXPECT_NEAR(m.vertex[8].y, 2.0, 1e-14);
}

TEST(FDMesh, WeightsSumToZero) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 5);
    for (int i = 0; i < 100; ++i) {
        const FDMesh m = fd_mesh(ScaleVector(u(rng), u(rng), u(rng), u(rng)));
        double s = 0;
        int neg = 0;
        for (double w : m.weight) s += w, neg += w < 0;
        EXPECT_NEAR(s, 0.0, 1e-12 * std::abs(m.weight[0]));
        EXPECT_EQ(neg, 8);
    }
}

TEST(Preintegrate, ZeroAndInverse) {
    const IntegratedImage z = preintegrate(ImagePlane(9, 7), 3);
    for (double v : z.data()) EXPECT_EQ(v, 0.0);
    const ImagePlane f = random_image(11, 9, 2);
    const int pad = 4;
    const IntegratedImage F = preintegrate(f, pad);
    EXPECT_EQ(F.x0(), -pad);
    EXPECT_EQ(F.width(), 11 + 2 * pad);
    const std::vector<double> g = difference(F);
    for (int y = 0; y < F.height(); ++y)
        for (int x = 0; x < F.width(); ++x) {
            const int ix = x - pad, iy = y - pad;
            const bool in = ix >= 0 && ix < f.width && iy >= 0 && iy < f.height;
            EXPECT_NEAR(g[static_cast<size_t>(y) * F.width() + x], in ? f.at(ix, iy) : 0.0, 1e-12);
        }
}

TEST(Preintegrate, Linearity) {
    const ImagePlane f = random_image(16, 12, 3), h = random_image(16, 12, 4);
    ImagePlane c(16, 12);
    for (size_t i = 0; i < c.size(); ++i) c.samples[i] = 2.5 * f.samples[i] - 0.75 * h.samples[i];
    const auto Ff = preintegrate(f, 2), Fh = preintegrate(h, 2), Fc = preintegrate(c, 2);
    for (size_t i = 0; i < Fc.data().size(); ++i) {
        const double e = 2.5 * Ff.data()[i] - 0.75 * Fh.data()[i];
        EXPECT_NEAR(Fc.data()[i], e, 1e-9 * (1 + std::abs(e)));
    }
}

TEST(Preintegrate, Guards) {
    ImagePlane f(4, 4, 1e16);
    EXPECT_THROW(preintegrate(f), PrecisionError);
    f = ImagePlane(4, 4);
    f.at(1, 1) = std::nan("");
    EXPECT_THROW(preintegrate(f), DomainError);
}

TEST(Engine, ImpulseResponseIsSampledKernel) {
    const ScaleVector a(2.3, 1.1, 0.9, 3.2);
    const ImagePlane out = filter_space_invariant(impulse(33, 33, 16, 16), a);
    for (int y = 0; y < 33; ++y)
        for (int x = 0; x < 33; ++x)
            EXPECT_NEAR(out.at(x, y), oracle::box_spline4_spatial(a, {x - 16.0, y - 16.0}), 1e-12);
    const auto lk = oracle::lattice_kernel(a, 1, 256);
    for (int y = 0; y < 33; ++y)
        for (int x = 0; x < 33; ++x) EXPECT_NEAR(out.at(x, y), lk.at(x - 16, y - 16), 1e-6);
}

TEST(Engine, SpaceInvariantMatchesDenseConvolution) {
    const ImagePlane f = random_image(64, 64, 5);
    const ScaleVector a = optimize_scale_vector(EllipseParams(3, 2.5, 0.4));
    const ImagePlane fast = filter_space_invariant(f, a);
    EXPECT_LT(max_abs_diff(fast, oracle::dense_convolve(f, oracle::lattice_kernel_spatial(a))), 1e-10);
}

TEST(Engine, SpaceVariantMatchesDenseConvolution) {
    const int n = 40;
    const ImagePlane f = random_image(n, n, 6);
    const ScaleField S = ScaleField::from_function(n, n, [&](int x, int y) {
        const double th = wrap_orientation(0.1 + 2.0 * x / n);
        const double s = 1.0 + 3.0 * y / n;
        return optimize_scale_vector(EllipseParams(s, 2.0, th));
    });
    FilterOptions opt;
    const ScaleField Sf = ScaleField::from_function(n, n, [&](int x, int y) {
        std::array<double, 4> v = S.at(x, y).values();
        for (double& c : v) c = std::max(c, opt.scale_floor);
        return ScaleVector(v);
    });
    const ImagePlane fast = filter_space_variant(f, S, opt);
    EXPECT_LT(max_abs_diff(fast, oracle::dense_convolve_sv(f, Sf, oracle::KernelSource::Spatial)), 1e-10);
}

TEST(Engine, UniformFieldIsBitwiseSpaceInvariant) {
    const ImagePlane f = random_image(50, 37, 7);
    const ScaleVector a(1.7, 0.8, 2.2, 1.3);
    const ImagePlane si = filter_space_invariant(f, a);
    const ImagePlane sv = filter_space_variant(f, ScaleField::uniform(50, 37, a));
    EXPECT_EQ(si.samples, sv.samples);
}

TEST(Engine, ConstantImage) {
    const ScaleVector a = optimize_scale_vector(EllipseParams(4, 3, 0.3));
    FilterOptions opt;
    opt.normalize = true;
    const ImagePlane out = filter_space_invariant(ImagePlane(40, 40, 7.0), a, opt);
    for (double v : out.samples) EXPECT_NEAR(v, 7.0, 1e-10);
    // Without normalization the interior gain is the lattice sum of the kernel.
    const ImagePlane raw = filter_space_invariant(ImagePlane(40, 40, 1.0), a);
    EXPECT_NEAR(raw.at(20, 20), oracle::lattice_sum(a, {0.0, 0.0}), 1e-12);
}

TEST(Engine, DeterministicAcrossThreadCounts) {
    const ImagePlane f = random_image(70, 45, 8);
    const ScaleField S = ScaleField::from_function(70, 45, [](int x, int y) {
        return ScaleVector(1 + 0.03 * x, 1.2, 0.6 + 0.02 * y, 2.0);
    });
    FilterOptions o1, o4;
    o1.threads = 1;
    o4.threads = 4;
    EXPECT_EQ(filter_space_variant(f, S, o1).samples, filter_space_variant(f, S, o4).samples);
}

TEST(Engine, IterationsUseScaledVectors) {
    const ImagePlane f = random_image(30, 30, 9);
    const ScaleVector a(2.0, 1.5, 2.5, 1.0);
    const ImagePlane twice = filter_space_invariant(
        filter_space_invariant(f, a.scaled(1 / std::sqrt(2.0))), a.scaled(1 / std::sqrt(2.0)));
    EXPECT_LT(max_abs_diff(filter_space_invariant(f, a, 2), twice), 1e-13);
}

TEST(Engine, TinyScalesApproachIdentity) {
    const ImagePlane f = random_image(20, 20, 10, 0, 255);
    const ScaleVector a = ScaleVector::uniform(1e-3);
    FilterOptions o;
    o.normalize = true;
    const ImagePlane out = filter_space_invariant(f, a, o);
    // Weights of 1/prod(a) ~ 1.6e5 cost a few digits to cancellation.
    for (size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(out.samples[i], f.samples[i], 1e-4);
    // The raw sum carries the lattice sum of the floored kernel, which for a
    // near-delta kernel is its peak value.
    const ImagePlane raw = filter_space_invariant(f, a);
    const double gain = oracle::lattice_sum(ScaleVector::uniform(0.05), {0.0, 0.0});
    EXPECT_GT(gain, 100.0);
    EXPECT_NEAR(raw.at(10, 10), gain * f.at(10, 10), 1e-9 * gain * 255);
}

TEST(Engine, Errors) {
    const ImagePlane f(10, 10);
    FilterOptions opt;
    opt.max_support_radius = 3;
    try {
        filter_space_variant(f, ScaleField::uniform(10, 10, ScaleVector::uniform(10)), opt);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("pixel (0, 0)"), std::string::npos);
    }
    EXPECT_THROW(filter_space_variant(f, ScaleField::uniform(9, 10, ScaleVector::base())), DomainError);
    opt = {};
    opt.iterations = 0;
    EXPECT_THROW(filter_space_invariant(f, ScaleVector::base(), opt), DomainError);
}

TEST(SupportMask, InteriorOnly) {
    const auto mask = support_inside_mask(ScaleField::uniform(10, 10, ScaleVector::base()));
    EXPECT_EQ(mask[0], 0);
    EXPECT_EQ(mask[5 * 10 + 5], 1);
    EXPECT_EQ(mask[2 * 10 + 2], 1);
    EXPECT_EQ(mask[1 * 10 + 5], 0);
}

TEST(Average1D, UnitScaleIsIdentity) {
    std::vector<double> f{3, -1, 4, 1, -5, 9, 2, 6};
    EXPECT_EQ(average_1d(f, std::vector<double>(f.size(), 1.0)), f);
}

TEST(Average1D, ImpulseAndBruteForce) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1), ua(0.2, 6.5);
    const int n = 60;
    std::vector<double> f(n), a(n);
    for (int i = 0; i < n; ++i) f[i] = u(rng), a[i] = ua(rng);
    const std::vector<double> out = average_1d(f, a);
    for (int i = 0; i < n; ++i) {
        // sum_k f[k] beta_a(i - k) with beta_a = 1/a on a half-open unit-mass window.
        double acc = 0;
        for (int k = 0; k < n; ++k) {
            const double d = i - k;
            if (d >= -a[i] / 2 && d < a[i] / 2) acc += f[k] / a[i];
        }
        EXPECT_NEAR(out[i], acc, 1e-12);
    }
    std::vector<double> imp(21, 0.0);
    imp[10] = 1.0;
    const std::vector<double> r = average_1d(imp, std::vector<double>(21, 3.0));
    for (int i = 0; i < 21; ++i) EXPECT_NEAR(r[i], std::abs(i - 10) <= 1 ? 1.0 / 3 : 0.0, 1e-15);
}
