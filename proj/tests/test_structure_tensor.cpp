#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rubs/errors.hpp"
#include "rubs/structure_tensor.hpp"

using namespace rubs;

namespace {

TensorField single(const Tensor2& j) {
    TensorField t;
    t.width = t.height = 1;
    t.window_sigma = 1;
    t.J = {j};
    return t;
}

Tensor2 rotated_diag(double l1, double l2, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return {l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
}

ImagePlane smooth_random(int w, int h, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 255);
    ImagePlane f(w, h);
    for (double& v : f.samples) v = u(rng);
    FilterOptions o;
    o.normalize = true;
    return filter_space_invariant(f, ScaleVector::uniform(3.0), o);
}

// g(x', y') = f(x, y) with x' = h - 1 - y, y' = x.
ImagePlane rotate90(const ImagePlane& f) {
    ImagePlane g(f.height, f.width);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) g.at(f.height - 1 - y, x) = f.at(x, y);
    return g;
}

double band_energy(const ImagePlane& f, double period, double angle, int margin) {
    const double k = 2 * kPi / period, c = std::cos(angle), s = std::sin(angle);
    double re = 0, im = 0;
    for (int y = margin; y < f.height - margin; ++y)
        for (int x = margin; x < f.width - margin; ++x) {
            const double ph = k * (c * x + s * y);
            re += f.at(x, y) * std::cos(ph);
            im += f.at(x, y) * std::sin(ph);
        }
    return re * re + im * im;
}

}  // namespace

TEST(StructureTensor, ConstantImageGivesZero) {
    const TensorField t = structure_tensor(ImagePlane(20, 20, 5.0), 1.5);
    for (const auto& j : t.J) {
        EXPECT_EQ(j.j11, 0.0);
        EXPECT_EQ(j.j12, 0.0);
        EXPECT_EQ(j.j22, 0.0);
    }
    EXPECT_THROW(structure_tensor(ImagePlane(4, 4), 0.0), DomainError);
}

TEST(StructureTensor, HorizontalCosineIsRankOne) {
    ImagePlane f(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) f.at(x, y) = std::cos(0.7 * x);
    const TensorField t = structure_tensor(f, 2.0);
    for (const auto& j : t.J) {
        EXPECT_GT(j.j11, 0.0);
        EXPECT_NEAR(j.j12, 0.0, 1e-15);
        EXPECT_NEAR(j.j22, 0.0, 1e-15);
    }
    const AnisotropyField a = anisotropy_from_tensor(t, 1.0);
    EXPECT_NEAR(a.at(16, 16).theta, kPi / 2, 1e-12);
}

TEST(StructureTensor, PositiveSemidefinite) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    ImagePlane f(40, 30);
    for (double& v : f.samples) v = u(rng);
    const TensorField t = structure_tensor(f, 1.0);
    for (const auto& j : t.J) {
        EXPECT_GE(j.j11, 0.0);
        EXPECT_GE(j.j22, 0.0);
        EXPECT_GE(j.j11 * j.j22 - j.j12 * j.j12, -1e-12 * (j.j11 + j.j22) * (j.j11 + j.j22));
    }
}

TEST(Anisotropy, ZeroTensorIsIsotropicFallback) {
    const double noise = 1.5;
    const Anisotropy a = anisotropy_from_tensor(single({0, 0, 0}), noise).at(0, 0);
    const double sigma = noise * noise;
    EXPECT_NEAR(a.s, sigma * sigma / 3, 1e-15);
    EXPECT_EQ(a.rho, 1.0);
    EXPECT_EQ(a.theta, 0.0);
    // The fallback scale-vector is the uniform (sigma, sigma, sigma, sigma).
    const ScaleVector v = scale_field_from(anisotropy_from_tensor(single({0, 0, 0}), noise), default_lut()).at(0, 0);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(v[k], sigma, 1e-12);
}

TEST(Anisotropy, RankOneUsesLargestEigenvalue) {
    const Anisotropy a = anisotropy_from_tensor(single({4.0, 0, 0}), 1.0).at(0, 0);
    EXPECT_NEAR(a.rho, 4.0, 1e-12);
    EXPECT_NEAR(a.theta, kPi / 2, 1e-12);
    const Anisotropy b = anisotropy_from_tensor(single({0.3, 0, 0}), 1.0).at(0, 0);
    EXPECT_EQ(b.rho, 1.0);
}

TEST(Anisotropy, RatioAndClamp) {
    // Minimizing direction at pi/8: the dominant gradient points along 5pi/8.
    Anisotropy a = anisotropy_from_tensor(single(rotated_diag(10, 1, 5 * kPi / 8)), 1.0).at(0, 0);
    EXPECT_NEAR(a.theta, kPi / 8, 1e-12);
    EXPECT_NEAR(a.rho, 0.95 * (3 + 2 * kSqrt2), 1e-9);
    a = anisotropy_from_tensor(single(rotated_diag(3, 1, 0.3 + kPi / 2)), 1.0).at(0, 0);
    EXPECT_NEAR(a.theta, 0.3, 1e-12);
    EXPECT_NEAR(a.rho, 3.0, 1e-12);
}

TEST(Anisotropy, SizeMapsOntoBudget) {
    TensorField t;
    t.width = 100;
    t.height = 1;
    for (int i = 0; i < 100; ++i) t.J.push_back({1.0 + i, 0, 0.5});
    const double noise = 1.2;
    const AnisotropyField a = anisotropy_from_tensor(t, noise);
    const double smax = 3 * noise * noise + 0.5;
    for (const auto& v : a.values) {
        EXPECT_GE(v.s, 0.5 - 1e-15);
        EXPECT_LE(v.s, smax + 1e-15);
    }
    EXPECT_NEAR(a.values.front().s, 0.5, 1e-15);
    EXPECT_NEAR(a.values.back().s, smax, 1e-15);
    for (size_t i = 1; i < a.values.size(); ++i) EXPECT_GE(a.values[i].s, a.values[i - 1].s);
}

TEST(Anisotropy, EveryEmittedVectorIsFeasible) {
    const ImagePlane f = smooth_random(48, 48, 2);
    const AnisotropyField a = anisotropy_from_tensor(structure_tensor(f, 1.0), 2.0);
    for (const auto& v : a.values) {
        EXPECT_GE(v.rho, 1.0);
        EXPECT_GE(v.theta, 0.0);
        EXPECT_LT(v.theta, kPi);
        EXPECT_GE(v.s, 0.0);
    }
    EXPECT_NO_THROW(scale_field_from(a, default_lut()));
}

TEST(Anisotropy, OrientationIsRotationEquivariant) {
    const ImagePlane f = smooth_random(48, 40, 3);
    const AnisotropyField a = anisotropy_from_tensor(structure_tensor(f, 1.5), 1.0);
    const AnisotropyField b = anisotropy_from_tensor(structure_tensor(rotate90(f), 1.5), 1.0);
    int checked = 0;
    for (int y = 8; y < f.height - 8; ++y)
        for (int x = 8; x < f.width - 8; ++x) {
            const Anisotropy& p = a.at(x, y);
            const Anisotropy& q = b.at(f.height - 1 - y, x);
            if (p.rho < 1.05) continue;
            double d = std::abs(wrap_orientation(p.theta + kPi / 2) - q.theta);
            d = std::min(d, kPi - d);
            EXPECT_LT(d, 1e-8);
            EXPECT_NEAR(p.rho, q.rho, 1e-8 * p.rho);
            ++checked;
        }
    EXPECT_GT(checked, 500);
}

TEST(AdaptiveSmooth, ConstantImageStaysConstant) {
    const ImagePlane out = adaptive_smooth(ImagePlane(30, 30, 42.0), 1.5, 1.0, 2);
    for (double v : out.samples) EXPECT_NEAR(v, 42.0, 1e-8);
}

TEST(AdaptiveSmooth, DeterministicAcrossThreads) {
    const ImagePlane f = add_noise_at_psnr(synthetic_stripes(64, 64, 8, 0.5), 18, 255, 1);
    AdaptiveOptions o1, o3;
    o1.threads = 1;
    o3.threads = 3;
    EXPECT_EQ(adaptive_smooth(f, 2, 1, 1, o1).samples, adaptive_smooth(f, 2, 1, 1, o3).samples);
}

TEST(AdaptiveSmooth, CleanStripesKeepTheirEnergy) {
    const double period = 8, angle = 0.5236;
    const ImagePlane f = synthetic_stripes(128, 128, period, angle);
    const ImagePlane out = adaptive_smooth(f, 2.0, 0.0, 1);
    const double e0 = band_energy(f, period, angle, 8), e1 = band_energy(out, period, angle, 8);
    EXPECT_NEAR(e1 / e0, 1.0, 0.05);
}

TEST(AdaptiveSmooth, BeatsIsotropicOnNoisyStripes) {
    const ImagePlane clean = synthetic_stripes(128, 128, 8, 0.5236);
    const ImagePlane noisy = add_noise_at_psnr(clean, 18, 255, 7);
    double best = 0;
    for (double s : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
        FilterOptions o;
        o.normalize = true;
        const ImagePlane iso = filter_space_invariant(noisy, optimize_scale_vector(EllipseParams(s, 1, 0)), o);
        best = std::max(best, psnr(iso, clean, 255));
    }
    EXPECT_GT(psnr(adaptive_smooth(noisy, 2.0, 1.0, 1), clean, 255), best);
}
