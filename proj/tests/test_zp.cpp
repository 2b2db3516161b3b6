#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rubs/oracle.hpp"
#include "rubs/zp.hpp"
#include "zp_fast.hpp"

using namespace rubs;

namespace {

IntegratedImage random_plane(int w, int h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> g(static_cast<size_t>(w) * h);
    for (double& v : g) v = u(rng);
    return IntegratedImage(0, 0, w, h, g, w, h);
}

}  // namespace

TEST(ZpEval, CompactSupportAndSymmetry) {
    EXPECT_EQ(zp_eval(10, 10), 0.0);
    EXPECT_EQ(zp_eval(1.5, 0), 0.0);
    EXPECT_EQ(zp_eval(0, -1.5), 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng), y = u(rng);
        EXPECT_NEAR(zp_eval(x, y), zp_eval(-x, -y), 1e-15);
        EXPECT_NEAR(zp_eval(x, y), zp_eval(y, x), 1e-15);
        EXPECT_GE(zp_eval(x, y), 0.0);
    }
}

TEST(ZpEval, CentreValue) {
    // The centred unit square lies inside the diamond.
    EXPECT_NEAR(zp_eval(0, 0), 0.5, 1e-15);
}

TEST(ZpEval, MatchesSpatialBoxSpline) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 x{u(rng), u(rng)};
        EXPECT_NEAR(zp_eval(x), oracle::box_spline4_spatial(ScaleVector::base(), x), 1e-13);
    }
}

TEST(ZpEval, MatchesSpectralSynthesisAtOrigin) {
    const auto k = oracle::synthesize_kernel(GeneralBoxSplineSpec(ScaleVector::base()), 1.0 / 128, 1024);
    EXPECT_NEAR(k.at(512, 512), zp_eval(0, 0), 1e-6);
}

TEST(ZpPartition, Labels) {
    EXPECT_EQ(zp_partition(0.3, 0.1), 0);
    EXPECT_EQ(zp_partition(0.1, 0.3), 1);
    EXPECT_EQ(zp_partition(-0.3, -0.1), 2);
    EXPECT_EQ(zp_partition(0.1, -0.3), 3);
    EXPECT_EQ(zp_partition(0, 0), 0);
}

TEST(ZpTable, ActiveOffsetsCoverSupport) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 5000; ++i) {
        const double d1 = u(rng), d2 = u(rng);
        const auto off = zp_active_offsets(zp_partition(d1, d2));
        EXPECT_EQ(off[0][0], 0);
        EXPECT_EQ(off[0][1], 0);
        // Every offset outside the active seven contributes nothing.
        for (int j1 = -2; j1 <= 2; ++j1)
            for (int j2 = -2; j2 <= 2; ++j2) {
                bool active = false;
                for (const auto& o : off) active |= o[0] == j1 && o[1] == j2;
                if (!active) {
                    EXPECT_NEAR(zp_eval(d1 - j1, d2 - j2), 0.0, 1e-15);
                }
            }
    }
}

TEST(ZpTable, FitResidualAndValues) {
    const auto& t = zp_table();
    for (int p = 0; p < 4; ++p) EXPECT_LT(t.fit_residual[p], 1e-10);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 5000; ++i) {
        const double d1 = u(rng), d2 = u(rng);
        const int p = zp_partition(d1, d2);
        for (int j = 0; j < 7; ++j) {
            const auto& o = t.offsets[p][j];
            EXPECT_NEAR(zp_poly(t.coeffs[p][j], d1, d2), zp_eval(d1 - o[0], d2 - o[1]), 1e-13);
        }
    }
}

TEST(ZpTable, DumpFormat) {
    std::istringstream in(dump_zp_table());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "rubs-zp-table 1");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++rows;
    EXPECT_EQ(rows, 28);
}

TEST(Interpolate, PartitionOfUnityIsConstant) {
    const int n = 12;
    const IntegratedImage F(-n, -n, 2 * n, 2 * n, std::vector<double>(4 * n * n, 3.0), 1, 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    const double S = oracle::zp_support_sum(F, {0.0, 0.0}) / 3.0;
    for (int i = 0; i < 1000; ++i) EXPECT_NEAR(interpolate(F, {u(rng), u(rng)}), 3.0 * S, 1e-10);
    EXPECT_NEAR(S, 1.0, 1e-12);
}

TEST(Interpolate, ImpulseGivesZpElement) {
    std::vector<double> g(81, 0.0);
    g[40] = 1.0;
    const IntegratedImage F(-4, -4, 9, 9, g, 1, 1);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x{u(rng), u(rng)};
        EXPECT_NEAR(interpolate(F, x), zp_eval(x), 1e-13);
    }
}

TEST(Interpolate, MatchesBruteForceSum) {
    std::mt19937_64 rng(7);
    const IntegratedImage F = random_plane(24, 24, rng);
    std::uniform_real_distribution<double> u(3, 20);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 x{u(rng), u(rng)};
        EXPECT_NEAR(interpolate(F, x), oracle::zp_support_sum(F, x), 1e-12);
    }
    for (int k1 = 3; k1 < 20; ++k1)
        EXPECT_NEAR(interpolate(F, {double(k1), 7.0}), oracle::zp_support_sum(F, {double(k1), 7.0}), 1e-12);
}

TEST(Interpolate, FastPathMatchesTable) {
    std::mt19937_64 rng(8);
    const IntegratedImage F = random_plane(32, 32, rng);
    const detail::ZPStencil st(F.width());
    std::uniform_real_distribution<double> u(3, 28);
    for (int i = 0; i < 5000; ++i) {
        const double x1 = u(rng), x2 = u(rng);
        const double fast = detail::interpolate_raw(F.data().data(), F.width(), F.x0(), F.y0(), x1, x2, st);
        EXPECT_NEAR(fast, interpolate(F, {x1, x2}), 1e-12);
    }
}

TEST(Interpolate, ClampsOutsideStoredBox) {
    const IntegratedImage F(0, 0, 4, 4, std::vector<double>(16, 2.0), 4, 4);
    EXPECT_EQ(F.at(-5, 2), 2.0);
    EXPECT_EQ(F.at(10, 10), 2.0);
    EXPECT_TRUE(F.contains(3, 3));
    EXPECT_FALSE(F.contains(4, 0));
}
