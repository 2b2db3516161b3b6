#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rubs/geometry.hpp"

namespace rubs {

// Zwart-Powell element: four-directional box spline at (1, sqrt2, 1, sqrt2).
// Evaluated as half the overlap area of the unit square centred at x with
// the diamond |y1| + |y2| <= 1.
double zp_eval(double x1, double x2);
inline double zp_eval(Vec2 x) { return zp_eval(x.x, x.y); }

// Cell-local coordinates: x = c + d with c = round(x), d in [-1/2, 1/2)^2.
// The diagonals of the cell split it into four triangles:
//   P0 right  (d1+d2 >= 0, d1-d2 >= 0)
//   P1 top    (d1+d2 >= 0, d1-d2 <  0)
//   P2 left   (d1+d2 <  0, d1-d2 <  0)
//   P3 bottom (d1+d2 <  0, d1-d2 >= 0)
inline int zp_partition(double d1, double d2) {
    const bool upper = d1 + d2 >= 0.0;
    const bool right = d1 - d2 >= 0.0;
    if (upper) return right ? 0 : 1;
    return right ? 3 : 2;
}

// In partition i the lattice offsets j in {-1,0,1}^2 contributing to x are
// all nine except the two corners on the far side of both diagonals. Order:
// (0,0) first, then the rest lexicographically in (j1, j2).
std::array<std::array<int, 2>, 7> zp_active_offsets(int partition);

// rho_{i,j}(d) = zp_eval(d - j) on partition i as
// c0 + c1 d1 + c2 d2 + c3 d1^2 + c4 d1 d2 + c5 d2^2.
struct ZPPolynomialTable {
    static constexpr int kPartitions = 4;
    static constexpr int kOffsets = 7;
    std::array<std::array<std::array<int, 2>, kOffsets>, kPartitions> offsets{};
    std::array<std::array<std::array<double, 6>, kOffsets>, kPartitions> coeffs{};
    // Max |fit - zp_eval| over the generator's sample grid, per partition.
    std::array<double, kPartitions> fit_residual{};
};

const ZPPolynomialTable& zp_table();

inline double zp_poly(const std::array<double, 6>& c, double d1, double d2) {
    return c[0] + d1 * (c[1] + c[3] * d1 + c[4] * d2) + d2 * (c[2] + c[5] * d2);
}

// Versioned text dump: header line, then one line per (partition, offset)
// with 6 coefficients at 17 significant digits.
std::string dump_zp_table();

// Pre-integrated plane g_b on the lattice box [x0, x0+width) x [y0, y0+height)
// in image coordinates, row-major.
class IntegratedImage {
public:
    IntegratedImage(int x0, int y0, int width, int height, std::vector<double> g, int source_width,
                    int source_height);

    int x0() const { return x0_; }
    int y0() const { return y0_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int source_width() const { return source_width_; }
    int source_height() const { return source_height_; }
    static ScaleVector base() { return ScaleVector::base(); }
    const std::vector<double>& data() const { return g_; }

    bool contains(int k1, int k2) const {
        return k1 >= x0_ && k1 < x0_ + width_ && k2 >= y0_ && k2 < y0_ + height_;
    }
    double at_unchecked(int k1, int k2) const {
        return g_[static_cast<size_t>(k2 - y0_) * static_cast<size_t>(width_) +
                  static_cast<size_t>(k1 - x0_)];
    }
    // Lattice reads outside the stored box take the nearest stored value.
    double at(int k1, int k2) const;

private:
    int x0_, y0_, width_, height_;
    std::vector<double> g_;
    int source_width_, source_height_;
};

// F(x) = sum_n g_b[n] zp(x - n) with seven table polynomials.
double interpolate(const IntegratedImage& F, Vec2 x);

}  // namespace rubs
