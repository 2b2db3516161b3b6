#pragma once

#include <array>
#include <cstddef>

#include "rubs/zp.hpp"

namespace rubs::detail {

inline long floor_to_long(double v) {
    const long i = static_cast<long>(v);
    return i - (static_cast<double>(i) > v);
}

// Per-partition ZP interpolation with the fitted coefficients inlined:
// zp_partition_sum<P>(g, off, d1, d2) = sum_j rho_{P,j}(d) g[off[j]].
#include "zp_kernels.inc"

// Flat offsets of the seven active lattice points of each partition for a
// plane with the given row stride.
struct ZPStencil {
    std::array<std::array<std::ptrdiff_t, ZPPolynomialTable::kOffsets>,
               ZPPolynomialTable::kPartitions>
        off{};

    explicit ZPStencil(std::ptrdiff_t stride) {
        const ZPPolynomialTable& t = zp_table();
        for (int i = 0; i < ZPPolynomialTable::kPartitions; ++i)
            for (int j = 0; j < ZPPolynomialTable::kOffsets; ++j)
                off[i][j] = t.offsets[i][j][1] * stride + t.offsets[i][j][0];
    }
};

// Caller guarantees every lattice read lies inside the plane. origin points
// at lattice point (ox, oy).
inline double interpolate_raw(const double* origin, std::ptrdiff_t stride, int ox, int oy,
                              double x1, double x2, const ZPStencil& st) {
    const long c1 = floor_to_long(x1 + 0.5), c2 = floor_to_long(x2 + 0.5);
    const double d1 = x1 - static_cast<double>(c1), d2 = x2 - static_cast<double>(c2);
    const double* g = origin + (c2 - oy) * stride + (c1 - ox);
    switch (zp_partition(d1, d2)) {
        case 0: return zp_partition_sum<0>(g, st.off[0].data(), d1, d2);
        case 1: return zp_partition_sum<1>(g, st.off[1].data(), d1, d2);
        case 2: return zp_partition_sum<2>(g, st.off[2].data(), d1, d2);
        default: return zp_partition_sum<3>(g, st.off[3].data(), d1, d2);
    }
}

}  // namespace rubs::detail
