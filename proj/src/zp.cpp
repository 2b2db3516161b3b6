#include "rubs/zp.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "rubs/errors.hpp"

namespace rubs {

namespace {

ZPPolynomialTable make_table() {
    ZPPolynomialTable t;
#include "zp_table_data.inc"
    return t;
}

}  // namespace

const ZPPolynomialTable& zp_table() {
    static const ZPPolynomialTable table = make_table();
    return table;
}

std::string dump_zp_table() {
    const ZPPolynomialTable& t = zp_table();
    std::ostringstream os;
    os << "rubs-zp-table 1\n";
    os << "# partition j1 j2 c0 c1 c2 c3 c4 c5 (monomials 1 d1 d2 d1^2 d1*d2 d2^2)\n";
    char buf[64];
    for (int i = 0; i < ZPPolynomialTable::kPartitions; ++i) {
        for (int j = 0; j < ZPPolynomialTable::kOffsets; ++j) {
            os << i << ' ' << t.offsets[i][j][0] << ' ' << t.offsets[i][j][1];
            for (double c : t.coeffs[i][j]) {
                std::snprintf(buf, sizeof buf, " %.17g", c);
                os << buf;
            }
            os << '\n';
        }
    }
    return os.str();
}

IntegratedImage::IntegratedImage(int x0, int y0, int width, int height, std::vector<double> g,
                                 int source_width, int source_height)
    : x0_(x0), y0_(y0), width_(width), height_(height), g_(std::move(g)),
      source_width_(source_width), source_height_(source_height) {
    if (width <= 0 || height <= 0 ||
        g_.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
        throw DomainError("integrated plane size does not match its dimensions");
}

double IntegratedImage::at(int k1, int k2) const {
    k1 = std::clamp(k1, x0_, x0_ + width_ - 1);
    k2 = std::clamp(k2, y0_, y0_ + height_ - 1);
    return at_unchecked(k1, k2);
}

double interpolate(const IntegratedImage& F, Vec2 x) {
    const ZPPolynomialTable& t = zp_table();
    const double c1 = std::floor(x.x + 0.5), c2 = std::floor(x.y + 0.5);
    const double d1 = x.x - c1, d2 = x.y - c2;
    const int i = zp_partition(d1, d2);
    const int k1 = static_cast<int>(c1), k2 = static_cast<int>(c2);
    double acc = 0.0;
    for (int j = 0; j < ZPPolynomialTable::kOffsets; ++j) {
        const auto& o = t.offsets[i][j];
        acc += zp_poly(t.coeffs[i][j], d1, d2) * F.at(k1 + o[0], k2 + o[1]);
    }
    return acc;
}

}  // namespace rubs
