// Build-time generator for the ZP interpolation polynomials. For each cell
// partition and active lattice offset it fits a bivariate quadratic to
// zp_eval sampled at 1e-3 spacing. Writes the coefficient table (argv[1])
// and per-partition evaluation functions with the coefficients inlined (argv[2]).
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <vector>

#include "rubs/zp.hpp"

namespace {

constexpr double kStep = 1e-3;
constexpr double kMaxResidual = 1e-10;

double snap(double c) {
    const double q = std::ldexp(1.0, 20);
    const double r = std::round(c * q) / q;
    return std::abs(r - c) < 1e-9 ? r : c;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s TABLE.inc KERNELS.inc\n", argv[0]);
        return 1;
    }
    std::FILE* kern = std::fopen(argv[2], "w");
    if (!kern) {
        std::perror(argv[2]);
        return 2;
    }
    std::fprintf(kern, "// Generated by zp_table_gen. Do not edit.\n");
    std::fprintf(kern, "template <int P>\ninline double zp_partition_sum(const double* g, const std::ptrdiff_t* off, double d1, double d2);\n");
    std::FILE* out = std::fopen(argv[1], "w");
    if (!out) {
        std::perror(argv[1]);
        return 2;
    }
    std::fprintf(out, "// Generated by zp_table_gen. Do not edit.\n");
    const int n = static_cast<int>(std::lround(1.0 / kStep));
    for (int part = 0; part < 4; ++part) {
        std::vector<std::array<double, 2>> pts;
        for (int i = 0; i <= n; ++i) {
            for (int k = 0; k <= n; ++k) {
                const double d1 = -0.5 + i * kStep, d2 = -0.5 + k * kStep;
                if (rubs::zp_partition(d1, d2) == part) pts.push_back({d1, d2});
            }
        }
        Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), 6);
        for (size_t r = 0; r < pts.size(); ++r) {
            const double d1 = pts[r][0], d2 = pts[r][1];
            A.row(static_cast<Eigen::Index>(r)) << 1.0, d1, d2, d1 * d1, d1 * d2, d2 * d2;
        }
        const auto qr = A.colPivHouseholderQr();
        const auto offsets = rubs::zp_active_offsets(part);
        double worst = 0.0;
        std::fprintf(kern,
                     "template <>\ninline double zp_partition_sum<%d>(const double* g, const std::ptrdiff_t* off, double d1, double d2) {\n"
                     "    const double m[6] = {1.0, d1, d2, d1 * d1, d1 * d2, d2 * d2};\n"
                     "    (void)m;\n    return",
                     part);
        for (int j = 0; j < 7; ++j) {
            const auto& o = offsets[static_cast<size_t>(j)];
            Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
            for (size_t r = 0; r < pts.size(); ++r)
                y(static_cast<Eigen::Index>(r)) = rubs::zp_eval(pts[r][0] - o[0], pts[r][1] - o[1]);
            Eigen::VectorXd c = qr.solve(y);
            std::array<double, 6> raw{}, snapped{};
            for (int k = 0; k < 6; ++k) {
                raw[static_cast<size_t>(k)] = c(k);
                snapped[static_cast<size_t>(k)] = snap(c(k));
            }
            auto residual = [&](const std::array<double, 6>& cf) {
                double m = 0.0;
                for (size_t r = 0; r < pts.size(); ++r)
                    m = std::max(m, std::abs(rubs::zp_poly(cf, pts[r][0], pts[r][1]) -
                                             y(static_cast<Eigen::Index>(r))));
                return m;
            };
            const double res_raw = residual(raw), res_snap = residual(snapped);
            const auto& best = res_snap <= res_raw ? snapped : raw;
            const double res = std::min(res_raw, res_snap);
            worst = std::max(worst, res);
            std::fprintf(out, "t.offsets[%d][%d] = {%d, %d};\n", part, j, o[0], o[1]);
            std::fprintf(kern, "\n        %s g[off[%d]] * (", j ? "+" : " ", j);
            bool first = true;
            for (int k = 0; k < 6; ++k) {
                const double v = best[static_cast<size_t>(k)];
                if (v == 0.0) continue;
                if (k == 0)
                    std::fprintf(kern, "%s%.17g", first ? "" : " + ", v);
                else
                    std::fprintf(kern, "%s%.17g * m[%d]", first ? "" : " + ", v, k);
                first = false;
            }
            std::fprintf(kern, "%s)", first ? "0.0" : "");
            std::fprintf(out, "t.coeffs[%d][%d] = {%.17g, %.17g, %.17g, %.17g, %.17g, %.17g};\n",
                         part, j, best[0], best[1], best[2], best[3], best[4], best[5]);
        }
        std::fprintf(out, "t.fit_residual[%d] = %.17g;\n", part, worst);
        std::fprintf(kern, ";\n}\n");
        if (!(worst < kMaxResidual)) {
            std::fprintf(stderr, "partition %d: fit residual %.3g exceeds %.1g\n", part, worst,
                         kMaxResidual);
            std::fclose(out);
            std::fclose(kern);
            std::remove(argv[1]);
            std::remove(argv[2]);
            return 3;
        }
    }
    std::fclose(out);
    std::fclose(kern);
    return 0;
}
