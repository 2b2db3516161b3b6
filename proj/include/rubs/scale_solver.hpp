#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rubs/geometry.hpp"

namespace rubs {

inline constexpr double kDefaultEpsilon = 1e-6;

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

// Affine line p(t) = pbar + t*(1,-1,1,-1) of squared scales solving M p = c,
// restricted to p_k >= eps by t in [t_left, t_right].
struct SolutionLine {
    Vec4 pbar{};
    double t_left = 0.0;
    double t_right = 0.0;
    double eps = kDefaultEpsilon;

    Vec4 at(double t) const;
};

inline constexpr Vec4 kNullDirection{1.0, -1.0, 1.0, -1.0};

// c = 24 * (c11, c12, c22).
Vec3 target_vector(const CovarianceMatrix& c);
// M p for M = [[2,1,0,1],[0,1,0,-1],[0,1,2,1]].
Vec3 apply_moment_operator(const Vec4& p);

// Throws Infeasible when t_left > t_right.
SolutionLine solve_line(const Vec3& c, double eps = kDefaultEpsilon);

// sum p_k^4 + (p1^2+p3^2)(p2^2+p4^2): squared kurtosis norm without the
// constant factor (mu4 - 3 mu2^2)^2.
double kurtosis_norm_sq(const Vec4& p);

// zeta(t) = kurtosis_norm_sq(pbar + t e), evaluated in extended precision.
long double zeta(const SolutionLine& line, long double t);
// Coefficients (z1, z2, z3, z4) of zeta'(t) = z1 t^3 + z2 t^2 + z3 t + z4.
std::array<long double, 4> zeta_derivative_coefficients(const Vec4& pbar);
// Real roots of z1 t^3 + z2 t^2 + z3 t + z4, ascending, Newton-polished.
std::vector<long double> real_cubic_roots(const std::array<long double, 4>& z);

// Minimizer of zeta over [t_left, t_right]; smallest t among ties.
double optimal_t(const SolutionLine& line);

ScaleVector optimize_scale_vector(const CovarianceMatrix& c, double eps = kDefaultEpsilon);
ScaleVector optimize_scale_vector(const EllipseParams& p, double eps = kDefaultEpsilon);

struct KurtosisMatrix {
    double k11 = 0.0, k12 = 0.0, k22 = 0.0;
    double frobenius_sq() const { return k11 * k11 + 2.0 * k12 * k12 + k22 * k22; }
};

inline constexpr double kMu2 = 1.0 / 12.0;
inline constexpr double kMu4 = 1.0 / 80.0;

KurtosisMatrix kurtosis_matrix(const ScaleVector& a);

// Raw fourth moments E[x1^i x2^j], i+j = 4.
struct FourthMoments {
    double m40 = 0.0, m31 = 0.0, m22 = 0.0, m13 = 0.0, m04 = 0.0;
};
FourthMoments fourth_moments(const ScaleVector& a);
// K = L - tr(C) C - 2 C^2 with L = [[m40+m22, m31+m13], [m31+m13, m22+m04]].
KurtosisMatrix kurtosis_from_moments(const FourthMoments& m, const CovarianceMatrix& c);

// Quarter-turn (pi/4) rotation of the kernel, applied q times:
// (a1,a2,a3,a4) -> (a4,a1,a2,a3) per turn.
ScaleVector rotate_quarter_turns(const ScaleVector& a, int q);

// Optimal scale-vectors for s = 1 on an (elongation, orientation) grid with
// orientations folded into [0, pi/4].
class ScaleLUT {
public:
    static constexpr std::uint32_t kVersion = 1;

    static std::vector<double> default_rho_grid(int n = 64, double rho_max = 5.8);
    static std::vector<double> default_phi_grid(int n = 64);

    // Grids must be strictly increasing; rho_grid[0] >= 1, phi within [0, pi/4].
    static ScaleLUT build(std::vector<double> rho_grid, std::vector<double> phi_grid,
                          double eps = kDefaultEpsilon);
    static ScaleLUT build_default(double eps = kDefaultEpsilon);

    // Throws Infeasible when rho >= U(theta), OutOfGrid outside the grid.
    ScaleVector lookup(double s, double rho, double theta) const;

    const std::vector<double>& rho_grid() const { return rho_; }
    const std::vector<double>& phi_grid() const { return phi_; }
    double epsilon() const { return eps_; }
    const Vec4& entry(size_t i, size_t j) const { return table_[i * phi_.size() + j]; }

    void save(const std::string& path) const;
    static ScaleLUT load(const std::string& path);
    std::vector<unsigned char> serialize() const;
    static ScaleLUT deserialize(const std::vector<unsigned char>& bytes);

private:
    std::vector<double> rho_, phi_;
    double eps_ = kDefaultEpsilon;
    std::vector<Vec4> table_;
};

}  // namespace rubs
