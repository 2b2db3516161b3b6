#pragma once

#include <array>
#include <vector>

namespace rubs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kPi = 3.14159265358979323846;

// Unit vector of direction k (0-based): angle k*pi/4.
Vec2 direction(int k);

// Scales of the four boxes along 0, pi/4, pi/2, 3pi/4 (pixels).
class ScaleVector {
public:
    ScaleVector(double a1, double a2, double a3, double a4);
    explicit ScaleVector(const std::array<double, 4>& a);

    static ScaleVector uniform(double a) { return ScaleVector(a, a, a, a); }
    // Zwart-Powell base vector (1, sqrt2, 1, sqrt2).
    static ScaleVector base() { return ScaleVector(1.0, kSqrt2, 1.0, kSqrt2); }

    double operator[](int k) const { return a_[k]; }
    const std::array<double, 4>& values() const { return a_; }
    double product() const { return a_[0] * a_[1] * a_[2] * a_[3]; }
    ScaleVector scaled(double c) const;

private:
    std::array<double, 4> a_;
};

bool operator==(const ScaleVector& l, const ScaleVector& r);

class CovarianceMatrix {
public:
    // Throws DomainError unless c11*c22 - c12^2 > 1e-12*(c11+c22)^2 and c11 > 0.
    CovarianceMatrix(double c11, double c12, double c22);

    double c11() const { return c11_; }
    double c12() const { return c12_; }
    double c22() const { return c22_; }
    double trace() const { return c11_ + c22_; }
    double det() const { return c11_ * c22_ - c12_ * c12_; }

private:
    double c11_, c12_, c22_;
};

struct EllipseParams {
    double s = 1.0;      // lambda_max + lambda_min
    double rho = 1.0;    // lambda_max / lambda_min
    double theta = 0.0;  // direction of the major axis, [0, pi)

    EllipseParams() = default;
    // Throws DomainError on s <= 0, rho < 1 or theta outside [0, pi).
    EllipseParams(double s, double rho, double theta);
};

// Directional order N, N scales, m-fold iteration (directions k*pi/N).
struct GeneralBoxSplineSpec {
    int N = 4;
    std::vector<double> scales;
    int m = 1;

    GeneralBoxSplineSpec(int N, std::vector<double> scales, int m = 1);
    explicit GeneralBoxSplineSpec(const ScaleVector& a, int m = 1);
};

CovarianceMatrix covariance_of(const ScaleVector& a);
EllipseParams ellipse_params_of(const CovarianceMatrix& c);
CovarianceMatrix covariance_from_params(const EllipseParams& p);

// Maps an angle to [0, pi).
double wrap_orientation(double theta);

// Supremum of the achievable elongation at orientation phi. +infinity at
// 0, pi/4, pi/2, 3pi/4.
double elongation_bound(double phi);
bool is_unbounded(double u);

// Convex hull of the 16 points sum_k (+-1/2) a_k u_k, counterclockwise,
// starting at the vertex of maximal x (ties: maximal y).
std::vector<Vec2> support_polygon(const ScaleVector& a);
double polygon_area(const std::vector<Vec2>& poly);
// Half-widths of the axis-aligned bounding box of the support.
Vec2 support_half_extent(const ScaleVector& a);

}  // namespace rubs
