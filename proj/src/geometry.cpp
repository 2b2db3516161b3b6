#include "rubs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rubs/errors.hpp"

namespace rubs {

Vec2 direction(int k) {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {1.0 / kSqrt2, 1.0 / kSqrt2};
        case 2: return {0.0, 1.0};
        default: return {-1.0 / kSqrt2, 1.0 / kSqrt2};
    }
}

ScaleVector::ScaleVector(double a1, double a2, double a3, double a4)
    : ScaleVector(std::array<double, 4>{a1, a2, a3, a4}) {}

ScaleVector::ScaleVector(const std::array<double, 4>& a) : a_(a) {
    for (double v : a_) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            std::ostringstream os;
            os << "scale-vector entries must be positive and finite, got (" << a_[0] << ", "
               << a_[1] << ", " << a_[2] << ", " << a_[3] << ")";
            throw DomainError(os.str());
        }
    }
}

ScaleVector ScaleVector::scaled(double c) const {
    return ScaleVector(c * a_[0], c * a_[1], c * a_[2], c * a_[3]);
}

bool operator==(const ScaleVector& l, const ScaleVector& r) { return l.values() == r.values(); }

CovarianceMatrix::CovarianceMatrix(double c11, double c12, double c22)
    : c11_(c11), c12_(c12), c22_(c22) {
    const double tr = c11 + c22;
    if (!std::isfinite(c11) || !std::isfinite(c12) || !std::isfinite(c22) || !(c11 > 0.0) ||
        !(c11 * c22 - c12 * c12 > 1e-12 * tr * tr)) {
        std::ostringstream os;
        os << "covariance [[" << c11 << ", " << c12 << "], [" << c12 << ", " << c22
           << "]] is not positive definite";
        throw DomainError(os.str());
    }
}

EllipseParams::EllipseParams(double s_, double rho_, double theta_)
    : s(s_), rho(rho_), theta(theta_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("size must be positive");
    if (!(rho >= 1.0) || !std::isfinite(rho)) throw DomainError("elongation must be >= 1");
    if (!(theta >= 0.0 && theta < kPi)) throw DomainError("orientation must lie in [0, pi)");
}

GeneralBoxSplineSpec::GeneralBoxSplineSpec(int N_, std::vector<double> scales_, int m_)
    : N(N_), scales(std::move(scales_)), m(m_) {
    if (N < 2) throw DomainError("directional order must be >= 2");
    if (static_cast<int>(scales.size()) != N) throw DomainError("need one scale per direction");
    if (m < 1) throw DomainError("iteration count must be >= 1");
    for (double v : scales)
        if (!std::isfinite(v) || !(v > 0.0)) throw DomainError("scales must be positive");
}

GeneralBoxSplineSpec::GeneralBoxSplineSpec(const ScaleVector& a, int m_)
    : GeneralBoxSplineSpec(4, {a[0], a[1], a[2], a[3]}, m_) {}

CovarianceMatrix covariance_of(const ScaleVector& a) {
    const double p1 = a[0] * a[0], p2 = a[1] * a[1], p3 = a[2] * a[2], p4 = a[3] * a[3];
    return CovarianceMatrix((2.0 * p1 + p2 + p4) / 24.0, (p2 - p4) / 24.0,
                            (2.0 * p3 + p2 + p4) / 24.0);
}

double wrap_orientation(double theta) {
    double t = std::fmod(theta, kPi);
    if (t < 0.0) t += kPi;
    if (t >= kPi) t = 0.0;
    return t;
}

EllipseParams ellipse_params_of(const CovarianceMatrix& c) {
    const double tr = c.trace();
    const double diff = c.c11() - c.c22();
    const double root = std::hypot(diff, 2.0 * c.c12());
    const double lmax = 0.5 * (tr + root);
    const double lmin = c.det() / lmax;
    EllipseParams p;
    p.s = tr;
    p.rho = std::max(1.0, lmax / lmin);
    if (root <= 4.0 * std::numeric_limits<double>::epsilon() * tr) {
        p.theta = 0.0;
    } else {
        p.theta = wrap_orientation(0.5 * std::atan2(2.0 * c.c12(), diff));
    }
    return p;
}

CovarianceMatrix covariance_from_params(const EllipseParams& p) {
    const double half = 0.5 * p.s;
    const double hd = 0.5 * p.s * (p.rho - 1.0) / (p.rho + 1.0);
    const double c2 = std::cos(2.0 * p.theta), s2 = std::sin(2.0 * p.theta);
    return CovarianceMatrix(half + hd * c2, hd * s2, half - hd * c2);
}

double elongation_bound(double phi) {
    const double q = kPi / 4.0;
    const double r = std::fmod(phi, q);
    if (std::abs(r) < 1e-12 || std::abs(r - q) < 1e-12)
        return std::numeric_limits<double>::infinity();
    const double sgn = phi < kPi / 2.0 ? 1.0 : -1.0;
    const double nu = std::abs(0.5 * (std::tan(phi) - 1.0 / std::tan(phi)) * sgn);
    const double root = std::sqrt(1.0 + nu * nu);
    // 1 + |nu| - root rewritten to avoid cancellation for large |nu|.
    const double den = 1.0 - 1.0 / (nu + root);
    return (1.0 + nu + root) / den;
}

bool is_unbounded(double u) { return std::isinf(u); }

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Vec2> support_polygon(const ScaleVector& a) {
    std::vector<Vec2> pts;
    pts.reserve(16);
    for (int mask = 0; mask < 16; ++mask) {
        Vec2 p;
        for (int k = 0; k < 4; ++k) {
            const double t = (mask >> k) & 1 ? 0.5 : -0.5;
            const Vec2 u = direction(k);
            p.x += t * a[k] * u.x;
            p.y += t * a[k] * u.y;
        }
        pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end(),
              [](const Vec2& l, const Vec2& r) { return l.x < r.x || (l.x == r.x && l.y < r.y); });
    std::vector<Vec2> hull(2 * pts.size());
    size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
        while (k >= lo && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    size_t start = 0;
    for (size_t i = 1; i < hull.size(); ++i) {
        if (hull[i].x > hull[start].x || (hull[i].x == hull[start].x && hull[i].y > hull[start].y))
            start = i;
    }
    std::rotate(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(start), hull.end());
    return hull;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

Vec2 support_half_extent(const ScaleVector& a) {
    const double d = (a[1] + a[3]) / (2.0 * kSqrt2);
    return {0.5 * a[0] + d, 0.5 * a[2] + d};
}

}  // namespace rubs
