#include "rubs/scale_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "file_util.hpp"
#include "rubs/errors.hpp"

namespace rubs {

Vec4 SolutionLine::at(double t) const {
    return {pbar[0] + t, pbar[1] - t, pbar[2] + t, pbar[3] - t};
}

Vec3 target_vector(const CovarianceMatrix& c) {
    return {24.0 * c.c11(), 24.0 * c.c12(), 24.0 * c.c22()};
}

Vec3 apply_moment_operator(const Vec4& p) {
    return {2.0 * p[0] + p[1] + p[3], p[1] - p[3], p[1] + 2.0 * p[2] + p[3]};
}

namespace {

std::string bound_str(double u) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", u);
    return buf;
}

[[noreturn]] void throw_infeasible(const Vec3& c) {
    double rho = std::numeric_limits<double>::quiet_NaN();
    double theta = rho, bound = rho;
    std::ostringstream os;
    try {
        const EllipseParams p = ellipse_params_of(CovarianceMatrix(c[0] / 24, c[1] / 24, c[2] / 24));
        rho = p.rho;
        theta = p.theta;
        bound = elongation_bound(theta);
        os << "infeasible target: elongation " << rho << " at orientation " << theta
           << " rad is not below the bound U(theta) = " << bound_str(bound);
    } catch (const DomainError&) {
        os << "infeasible target: covariance is not positive definite";
    }
    throw Infeasible(os.str(), rho, theta, bound);
}

}  // namespace

SolutionLine solve_line(const Vec3& c, double eps) {
    if (!std::isfinite(c[0]) || !std::isfinite(c[1]) || !std::isfinite(c[2]))
        throw DomainError("target vector must be finite");
    if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
    SolutionLine line;
    line.eps = eps;
    const double p4 = 1.0;
    const double p2 = c[1] + p4;
    line.pbar = {(c[0] - p2 - p4) / 2.0, p2, (c[2] - p2 - p4) / 2.0, p4};
    line.t_left = std::max(-line.pbar[0] + eps, -line.pbar[2] + eps);
    line.t_right = std::min(line.pbar[1] - eps, line.pbar[3] - eps);
    if (line.t_left > line.t_right) throw_infeasible(c);
    return line;
}

double kurtosis_norm_sq(const Vec4& p) {
    const double q1 = p[0] * p[0], q2 = p[1] * p[1], q3 = p[2] * p[2], q4 = p[3] * p[3];
    return q1 * q1 + q2 * q2 + q3 * q3 + q4 * q4 + (q1 + q3) * (q2 + q4);
}

long double zeta(const SolutionLine& line, long double t) {
    long double q[4];
    for (int k = 0; k < 4; ++k) {
        const long double p = static_cast<long double>(line.pbar[k]) + kNullDirection[k] * t;
        q[k] = p * p;
    }
    return q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3] + (q[0] + q[2]) * (q[1] + q[3]);
}

std::array<long double, 4> zeta_derivative_coefficients(const Vec4& pb) {
    const long double p1 = pb[0], p2 = pb[1], p3 = pb[2], p4 = pb[3];
    const long double z1 = 32.0L;
    const long double z2 = 24.0L * (p1 - p2 + p3 - p4);
    const long double z3 = 16.0L * (p1 * p1 + p2 * p2 + p3 * p3 + p4 * p4) -
                           8.0L * (p1 + p3) * (p2 + p4);
    const long double z4 = 4.0L * (p1 * p1 * p1 - p2 * p2 * p2 + p3 * p3 * p3 - p4 * p4 * p4) +
                           2.0L * (p1 + p3) * (p2 * p2 + p4 * p4) -
                           2.0L * (p2 + p4) * (p1 * p1 + p3 * p3);
    return {z1, z2, z3, z4};
}

std::vector<long double> real_cubic_roots(const std::array<long double, 4>& z) {
    const long double scale = std::max({std::abs(z[0]), std::abs(z[1]), std::abs(z[2]), std::abs(z[3])});
    if (scale == 0.0L) return {};
    if (std::abs(z[0]) <= 1e-30L * scale) {
        // Quadratic or linear.
        std::vector<long double> r;
        if (std::abs(z[1]) <= 1e-30L * scale) {
            if (z[2] != 0.0L) r.push_back(-z[3] / z[2]);
            return r;
        }
        const long double d = z[2] * z[2] - 4.0L * z[1] * z[3];
        if (d < 0.0L) return r;
        const long double q = -0.5L * (z[2] + std::copysign(std::sqrt(d), z[2]));
        r.push_back(q / z[1]);
        if (q != 0.0L) r.push_back(z[3] / q);
        std::sort(r.begin(), r.end());
        return r;
    }
    const long double a = z[1] / z[0], b = z[2] / z[0], c = z[3] / z[0];
    const long double p = b - a * a / 3.0L;
    const long double q = 2.0L * a * a * a / 27.0L - a * b / 3.0L + c;
    const long double disc = q * q / 4.0L + p * p * p / 27.0L;
    std::vector<long double> x;
    if (disc > 0.0L) {
        const long double sq = std::sqrt(disc);
        x.push_back(std::cbrt(-q / 2.0L + sq) + std::cbrt(-q / 2.0L - sq));
    } else if (p == 0.0L) {
        x.push_back(std::cbrt(-q));
    } else {
        const long double r = 2.0L * std::sqrt(-p / 3.0L);
        long double arg = 3.0L * q / (p * r);
        arg = std::clamp(arg, -1.0L, 1.0L);
        const long double phi = std::acos(arg) / 3.0L;
        const long double tau = 2.0L * 3.14159265358979323846264338327950288L / 3.0L;
        for (int k = 0; k < 3; ++k) x.push_back(r * std::cos(phi - tau * k));
    }
    std::vector<long double> roots;
    for (long double xi : x) {
        long double t = xi - a / 3.0L;
        const long double f = ((z[0] * t + z[1]) * t + z[2]) * t + z[3];
        const long double df = (3.0L * z[0] * t + 2.0L * z[1]) * t + z[2];
        if (df != 0.0L) t -= f / df;
        roots.push_back(t);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double optimal_t(const SolutionLine& line) {
    const long double tl = line.t_left, tr = line.t_right;
    std::vector<long double> cand{tl, tr};
    for (long double r : real_cubic_roots(zeta_derivative_coefficients(line.pbar))) {
        if (r < tl - 1e-10L || r > tr + 1e-10L) continue;
        if (r - tl < 1e-10L) r = tl;
        if (tr - r < 1e-10L) r = tr;
        cand.push_back(r);
    }
    std::sort(cand.begin(), cand.end());
    long double best_t = cand.front();
    long double best = zeta(line, best_t);
    for (size_t i = 1; i < cand.size(); ++i) {
        const long double v = zeta(line, cand[i]);
        if (v < best - 1e-18L * std::abs(best)) {
            best = v;
            best_t = cand[i];
        }
    }
    return static_cast<double>(best_t);
}

ScaleVector optimize_scale_vector(const CovarianceMatrix& c, double eps) {
    const SolutionLine line = solve_line(target_vector(c), eps);
    const Vec4 p = line.at(optimal_t(line));
    return ScaleVector(std::sqrt(p[0]), std::sqrt(p[1]), std::sqrt(p[2]), std::sqrt(p[3]));
}

ScaleVector optimize_scale_vector(const EllipseParams& p, double eps) {
    return optimize_scale_vector(covariance_from_params(p), eps);
}

KurtosisMatrix kurtosis_matrix(const ScaleVector& a) {
    const double kappa = kMu4 - 3.0 * kMu2 * kMu2;
    const double q1 = std::pow(a[0], 4), q2 = std::pow(a[1], 4), q3 = std::pow(a[2], 4),
                 q4 = std::pow(a[3], 4);
    return {kappa * (q1 + 0.5 * (q2 + q4)), kappa * 0.5 * (q2 - q4), kappa * (q3 + 0.5 * (q2 + q4))};
}

FourthMoments fourth_moments(const ScaleVector& a) {
    const double p1 = a[0] * a[0], p2 = a[1] * a[1], p3 = a[2] * a[2], p4 = a[3] * a[3];
    const double m4 = kMu4 / 4.0, m22 = kMu2 * kMu2;
    FourthMoments m;
    m.m40 = m4 * (4 * p1 * p1 + p2 * p2 + p4 * p4) + 0.5 * m22 * (6 * p1 * p2 + 6 * p1 * p4 + 3 * p2 * p4);
    m.m31 = m4 * (p2 * p2 - p4 * p4) + 1.5 * m22 * p1 * (p2 - p4);
    m.m22 = m4 * (p2 * p2 + p4 * p4) +
            0.5 * m22 * (p1 * p2 + p1 * p4 + p2 * p3 + p3 * p4 - p2 * p4 + 2 * p1 * p3);
    m.m13 = m4 * (p2 * p2 - p4 * p4) + 1.5 * m22 * p3 * (p2 - p4);
    m.m04 = m4 * (4 * p3 * p3 + p2 * p2 + p4 * p4) + 0.5 * m22 * (6 * p2 * p3 + 6 * p3 * p4 + 3 * p2 * p4);
    return m;
}

KurtosisMatrix kurtosis_from_moments(const FourthMoments& m, const CovarianceMatrix& c) {
    const double l11 = m.m40 + m.m22, l12 = m.m31 + m.m13, l22 = m.m22 + m.m04;
    const double tr = c.trace();
    const double s11 = c.c11() * c.c11() + c.c12() * c.c12();
    const double s12 = c.c12() * (c.c11() + c.c22());
    const double s22 = c.c12() * c.c12() + c.c22() * c.c22();
    return {l11 - tr * c.c11() - 2 * s11, l12 - tr * c.c12() - 2 * s12,
            l22 - tr * c.c22() - 2 * s22};
}

ScaleVector rotate_quarter_turns(const ScaleVector& a, int q) {
    q = ((q % 4) + 4) % 4;
    std::array<double, 4> r{};
    for (int k = 0; k < 4; ++k) r[(k + q) % 4] = a[k];
    return ScaleVector(r);
}

std::vector<double> ScaleLUT::default_rho_grid(int n, double rho_max) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = std::pow(rho_max, double(i) / (n - 1));
    g.front() = 1.0;
    g.back() = rho_max;
    return g;
}

std::vector<double> ScaleLUT::default_phi_grid(int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = (kPi / 4.0) * i / (n - 1);
    return g;
}

namespace {

void check_grid(const std::vector<double>& g, double lo, double hi, const char* name) {
    if (g.size() < 2) throw DomainError(std::string(name) + " grid needs at least 2 points");
    for (size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] >= lo && g[i] <= hi))
            throw DomainError(std::string(name) + " grid value out of range");
        if (i > 0 && !(g[i] > g[i - 1]))
            throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
}

// Index i with g[i] <= x <= g[i+1] and the fractional weight.
std::pair<size_t, double> bracket(const std::vector<double>& g, double x) {
    auto it = std::upper_bound(g.begin(), g.end(), x);
    size_t i = it == g.begin() ? 0 : static_cast<size_t>(it - g.begin()) - 1;
    i = std::min(i, g.size() - 2);
    const double w = std::clamp((x - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
    return {i, w};
}

}  // namespace

ScaleLUT ScaleLUT::build(std::vector<double> rho_grid, std::vector<double> phi_grid, double eps) {
    check_grid(rho_grid, 1.0, std::numeric_limits<double>::max(), "elongation");
    check_grid(phi_grid, 0.0, kPi / 4.0, "orientation");
    ScaleLUT lut;
    lut.rho_ = std::move(rho_grid);
    lut.phi_ = std::move(phi_grid);
    lut.eps_ = eps;
    lut.table_.reserve(lut.rho_.size() * lut.phi_.size());
    for (double rho : lut.rho_) {
        for (double phi : lut.phi_) {
            const ScaleVector a = optimize_scale_vector(EllipseParams(1.0, rho, phi), eps);
            lut.table_.push_back({a[0], a[1], a[2], a[3]});
        }
    }
    return lut;
}

ScaleLUT ScaleLUT::build_default(double eps) {
    return build(default_rho_grid(), default_phi_grid(), eps);
}

ScaleVector ScaleLUT::lookup(double s, double rho, double theta) const {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("size must be positive");
    if (!(rho >= 1.0)) throw DomainError("elongation must be >= 1");
    theta = wrap_orientation(theta);
    const double bound = elongation_bound(theta);
    if (rho >= bound) {
        std::ostringstream os;
        os << "infeasible target: elongation " << rho << " at orientation " << theta
           << " rad is not below the bound U(theta) = " << bound_str(bound);
        throw Infeasible(os.str(), rho, theta, bound);
    }
    if (rho > rho_.back() || rho < rho_.front()) {
        std::ostringstream os;
        os << "elongation " << rho << " outside the table range [" << rho_.front() << ", "
           << rho_.back() << "]";
        throw OutOfGrid(os.str());
    }
    int q = static_cast<int>(std::floor(theta / (kPi / 4.0)));
    q = std::clamp(q, 0, 3);
    const double phi = std::clamp(theta - q * (kPi / 4.0), 0.0, kPi / 4.0);
    if (phi < phi_.front() || phi > phi_.back()) throw OutOfGrid("orientation outside the table");
    const auto [i, wr] = bracket(rho_, rho);
    const auto [j, wp] = bracket(phi_, phi);
    std::array<double, 4> a{};
    for (int k = 0; k < 4; ++k) {
        const auto sq = [&](size_t ii, size_t jj) { return entry(ii, jj)[k] * entry(ii, jj)[k]; };
        const double p = (1 - wr) * ((1 - wp) * sq(i, j) + wp * sq(i, j + 1)) +
                         wr * ((1 - wp) * sq(i + 1, j) + wp * sq(i + 1, j + 1));
        a[k] = std::sqrt(s * p);
    }
    return rotate_quarter_turns(ScaleVector(a), q);
}

std::vector<unsigned char> ScaleLUT::serialize() const {
    std::vector<unsigned char> out{'R', 'U', 'B', 'S'};
    detail::put_u32(out, kVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(rho_.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(phi_.size()));
    detail::put_f64(out, eps_);
    for (double v : rho_) detail::put_f64(out, v);
    for (double v : phi_) detail::put_f64(out, v);
    for (const Vec4& e : table_)
        for (double v : e) detail::put_f64(out, v);
    return out;
}

ScaleLUT ScaleLUT::deserialize(const std::vector<unsigned char>& b) {
    if (b.size() < 24 || b[0] != 'R' || b[1] != 'U' || b[2] != 'B' || b[3] != 'S')
        throw IoError("not a scale LUT file (bad magic)");
    const std::uint32_t version = detail::get_u32(&b[4]);
    if (version != kVersion) throw IoError("unsupported LUT version " + std::to_string(version));
    const size_t nr = detail::get_u32(&b[8]), np = detail::get_u32(&b[12]);
    const size_t expect = 16 + 8 * (1 + nr + np + 4 * nr * np);
    if (nr < 2 || np < 2 || b.size() != expect) throw IoError("truncated or malformed LUT file");
    ScaleLUT lut;
    size_t off = 16;
    auto next = [&] {
        const double v = detail::get_f64(&b[off]);
        off += 8;
        return v;
    };
    lut.eps_ = next();
    for (size_t i = 0; i < nr; ++i) lut.rho_.push_back(next());
    for (size_t i = 0; i < np; ++i) lut.phi_.push_back(next());
    check_grid(lut.rho_, 1.0, std::numeric_limits<double>::max(), "elongation");
    check_grid(lut.phi_, 0.0, kPi / 4.0, "orientation");
    lut.table_.resize(nr * np);
    for (auto& e : lut.table_)
        for (double& v : e) v = next();
    return lut;
}

void ScaleLUT::save(const std::string& path) const { detail::write_file_atomic(path, serialize()); }

ScaleLUT ScaleLUT::load(const std::string& path) { return deserialize(detail::read_file(path)); }

}  // namespace rubs
