#include "rubs/structure_tensor.hpp"

#include <algorithm>
#include <cmath>

#include "rubs/errors.hpp"

namespace rubs {

namespace {

int reflect(int i, int n) {
    if (n == 1) return 0;
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
}

struct Eigen2 {
    double lmax, lmin, theta_max;  // theta_max: direction of the lmax eigenvector
    bool isotropic;
};

Eigen2 eigen2(const Tensor2& j) {
    const double tr = j.j11 + j.j22;
    const double diff = j.j11 - j.j22;
    const double root = std::hypot(diff, 2.0 * j.j12);
    Eigen2 e;
    e.lmax = std::max(0.0, 0.5 * (tr + root));
    e.lmin = std::max(0.0, 0.5 * (tr - root));
    e.isotropic = root <= 1e-14 * std::abs(tr);
    e.theta_max = e.isotropic ? 0.0 : 0.5 * std::atan2(2.0 * j.j12, diff);
    return e;
}

double quantile(std::vector<double> v, double q) {
    const auto k = static_cast<size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

TensorField structure_tensor(const ImagePlane& f, double window_sigma, int threads) {
    if (!(window_sigma > 0.0)) throw DomainError("window sigma must be positive");
    const int w = f.width, h = f.height;
    ImagePlane gxx(w, h), gxy(w, h), gyy(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = 0.5 * (f.at(reflect(x + 1, w), y) - f.at(reflect(x - 1, w), y));
            const double gy = 0.5 * (f.at(x, reflect(y + 1, h)) - f.at(x, reflect(y - 1, h)));
            gxx.at(x, y) = gx * gx;
            gxy.at(x, y) = gx * gy;
            gyy.at(x, y) = gy * gy;
        }
    }
    // Uniform scales a give covariance (a^2 / 6) I.
    const ScaleVector win = ScaleVector::uniform(window_sigma * std::sqrt(6.0));
    FilterOptions opt;
    opt.normalize = true;
    opt.threads = threads;
    const ImagePlane sxx = filter_space_invariant(gxx, win, opt);
    const ImagePlane sxy = filter_space_invariant(gxy, win, opt);
    const ImagePlane syy = filter_space_invariant(gyy, win, opt);
    TensorField t;
    t.width = w;
    t.height = h;
    t.window_sigma = window_sigma;
    t.J.resize(f.size());
    for (size_t i = 0; i < f.size(); ++i) t.J[i] = {sxx.samples[i], sxy.samples[i], syy.samples[i]};
    return t;
}

AnisotropyField anisotropy_from_tensor(const TensorField& t, double noise_sigma,
                                       const AnisotropyOptions& opt) {
    if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");
    AnisotropyField out;
    out.width = t.width;
    out.height = t.height;
    out.values.resize(t.J.size());
    const double s_min = opt.s_min;
    const double s_max = opt.s_max_gain * noise_sigma * noise_sigma + opt.s_min;
    const double sigma_iso = opt.iso_gain * noise_sigma * noise_sigma;
    const double s_iso = sigma_iso * sigma_iso / 3.0;

    std::vector<double> raw(t.J.size(), -1.0);
    std::vector<double> active;
    for (size_t i = 0; i < t.J.size(); ++i) {
        const Tensor2& j = t.J[i];
        const Eigen2 e = eigen2(j);
        const double thr = opt.zero_rel * std::abs(j.j11 + j.j22) + opt.zero_abs;
        const bool zmax = e.lmax < thr, zmin = e.lmin < thr;
        Anisotropy& a = out.values[i];
        if (zmax && zmin) {
            a = {s_iso, 1.0, 0.0};
            continue;
        }
        a.theta = e.isotropic ? 0.0 : wrap_orientation(e.theta_max + 0.5 * kPi);
        a.rho = zmin ? std::max(1.0, e.lmax) : e.lmax / e.lmin;
        const double u = elongation_bound(a.theta);
        if (!is_unbounded(u)) a.rho = std::min(a.rho, opt.clamp_factor * u);
        a.rho = std::clamp(a.rho, 1.0, opt.rho_cap);
        raw[i] = e.lmax + e.lmin;
        active.push_back(raw[i]);
    }
    if (!active.empty()) {
        const double lo = quantile(active, opt.percentile_lo);
        const double hi = quantile(active, opt.percentile_hi);
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] < 0.0) continue;
            const double u = hi > lo ? std::clamp((raw[i] - lo) / (hi - lo), 0.0, 1.0) : 0.5;
            out.values[i].s = s_min + (s_max - s_min) * u;
        }
    }
    return out;
}

ScaleField scale_field_from(const AnisotropyField& af, const ScaleLUT& lut, double scale_floor) {
    std::vector<ScaleVector> v;
    v.reserve(af.values.size());
    for (const Anisotropy& a : af.values) {
        if (!(a.s > 0.0)) {
            v.push_back(ScaleVector::uniform(scale_floor));
            continue;
        }
        try {
            v.push_back(lut.lookup(a.s, a.rho, a.theta));
        } catch (const OutOfGrid&) {
            v.push_back(optimize_scale_vector(EllipseParams(a.s, a.rho, a.theta), lut.epsilon()));
        }
    }
    return ScaleField(af.width, af.height, std::move(v));
}

const ScaleLUT& default_lut() {
    static const ScaleLUT lut = ScaleLUT::build_default();
    return lut;
}

ImagePlane adaptive_smooth(const ImagePlane& f, double window_sigma, double noise_sigma, int m,
                           const AdaptiveOptions& opt) {
    if (m < 1) throw DomainError("iteration count must be >= 1");
    const TensorField t = structure_tensor(f, window_sigma, opt.threads);
    const AnisotropyField af = anisotropy_from_tensor(t, noise_sigma, opt.anisotropy);
    const ScaleLUT& lut = opt.lut ? *opt.lut : default_lut();
    FilterOptions fo;
    fo.iterations = m;
    fo.normalize = true;
    fo.threads = opt.threads;
    return filter_space_variant(f, scale_field_from(af, lut, fo.scale_floor), fo);
}

}  // namespace rubs
