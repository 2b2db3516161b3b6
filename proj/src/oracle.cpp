#include "rubs/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "rubs/errors.hpp"

namespace rubs::oracle {

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

double ipow(double v, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= v;
    return r;
}

}  // namespace

double SampledKernel::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * h * h;
}

double box_spline_spectrum(const GeneralBoxSplineSpec& spec, double w1, double w2) {
    double r = 1.0;
    for (int k = 0; k < spec.N; ++k) {
        const double t = kPi * k / spec.N;
        r *= sinc(0.5 * spec.scales[static_cast<size_t>(k)] * (std::cos(t) * w1 + std::sin(t) * w2));
    }
    return ipow(r, spec.m);
}

Vec2 support_half_extent(const GeneralBoxSplineSpec& spec) {
    Vec2 e;
    for (int k = 0; k < spec.N; ++k) {
        const double t = kPi * k / spec.N;
        e.x += 0.5 * spec.scales[static_cast<size_t>(k)] * std::abs(std::cos(t));
        e.y += 0.5 * spec.scales[static_cast<size_t>(k)] * std::abs(std::sin(t));
    }
    return {e.x * spec.m, e.y * spec.m};
}

SampledKernel synthesize_kernel(const GeneralBoxSplineSpec& spec, double h, int W) {
    if (!(h > 0.0) || W < 4 || W % 2) throw DomainError("grid needs h > 0 and an even W >= 4");
    const Vec2 ext = support_half_extent(spec);
    if (0.5 * W * h < 1.2 * std::max(ext.x, ext.y))
        throw DomainError("synthesis grid does not cover the support with a 20% margin");
    const double P = W * h;
    const auto n = static_cast<size_t>(W) * static_cast<size_t>(W);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> buf(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)), &fftw_free);
    fftw_plan plan = fftw_plan_dft_2d(W, W, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    for (int r = 0; r < W; ++r) {
        const int j2 = r < W / 2 ? r : r - W;
        for (int c = 0; c < W; ++c) {
            const int j1 = c < W / 2 ? c : c - W;
            const double sign = ((j1 + j2) & 1) ? -1.0 : 1.0;
            const double v = box_spline_spectrum(spec, 2.0 * kPi * j1 / P, 2.0 * kPi * j2 / P);
            buf.get()[static_cast<size_t>(r) * W + c][0] = sign * v;
            buf.get()[static_cast<size_t>(r) * W + c][1] = 0.0;
        }
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    SampledKernel k;
    k.h = h;
    k.W = W;
    k.spec = spec;
    k.values.resize(n);
    for (size_t i = 0; i < n; ++i) k.values[i] = buf.get()[i][0] / (P * P);
    return k;
}

LatticeKernel lattice_kernel(const ScaleVector& a, int m, int q) {
    const GeneralBoxSplineSpec spec(a, m);
    const Vec2 ext = support_half_extent(spec);
    LatticeKernel out;
    out.R = static_cast<int>(std::ceil(std::max(ext.x, ext.y)));
    const int R = out.R;
    const int L = 2 * R + 3;
    const int M = q * L;
    const int H = M / 2;
    // Symmetric truncation |j| <= H; sums and differences span [-2H, 2H].
    std::vector<double> t1(static_cast<size_t>(2 * H + 1)), t3(t1.size());
    std::vector<double> t2(static_cast<size_t>(4 * H + 1)), t4(t2.size());
    for (int j = -H; j <= H; ++j) {
        t1[static_cast<size_t>(j + H)] = ipow(sinc(a[0] * kPi * j / L), m);
        t3[static_cast<size_t>(j + H)] = ipow(sinc(a[2] * kPi * j / L), m);
    }
    for (int s = -2 * H; s <= 2 * H; ++s) {
        t2[static_cast<size_t>(s + 2 * H)] = ipow(sinc(a[1] * kPi * s / (L * kSqrt2)), m);
        t4[static_cast<size_t>(s + 2 * H)] = ipow(sinc(a[3] * kPi * s / (L * kSqrt2)), m);
    }
    std::vector<double> fold(static_cast<size_t>(L) * L, 0.0);
    const auto mod = [L](int j) { return ((j % L) + L) % L; };
    // Spectrum is even and the cosine synthesis below is too, so rows j2 < 0 fold onto j2 > 0.
    for (int j2 = 0; j2 <= H; ++j2) {
        double* row = fold.data() + static_cast<size_t>(mod(j2)) * L;
        const double c3 = (j2 == 0 ? 1.0 : 2.0) * t3[static_cast<size_t>(j2 + H)];
        const double* p2 = t2.data() + (j2 + 2 * H);
        const double* p4 = t4.data() + (j2 + 2 * H);
        int r1 = mod(-H);
        for (int j1 = -H; j1 <= H; ++j1) {
            row[r1] += c3 * t1[static_cast<size_t>(j1 + H)] * p2[j1] * p4[-j1];
            if (++r1 == L) r1 = 0;
        }
    }
    std::vector<double> cosine(static_cast<size_t>(L));
    for (int i = 0; i < L; ++i) cosine[static_cast<size_t>(i)] = std::cos(2.0 * kPi * i / L);
    const int S = 2 * R + 1;
    out.values.assign(static_cast<size_t>(S) * S, 0.0);
    for (int d2 = -R; d2 <= R; ++d2) {
        for (int d1 = -R; d1 <= R; ++d1) {
            double acc = 0.0;
            for (int r2 = 0; r2 < L; ++r2) {
                const double* row = fold.data() + static_cast<size_t>(r2) * L;
                for (int r1 = 0; r1 < L; ++r1) acc += row[r1] * cosine[static_cast<size_t>(mod(r1 * d1 + r2 * d2))];
            }
            out.values[static_cast<size_t>(d2 + R) * S + (d1 + R)] = acc / (double(L) * L);
        }
    }
    return out;
}

double box_spline4_spatial(const ScaleVector& a, Vec2 x) {
    const double al = a[1] / kSqrt2, ga = a[3] / kSqrt2;
    const double top = x.y + 0.5 * a[2], bot = x.y - 0.5 * a[2];
    const double lo_y = x.x - 0.5 * a[0], hi_y = x.x + 0.5 * a[0];
    // Slice of the parallelogram at abscissa t: [max(-t-al, t-ga, bot), min(-t+al, t+ga, top)].
    struct Line {
        double slope, icpt;
    };
    const Line upper[3] = {{-1.0, al}, {1.0, ga}, {0.0, top}};
    const Line lower[3] = {{-1.0, -al}, {1.0, -ga}, {0.0, bot}};
    auto length = [&](double t) {
        double u = upper[0].slope * t + upper[0].icpt, l = lower[0].slope * t + lower[0].icpt;
        for (int i = 1; i < 3; ++i) {
            u = std::min(u, upper[i].slope * t + upper[i].icpt);
            l = std::max(l, lower[i].slope * t + lower[i].icpt);
        }
        return std::max(0.0, u - l);
    };
    std::vector<double> knots{lo_y, hi_y};
    auto add = [&](const Line& p, const Line& q) {
        if (p.slope != q.slope) {
            const double t = (q.icpt - p.icpt) / (p.slope - q.slope);
            if (t > lo_y && t < hi_y) knots.push_back(t);
        }
    };
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (j > i) {
                add(upper[i], upper[j]);
                add(lower[i], lower[j]);
            }
            add(upper[i], lower[j]);
        }
    }
    std::sort(knots.begin(), knots.end());
    double area = 0.0;
    for (size_t i = 1; i < knots.size(); ++i) {
        const double w = knots[i] - knots[i - 1];
        if (w > 0.0) area += w * length(0.5 * (knots[i] + knots[i - 1]));
    }
    return area / a.product();
}

LatticeKernel lattice_kernel_spatial(const ScaleVector& a) {
    const Vec2 ext = rubs::support_half_extent(a);
    LatticeKernel out;
    out.R = static_cast<int>(std::ceil(std::max(ext.x, ext.y)));
    const int S = 2 * out.R + 1;
    out.values.resize(static_cast<size_t>(S) * S);
    for (int d2 = -out.R; d2 <= out.R; ++d2)
        for (int d1 = -out.R; d1 <= out.R; ++d1)
            out.values[static_cast<size_t>(d2 + out.R) * S + (d1 + out.R)] =
                box_spline4_spatial(a, {double(d1), double(d2)});
    return out;
}

double lattice_sum(const ScaleVector& a, Vec2 x) {
    const Vec2 ext = rubs::support_half_extent(a);
    const int R = static_cast<int>(std::ceil(std::max(ext.x, ext.y))) + 1;
    const int c1 = static_cast<int>(std::lround(x.x)), c2 = static_cast<int>(std::lround(x.y));
    double s = 0.0;
    for (int k2 = c2 - R; k2 <= c2 + R; ++k2)
        for (int k1 = c1 - R; k1 <= c1 + R; ++k1) s += box_spline4_spatial(a, {x.x - k1, x.y - k2});
    return s;
}

ImagePlane dense_convolve(const ImagePlane& f, const LatticeKernel& k) {
    ImagePlane out(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int d2 = -k.R; d2 <= k.R; ++d2) {
                const int sy = y - d2;
                if (sy < 0 || sy >= f.height) continue;
                for (int d1 = -k.R; d1 <= k.R; ++d1) {
                    const int sx = x - d1;
                    if (sx < 0 || sx >= f.width) continue;
                    acc += k.at(d1, d2) * f.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

ImagePlane dense_convolve_sv(const ImagePlane& f, const ScaleField& s, KernelSource src, int q) {
    if (s.width() != f.width || s.height() != f.height)
        throw DomainError("scale field dimensions do not match the image");
    std::map<std::array<double, 4>, LatticeKernel> cache;
    ImagePlane out(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            const ScaleVector& a = s.at(x, y);
            auto it = cache.find(a.values());
            if (it == cache.end()) {
                it = cache
                         .emplace(a.values(), src == KernelSource::Spectral
                                                  ? lattice_kernel(a, 1, q)
                                                  : lattice_kernel_spatial(a))
                         .first;
            }
            const LatticeKernel& k = it->second;
            double acc = 0.0;
            for (int d2 = -k.R; d2 <= k.R; ++d2) {
                const int sy = y - d2;
                if (sy < 0 || sy >= f.height) continue;
                for (int d1 = -k.R; d1 <= k.R; ++d1) {
                    const int sx = x - d1;
                    if (sx < 0 || sx >= f.width) continue;
                    acc += k.at(d1, d2) * f.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

Moments numeric_moments(const SampledKernel& k) {
    Moments m;
    const double w = k.h * k.h;
    for (int j = 0; j < k.W; ++j) {
        const double y = k.coord(j);
        for (int i = 0; i < k.W; ++i) {
            const double x = k.coord(i);
            const double v = k.at(i, j) * w;
            m.mass += v;
            m.c11 += x * x * v;
            m.c12 += x * y * v;
            m.c22 += y * y * v;
            m.fourth.m40 += x * x * x * x * v;
            m.fourth.m31 += x * x * x * y * v;
            m.fourth.m22 += x * x * y * y * v;
            m.fourth.m13 += x * y * y * y * v;
            m.fourth.m04 += y * y * y * y * v;
        }
    }
    return m;
}

double gaussian(const CovarianceMatrix& c, Vec2 x) {
    const double det = c.det();
    const double q = (c.c22() * x.x * x.x - 2.0 * c.c12() * x.x * x.y + c.c11() * x.y * x.y) / det;
    return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det));
}

double l2_error_to_gaussian(const SampledKernel& k, const CovarianceMatrix& c) {
    double s = 0.0;
    for (int j = 0; j < k.W; ++j)
        for (int i = 0; i < k.W; ++i) {
            const double d = k.at(i, j) - gaussian(c, {k.coord(i), k.coord(j)});
            s += d * d;
        }
    return std::sqrt(s * k.h * k.h);
}

double normalized_correlation(const SampledKernel& k, const CovarianceMatrix& c) {
    double kg = 0.0, kk = 0.0, gg = 0.0;
    for (int j = 0; j < k.W; ++j)
        for (int i = 0; i < k.W; ++i) {
            const double v = k.at(i, j), g = gaussian(c, {k.coord(i), k.coord(j)});
            kg += v * g;
            kk += v * v;
            gg += g * g;
        }
    return kg / std::sqrt(kk * gg);
}

std::vector<double> convergence_experiment(double sigma, const std::vector<int>& N_list, double h,
                                           int W) {
    std::vector<double> out;
    const CovarianceMatrix c(sigma * sigma, 0.0, sigma * sigma);
    for (int N : N_list) {
        const std::vector<double> scales(static_cast<size_t>(N), sigma * std::sqrt(24.0 / N));
        out.push_back(l2_error_to_gaussian(synthesize_kernel(GeneralBoxSplineSpec(N, scales), h, W), c));
    }
    return out;
}

std::vector<double> iterate_convergence(const ScaleVector& a, const std::vector<int>& m_list,
                                        double h, int W) {
    std::vector<double> out;
    const CovarianceMatrix c = covariance_of(a);
    for (int m : m_list) {
        const GeneralBoxSplineSpec spec(a.scaled(1.0 / std::sqrt(double(m))), m);
        out.push_back(l2_error_to_gaussian(synthesize_kernel(spec, h, W), c));
    }
    return out;
}

double zp_support_sum(const IntegratedImage& F, Vec2 x) {
    const int c1 = static_cast<int>(std::floor(x.x)), c2 = static_cast<int>(std::floor(x.y));
    double s = 0.0;
    for (int k2 = c2 - 2; k2 <= c2 + 3; ++k2)
        for (int k1 = c1 - 2; k1 <= c1 + 3; ++k1) s += F.at(k1, k2) * zp_eval(x.x - k1, x.y - k2);
    return s;
}

}  // namespace rubs::oracle
