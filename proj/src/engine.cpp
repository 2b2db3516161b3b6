#include "rubs/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "parallel.hpp"
#include "zp_fast.hpp"
#include "rubs/errors.hpp"

namespace rubs {

ScaleField::ScaleField(int width, int height, std::vector<ScaleVector> scales)
    : width_(width), height_(height), scales_(std::move(scales)) {
    if (width <= 0 || height <= 0) throw DomainError("scale field dimensions must be positive");
    if (scales_.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
        throw DomainError("scale field size does not match its dimensions");
}

ScaleField ScaleField::uniform(int width, int height, const ScaleVector& a) {
    if (width <= 0 || height <= 0) throw DomainError("scale field dimensions must be positive");
    return ScaleField(width, height,
                      std::vector<ScaleVector>(static_cast<size_t>(width) * height, a));
}

ScaleField ScaleField::from_function(int width, int height,
                                     const std::function<ScaleVector(int, int)>& fn) {
    if (width <= 0 || height <= 0) throw DomainError("scale field dimensions must be positive");
    std::vector<ScaleVector> v;
    v.reserve(static_cast<size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) v.push_back(fn(x, y));
    return ScaleField(width, height, std::move(v));
}

FDMesh fd_mesh(const ScaleVector& a) {
    FDMesh m;
    std::array<Vec2, 4> v;
    for (int k = 0; k < 4; ++k) {
        const Vec2 u = direction(k);
        v[static_cast<size_t>(k)] = {a[k] * u.x, a[k] * u.y};
    }
    // a2, a4 enter through a'_k = a_k / sqrt2.
    v[1] = {a[1] / kSqrt2, a[1] / kSqrt2};
    v[3] = {-a[3] / kSqrt2, a[3] / kSqrt2};
    const double w = 1.0 / a.product();
    for (int i = 0; i < 16; ++i) {
        Vec2 x;
        for (int k = 0; k < 4; ++k) {
            if ((i >> k) & 1) {
                x.x += v[static_cast<size_t>(k)].x;
                x.y += v[static_cast<size_t>(k)].y;
            }
        }
        m.vertex[static_cast<size_t>(i)] = x;
        m.lo = i ? Vec2{std::min(m.lo.x, x.x), std::min(m.lo.y, x.y)} : x;
        m.hi = i ? Vec2{std::max(m.hi.x, x.x), std::max(m.hi.y, x.y)} : x;
        m.weight[static_cast<size_t>(i)] = std::popcount(static_cast<unsigned>(i)) % 2 ? -w : w;
    }
    m.tau = {(kSqrt2 * a[0] + a[1] - a[3] - kSqrt2) / (2.0 * kSqrt2),
             (a[1] + kSqrt2 * a[2] + a[3] - 3.0 * kSqrt2) / (2.0 * kSqrt2)};
    return m;
}

namespace {

constexpr int kTile = 16;

// In-place RS1..RS4 on a w x h row-major buffer holding the input.
void running_sums(double* g, int w, int h) {
    const auto W = static_cast<size_t>(w);
    for (int y = 0; y < h; ++y) {
        double* r = g + y * W;
        for (int x = 1; x < w; ++x) r[x] += r[x - 1];
    }
    for (int y = 0; y < h; ++y) {
        double* r = g + y * W;
        for (int x = 0; x < w; ++x) r[x] *= kSqrt2;
        if (y == 0) continue;
        const double* p = r - W;
        for (int x = 1; x < w; ++x) r[x] += p[x - 1];
    }
    for (int y = 1; y < h; ++y) {
        double* r = g + y * W;
        const double* p = r - W;
        for (int x = 0; x < w; ++x) r[x] += p[x];
    }
    for (int y = 0; y < h; ++y) {
        double* r = g + y * W;
        for (int x = 0; x < w; ++x) r[x] *= kSqrt2;
        if (y == 0) continue;
        const double* p = r - W;
        for (int x = w - 2; x >= 0; --x) r[x] += p[x + 1];
    }
}

double filter_pixel(const double* origin, std::ptrdiff_t stride, int ox, int oy, int nx, int ny,
                    const FDMesh& m, const detail::ZPStencil& st) {
    const double bx = nx + m.tau.x, by = ny + m.tau.y;
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) {
        const Vec2& v = m.vertex[static_cast<size_t>(i)];
        acc += m.weight[static_cast<size_t>(i)] *
               detail::interpolate_raw(origin, stride, ox, oy, bx - v.x, by - v.y, st);
    }
    return acc;
}

struct Reach {
    int x0, x1, y0, y1;  // inclusive lattice bounds
};

Reach mesh_reach(const FDMesh& m, int nx, int ny) {
    const double lx = m.lo.x, hx = m.hi.x, ly = m.lo.y, hy = m.hi.y;
    const double qx0 = nx + m.tau.x - hx, qx1 = nx + m.tau.x - lx;
    const double qy0 = ny + m.tau.y - hy, qy1 = ny + m.tau.y - ly;
    const int fx = static_cast<int>(std::ceil(0.5 * (hx - lx)));
    const int fy = static_cast<int>(std::ceil(0.5 * (hy - ly)));
    return {std::min(static_cast<int>(std::floor(qx0 + 0.5)) - 1, nx - fx),
            std::max(static_cast<int>(std::floor(qx1 + 0.5)) + 1, nx + fx),
            std::min(static_cast<int>(std::floor(qy0 + 0.5)) - 1, ny - fy),
            std::max(static_cast<int>(std::floor(qy1 + 0.5)) + 1, ny + fy)};
}

template <class MeshAt>
void process_tile(const ImagePlane& f, int tx0, int ty0, int tx1, int ty1, const MeshAt& mesh_at,
                  ImagePlane& out) {
    thread_local std::vector<const FDMesh*> meshes;
    thread_local std::vector<FDMesh> storage;
    thread_local std::vector<double> buf;
    const int tw = tx1 - tx0, th = ty1 - ty0;
    meshes.assign(static_cast<size_t>(tw * th), nullptr);
    storage.resize(static_cast<size_t>(tw * th));
    Reach r{std::numeric_limits<int>::max(), std::numeric_limits<int>::min(),
            std::numeric_limits<int>::max(), std::numeric_limits<int>::min()};
    for (int y = ty0; y < ty1; ++y) {
        for (int x = tx0; x < tx1; ++x) {
            const size_t idx = static_cast<size_t>((y - ty0) * tw + (x - tx0));
            const FDMesh* m = mesh_at(x, y, storage[idx]);
            meshes[idx] = m;
            const Reach p = mesh_reach(*m, x, y);
            r = {std::min(r.x0, p.x0), std::max(r.x1, p.x1), std::min(r.y0, p.y0),
                 std::max(r.y1, p.y1)};
        }
    }
    const int ww = r.x1 - r.x0 + 1, wh = r.y1 - r.y0 + 1;
    buf.assign(static_cast<size_t>(ww) * wh, 0.0);
    const int cx0 = std::max(r.x0, 0), cx1 = std::min(r.x1, f.width - 1);
    const int cy0 = std::max(r.y0, 0), cy1 = std::min(r.y1, f.height - 1);
    for (int y = cy0; y <= cy1; ++y)
        for (int x = cx0; x <= cx1; ++x)
            buf[static_cast<size_t>(y - r.y0) * ww + (x - r.x0)] = f.at(x, y);
    running_sums(buf.data(), ww, wh);
    const detail::ZPStencil st(ww);
    for (int y = ty0; y < ty1; ++y) {
        for (int x = tx0; x < tx1; ++x) {
            const FDMesh& m = *meshes[static_cast<size_t>((y - ty0) * tw + (x - tx0))];
            out.at(x, y) = filter_pixel(buf.data(), ww, r.x0, r.y0, x, y, m, st);
        }
    }
}

template <class MeshAt>
ImagePlane run_tiles(const ImagePlane& f, const MeshAt& mesh_at, int threads) {
    ImagePlane out(f.width, f.height);
    const int ntx = (f.width + kTile - 1) / kTile, nty = (f.height + kTile - 1) / kTile;
    detail::parallel_for(ntx * nty, threads, [&](int i) {
        const int tx = i % ntx, ty = i / ntx;
        process_tile(f, tx * kTile, ty * kTile, std::min(f.width, (tx + 1) * kTile),
                     std::min(f.height, (ty + 1) * kTile), mesh_at, out);
    });
    return out;
}

ScaleVector effective_scale(const ScaleVector& a, int m, double floor) {
    const double c = 1.0 / std::sqrt(static_cast<double>(m));
    std::array<double, 4> v{};
    for (int k = 0; k < 4; ++k) v[static_cast<size_t>(k)] = std::max(a[k] * c, floor);
    return ScaleVector(v);
}

void check_options(const FilterOptions& opt) {
    if (opt.iterations < 1) throw DomainError("iteration count must be >= 1");
    if (!(opt.scale_floor > 0.0)) throw DomainError("scale floor must be positive");
    if (!(opt.max_support_radius > 0.0)) throw DomainError("support radius must be positive");
}

void check_radius(const ScaleVector& a, double limit, int x, int y) {
    const Vec2 h = support_half_extent(a);
    if (!(std::max(h.x, h.y) <= limit)) {
        std::ostringstream os;
        os << "kernel at pixel (" << x << ", " << y << ") has support half-width "
           << std::max(h.x, h.y) << " beyond the limit " << limit;
        throw DomainError(os.str());
    }
}

int thread_count(const FilterOptions& opt) {
    return opt.threads > 0 ? opt.threads : default_thread_count();
}

template <class MeshAt>
ImagePlane iterate(const ImagePlane& f, const MeshAt& mesh_at, const FilterOptions& opt) {
    const int threads = thread_count(opt);
    ImagePlane den;
    if (opt.normalize) den = run_tiles(ImagePlane(f.width, f.height, 1.0), mesh_at, threads);
    ImagePlane cur = f;
    for (int pass = 0; pass < opt.iterations; ++pass) {
        cur = run_tiles(cur, mesh_at, threads);
        if (opt.normalize) {
            for (size_t i = 0; i < cur.size(); ++i)
                cur.samples[i] = den.samples[i] != 0.0 ? cur.samples[i] / den.samples[i] : 0.0;
        }
    }
    return cur;
}

}  // namespace

int default_thread_count() {
    if (const char* env = std::getenv("RUBS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(std::min(v, 1024L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

IntegratedImage preintegrate(const ImagePlane& f, int pad) {
    if (pad < 0) throw DomainError("padding must be non-negative");
    for (double v : f.samples)
        if (!std::isfinite(v)) throw DomainError("input contains non-finite samples");
    const int w = f.width + 2 * pad, h = f.height + 2 * pad;
    std::vector<double> g(static_cast<size_t>(w) * h, 0.0);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x)
            g[static_cast<size_t>(y + pad) * w + (x + pad)] = f.at(x, y);
    running_sums(g.data(), w, h);
    double peak = 0.0;
    for (double v : g) peak = std::max(peak, std::abs(v));
    if (!(peak < 9007199254740992.0))
        throw PrecisionError("pre-integrated plane exceeds 2^53; results would lose integer precision");
    return IntegratedImage(-pad, -pad, w, h, std::move(g), f.width, f.height);
}

ImagePlane filter_space_variant(const ImagePlane& f, const ScaleField& s,
                                const FilterOptions& opt) {
    check_options(opt);
    if (s.width() != f.width || s.height() != f.height)
        throw DomainError("scale field dimensions do not match the image");
    for (int y = 0; y < s.height(); ++y)
        for (int x = 0; x < s.width(); ++x)
            check_radius(effective_scale(s.at(x, y), opt.iterations, opt.scale_floor),
                         opt.max_support_radius, x, y);
    const int m = opt.iterations;
    const double fl = opt.scale_floor;
    auto mesh_at = [&](int x, int y, FDMesh& slot) -> const FDMesh* {
        slot = fd_mesh(effective_scale(s.at(x, y), m, fl));
        return &slot;
    };
    return iterate(f, mesh_at, opt);
}

ImagePlane filter_space_variant(const ImagePlane& f, const ScaleField& s, int iterations) {
    FilterOptions opt;
    opt.iterations = iterations;
    return filter_space_variant(f, s, opt);
}

ImagePlane filter_space_invariant(const ImagePlane& f, const ScaleVector& a,
                                  const FilterOptions& opt) {
    check_options(opt);
    const ScaleVector eff = effective_scale(a, opt.iterations, opt.scale_floor);
    check_radius(eff, opt.max_support_radius, 0, 0);
    const FDMesh mesh = fd_mesh(eff);
    auto mesh_at = [&](int, int, FDMesh&) -> const FDMesh* { return &mesh; };
    return iterate(f, mesh_at, opt);
}

ImagePlane filter_space_invariant(const ImagePlane& f, const ScaleVector& a, int iterations) {
    FilterOptions opt;
    opt.iterations = iterations;
    return filter_space_invariant(f, a, opt);
}

std::vector<unsigned char> support_inside_mask(const ScaleField& s) {
    std::vector<unsigned char> mask(static_cast<size_t>(s.width()) * s.height());
    for (int y = 0; y < s.height(); ++y) {
        for (int x = 0; x < s.width(); ++x) {
            const Vec2 h = support_half_extent(s.at(x, y));
            mask[static_cast<size_t>(y) * s.width() + x] =
                x - h.x >= 0.0 && x + h.x <= s.width() - 1 && y - h.y >= 0.0 &&
                y + h.y <= s.height() - 1;
        }
    }
    return mask;
}

std::vector<double> average_1d(const std::vector<double>& f, const std::vector<double>& a) {
    if (a.size() != f.size()) throw DomainError("scale sequence length must match the signal");
    const auto n = static_cast<long>(f.size());
    std::vector<double> g(f.size());
    double acc = 0.0;
    for (long i = 0; i < n; ++i) g[static_cast<size_t>(i)] = acc += f[static_cast<size_t>(i)];
    // Piecewise-constant interpolation of g on the half-open cells (k-1/2, k+1/2].
    auto F = [&](double x) {
        const long k = static_cast<long>(std::ceil(x - 0.5));
        if (k < 0 || n == 0) return 0.0;
        return g[static_cast<size_t>(std::min(k, n - 1))];
    };
    std::vector<double> out(f.size());
    for (long i = 0; i < n; ++i) {
        const double ai = a[static_cast<size_t>(i)];
        if (!(ai > 0.0) || !std::isfinite(ai)) throw DomainError("scales must be positive");
        const double x = static_cast<double>(i) + 0.5 * (ai - 1.0);
        out[static_cast<size_t>(i)] = (F(x) - F(x - ai)) / ai;
    }
    return out;
}

}  // namespace rubs
