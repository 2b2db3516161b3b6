#include <array>
#include <cmath>

#include "rubs/zp.hpp"

namespace rubs {

namespace {

struct Pt {
    double x, y;
};

// Keeps the part of poly with nx*x + ny*y <= 1.
int clip(const Pt* in, int n, Pt* out, double nx, double ny) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const Pt& p = in[i];
        const Pt& q = in[(i + 1) % n];
        const double fp = nx * p.x + ny * p.y - 1.0;
        const double fq = nx * q.x + ny * q.y - 1.0;
        if (fp <= 0.0) out[m++] = p;
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            const double t = fp / (fp - fq);
            out[m++] = {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
        }
    }
    return m;
}

}  // namespace

double zp_eval(double x1, double x2) {
    const double ax = std::abs(x1), ay = std::abs(x2);
    if (!(ax < 1.5 && ay < 1.5 && ax + ay < 2.0)) return 0.0;
    std::array<Pt, 12> a{}, b{};
    a[0] = {x1 - 0.5, x2 - 0.5};
    a[1] = {x1 + 0.5, x2 - 0.5};
    a[2] = {x1 + 0.5, x2 + 0.5};
    a[3] = {x1 - 0.5, x2 + 0.5};
    int n = 4;
    n = clip(a.data(), n, b.data(), 1.0, 1.0);
    n = clip(b.data(), n, a.data(), -1.0, 1.0);
    n = clip(a.data(), n, b.data(), -1.0, -1.0);
    n = clip(b.data(), n, a.data(), 1.0, -1.0);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const Pt& p = a[i];
        const Pt& q = a[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.25 * std::abs(s);
}

std::array<std::array<int, 2>, 7> zp_active_offsets(int partition) {
    // Far corners excluded per partition.
    static constexpr int kExcluded[4][2][2] = {
        {{-1, -1}, {-1, 1}},  // right
        {{-1, -1}, {1, -1}},  // top
        {{1, -1}, {1, 1}},    // left
        {{-1, 1}, {1, 1}},    // bottom
    };
    std::array<std::array<int, 2>, 7> out{};
    out[0] = {0, 0};
    int n = 1;
    for (int j1 = -1; j1 <= 1; ++j1) {
        for (int j2 = -1; j2 <= 1; ++j2) {
            if (j1 == 0 && j2 == 0) continue;
            bool skip = false;
            for (const auto& e : kExcluded[partition])
                if (e[0] == j1 && e[1] == j2) skip = true;
            if (!skip) out[static_cast<size_t>(n++)] = {j1, j2};
        }
    }
    return out;
}

}  // namespace rubs
