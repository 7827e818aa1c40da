// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

namespace percor::raster {

namespace {

constexpr std::int64_t kSub = std::int64_t{1} << kSubpixelBits;

std::int64_t snap(double c) { return std::llround(c * double(kSub)); }

struct SnapEdge {
    std::int64_t x0, y0, dx, dy;

    // Boundary ownership: an edge keeps its pixels when it is a left edge
    // (descending in screen y) or the horizontal top edge.
    bool top_left() const { return dy < 0 || (dy == 0 && dx > 0); }

    std::int64_t eval(std::int64_t sx, std::int64_t sy) const {
        return dx * (sy - y0) - dy * (sx - x0);
    }
};

struct SnapTri {
    std::array<SnapEdge, 3> e;
    std::int64_t y_min, y_max;
    bool valid;
};

SnapTri snap_triangle(const ScreenTriangle& t) {
    std::array<std::int64_t, 3> xs{}, ys{};
    for (int i = 0; i < 3; ++i) {
        xs[size_t(i)] = snap(t.v[size_t(i)].pos.x);
        ys[size_t(i)] = snap(t.v[size_t(i)].pos.y);
    }
    const std::int64_t area2 = (xs[1] - xs[0]) * (ys[2] - ys[0]) - (ys[1] - ys[0]) * (xs[2] - xs[0]);
    SnapTri s{};
    s.valid = area2 != 0;
    if (!s.valid) return s;
    if (area2 < 0) {
        std::swap(xs[1], xs[2]);
        std::swap(ys[1], ys[2]);
    }
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        s.e[size_t(i)] = {xs[size_t(i)], ys[size_t(i)], xs[size_t(j)] - xs[size_t(i)],
                          ys[size_t(j)] - ys[size_t(i)]};
    }
    s.y_min = std::min({ys[0], ys[1], ys[2]});
    s.y_max = std::max({ys[0], ys[1], ys[2]});
    return s;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    // b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return floor_div(a + b - 1, b); }

bool covers_snapped(const SnapTri& s, int px, int py) {
    if (!s.valid) return false;
    const std::int64_t sx = std::int64_t(px) * kSub, sy = std::int64_t(py) * kSub;
    for (const SnapEdge& e : s.e) {
        const std::int64_t v = e.eval(sx, sy);
        if (v < 0 || (v == 0 && !e.top_left())) return false;
    }
    return true;
}

}  // namespace

bool covers(const ScreenTriangle& t, int px, int py) {
    return covers_snapped(snap_triangle(t), px, py);
}

std::vector<Span> scanline_triangle(const ScreenTriangle& t) {
    const SnapTri s = snap_triangle(t);
    if (!s.valid) fail(Err::DegenerateTriangle, "triangle has no area on the subpixel grid");
    std::vector<Span> out;
    const int py_lo = static_cast<int>(ceil_div(s.y_min, kSub));
    const int py_hi = static_cast<int>(floor_div(s.y_max, kSub));
    for (int py = py_lo; py <= py_hi; ++py) {
        const std::int64_t sy = std::int64_t(py) * kSub;
        // Each edge bounds the span by one exact integer inequality in the
        // subpixel abscissa; the span is their intersection.
        std::int64_t lo = std::numeric_limits<std::int64_t>::min();
        std::int64_t hi = std::numeric_limits<std::int64_t>::max();
        bool row_dead = false;
        for (const SnapEdge& e : s.e) {
            const std::int64_t c = e.dx * (sy - e.y0) + e.dy * e.x0;
            const std::int64_t need = e.top_left() ? 0 : 1;  // E >= need
            if (e.dy > 0) {
                hi = std::min(hi, floor_div(c - need, e.dy));
            } else if (e.dy < 0) {
                lo = std::max(lo, ceil_div(need - c, -e.dy));
            } else if (c < need) {
                row_dead = true;
                break;
            }
        }
        if (row_dead || lo > hi) continue;
        const int x_first = static_cast<int>(ceil_div(lo, kSub));
        const int x_last = static_cast<int>(floor_div(hi, kSub));
        if (x_first <= x_last) out.push_back({py, x_first, x_last});
    }
    return out;
}

// ---------------------------------------------------------------------------

PlaneCoeffs plane_from_world_triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    const Vec3 n = (p1 - p0).cross(p2 - p0);
    const double scale = (p1 - p0).norm() * (p2 - p0).norm();
    if (n.norm() <= 1e-12 * std::max(scale, 1e-300))
        fail(Err::DegenerateTriangle, "world vertices are collinear");
    return {n.x, n.y, n.z, n.dot(p0)};
}

double constz_slope(const PlaneCoeffs& p) {
    if (p.b == 0.0)
        fail(Err::HorizontalDegeneracy, "constant-depth lines are vertical; swap axes");
    return -p.a / p.b;
}

double constz_depth(const PlaneCoeffs& p, double h) {
    const double den = p.b * h + p.c;
    if (den == 0.0) fail(Err::BehindProjection, "line projects through the eye");
    return p.d / den;
}

// ---------------------------------------------------------------------------

ShearedRect bounding_rect(const ScreenTriangle& t, double k) {
    if (!snap_triangle(t).valid)
        fail(Err::DegenerateTriangle, "triangle has no area on the subpixel grid");
    ShearedRect r;
    r.k = k;
    double w_top = 0.0;
    double y_top = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        const Vec2 p = t.v[size_t(i)].pos;
        const double w = p.y - k * p.x;
        if (i == 0) {
            r.x_min = r.x_max = p.x;
            r.w_min = r.w_max = w;
        } else {
            r.x_min = std::min(r.x_min, p.x);
            r.x_max = std::max(r.x_max, p.x);
            r.w_min = std::min(r.w_min, w);
            r.w_max = std::max(r.w_max, w);
        }
        if (p.y < y_top) {
            y_top = p.y;
            w_top = w;
        }
    }
    r.r_offset = w_top - r.w_min;
    return r;
}

std::vector<TraversalPixel> traverse_bounding_rect(const ScreenTriangle& t,
                                                   const ShearedRect& r) {
    const SnapTri s = snap_triangle(t);
    if (!s.valid) fail(Err::DegenerateTriangle, "triangle has no area on the subpixel grid");
    std::vector<TraversalPixel> out;
    const int x_lo = static_cast<int>(std::ceil(r.x_min));
    const int x_hi = static_cast<int>(std::floor(r.x_max));
    if (x_lo > x_hi) return out;
    const int lines = static_cast<int>(std::floor(r.w_max - r.w_min + 0.5));
    for (int j = 0; j <= lines; ++j) {
        const double w = r.w_min + j;
        // The line stops at its last triangle pixel, so no pixel right of the
        // triangle is ever visited; the left margin is walked in full.
        int x_stop = x_lo - 1;
        for (int x = x_hi; x >= x_lo; --x) {
            const int y = static_cast<int>(std::floor(r.k * x + w + 0.5));
            if (covers_snapped(s, x, y)) {
                x_stop = x;
                break;
            }
        }
        for (int x = x_lo; x <= x_stop; ++x) {
            const int y = static_cast<int>(std::floor(r.k * x + w + 0.5));
            out.push_back({x, y, j});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

int nrl_intercept(const NrlSetup& s, double x_p, double y_p) {
    const double t = s.dy * x_p;
    const double n = s.ceiling ? std::ceil(t) : std::floor(t + 0.5);
    return static_cast<int>(std::llround(y_p - n));
}

std::vector<NrlCoverage> nrl_cover(const NrlSetup& s, int x0, int y_top, int width,
                                   int height) {
    std::map<int, NrlCoverage> lines;
    for (int x = x0; x < x0 + width; ++x) {
        const double t = s.vertical ? 0.0 : s.dy * x;
        const int n = static_cast<int>(s.ceiling ? std::ceil(t) : std::floor(t + 0.5));
        for (int y = y_top; y < y_top + height; ++y) {
            const int id = s.vertical ? x : y - n;
            auto& bucket = lines[id];
            bucket.y0 = id;
            bucket.pixels.push_back({x, y});
        }
    }
    std::vector<NrlCoverage> out;
    out.reserve(lines.size());
    for (auto& [id, cov] : lines) out.push_back(std::move(cov));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Cell> serpentine_window(Cell origin, int dx, int dy, int n_rows) {
    const int m = std::max(std::abs(dx), std::abs(dy));
    if (m == 0) fail(Err::ZeroVector, "window base vector must be nonzero");
    // One period of the base line's integer steps, memorized; the same steps
    // drive both the in-row walk and (rotated a quarter turn) the row shifts.
    const auto point = [&](long k) {
        return Cell{static_cast<int>(floor_div(2 * k * dx + m, 2 * m)),
                    static_cast<int>(floor_div(2 * k * dy + m, 2 * m))};
    };
    std::vector<Cell> steps(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const Cell a = point(k), b = point(k + 1);
        steps[size_t(k)] = {b.x - a.x, b.y - a.y};
    }
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(std::max(n_rows, 0)));
    Cell cur = origin;
    bool forward = true;
    for (int i = 0; i < n_rows; ++i) {
        out.push_back(cur);
        if (forward) {
            for (int k = 0; k + 1 < m; ++k) {
                cur.x += steps[size_t(k)].x;
                cur.y += steps[size_t(k)].y;
                out.push_back(cur);
            }
        } else {
            for (int k = m - 2; k >= 0; --k) {
                cur.x -= steps[size_t(k)].x;
                cur.y -= steps[size_t(k)].y;
                out.push_back(cur);
            }
        }
        const Cell s = steps[size_t(i % m)];
        cur.x += -s.y;  // quarter-turn replay of the memorized step
        cur.y += s.x;
        forward = !forward;
    }
    return out;
}

// ---------------------------------------------------------------------------

AnisoFootprint aniso_footprint(const tex::ProjectiveTexMap& m, double x, double y) {
    const double den = m.g * x + m.h * y + m.i;
    if (!(den > 0.0)) fail(Err::BehindProjection, "footprint requested behind the horizon");
    const double r2 = 1.0 / (den * den);
    AnisoFootprint fp;
    fp.p2 = {r2 * (y * (m.a * m.h - m.g * m.b) + m.a * m.i - m.g * m.c),
             r2 * (y * (m.d * m.h - m.g * m.e) + m.d * m.i - m.g * m.f)};
    fp.p1 = {r2 * (x * (m.b * m.g - m.a * m.h) + m.b * m.i - m.h * m.c),
             r2 * (x * (m.e * m.g - m.d * m.h) + m.e * m.i - m.h * m.f)};
    return fp;
}

Vec2 aniso_footprint_line(const tex::ProjectiveTexMap& m, double k, double h_int) {
    const double den = m.h * h_int + m.i;
    if (!(den > 0.0)) fail(Err::BehindProjection, "line lies behind the horizon");
    const double r2 = 1.0 / (den * den);
    // In-line derivative d/dx with y = k x + h_int; the x terms cancel when
    // g + h k = 0, leaving one constant vector for the whole line.
    return {r2 * (h_int * (m.a * m.h - m.g * m.b) + m.a * m.i - m.g * m.c +
                  k * (m.b * m.i - m.h * m.c)),
            r2 * (h_int * (m.d * m.h - m.g * m.e) + m.d * m.i - m.g * m.f +
                  k * (m.e * m.i - m.h * m.f))};
}

std::array<std::uint8_t, 3> aniso_sample(const Image& texture, const AnisoFootprint& fp,
                                         tex::Uv uv, int n) {
    long sum[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double si = (i + 0.5) / n - 0.5;
            const double sj = (j + 0.5) / n - 0.5;
            const double u = uv.u + si * fp.p1.x + sj * fp.p2.x;
            const double v = uv.v + si * fp.p1.y + sj * fp.p2.y;
            const auto texel = texture.texel_clamped(static_cast<int>(std::floor(u * texture.width)),
                                                     static_cast<int>(std::floor(v * texture.height)));
            for (int c = 0; c < 3; ++c) sum[c] += texel[size_t(c)];
        }
    }
    const long count = long(n) * n;
    return {static_cast<std::uint8_t>((sum[0] + count / 2) / count),
            static_cast<std::uint8_t>((sum[1] + count / 2) / count),
            static_cast<std::uint8_t>((sum[2] + count / 2) / count)};
}

}  // namespace percor::raster
