// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "percor/error.hpp"
#include "percor/image.hpp"
#include "percor/opcount.hpp"
#include "percor/texmap.hpp"
#include "percor/vec.hpp"

namespace percor::raster {

// Pixel centers sit at integer coordinates, y grows downward. Vertex
// positions are snapped to a 1/256 subpixel grid so coverage is exact
// integer arithmetic.
inline constexpr int kSubpixelBits = 8;

struct Vertex {
    Vec2 pos;
    double z = 1.0;         // view depth, positive in front of the camera
    double intensity = 1.0;  // scalar shade at the vertex
    Vec3 normal{0, 0, 1};
    tex::Uv uv;
};

struct ScreenTriangle {
    std::array<Vertex, 3> v;
};

// Inclusive pixel run on one scan line.
struct Span {
    int y = 0;
    int x_first = 0;
    int x_last = 0;
};

// Exact point-in-triangle for the pixel center, top-left fill rule.
bool covers(const ScreenTriangle& t, int px, int py);

// Scan conversion whose spans equal the per-pixel covers() predicate: shared
// edges between adjacent triangles produce no gaps and no double hits.
std::vector<Span> scanline_triangle(const ScreenTriangle& t);

// ---------------------------------------------------------------------------
// Constant-depth scan direction from the triangle's world plane.

struct PlaneCoeffs {
    double a = 0, b = 0, c = 0, d = 0;  // a X + b Y + c Z = d
};

PlaneCoeffs plane_from_world_triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2);

// Slope k of view-plane lines y = k x + h along which the plane's depth is
// constant; vertical families (b = 0) are the caller's axis-swap case.
double constz_slope(const PlaneCoeffs& p);

// Depth of the whole constant-z line with intercept h.
double constz_depth(const PlaneCoeffs& p, double h);

// Texture pairs at unit-x steps along the ideal line y = k x + h, where the
// map denominator is constant: one division buys the whole row.
template <class T>
std::vector<std::pair<T, T>> constz_texture_row(const tex::ProjectiveTexMap& m, double k,
                                                double h, double x_start, int n) {
    std::vector<std::pair<T, T>> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n <= 0) return out;
    const T x0(x_start), y0(T(k) * x0 + T(h));
    const T den = T(m.g) * x0 + T(m.h) * y0 + T(m.i);
    if (!(num::raw(den) > 0.0)) fail(Err::BehindProjection, "line starts behind the horizon");
    const T rcp = T(1.0) / den;  // the row's only division
    T u = (T(m.a) * x0 + T(m.b) * y0 + T(m.c)) * rcp;
    T v = (T(m.d) * x0 + T(m.e) * y0 + T(m.f)) * rcp;
    const T du = (T(m.a) + T(m.b) * T(k)) * rcp;
    const T dv = (T(m.d) + T(m.e) * T(k)) * rcp;
    out.emplace_back(u, v);
    for (int i = 1; i < n; ++i) {
        u += du;
        v += dv;
        out.emplace_back(u, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sheared bounding rectangle: the tightest slab of constant-z lines and
// x extent around a triangle.

struct ShearedRect {
    double k = 0;              // scan-line slope
    double x_min = 0, x_max = 0;
    double w_min = 0, w_max = 0;  // intercept range; w = y - k x
    double r_offset = 0;          // top vertex's intercept above the slab base
};

ShearedRect bounding_rect(const ScreenTriangle& t, double k);

struct TraversalPixel {
    int x = 0, y = 0;
    int line = 0;
};

// Walks the rectangle line by line, clipping each line at its last pixel
// covered by the triangle, so nothing right of the triangle is visited.
std::vector<TraversalPixel> traverse_bounding_rect(const ScreenTriangle& t,
                                                   const ShearedRect& r);

// ---------------------------------------------------------------------------
// Non-orthogonal rasterization lines: lines of constant map denominator.

struct NrlSetup {
    double dy = 0;          // slope; g x + h (dy x) = 0 along the ideal line
    bool vertical = false;  // h = 0: the family degenerates to columns
    bool ceiling = false;   // quantize y upward instead of to nearest
};

// One division per polygon. h = 0 degrades to vertical lines; g = h = 0 to
// horizontal rows (the map is then affine anyway).
template <class T>
NrlSetup nrl_setup(const tex::ProjectiveTexMap& m, bool ceiling = false) {
    NrlSetup s;
    s.ceiling = ceiling;
    if (m.h == 0.0) {
        s.vertical = m.g != 0.0;
        return s;
    }
    s.dy = num::raw(-T(m.g) / T(m.h));
    return s;
}

template <class T>
struct NrlLine {
    int y0 = 0;   // integer intercept of the discretized line at x = 0
    T k{};        // reciprocal denominator on the ideal line
    T k2h{};      // cached k*k*h for the per-pixel correction
};

// One division per line, taken where the line crosses the Y axis.
template <class T>
NrlLine<T> nrl_line(const tex::ProjectiveTexMap& m, int y0) {
    NrlLine<T> line;
    line.y0 = y0;
    const T den = T(m.h) * T(double(y0)) + T(m.i);
    if (!(num::raw(den) > 0.0)) fail(Err::BehindProjection, "line denominator not positive");
    line.k = T(1.0) / den;
    line.k2h = line.k * line.k * T(m.h);
    return line;
}

// Integer intercept of the line through (x_p, y_p).
int nrl_intercept(const NrlSetup& s, double x_p, double y_p);

template <class T>
struct NrlPixel {
    int y = 0;
    T u{}, v{};
    T r{};  // signed quantization residual of the ideal ordinate
};

// Counted per-pixel sequence: 8 multiplies, 7 adds; the y quantizer itself is
// a hardware rounding step, not arithmetic.
template <class T>
NrlPixel<T> nrl_uv(const tex::ProjectiveTexMap& m, const NrlSetup& s, const NrlLine<T>& line,
                   int x_i) {
    NrlPixel<T> out;
    const T x{double(x_i)};
    const T t = T(s.dy) * x;
    const T n = s.ceiling ? num::ceil_quantize(t) : num::round_half_up(t);
    const T y = T(double(line.y0)) + n;
    out.y = static_cast<int>(num::raw(y));
    out.r = t - n;
    const T kor = line.k + out.r * line.k2h;
    out.u = (T(m.a) * x + T(m.b) * y + T(m.c)) * kor;
    out.v = (T(m.d) * x + T(m.e) * y + T(m.f)) * kor;
    return out;
}

// Pixels of the line family over an integer rectangle, grouped by line; every
// rectangle pixel appears exactly once across the family.
struct NrlCoverage {
    int y0 = 0;
    std::vector<std::array<int, 2>> pixels;
};
std::vector<NrlCoverage> nrl_cover(const NrlSetup& s, int x0, int y_top, int width, int height);

// ---------------------------------------------------------------------------
// Serpentine traversal of a stepped window: row cells replay one memorized
// integer step sequence; row-to-row transitions replay the same steps rotated
// a quarter turn, and the walk alternates direction.

struct Cell {
    int x = 0, y = 0;
    bool operator==(const Cell&) const = default;
};

std::vector<Cell> serpentine_window(Cell origin, int dx, int dy, int n_rows);

// ---------------------------------------------------------------------------
// Anisotropic footprint: texture-space images of unit pixel steps.

struct AnisoFootprint {
    Vec2 p1;  // image of a +1 step in y
    Vec2 p2;  // image of a +1 step in x
};

AnisoFootprint aniso_footprint(const tex::ProjectiveTexMap& m, double x, double y);

// Along a constant-denominator line of slope k the in-line derivative is one
// constant vector.
Vec2 aniso_footprint_line(const tex::ProjectiveTexMap& m, double k, double h_int);

// Unweighted box average of n*n nearest-texel samples over the parallelogram
// uv +- p1/2 +- p2/2, clamped at the borders.
std::array<std::uint8_t, 3> aniso_sample(const Image& texture, const AnisoFootprint& fp,
                                         tex::Uv uv, int n = 4);

}  // namespace percor::raster
