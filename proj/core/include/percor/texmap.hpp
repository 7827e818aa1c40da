// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "percor/error.hpp"
#include "percor/opcount.hpp"
#include "percor/vec.hpp"

namespace percor::tex {

inline constexpr double kDefaultDu = 1.0 / 256.0;

struct Uv {
    double u = 0, v = 0;
};

// Plane-to-plane projective map
//   u = (a x + b y + c) / (g x + h y + i)
//   v = (d x + e y + f) / (g x + h y + i)
struct ProjectiveTexMap {
    double a = 0, b = 0, c = 0;
    double d = 0, e = 0, f = 0;
    double g = 0, h = 0, i = 1;

    double coefficient_scale() const {
        using std::fabs;
        return std::max({fabs(a), fabs(b), fabs(c), fabs(d), fabs(e), fabs(f), fabs(g), fabs(h),
                         fabs(i)});
    }
};

// Direct evaluation: 6 multiplies, 6 adds, 2 divides on the counted path.
template <class T>
std::pair<T, T> uv_kernel(const ProjectiveTexMap& m, T x, T y) {
    const T den = T(m.g) * x + T(m.h) * y + T(m.i);
    const T nu = T(m.a) * x + T(m.b) * y + T(m.c);
    const T nv = T(m.d) * x + T(m.e) * y + T(m.f);
    return {nu / den, nv / den};
}

// Checked evaluation; the denominator must be positive on the visible side.
Uv exact_uv(const ProjectiveTexMap& m, double x, double y);

// Homography from four screen corners to their texture pairs, normalized to
// i = 1. Collinear corners (or a vanishing i) leave the 8x8 system singular.
ProjectiveTexMap derive_from_quad(const std::array<Vec2, 4>& corners,
                                  const std::array<Uv, 4>& uvs);

// Rational-linear map of a 3-D triangle: u/z, v/z and 1/z are affine in
// screen space, which pins all nine coefficients from three vertices.
ProjectiveTexMap map_from_screen_triangle(const std::array<Vec2, 3>& corners,
                                          const std::array<Uv, 3>& uvs,
                                          const std::array<double, 3>& depths);

// ---------------------------------------------------------------------------
// Midpoint stepping: keeps the quantized coordinate inside the half-open band
// [exact - step/2, exact + step/2) using two signed window conditions W and Q
// that are updated with adds and compares only.

template <class T>
struct MidpointState {
    struct Channel {
        T u{};        // quantized coordinate, a multiple of step
        T w{}, q{};   // in band iff W >= 0 and Q < 0
        T step{};
        T cwx{}, cqx{};  // per-unit-x drift of W and Q
        T cwy{}, cqy{};  // per-unit-y drift
    };
    Channel cu, cv;
    T e{};        // 2 (g x + h y + i); positive on the visible side
    T eg{}, eh{};  // 2g, 2h
    int x = 0, y = 0;
};

namespace detail {

template <class T>
void midpoint_adjust(MidpointState<T>& s, typename MidpointState<T>::Channel& ch) {
    // One lattice hop moves both conditions by step*E, so each loop strictly
    // approaches its bound; more hops than lattice values means the state
    // was poisoned (nonpositive denominator).
    const T hop = ch.step * s.e;
    long cap = static_cast<long>(std::ceil(1.0 / num::raw(ch.step))) + 2;
    while (ch.w < T(0.0)) {
        ch.u += ch.step;
        ch.w += hop;
        ch.q += hop;
        if (--cap < 0) fail(Err::NonConvergence, "midpoint window failed to close");
    }
    while (!(ch.q < T(0.0))) {
        ch.u -= ch.step;
        ch.w -= hop;
        ch.q -= hop;
        if (--cap < 0) fail(Err::NonConvergence, "midpoint window failed to close");
    }
}

template <class T>
typename MidpointState<T>::Channel midpoint_channel(double p1, double p2, double p3,
                                                    const ProjectiveTexMap& m, double step_in,
                                                    const MidpointState<T>& s) {
    typename MidpointState<T>::Channel ch;
    ch.step = T(step_in);
    ch.cwx = T(2.0 * p1) - ch.step * T(m.g);
    ch.cqx = T(2.0 * p1) + ch.step * T(m.g);
    ch.cwy = T(2.0 * p2) - ch.step * T(m.h);
    ch.cqy = T(2.0 * p2) + ch.step * T(m.h);
    const T cw0 = T(2.0 * p3) - ch.step * T(m.i);
    const T cq0 = T(2.0 * p3) + ch.step * T(m.i);
    const T x = T(double(s.x)), y = T(double(s.y));
    const T num = T(p1) * x + T(p2) * y + T(p3);
    const T den = T(m.g) * x + T(m.h) * y + T(m.i);
    const T exact = num / den;
    ch.u = ch.step * num::round_half_up(exact / ch.step);
    ch.w = ch.u * s.e - x * ch.cwx - y * ch.cwy - cw0;
    ch.q = ch.u * s.e - x * ch.cqx - y * ch.cqy - cq0;
    return ch;
}

}  // namespace detail

template <class T = double>
MidpointState<T> midpoint_init(const ProjectiveTexMap& m, int x0, int y0,
                               double du = kDefaultDu, double dv = kDefaultDu) {
    MidpointState<T> s;
    s.x = x0;
    s.y = y0;
    s.eg = T(2.0 * m.g);
    s.eh = T(2.0 * m.h);
    s.e = T(2.0) * (T(m.g) * T(double(x0)) + T(m.h) * T(double(y0)) + T(m.i));
    if (!(num::raw(s.e) > 0.0))
        fail(Err::BehindProjection, "denominator not positive at start pixel");
    s.cu = detail::midpoint_channel<T>(m.a, m.b, m.c, m, du, s);
    s.cv = detail::midpoint_channel<T>(m.d, m.e, m.f, m, dv, s);
    detail::midpoint_adjust(s, s.cu);
    detail::midpoint_adjust(s, s.cv);
    return s;
}

template <class T>
void midpoint_step_x(MidpointState<T>& s, int dir) {
    s.x += dir;
    if (dir > 0) {
        const T tu = s.cu.u * s.eg;
        s.cu.w = s.cu.w + tu - s.cu.cwx;
        s.cu.q = s.cu.q + tu - s.cu.cqx;
        const T tv = s.cv.u * s.eg;
        s.cv.w = s.cv.w + tv - s.cv.cwx;
        s.cv.q = s.cv.q + tv - s.cv.cqx;
        s.e += s.eg;
    } else {
        const T tu = s.cu.u * s.eg;
        s.cu.w = s.cu.w - tu + s.cu.cwx;
        s.cu.q = s.cu.q - tu + s.cu.cqx;
        const T tv = s.cv.u * s.eg;
        s.cv.w = s.cv.w - tv + s.cv.cwx;
        s.cv.q = s.cv.q - tv + s.cv.cqx;
        s.e -= s.eg;
    }
    detail::midpoint_adjust(s, s.cu);
    detail::midpoint_adjust(s, s.cv);
}

template <class T>
void midpoint_step_y(MidpointState<T>& s, int dir) {
    s.y += dir;
    if (dir > 0) {
        const T tu = s.cu.u * s.eh;
        s.cu.w = s.cu.w + tu - s.cu.cwy;
        s.cu.q = s.cu.q + tu - s.cu.cqy;
        const T tv = s.cv.u * s.eh;
        s.cv.w = s.cv.w + tv - s.cv.cwy;
        s.cv.q = s.cv.q + tv - s.cv.cqy;
        s.e += s.eh;
    } else {
        const T tu = s.cu.u * s.eh;
        s.cu.w = s.cu.w - tu + s.cu.cwy;
        s.cu.q = s.cu.q - tu + s.cu.cqy;
        const T tv = s.cv.u * s.eh;
        s.cv.w = s.cv.w - tv + s.cv.cwy;
        s.cv.q = s.cv.q - tv + s.cv.cqy;
        s.e -= s.eh;
    }
    detail::midpoint_adjust(s, s.cu);
    detail::midpoint_adjust(s, s.cv);
}

// ---------------------------------------------------------------------------
// Row-wise quadratic replacements for the per-pixel division.

struct QuadCoeffs {
    double a2 = 0, a1 = 0, a0 = 0;  // a2 t^2 + a1 t + a0

    double operator()(double t) const { return (a2 * t + a1) * t + a0; }
};

// Fit through (0, u0), (1/2, u_mid), (1, u1) on the normalized chord. The
// dropped-endpoint variant doubles the far term of the linear coefficient,
// cancelling p(1) to zero instead of u1; it exists for side-by-side study.
QuadCoeffs quad_fit_normalized(double u0, double u_mid, double u1, bool dropped_endpoint = false);

// Fit through (0, u0), (x_int, u_int), (1, u1) with an interior anchor.
QuadCoeffs quad_fit_anchored(double u0, double u_int, double u1, double x_int);

// Anchor choice by endpoint pattern; near_tol decides when an endpoint
// counts as touching 0 or 1.
double recommend_anchor(double u0, double u1, double near_tol = 0.05);

// Fit through three raw-abscissa samples by Cramer's rule; costs exactly one
// division.
QuadCoeffs quad_fit_unnormalized(double x0, double u0, double x1, double u1, double x2,
                                 double u2);

// Templated fit cores, bit-identical to the double entry points. Instantiate
// with num::Real to put a row's fit arithmetic on the ledger.
template <class T>
struct QuadCoeffsT {
    T a2{}, a1{}, a0{};

    T operator()(T t) const { return (a2 * t + a1) * t + a0; }
};

template <class T>
QuadCoeffsT<T> quad_fit_anchored_t(T u0, T u_int, T u1, T x_int) {
    if (!(num::raw(x_int) > 0.0 && num::raw(x_int) < 1.0))
        fail(Err::AnchorOutOfRange, "interior anchor must lie strictly inside (0,1)");
    const T r = x_int * (u1 - u0);
    const T s = u0 - u_int;
    const T q = T(1.0) / (x_int * x_int - x_int);
    return {-(q * (r + s)), q * (r * x_int + s), u0};
}

template <class T>
QuadCoeffsT<T> quad_fit_unnormalized_t(T x0, T u0, T x1, T u1, T x2, T u2) {
    const T s0 = x0 * x0, s1 = x1 * x1, s2 = x2 * x2;
    const T det = s0 * (x1 - x2) + s1 * (x2 - x0) + s2 * (x0 - x1);
    const double span = std::max(
        {std::fabs(num::raw(x0)), std::fabs(num::raw(x1)), std::fabs(num::raw(x2)), 1.0});
    if (std::fabs(num::raw(det)) <= 1e-12 * span * span * span)
        fail(Err::CoincidentNodes, "abscissas must be pairwise distinct");
    const T d = T(1.0) / det;  // the row's only division
    QuadCoeffsT<T> c;
    c.a2 = d * (u0 * (x1 - x2) + u1 * (x2 - x0) + u2 * (x0 - x1));
    c.a1 = d * (s0 * (u1 - u2) + s1 * (u2 - u0) + s2 * (u0 - u1));
    c.a0 = d * (s0 * (x1 * u2 - x2 * u1) + s1 * (x2 * u0 - x0 * u2) + s2 * (x0 * u1 - x1 * u0));
    return c;
}

// Both channels of one row share the single determinant division.
template <class T>
struct QuadPairT {
    QuadCoeffsT<T> u, v;
};

template <class T>
QuadPairT<T> quad_fit_unnormalized_uv_t(T x0, T x1, T x2, T u0, T u1, T u2, T v0, T v1,
                                        T v2) {
    const T s0 = x0 * x0, s1 = x1 * x1, s2 = x2 * x2;
    const T det = s0 * (x1 - x2) + s1 * (x2 - x0) + s2 * (x0 - x1);
    const double span = std::max(
        {std::fabs(num::raw(x0)), std::fabs(num::raw(x1)), std::fabs(num::raw(x2)), 1.0});
    if (std::fabs(num::raw(det)) <= 1e-12 * span * span * span)
        fail(Err::CoincidentNodes, "abscissas must be pairwise distinct");
    const T d = T(1.0) / det;  // the row's only division
    auto channel = [&](T u0c, T u1c, T u2c) {
        QuadCoeffsT<T> c;
        c.a2 = d * (u0c * (x1 - x2) + u1c * (x2 - x0) + u2c * (x0 - x1));
        c.a1 = d * (s0 * (u1c - u2c) + s1 * (u2c - u0c) + s2 * (u0c - u1c));
        c.a0 = d * (s0 * (x1 * u2c - x2 * u1c) + s1 * (x2 * u0c - x0 * u2c) +
                    s2 * (x0 * u1c - x1 * u0c));
        return c;
    };
    return {channel(u0, u1, u2), channel(v0, v1, v2)};
}

// ---------------------------------------------------------------------------
/// Quadratic Bezier row model: both texture channels ride one parameter, with
// shared abscissas and per-channel control ordinates.

struct BezierRow {
    double y = 0;
    double x0 = 0, x1 = 0, x2 = 0;  // x1 is the tangent-intersection abscissa
    double u0 = 0, u1 = 0, u2 = 0;
    double v0 = 0, v1 = 0, v2 = 0;
    double au = 0, av = 0;  // numerator constants of du/dx, dv/dx
    double bden = 0;        // h y + i for this row
    double c0 = 0, c2 = 0;  // squared denominators at the row ends
};

struct BezierSample {
    double x = 0, u = 0, v = 0;
};

// Builds the row model on [x_start, x_end] at scan line y. Rows with a
// constant denominator have parallel tangents and no finite control point.
BezierRow bezier_row(const ProjectiveTexMap& m, double y, double x_start, double x_end);

// Row model one scan line down; the derivative constants advance by fixed
// increments instead of being recomputed.
BezierRow bezier_row_next(const ProjectiveTexMap& m, const BezierRow& row);

BezierSample bezier_point(const BezierRow& row, double t);

// Closed-form parameter of the curve point with abscissa x.
double bezier_t_of_x(const BezierRow& row, double x);

// Streams n forward-difference steps of size dt starting at t0. Only the
// first sample costs full evaluations; each further one is three adds per
// coordinate.
std::vector<BezierSample> bezier_eval_fd(const BezierRow& row, double t0, double dt, int n);

struct BezierPixel {
    double x = 0;  // achieved abscissa, within eps of the integer target
    double t = 0;
    double u = 0, v = 0;
};

struct BezierIterParams {
    double eps = 1e-3;     // pixels
    double dt0 = 0;        // whole step; 0 means 1 / (4 * row length)
    int max_halvings = 24;
};

// Per-pixel parameter recovery by whole-step accumulation plus signed binary
// correction; each pixel reuses the previous pixel's parameter increment.
std::vector<BezierPixel> bezier_param_iterative(const BezierRow& row,
                                                const BezierIterParams& params = {});

// Quadratic t(x) through (x0, 0), (xn, tn), (x2, 1). By default the middle
// node pairs the control abscissa with its true curve parameter.
QuadCoeffs bezier_param_quadratic(const BezierRow& row, std::optional<double> xn = {},
                                  std::optional<double> tn = {});

// ---------------------------------------------------------------------------
// Small bivariate interpolation, exact at the sample points.

enum class BivarOrder {
    Biquadratic,  // x^2, y^2, xy, x, y, 1
    Bicubic,      // x^3, y^3, x^2 y, x y^2, x^2, y^2, x y, x, y, 1
};

struct SamplePoint {
    double x = 0, y = 0, value = 0;
};

struct BivariatePoly {
    BivarOrder order = BivarOrder::Biquadratic;
    std::array<double, 10> coef{};

    int terms() const { return order == BivarOrder::Biquadratic ? 6 : 10; }
    double operator()(double x, double y) const;
};

// Needs exactly 6 (biquadratic) or 10 (bicubic) points in general position.
BivariatePoly fit_bivariate(BivarOrder order, std::span<const SamplePoint> pts);

// Counted evaluation of the fitted polynomial.
template <class T>
T bivariate_kernel(const BivariatePoly& p, T x, T y) {
    const auto& c = p.coef;
    if (p.order == BivarOrder::Biquadratic) {
        return T(c[0]) * x * x + T(c[1]) * y * y + T(c[2]) * x * y + T(c[3]) * x + T(c[4]) * y +
               T(c[5]);
    }
    const T x2 = x * x, y2 = y * y;
    return T(c[0]) * x2 * x + T(c[1]) * y2 * y + T(c[2]) * x2 * y + T(c[3]) * x * y2 +
           T(c[4]) * x2 + T(c[5]) * y2 + T(c[6]) * x * y + T(c[7]) * x + T(c[8]) * y + T(c[9]);
}

// ---------------------------------------------------------------------------
// Structure detection and the specialized scan paths it unlocks.

enum class MapClass { Affine, RowConstantV, ColConstantU, General };

MapClass classify_map(const ProjectiveTexMap& m, double tol = 1e-12);

// Row scan at integer y over x in [x_begin, x_end). RowConstantV spends one
// reciprocal per row and a multiply-add per pixel; Affine spends no division
// at all. Other classes do not gain from a row scan and are rejected.
template <class T>
std::vector<std::pair<T, T>> row_uv_specialized(const ProjectiveTexMap& m, MapClass cls, int y,
                                                int x_begin, int x_end) {
    std::vector<std::pair<T, T>> out;
    out.reserve(static_cast<std::size_t>(std::max(0, x_end - x_begin)));
    const T ty{double(y)};
    if (cls == MapClass::RowConstantV) {
        const T rcp = T(1.0) / (T(m.h) * ty + T(m.i));
        const T v = (T(m.e) * ty + T(m.f)) * rcp;
        const T au = T(m.a) * rcp;           // row-constant slope of u in x
        const T bu = (T(m.b) * ty + T(m.c)) * rcp;
        for (int x = x_begin; x < x_end; ++x) {
            const T u = au * T(double(x)) + bu;
            out.emplace_back(u, v);
        }
        return out;
    }
    if (cls == MapClass::Affine) {
        // Division-free when the map is already i-normalized; otherwise one
        // reciprocal folds i into the row constants.
        T a(m.a), b(m.b), c(m.c), d(m.d), e(m.e), f(m.f);
        if (m.i != 1.0) {
            const T rcp = T(1.0) / T(m.i);
            a = a * rcp, b = b * rcp, c = c * rcp;
            d = d * rcp, e = e * rcp, f = f * rcp;
        }
        const T bu = b * ty + c, bv = e * ty + f;
        for (int x = x_begin; x < x_end; ++x) {
            const T tx{double(x)};
            out.emplace_back(a * tx + bu, d * tx + bv);
        }
        return out;
    }
    fail(Err::ClassMismatch, "row scan specialization needs RowConstantV or Affine");
}

// Column counterpart for ColConstantU: one reciprocal per column.
template <class T>
std::vector<std::pair<T, T>> col_uv_specialized(const ProjectiveTexMap& m, MapClass cls, int x,
                                                int y_begin, int y_end) {
    if (cls != MapClass::ColConstantU)
        fail(Err::ClassMismatch, "column scan specialization needs ColConstantU");
    std::vector<std::pair<T, T>> out;
    out.reserve(static_cast<std::size_t>(std::max(0, y_end - y_begin)));
    const T tx{double(x)};
    const T rcp = T(1.0) / (T(m.g) * tx + T(m.i));
    const T u = (T(m.a) * tx + T(m.c)) * rcp;
    const T ev = T(m.e) * rcp;
    const T fv = (T(m.d) * tx + T(m.f)) * rcp;
    for (int y = y_begin; y < y_end; ++y) {
        const T v = ev * T(double(y)) + fv;
        out.emplace_back(u, v);
    }
    return out;
}

}  // namespace percor::tex
