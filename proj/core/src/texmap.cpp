// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/texmap.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace percor::tex {

Uv exact_uv(const ProjectiveTexMap& m, double x, double y) {
    const double den = m.g * x + m.h * y + m.i;
    if (!(den > 0.0)) fail(Err::BehindProjection, "map denominator not positive");
    return {(m.a * x + m.b * y + m.c) / den, (m.d * x + m.e * y + m.f) / den};
}

ProjectiveTexMap derive_from_quad(const std::array<Vec2, 4>& corners,
                                  const std::array<Uv, 4>& uvs) {
    // Eight unknowns with i pinned to 1; each corner contributes the two
    // cross-multiplied incidence rows.
    Eigen::Matrix<double, 8, 8> s = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> rhs;
    for (int k = 0; k < 4; ++k) {
        const double x = corners[size_t(k)].x, y = corners[size_t(k)].y;
        const double u = uvs[size_t(k)].u, v = uvs[size_t(k)].v;
        s.row(2 * k) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        s.row(2 * k + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        rhs(2 * k) = u;
        rhs(2 * k + 1) = v;
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(s);
    if (!lu.isInvertible()) fail(Err::DegenerateQuad, "corner placement leaves the map underdetermined");
    const Eigen::Matrix<double, 8, 1> t = lu.solve(rhs);
    return {t(0), t(1), t(2), t(3), t(4), t(5), t(6), t(7), 1.0};
}

ProjectiveTexMap map_from_screen_triangle(const std::array<Vec2, 3>& corners,
                                          const std::array<Uv, 3>& uvs,
                                          const std::array<double, 3>& depths) {
    for (double z : depths)
        if (!(z > 0.0)) fail(Err::PointBehindCamera, "vertex depth must be positive");
    // u/z, v/z and 1/z are each affine over the screen, sharing one 3x3 system.
    Eigen::Matrix3d s;
    Eigen::Matrix3d rhs;
    for (int k = 0; k < 3; ++k) {
        s.row(k) << corners[size_t(k)].x, corners[size_t(k)].y, 1.0;
        const double iz = 1.0 / depths[size_t(k)];
        rhs.row(k) << uvs[size_t(k)].u * iz, uvs[size_t(k)].v * iz, iz;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(s);
    if (!lu.isInvertible()) fail(Err::DegenerateTriangle, "screen corners are collinear");
    const Eigen::Matrix3d t = lu.solve(rhs);
    return {t(0, 0), t(1, 0), t(2, 0), t(0, 1), t(1, 1), t(2, 1), t(0, 2), t(1, 2), t(2, 2)};
}

// ---------------------------------------------------------------------------

QuadCoeffs quad_fit_normalized(double u0, double u_mid, double u1, bool dropped_endpoint) {
    QuadCoeffs c;
    c.a2 = 2.0 * u0 - 4.0 * u_mid + 2.0 * u1;
    // The dropped-endpoint linear term ends in -2*u1, cancelling p(1) to zero;
    // it is kept only for side-by-side study.
    c.a1 = dropped_endpoint ? -3.0 * u0 + 4.0 * u_mid - 2.0 * u1
                            : -3.0 * u0 + 4.0 * u_mid - u1;
    c.a0 = u0;
    return c;
}

QuadCoeffs quad_fit_anchored(double u0, double u_int, double u1, double x_int) {
    const auto c = quad_fit_anchored_t<double>(u0, u_int, u1, x_int);
    return {c.a2, c.a1, c.a0};
}

double recommend_anchor(double u0, double u1, double near_tol) {
    const double lo = near_tol, hi = 1.0 - near_tol;
    if (u0 <= lo) return 0.25;
    if (u1 <= lo) return 0.75;
    if (u0 >= hi) {
        const double d = u0 - u1;
        if (d <= 0.35) return 0.5;
        if (d <= 0.75) return 0.6;
        return 0.7;
    }
    if (u1 >= hi) {
        const double d = u1 - u0;
        if (d <= 0.35) return 0.5;
        if (d <= 0.75) return 0.4;
        return 0.3;
    }
    if (u0 < 0.5 && u1 < 0.5 && u0 != u1) return u0 < u1 ? 0.4 : 0.6;
    return 0.5;
}

QuadCoeffs quad_fit_unnormalized(double x0, double u0, double x1, double u1, double x2,
                                 double u2) {
    const auto c = quad_fit_unnormalized_t<double>(x0, u0, x1, u1, x2, u2);
    return {c.a2, c.a1, c.a0};
}

// ---------------------------------------------------------------------------

namespace {

// Shared guts of row construction once A, B and the endpoints are known.
BezierRow finish_row(const ProjectiveTexMap& m, double y, double x_start, double x_end,
                     double au, double av, double bden) {
    BezierRow r;
    r.y = y;
    r.x0 = x_start;
    r.x2 = x_end;
    r.au = au;
    r.av = av;
    r.bden = bden;
    const double d0 = m.g * x_start + bden;
    const double d2 = m.g * x_end + bden;
    if (!(d0 > 0.0) || !(d2 > 0.0))
        fail(Err::BehindProjection, "row endpoints cross the horizon");
    r.c0 = d0 * d0;
    r.c2 = d2 * d2;
    r.u0 = (m.a * x_start + m.b * y + m.c) / d0;
    r.u2 = (m.a * x_end + m.b * y + m.c) / d2;
    r.v0 = (m.d * x_start + m.e * y + m.f) / d0;
    r.v2 = (m.d * x_end + m.e * y + m.f) / d2;

    // Tangent intersection. The direct quotient is 0/0 for a channel with a
    // vanishing derivative, so pick the better-conditioned channel; if both
    // vanish the intersection reduces to the denominator-weighted mean.
    const double scale_u = std::fabs(m.a * bden) + std::fabs(m.g) * (std::fabs(m.b * y) + std::fabs(m.c));
    const double scale_v = std::fabs(m.d * bden) + std::fabs(m.g) * (std::fabs(m.e * y) + std::fabs(m.f));
    const bool u_ok = std::fabs(au) > 1e-12 * scale_u && au != 0.0;
    const bool v_ok = std::fabs(av) > 1e-12 * scale_v && av != 0.0;
    if (u_ok || v_ok) {
        const bool use_u = u_ok && (!v_ok || std::fabs(au) * scale_v >= std::fabs(av) * scale_u);
        const double a = use_u ? au : av;
        const double p0 = use_u ? r.u0 : r.v0;
        const double p2 = use_u ? r.u2 : r.v2;
        r.x1 = ((p0 - p2) * r.c0 * r.c2 - a * (x_start * r.c2 - x_end * r.c0)) /
               (a * (r.c0 - r.c2));
    } else {
        r.x1 = (x_start * d2 + x_end * d0) / (d0 + d2);
    }
    r.u1 = r.u0 + (au / r.c0) * (r.x1 - x_start);
    r.v1 = r.v0 + (av / r.c0) * (r.x1 - x_start);
    return r;
}

}  // namespace

BezierRow bezier_row(const ProjectiveTexMap& m, double y, double x_start, double x_end) {
    if (std::fabs(m.g) <= 1e-14 * m.coefficient_scale())
        fail(Err::AffineRow, "constant row denominator has no tangent intersection");
    if (!(x_end > x_start)) fail(Err::CoincidentNodes, "row needs positive extent");
    const double bden = m.h * y + m.i;
    const double au = m.a * bden - m.g * (m.b * y + m.c);
    const double av = m.d * bden - m.g * (m.e * y + m.f);
    return finish_row(m, y, x_start, x_end, au, av, bden);
}

BezierRow bezier_row_next(const ProjectiveTexMap& m, const BezierRow& row) {
    // Per-row derivative constants advance by polygon-wide increments.
    const double au = row.au + (m.a * m.h - m.g * m.b);
    const double av = row.av + (m.d * m.h - m.g * m.e);
    const double bden = row.bden + m.h;
    return finish_row(m, row.y + 1.0, row.x0, row.x2, au, av, bden);
}

BezierSample bezier_point(const BezierRow& row, double t) {
    const double s = 1.0 - t;
    const double w0 = s * s, w1 = 2.0 * t * s, w2 = t * t;
    return {w0 * row.x0 + w1 * row.x1 + w2 * row.x2,
            w0 * row.u0 + w1 * row.u1 + w2 * row.u2,
            w0 * row.v0 + w1 * row.v1 + w2 * row.v2};
}

double bezier_t_of_x(const BezierRow& row, double x) {
    // Rationalized root of the monotone abscissa parabola; exact as the
    // quadratic term vanishes.
    const double sx = row.x0 - 2.0 * row.x1 + row.x2;
    const double p = row.x1 - row.x0;
    const double w = x - row.x0;
    const double disc = std::max(p * p + sx * w, 0.0);
    const double t = w / (p + std::sqrt(disc));
    return std::clamp(t, 0.0, 1.0);
}

std::vector<BezierSample> bezier_eval_fd(const BezierRow& row, double t0, double dt, int n) {
    std::vector<BezierSample> out;
    out.reserve(size_t(n) + 1);
    BezierSample cur = bezier_point(row, t0);
    out.push_back(cur);
    const double sx = row.x0 - 2.0 * row.x1 + row.x2;
    const double su = row.u0 - 2.0 * row.u1 + row.u2;
    const double sv = row.v0 - 2.0 * row.v1 + row.v2;
    // First differences at t0; they grow by the constant second difference.
    double dx = dt * (2.0 * (row.x1 - row.x0) + dt * sx) + 2.0 * t0 * dt * sx;
    double du = dt * (2.0 * (row.u1 - row.u0) + dt * su) + 2.0 * t0 * dt * su;
    double dv = dt * (2.0 * (row.v1 - row.v0) + dt * sv) + 2.0 * t0 * dt * sv;
    const double ddx = 2.0 * dt * dt * sx;
    const double ddu = 2.0 * dt * dt * su;
    const double ddv = 2.0 * dt * dt * sv;
    for (int k = 0; k < n; ++k) {
        cur.x += dx;
        cur.u += du;
        cur.v += dv;
        dx += ddx;
        du += ddu;
        dv += ddv;
        out.push_back(cur);
    }
    return out;
}

std::vector<BezierPixel> bezier_param_iterative(const BezierRow& row,
                                                const BezierIterParams& params) {
    const double length = row.x2 - row.x0;
    std::vector<BezierPixel> out;
    out.push_back({row.x0, 0.0, row.u0, row.v0});
    if (length < 1.0) return out;
    const double eps = params.eps;
    const double dt = params.dt0 > 0.0 ? params.dt0 : 1.0 / (4.0 * length);
    const long whole_cap = static_cast<long>(std::ceil(1.0 / dt)) + 4;

    double t_prev = 0.0;
    double carry = 0.0;  // previous pixel's parameter increment, reused as the guess
    // Targets sit on the integer lattice anchored at x0; correcting toward the
    // achieved abscissa instead lets eps-sized residues accumulate and starve
    // long rows of their final pixel.
    while (row.x0 + static_cast<double>(out.size()) <= row.x2 + eps) {
        const double target = row.x0 + static_cast<double>(out.size());
        double t = std::min(t_prev + carry, 1.0);
        long guard = whole_cap;
        while (bezier_point(row, t).x < target - eps && t < 1.0) {
            t = std::min(t + dt, 1.0);
            if (--guard < 0) fail(Err::NonConvergence, "whole-step walk stalled");
        }
        double x = bezier_point(row, t).x;
        if (x > target + eps || x < target - eps) {
            double half = 0.5 * dt;
            int n = 0;
            while (x > target + eps || x < target - eps) {
                if (++n > params.max_halvings)
                    fail(Err::NonConvergence, "binary correction exhausted");
                t += (x > target) ? -half : half;
                half *= 0.5;
                x = bezier_point(row, t).x;
            }
        }
        const BezierSample s = bezier_point(row, t);
        out.push_back({s.x, t, s.u, s.v});
        carry = t - t_prev;
        t_prev = t;
    }
    return out;
}

QuadCoeffs bezier_param_quadratic(const BezierRow& row, std::optional<double> xn,
                                  std::optional<double> tn) {
    // Default middle node: the control abscissa paired with its true curve
    // parameter. A parameter value of 1/2 at either natural abscissa misses
    // steep rows by several percent and is left to explicit callers.
    const double x0 = row.x0, x2 = row.x2;
    const double xm = xn.value_or(row.x1);
    const double tm = tn.value_or(bezier_t_of_x(row, xm));
    const double det = x0 * x0 * (xm - x2) + xm * xm * (x2 - x0) + x2 * x2 * (x0 - xm);
    const double span = std::max({std::fabs(x0), std::fabs(xm), std::fabs(x2), 1.0});
    if (std::fabs(det) <= 1e-12 * span * span * span)
        fail(Err::CoincidentNodes, "parameter fit needs three distinct abscissas");
    const double d = 1.0 / det;
    QuadCoeffs c;
    c.a2 = d * (tm * (x2 - x0) + x0 - xm);
    c.a1 = d * (tm * (x0 * x0 - x2 * x2) - x0 * x0 + xm * xm);
    c.a0 = d * (x0 * x0 * (xm - x2 * tm) - x0 * (xm * xm - x2 * x2 * tm));
    return c;
}

// ---------------------------------------------------------------------------

double BivariatePoly::operator()(double x, double y) const {
    if (order == BivarOrder::Biquadratic)
        return coef[0] * x * x + coef[1] * y * y + coef[2] * x * y + coef[3] * x + coef[4] * y +
               coef[5];
    const double x2 = x * x, y2 = y * y;
    return coef[0] * x2 * x + coef[1] * y2 * y + coef[2] * x2 * y + coef[3] * x * y2 +
           coef[4] * x2 + coef[5] * y2 + coef[6] * x * y + coef[7] * x + coef[8] * y + coef[9];
}

BivariatePoly fit_bivariate(BivarOrder order, std::span<const SamplePoint> pts) {
    const int n = order == BivarOrder::Biquadratic ? 6 : 10;
    if (static_cast<int>(pts.size()) != n)
        fail(Err::SingularSystem, "interpolation needs exactly as many points as terms");
    Eigen::MatrixXd s(n, n);
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) {
        const double x = pts[size_t(k)].x, y = pts[size_t(k)].y;
        if (n == 6) {
            s.row(k) << x * x, y * y, x * y, x, y, 1.0;
        } else {
            s.row(k) << x * x * x, y * y * y, x * x * y, x * y * y, x * x, y * y, x * y, x, y,
                1.0;
        }
        rhs(k) = pts[size_t(k)].value;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    if (!lu.isInvertible()) fail(Err::SingularSystem, "sample placement is degenerate");
    const Eigen::VectorXd t = lu.solve(rhs);
    BivariatePoly p;
    p.order = order;
    for (int k = 0; k < n; ++k) p.coef[size_t(k)] = t(k);
    return p;
}

// ---------------------------------------------------------------------------

MapClass classify_map(const ProjectiveTexMap& m, double tol) {
    const double s = m.coefficient_scale();
    const auto zero = [&](double c) { return std::fabs(c) <= tol * s; };
    if (zero(m.g) && zero(m.h)) return MapClass::Affine;
    if (zero(m.d) && zero(m.g)) return MapClass::RowConstantV;
    if (zero(m.b) && zero(m.h)) return MapClass::ColConstantU;
    return MapClass::General;
}

}  // namespace percor::tex
