// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/shade.hpp"

#include <cmath>

namespace percor::shade {

namespace {

void check_depths(double z1, double z2) {
    if (!(z1 > 0.0) || !(z2 > 0.0))
        fail(Err::PointBehindCamera, "segment depths must be positive");
}

}  // namespace

double gouraud_w(double u, const EdgeDepthPair& d) {
    check_depths(d.z1, d.z2);
    return u * d.z1 / (d.z2 - u * (d.z2 - d.z1));
}

double gouraud_error(double u, const EdgeDepthPair& d, const IntensityPair& i) {
    check_depths(d.z1, d.z2);
    const double h = d.hbar();
    return (i.i_b - i.i_a) * u * (1.0 - 1.0 / (h + u * (1.0 - h)));
}

GouraudErrorBound gouraud_error_bound(const EdgeDepthPair& d) {
    check_depths(d.z1, d.z2);
    const double h = d.hbar();
    if (h == 1.0) return {0.5, 0.0};
    const double u_star = (std::sqrt(h) - h) / (1.0 - h);
    const double delta = u_star * (1.0 - 1.0 / (h + u_star * (1.0 - h)));
    return {u_star, std::fabs(delta)};
}

double tw_exact(double t_v, double z_a, double z_b) {
    check_depths(z_a, z_b);
    return z_a * t_v / (z_b - t_v * (z_b - z_a));
}

double TwPolyModel::operator()(double t) const {
    switch (kind_) {
        case TwFit::Quadratic:
            // t + t(1-t) a0: endpoint values are structurally exact.
            return t + t * (1.0 - t) * p_[0];
        case TwFit::Cubic:
            return t + t * (1.0 - t) * (p_[0] + p_[1] * t);
        case TwFit::Piecewise:
            if (t < 0.5) return t * (p_[0] + p_[1] * t);
            return 1.0 + (1.0 - t) * (p_[2] + p_[3] * t);
    }
    return t;
}

TwPolyModel::Coeffs TwPolyModel::coeffs(int segment) const {
    switch (kind_) {
        case TwFit::Quadratic:
            // t + a0 t - a0 t^2
            return {0.0, -p_[0], 1.0 + p_[0], 0.0};
        case TwFit::Cubic:
            // t + (a0 + a1 t)(t - t^2) = -a1 t^3 + (a1 - a0) t^2 + (1 + a0) t
            return {-p_[1], p_[1] - p_[0], 1.0 + p_[0], 0.0};
        case TwFit::Piecewise:
            if (segment == 0) return {0.0, p_[1], p_[0], 0.0};
            // 1 + (1-t)(a2 + a3 t) = -a3 t^2 + (a3 - a2) t + 1 + a2
            return {0.0, -p_[3], p_[3] - p_[2], 1.0 + p_[2]};
    }
    return {};
}

TwPolyModel tw_fit(TwFit kind, double z_a, double z_b) {
    check_depths(z_a, z_b);
    const double h = z_b / z_a;
    std::array<double, 4> p{};
    switch (kind) {
        case TwFit::Quadratic: {
            // u = t + a0 t(1-t) through the midpoint knot.
            const double k12 = 1.0 / (h + 1.0);
            p[0] = 4.0 * k12 - 2.0;
            break;
        }
        case TwFit::Cubic: {
            // u = t + t(1-t)(b + g t) through the third-point knots.
            const double k13 = 1.0 / (2.0 * h + 1.0);
            const double k23 = 2.0 / (h + 2.0);
            const double g = (27.0 * (k23 - k13) - 9.0) / 2.0;
            const double b = (9.0 * k13 - 3.0) / 2.0 - g / 3.0;
            p[0] = b;
            p[1] = g;
            break;
        }
        case TwFit::Piecewise: {
            // First segment u = t(a0 + a1 t) through the quarter knots,
            // second u = 1 + (1-t)(a2 + a3 t); both interpolate the joint.
            const double k14 = 1.0 / (3.0 * h + 1.0);
            const double k12 = 1.0 / (h + 1.0);
            const double k34 = 3.0 / (h + 3.0);
            p[0] = 8.0 * k14 - 2.0 * k12;
            p[1] = 8.0 * k12 - 16.0 * k14;
            p[2] = 6.0 * k12 - 8.0 * k34 + 2.0;
            p[3] = 16.0 * k34 - 8.0 * k12 - 8.0;
            break;
        }
    }
    return {kind, h, p};
}

Vec3 lerp_normal(const Vec3& n_l, const Vec3& n_p, double t_w) {
    return n_l + (n_p - n_l) * t_w;
}

NormalFrame make_normal_frame(const Vec3& n_a, const Vec3& n_b) {
    const double c = n_a.dot(n_b);
    if (std::fabs(c) > 1.0 - 1e-9)
        fail(Err::ParallelNormals, "normals are parallel; rotation plane undefined");
    const Vec3 rej = n_b - n_a * c;
    NormalFrame f;
    f.n_a = n_a;
    f.n_k = rej.normalized();
    f.psi = std::acos(c);
    return f;
}

Vec3 slerp_perspective(const NormalFrame& f, double eta, const EdgeDepthPair& d) {
    check_depths(d.z1, d.z2);
    if (eta == 0.0) return f.n_a;
    const double h = d.hbar();
    const double ct_psi = std::cos(f.psi) / std::sin(f.psi);
    const double ct_eta = std::cos(eta * f.psi) / std::sin(eta * f.psi);
    const double b = ct_psi + h * (ct_eta - ct_psi);
    // (n_a b + n_k) / sqrt(1 + b^2) is unit length because n_a and n_k are
    // orthonormal; no renormalization step is involved.
    return (f.n_a * b + f.n_k) / std::sqrt(1.0 + b * b);
}

}  // namespace percor::shade
