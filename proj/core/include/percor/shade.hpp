// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "percor/error.hpp"
#include "percor/vec.hpp"

namespace percor::shade {

// Depths of a segment's endpoints, both positive distances from the eye.
struct EdgeDepthPair {
    double z1 = 1, z2 = 1;
    double hbar() const { return z2 / z1; }
};

struct IntensityPair {
    double i_a = 0, i_b = 1;
};

// World-space parameter of the segment point whose projection divides the
// screen segment in ratio u : (1-u). Equals tw_exact with z_a = z1, z_b = z2.
double gouraud_w(double u, const EdgeDepthPair& d);

// Difference between screen-linear intensity at u and the perspective-exact
// intensity there.
double gouraud_error(double u, const EdgeDepthPair& d, const IntensityPair& i);

struct GouraudErrorBound {
    double u_star = 0;     // screen parameter of the extremum
    double max_delta = 0;  // |error| there per unit intensity difference
};

// Closed-form extremum of gouraud_error over u in [0, 1] for unit intensity
// difference. Equal depths make the error vanish identically; by convention
// that degenerate ratio reports u_star = 1/2 with a zero bound.
GouraudErrorBound gouraud_error_bound(const EdgeDepthPair& d);

// World parameter of the point at screen parameter t_v on a segment with
// endpoint depths z_a, z_b.
double tw_exact(double t_v, double z_a, double z_b);

enum class TwFit {
    Quadratic,  // knots {0, 1/2, 1}
    Piecewise,  // quadratic on [0, 1/2] and [1/2, 1], knots at quarters
    Cubic,      // knots {0, 1/3, 2/3, 1}
};

// Polynomial replacement for tw_exact at a fixed depth ratio. Stored in a
// factored form that pins model(0) = 0 and model(1) = 1 exactly in floating
// point regardless of the ratio.
class TwPolyModel {
  public:
    TwPolyModel(TwFit kind, double hbar, const std::array<double, 4>& p)
        : kind_(kind), hbar_(hbar), p_(p) {}

    double operator()(double t) const;

    TwFit kind() const { return kind_; }
    double hbar() const { return hbar_; }

    // Power-basis coefficients of the requested segment, a t^3 + b t^2 + c t + d.
    struct Coeffs {
        double a = 0, b = 0, c = 0, d = 0;
    };
    Coeffs coeffs(int segment = 0) const;
    int segments() const { return kind_ == TwFit::Piecewise ? 2 : 1; }

  private:
    TwFit kind_;
    double hbar_;
    std::array<double, 4> p_;
};

// Interpolates tw_exact at the kind's knots for the given endpoint depths.
TwPolyModel tw_fit(TwFit kind, double z_a, double z_b);

// Screen-linear normal blend; intentionally not renormalized.
Vec3 lerp_normal(const Vec3& n_l, const Vec3& n_p, double t_w);

// Orthonormal plane basis for rotating n_a toward n_b.
struct NormalFrame {
    Vec3 n_a;    // first unit normal
    Vec3 n_k;    // unit vector orthogonal to n_a in the span of {n_a, n_b}
    double psi;  // angle between the normals, in (0, pi)
};

// Requires unit-length, non-parallel inputs; |n_a . n_b| > 1 - 1e-9 throws
// ParallelNormals since no rotation plane is defined.
NormalFrame make_normal_frame(const Vec3& n_a, const Vec3& n_b);

// Unit normal at angular fraction eta of psi, corrected for the perspective
// foreshortening implied by the endpoint depths. Unit length holds by
// construction, without renormalization. eta = 0 returns n_a by convention.
Vec3 slerp_perspective(const NormalFrame& f, double eta, const EdgeDepthPair& d);

}  // namespace percor::shade
