// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "percor/error.hpp"

namespace percor::geom {

// World coordinates: right-handed, observer at the origin looking along the
// depth axis; z holds the positive distance in front of the eye.
struct WorldPoint {
    double x = 0, y = 0, z = 0;
};

// Viewport coordinates plus a screen depth in [z_vn, z_vm].
struct ScreenPoint {
    double x = 0, y = 0, z = 0;
};

// View volume: window [x_n, x_m] x [y_n, y_m] on the near plane z = z_n,
// far plane z = z_m, with 0 < z_n < z_m.
struct Frustum {
    double x_n = -1, x_m = 1;
    double y_n = -1, y_m = 1;
    double z_n = 1, z_m = 10;
};

// Screen window [x_vn, x_vm] x [y_vn, y_vm] and depth range [z_vn, z_vm].
// The sm_* offsets place the window origin; by default the window starts at
// (x_vn, y_vn) and depth zero sits at the near end (sm_vz = 0).
struct Viewport {
    double x_vn = 0, x_vm = 512;
    double y_vn = 0, y_vm = 512;
    double z_vn = 0, z_vm = 1;
    double sm_vx = 0, sm_vy = 0, sm_vz = 0;

    static Viewport window(double x_vn, double x_vm, double y_vn, double y_vm,
                           double z_vn = 0.0, double z_vm = 1.0) {
        Viewport vp;
        vp.x_vn = x_vn;
        vp.x_vm = x_vm;
        vp.y_vn = y_vn;
        vp.y_vm = y_vm;
        vp.z_vn = z_vn;
        vp.z_vm = z_vm;
        vp.sm_vx = x_vn;
        vp.sm_vy = y_vn;
        vp.sm_vz = z_vn;
        return vp;
    }
};

// Perspective projection through the frustum window onto the viewport.
// Throws PointBehindCamera for z <= 0; points outside the volume still
// project (test scenes are clipless), use contains() to detect them.
ScreenPoint project(const WorldPoint& p, const Frustum& f, const Viewport& vp);

// Exact inverse of project on the open half-space z > 0.
WorldPoint unproject(const ScreenPoint& s, const Frustum& f, const Viewport& vp);

bool contains(const Frustum& f, const WorldPoint& p);

}  // namespace percor::geom
