// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/geometry.hpp"

#include <cmath>

namespace percor::geom {

namespace {

void check_volume(const Frustum& f, const Viewport& vp) {
    if (!(f.z_n > 0.0) || !(f.z_m > f.z_n) || !(f.x_m > f.x_n) || !(f.y_m > f.y_n))
        fail(Err::DegenerateFrustum, "frustum bounds must satisfy x_n<x_m, y_n<y_m, 0<z_n<z_m");
    if (vp.x_vm == vp.x_vn || vp.y_vm == vp.y_vn || vp.z_vm == vp.z_vn)
        fail(Err::DegenerateViewport, "viewport spans must be nonzero");
}

}  // namespace

ScreenPoint project(const WorldPoint& p, const Frustum& f, const Viewport& vp) {
    check_volume(f, vp);
    if (!(p.z > 0.0)) fail(Err::PointBehindCamera, "projected point has z <= 0");

    // Normalized device coordinates in [-1, 1] per axis: window edges on the
    // near plane map to +-1 in x and y, the near and far planes to -+1 in z.
    const double ndc_x = (2.0 * f.z_n * p.x - (f.x_m + f.x_n) * p.z) / (p.z * (f.x_m - f.x_n));
    const double ndc_y = (2.0 * f.z_n * p.y - (f.y_m + f.y_n) * p.z) / (p.z * (f.y_m - f.y_n));
    const double ndc_z = ((f.z_m + f.z_n) * p.z - 2.0 * f.z_m * f.z_n) / (p.z * (f.z_m - f.z_n));

    ScreenPoint s;
    s.x = vp.sm_vx + 0.5 * (vp.x_vm - vp.x_vn) * (ndc_x + 1.0);
    s.y = vp.sm_vy + 0.5 * (vp.y_vm - vp.y_vn) * (ndc_y + 1.0);
    s.z = vp.sm_vz + 0.5 * (vp.z_vm - vp.z_vn) * (ndc_z + 1.0);
    return s;
}

WorldPoint unproject(const ScreenPoint& s, const Frustum& f, const Viewport& vp) {
    check_volume(f, vp);

    const double ndc_x = 2.0 * (s.x - vp.sm_vx) / (vp.x_vm - vp.x_vn) - 1.0;
    const double ndc_y = 2.0 * (s.y - vp.sm_vy) / (vp.y_vm - vp.y_vn) - 1.0;
    const double ndc_z = 2.0 * (s.z - vp.sm_vz) / (vp.z_vm - vp.z_vn) - 1.0;

    const double depth_den = (f.z_m + f.z_n) - ndc_z * (f.z_m - f.z_n);
    if (!(depth_den > 0.0)) fail(Err::PointBehindCamera, "screen depth maps behind the camera");

    WorldPoint p;
    p.z = 2.0 * f.z_m * f.z_n / depth_den;
    p.x = p.z * (ndc_x * (f.x_m - f.x_n) + f.x_m + f.x_n) / (2.0 * f.z_n);
    p.y = p.z * (ndc_y * (f.y_m - f.y_n) + f.y_m + f.y_n) / (2.0 * f.z_n);
    return p;
}

bool contains(const Frustum& f, const WorldPoint& p) {
    if (!(p.z >= f.z_n && p.z <= f.z_m)) return false;
    // Window bounds scale linearly with depth away from the near plane.
    const double sx = p.z / f.z_n;
    return p.x >= f.x_n * sx && p.x <= f.x_m * sx && p.y >= f.y_n * sx && p.y <= f.y_m * sx;
}

}  // namespace percor::geom
