// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/scene.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "percor/error.hpp"

namespace percor::scene {

namespace {

using analysis::UvMethod;
using tex::ProjectiveTexMap;

[[noreturn]] void cfail(const std::string& origin, int line, const std::string& msg) {
    fail(Err::ConfigParse, origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

double parse_double(const std::string& tok, const std::string& origin, int line) {
    double v = 0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e)
        cfail(origin, line, "expected a number, got '" + tok + "'");
    return v;
}

std::vector<double> parse_doubles(const std::string& val, std::size_t lo, std::size_t hi,
                                  const std::string& origin, int line) {
    const auto toks = tokens(val);
    if (toks.size() < lo || toks.size() > hi)
        cfail(origin, line,
              "expected " + std::to_string(lo) + (hi > lo ? ".." + std::to_string(hi) : "") +
                  " numbers, got " + std::to_string(toks.size()));
    std::vector<double> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(parse_double(t, origin, line));
    return out;
}

int parse_int(const std::string& val, int lo, int hi, const std::string& origin, int line) {
    const double v = parse_doubles(val, 1, 1, origin, line)[0];
    const int k = static_cast<int>(v);
    if (double(k) != v || k < lo || k > hi)
        cfail(origin, line, "expected an integer in [" + std::to_string(lo) + "," +
                                std::to_string(hi) + "]");
    return k;
}

struct ParseOut {
    SceneConfig config;
    int texture_line = 0;
};

ParseOut parse_impl(const std::string& text, const std::string& origin) {
    ParseOut out;
    SceneConfig& c = out.config;
    bool saw_viewport = false;
    PrimSpec* cur = nullptr;
    int cur_line = 0;
    std::istringstream in(text);
    std::string raw;
    int ln = 0;

    const auto finish_block = [&] {
        if (!cur) return;
        const std::size_t want = cur->quad ? 4 : 3;
        if (cur->verts.size() != want)
            cfail(origin, cur_line,
                  std::string(cur->quad ? "[quad]" : "[triangle]") + " needs " +
                      std::to_string(want) + " vertex lines, got " +
                      std::to_string(cur->verts.size()));
        cur = nullptr;
    };

    while (std::getline(in, raw)) {
        ++ln;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            finish_block();
            if (line == "[quad]")
                c.prims.push_back({true, {}});
            else if (line == "[triangle]")
                c.prims.push_back({false, {}});
            else
                cfail(origin, ln, "unknown section '" + line + "'");
            cur = &c.prims.back();
            cur_line = ln;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) cfail(origin, ln, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) cfail(origin, ln, "expected 'key = value'");

        if (cur) {
            if (key != "vertex") cfail(origin, ln, "unknown vertex-block key '" + key + "'");
            const auto v = parse_doubles(val, 5, 11, origin, ln);
            if (v.size() != 5 && v.size() != 8 && v.size() != 11)
                cfail(origin, ln, "vertex takes 5, 8 or 11 numbers (pos uv [color [normal]])");
            VertexSpec vs;
            vs.pos = {v[0], v[1], v[2]};
            vs.uv = {v[3], v[4]};
            if (v.size() >= 8) vs.color = {v[5], v[6], v[7]};
            if (v.size() == 11) vs.normal = {v[8], v[9], v[10]};
            cur->verts.push_back(vs);
            continue;
        }

        if (key == "width")
            c.width = parse_int(val, 1, 4096, origin, ln);
        else if (key == "height")
            c.height = parse_int(val, 1, 4096, origin, ln);
        else if (key == "texture") {
            c.texture = val;
            out.texture_line = ln;
        } else if (key == "filter") {
            if (val == "nearest")
                c.filter = Filter::Nearest;
            else if (val == "aniso")
                c.filter = Filter::Aniso;
            else
                cfail(origin, ln, "filter must be 'nearest' or 'aniso'");
        } else if (key == "aniso_n")
            c.method.aniso_n = parse_int(val, 1, 64, origin, ln);
        else if (key == "du") {
            c.method.du = parse_doubles(val, 1, 1, origin, ln)[0];
            if (!(c.method.du > 0)) cfail(origin, ln, "du must be positive");
        } else if (key == "x_int") {
            if (val == "center")
                c.method.x_int_mode = XIntMode::Center;
            else if (val == "auto")
                c.method.x_int_mode = XIntMode::Auto;
            else {
                c.method.x_int_mode = XIntMode::Fixed;
                c.method.x_int = parse_doubles(val, 1, 1, origin, ln)[0];
                if (!(c.method.x_int > 0 && c.method.x_int < 1))
                    cfail(origin, ln, "fixed x_int must lie strictly inside (0,1)");
            }
        } else if (key == "eps") {
            c.method.eps = parse_doubles(val, 1, 1, origin, ln)[0];
            if (!(c.method.eps > 0)) cfail(origin, ln, "eps must be positive");
        } else if (key == "dt0") {
            c.method.dt0 = parse_doubles(val, 1, 1, origin, ln)[0];
            if (c.method.dt0 < 0) cfail(origin, ln, "dt0 must be non-negative");
        } else if (key == "frustum") {
            const auto v = parse_doubles(val, 6, 6, origin, ln);
            c.frustum = {v[0], v[1], v[2], v[3], v[4], v[5]};
            if (!(c.frustum.z_n > 0 && c.frustum.z_m > c.frustum.z_n &&
                  c.frustum.x_m > c.frustum.x_n && c.frustum.y_m > c.frustum.y_n))
                cfail(origin, ln, "frustum extents must be ordered with 0 < z_n < z_m");
        } else if (key == "viewport") {
            const auto v = parse_doubles(val, 6, 9, origin, ln);
            if (v.size() != 6 && v.size() != 9)
                cfail(origin, ln, "viewport takes 6 or 9 numbers");
            if (v.size() == 6)
                c.viewport = geom::Viewport::window(v[0], v[1], v[2], v[3], v[4], v[5]);
            else
                c.viewport = {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
            if (!(c.viewport.x_vm != c.viewport.x_vn && c.viewport.y_vm != c.viewport.y_vn &&
                  c.viewport.z_vm != c.viewport.z_vn))
                cfail(origin, ln, "viewport extents must be non-zero");
            saw_viewport = true;
        } else
            cfail(origin, ln, "unknown key '" + key + "'");
    }
    finish_block();
    if (!saw_viewport) c.viewport = geom::Viewport::window(0, c.width, 0, c.height);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Projection and per-primitive derivation.

void orient_positive(ProjectiveTexMap& m, double cx, double cy) {
    if (m.g * cx + m.h * cy + m.i < 0) {
        m.a = -m.a, m.b = -m.b, m.c = -m.c;
        m.d = -m.d, m.e = -m.e, m.f = -m.f;
        m.g = -m.g, m.h = -m.h, m.i = -m.i;
    }
}

std::vector<raster::Span> clip_spans(std::vector<raster::Span> spans, int w, int h) {
    std::vector<raster::Span> out;
    for (auto s : spans) {
        if (s.y < 0 || s.y >= h) continue;
        s.x_first = std::max(s.x_first, 0);
        s.x_last = std::min(s.x_last, w - 1);
        if (s.x_first <= s.x_last) out.push_back(s);
    }
    return out;
}

std::vector<raster::Span> quad_spans(const std::array<Vec2, 4>& p) {
    std::map<int, std::pair<int, int>> rows;
    for (const int second : {1, 2}) {
        raster::ScreenTriangle t;
        t.v[0].pos = p[0];
        t.v[1].pos = p[static_cast<std::size_t>(second)];
        t.v[2].pos = p[static_cast<std::size_t>(second) + 1];
        try {
            for (const auto& s : raster::scanline_triangle(t)) {
                auto it = rows.find(s.y);
                if (it == rows.end())
                    rows.emplace(s.y, std::pair{s.x_first, s.x_last});
                else {
                    it->second.first = std::min(it->second.first, s.x_first);
                    it->second.second = std::max(it->second.second, s.x_last);
                }
            }
        } catch (const Error& e) {
            if (e.code() != Err::DegenerateTriangle) throw;
        }
    }
    std::vector<raster::Span> out;
    out.reserve(rows.size());
    for (const auto& [y, xs] : rows) out.push_back({y, xs.first, xs.second});
    return out;
}

// Least-squares color numerators over the map's denominator: exact for
// triangles, the planar-consistent solution for quads.
void solve_shade(MappedPrim& mp, const std::vector<VertexSpec>& verts,
                 const std::vector<Vec2>& spos) {
    const std::size_t n = verts.size();
    Eigen::MatrixXd a(n, 3);
    Eigen::MatrixXd rhs(n, 3);
    for (std::size_t k = 0; k < n; ++k) {
        const double den = mp.map.g * spos[k].x + mp.map.h * spos[k].y + mp.map.i;
        if (!(den > 0.0)) fail(Err::BehindProjection, "primitive crosses the horizon");
        a.row(static_cast<Eigen::Index>(k)) << spos[k].x, spos[k].y, 1.0;
        rhs.row(static_cast<Eigen::Index>(k)) << verts[k].color.x * den, verts[k].color.y * den,
            verts[k].color.z * den;
    }
    const Eigen::Matrix<double, 3, 3> sol = a.colPivHouseholderQr().solve(rhs);
    mp.shade_x = {sol(0, 0), sol(0, 1), sol(0, 2)};
    mp.shade_y = {sol(1, 0), sol(1, 1), sol(1, 2)};
    mp.shade_0 = {sol(2, 0), sol(2, 1), sol(2, 2)};
}

// ---------------------------------------------------------------------------
// Uninstrumented per-span texture coordinates, one producer per method.

struct SpanBounds {
    int x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
};

SpanBounds prim_bounds(const MappedPrim& prim) {
    SpanBounds b;
    b.x_lo = prim.spans.front().x_first;
    b.x_hi = prim.spans.front().x_last;
    b.y_lo = b.y_hi = prim.spans.front().y;
    for (const auto& s : prim.spans) {
        b.x_lo = std::min(b.x_lo, s.x_first);
        b.x_hi = std::max(b.x_hi, s.x_last);
        b.y_lo = std::min(b.y_lo, s.y);
        b.y_hi = std::max(b.y_hi, s.y);
    }
    return b;
}

std::vector<tex::Uv> uv_exact_span(const ProjectiveTexMap& m, const raster::Span& s) {
    std::vector<tex::Uv> out;
    out.reserve(static_cast<std::size_t>(s.x_last - s.x_first + 1));
    for (int x = s.x_first; x <= s.x_last; ++x) out.push_back(tex::exact_uv(m, x, s.y));
    return out;
}

std::vector<tex::Uv> uv_affine_endpoints(const ProjectiveTexMap& m, const raster::Span& s) {
    const tex::Uv a = tex::exact_uv(m, s.x_first, s.y);
    if (s.x_last == s.x_first) return {a};
    const tex::Uv b = tex::exact_uv(m, s.x_last, s.y);
    std::vector<tex::Uv> out;
    const double w = 1.0 / (s.x_last - s.x_first);
    for (int x = s.x_first; x <= s.x_last; ++x) {
        const double t = (x - s.x_first) * w;
        out.push_back({a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)});
    }
    return out;
}

std::vector<tex::Uv> uv_affine_span(const MappedPrim& prim, const raster::Span& s) {
    const ProjectiveTexMap& m = prim.map;
    if (tex::classify_map(m) == tex::MapClass::Affine) {
        const auto vals = tex::row_uv_specialized<double>(m, tex::MapClass::Affine, s.y,
                                                          s.x_first, s.x_last + 1);
        std::vector<tex::Uv> out;
        out.reserve(vals.size());
        for (const auto& p : vals) out.push_back({p.first, p.second});
        return out;
    }
    // Screen-linear interpolant anchored at the primitive's corner values.
    const SpanBounds b = prim_bounds(prim);
    const tex::Uv o = tex::exact_uv(m, b.x_lo, b.y_lo);
    const double wx = b.x_hi > b.x_lo ? 1.0 / (b.x_hi - b.x_lo) : 0.0;
    const double wy = b.y_hi > b.y_lo ? 1.0 / (b.y_hi - b.y_lo) : 0.0;
    const tex::Uv ex = tex::exact_uv(m, b.x_hi, b.y_lo);
    const tex::Uv ey = tex::exact_uv(m, b.x_lo, b.y_hi);
    const double dux = (ex.u - o.u) * wx, dvx = (ex.v - o.v) * wx;
    const double duy = (ey.u - o.u) * wy, dvy = (ey.v - o.v) * wy;
    std::vector<tex::Uv> out;
    for (int x = s.x_first; x <= s.x_last; ++x)
        out.push_back({o.u + (x - b.x_lo) * dux + (s.y - b.y_lo) * duy,
                       o.v + (x - b.x_lo) * dvx + (s.y - b.y_lo) * dvy});
    return out;
}

std::vector<tex::Uv> uv_midpoint_span(const ProjectiveTexMap& m, const raster::Span& s,
                                      double du) {
    auto st = tex::midpoint_init<double>(m, s.x_first, s.y, du, du);
    std::vector<tex::Uv> out;
    out.push_back({st.cu.u, st.cv.u});
    for (int x = s.x_first + 1; x <= s.x_last; ++x) {
        tex::midpoint_step_x(st, +1);
        out.push_back({st.cu.u, st.cv.u});
    }
    return out;
}

double quad_anchor(XIntMode mode, double x_int, double u0, double u1) {
    switch (mode) {
        case XIntMode::Fixed:
            return x_int;
        case XIntMode::Auto:
            return tex::recommend_anchor(u0, u1);
        case XIntMode::Center:
        default:
            return 0.5;
    }
}

std::vector<tex::Uv> uv_quad_span(const ProjectiveTexMap& m, const raster::Span& s,
                                  UvMethod method, const MethodSpec& spec) {
    if (s.x_last == s.x_first) return {tex::exact_uv(m, s.x_first, s.y)};
    const double len = s.x_last - s.x_first;
    const tex::Uv a = tex::exact_uv(m, s.x_first, s.y);
    const tex::Uv b = tex::exact_uv(m, s.x_last, s.y);
    std::vector<tex::Uv> out;
    out.reserve(static_cast<std::size_t>(s.x_last - s.x_first + 1));
    if (method == UvMethod::QuadUnnormalized) {
        const double xm = s.x_first + 0.5 * len;
        const tex::Uv mid = tex::exact_uv(m, xm, s.y);
        const auto fit = tex::quad_fit_unnormalized_uv_t<double>(
            s.x_first, xm, s.x_last, a.u, mid.u, b.u, a.v, mid.v, b.v);
        for (int x = s.x_first; x <= s.x_last; ++x)
            out.push_back({fit.u(double(x)), fit.v(double(x))});
        return out;
    }
    const bool shifted = method == UvMethod::QuadShifted;
    const double xi_u = shifted ? quad_anchor(spec.x_int_mode, spec.x_int, a.u, b.u) : 0.5;
    const double xi_v = shifted ? quad_anchor(spec.x_int_mode, spec.x_int, a.v, b.v) : 0.5;
    const tex::Uv mu = tex::exact_uv(m, s.x_first + xi_u * len, s.y);
    const tex::Uv mv = xi_v == xi_u ? mu : tex::exact_uv(m, s.x_first + xi_v * len, s.y);
    const auto cu = tex::quad_fit_anchored_t<double>(a.u, mu.u, b.u, xi_u);
    const auto cv = tex::quad_fit_anchored_t<double>(a.v, mv.v, b.v, xi_v);
    const double dt = 1.0 / len;
    for (int x = s.x_first; x <= s.x_last; ++x) {
        const double t = (x - s.x_first) * dt;
        out.push_back({cu(t), cv(t)});
    }
    return out;
}

std::vector<tex::Uv> uv_bezier_span(const ProjectiveTexMap& m, const raster::Span& s,
                                    UvMethod method, const MethodSpec& spec) {
    if (s.x_last == s.x_first) return {tex::exact_uv(m, s.x_first, s.y)};
    tex::BezierRow brow;
    try {
        brow = tex::bezier_row(m, s.y, s.x_first, s.x_last);
    } catch (const Error& e) {
        if (e.code() == Err::AffineRow) return uv_affine_endpoints(m, s);
        throw;
    }
    std::vector<tex::Uv> out;
    if (method == UvMethod::BezierIter) {
        const auto pixels = tex::bezier_param_iterative(brow, {spec.eps, spec.dt0, 24});
        if (pixels.size() != static_cast<std::size_t>(s.x_last - s.x_first + 1))
            fail(Err::NonConvergence, "row walk produced the wrong pixel count");
        out.reserve(pixels.size());
        for (const auto& p : pixels) out.push_back({p.u, p.v});
        return out;
    }
    const tex::QuadCoeffs tp = tex::bezier_param_quadratic(brow);
    out.reserve(static_cast<std::size_t>(s.x_last - s.x_first + 1));
    for (int x = s.x_first; x <= s.x_last; ++x) {
        const double t = std::clamp(tp(double(x)), 0.0, 1.0);
        const auto bs = tex::bezier_point(brow, t);
        out.push_back({bs.u, bs.v});
    }
    return out;
}

std::vector<tex::Uv> uv_bivariate_span(const MappedPrim& prim, const raster::Span& s,
                                       tex::BivarOrder order) {
    const SpanBounds b = prim_bounds(prim);
    const int deg = order == tex::BivarOrder::Biquadratic ? 2 : 3;
    std::vector<tex::SamplePoint> su, sv;
    for (int i = 0; i <= deg; ++i) {
        for (int j = 0; i + j <= deg; ++j) {
            const double x = b.x_lo + (b.x_hi - b.x_lo) * (deg ? double(i) / deg : 0.0);
            const double y = b.y_lo + (b.y_hi - b.y_lo) * (deg ? double(j) / deg : 0.0);
            const tex::Uv e = tex::exact_uv(prim.map, x, y);
            su.push_back({x, y, e.u});
            sv.push_back({x, y, e.v});
        }
    }
    const tex::BivariatePoly pu = tex::fit_bivariate(order, su);
    const tex::BivariatePoly pv = tex::fit_bivariate(order, sv);
    std::vector<tex::Uv> out;
    for (int x = s.x_first; x <= s.x_last; ++x)
        out.push_back({pu(double(x), double(s.y)), pv(double(x), double(s.y))});
    return out;
}

std::vector<tex::Uv> uv_nrl_span(const ProjectiveTexMap& m, const raster::Span& s) {
    const raster::NrlSetup setup = raster::nrl_setup<double>(m);
    std::vector<tex::Uv> out;
    out.reserve(static_cast<std::size_t>(s.x_last - s.x_first + 1));
    if (setup.vertical) {
        for (int x = s.x_first; x <= s.x_last; ++x) {
            const double den = m.g * x + m.i;
            if (!(den > 0.0)) fail(Err::BehindProjection, "column behind the horizon");
            const double k = 1.0 / den;
            out.push_back({(m.a * x + m.b * s.y + m.c) * k, (m.d * x + m.e * s.y + m.f) * k});
        }
        return out;
    }
    std::map<int, raster::NrlLine<double>> lines;
    for (int x = s.x_first; x <= s.x_last; ++x) {
        const int y0 = raster::nrl_intercept(setup, x, s.y);
        auto it = lines.find(y0);
        if (it == lines.end()) it = lines.emplace(y0, raster::nrl_line<double>(m, y0)).first;
        const auto px = raster::nrl_uv<double>(m, setup, it->second, x);
        out.push_back({px.u, px.v});
    }
    return out;
}

std::vector<tex::Uv> uv_rowconst_span(const ProjectiveTexMap& m, const raster::Span& s) {
    const tex::MapClass cls = tex::classify_map(m);
    if (cls == tex::MapClass::General)
        fail(Err::ClassMismatch, "map has no constant-channel structure to exploit");
    std::vector<tex::Uv> out;
    if (cls == tex::MapClass::ColConstantU) {
        for (int x = s.x_first; x <= s.x_last; ++x) {
            const auto vals = tex::col_uv_specialized<double>(m, cls, x, s.y, s.y + 1);
            out.push_back({vals.front().first, vals.front().second});
        }
        return out;
    }
    const auto vals = tex::row_uv_specialized<double>(m, cls, s.y, s.x_first, s.x_last + 1);
    out.reserve(vals.size());
    for (const auto& p : vals) out.push_back({p.first, p.second});
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SceneConfig parse_config_text(const std::string& text, const std::string& origin) {
    return parse_impl(text, origin).config;
}

SceneConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(Err::ConfigParse, path + ": cannot open configuration file");
    std::ostringstream body;
    body << f.rdbuf();
    ParseOut out = parse_impl(body.str(), path);
    if (!out.config.texture.empty()) {
        std::filesystem::path tp = out.config.texture;
        if (tp.is_relative()) tp = std::filesystem::path(path).parent_path() / tp;
        out.config.texture = tp.string();
        if (!std::filesystem::exists(tp))
            fail(Err::MissingTexture, path + ":" + std::to_string(out.texture_line) +
                                          ": texture file '" + tp.string() + "' not found");
    }
    return out.config;
}

std::string serialize_config(const SceneConfig& c) {
    std::ostringstream o;
    o << "width = " << c.width << "\n";
    o << "height = " << c.height << "\n";
    const geom::Frustum& f = c.frustum;
    o << "frustum = " << fmt(f.x_n) << " " << fmt(f.x_m) << " " << fmt(f.y_n) << " "
      << fmt(f.y_m) << " " << fmt(f.z_n) << " " << fmt(f.z_m) << "\n";
    const geom::Viewport& v = c.viewport;
    o << "viewport = " << fmt(v.x_vn) << " " << fmt(v.x_vm) << " " << fmt(v.y_vn) << " "
      << fmt(v.y_vm) << " " << fmt(v.z_vn) << " " << fmt(v.z_vm) << " " << fmt(v.sm_vx) << " "
      << fmt(v.sm_vy) << " " << fmt(v.sm_vz) << "\n";
    if (!c.texture.empty()) o << "texture = " << c.texture << "\n";
    o << "filter = " << (c.filter == Filter::Aniso ? "aniso" : "nearest") << "\n";
    o << "aniso_n = " << c.method.aniso_n << "\n";
    o << "du = " << fmt(c.method.du) << "\n";
    switch (c.method.x_int_mode) {
        case XIntMode::Center:
            o << "x_int = center\n";
            break;
        case XIntMode::Auto:
            o << "x_int = auto\n";
            break;
        case XIntMode::Fixed:
            o << "x_int = " << fmt(c.method.x_int) << "\n";
            break;
    }
    o << "eps = " << fmt(c.method.eps) << "\n";
    o << "dt0 = " << fmt(c.method.dt0) << "\n";
    for (const auto& p : c.prims) {
        o << (p.quad ? "\n[quad]\n" : "\n[triangle]\n");
        for (const auto& vs : p.verts) {
            o << "vertex = " << fmt(vs.pos.x) << " " << fmt(vs.pos.y) << " " << fmt(vs.pos.z)
              << "  " << fmt(vs.uv.u) << " " << fmt(vs.uv.v) << "  " << fmt(vs.color.x) << " "
              << fmt(vs.color.y) << " " << fmt(vs.color.z) << "  " << fmt(vs.normal.x) << " "
              << fmt(vs.normal.y) << " " << fmt(vs.normal.z) << "\n";
        }
    }
    return o.str();
}

std::vector<MappedPrim> project_scene(const SceneConfig& c) {
    std::vector<MappedPrim> out;
    int qi = 0, ti = 0;
    for (const auto& p : c.prims) {
        MappedPrim mp;
        const std::size_t n = p.verts.size();
        std::vector<Vec2> spos(n);
        for (std::size_t k = 0; k < n; ++k) {
            const geom::ScreenPoint sp = geom::project(p.verts[k].pos, c.frustum, c.viewport);
            spos[k] = {sp.x, sp.y};
        }
        if (p.quad) {
            mp.id = "quad" + std::to_string(qi++);
            const std::array<Vec2, 4> corners{spos[0], spos[1], spos[2], spos[3]};
            const std::array<tex::Uv, 4> uvs{p.verts[0].uv, p.verts[1].uv, p.verts[2].uv,
                                             p.verts[3].uv};
            mp.map = tex::derive_from_quad(corners, uvs);
            double cx = 0, cy = 0;
            for (const auto& q : corners) cx += 0.25 * q.x, cy += 0.25 * q.y;
            orient_positive(mp.map, cx, cy);
            mp.spans = quad_spans(corners);
        } else {
            mp.id = "tri" + std::to_string(ti++);
            mp.map = tex::map_from_screen_triangle(
                {spos[0], spos[1], spos[2]}, {p.verts[0].uv, p.verts[1].uv, p.verts[2].uv},
                {p.verts[0].pos.z, p.verts[1].pos.z, p.verts[2].pos.z});
            raster::ScreenTriangle t;
            for (std::size_t k = 0; k < 3; ++k) t.v[k].pos = spos[k];
            try {
                mp.spans = raster::scanline_triangle(t);
            } catch (const Error& e) {
                if (e.code() != Err::DegenerateTriangle) throw;
            }
        }
        mp.spans = clip_spans(std::move(mp.spans), c.width, c.height);
        solve_shade(mp, p.verts, spos);
        out.push_back(std::move(mp));
    }
    return out;
}

std::vector<analysis::UvScene> uv_scenes(const SceneConfig& c) {
    std::vector<analysis::UvScene> out;
    for (auto& mp : project_scene(c)) {
        analysis::UvScene s;
        s.id = mp.id;
        s.map = mp.map;
        s.spans = std::move(mp.spans);
        out.push_back(std::move(s));
    }
    return out;
}

analysis::MethodParams method_params(const MethodSpec& m) {
    analysis::MethodParams p;
    p.du = m.du;
    p.eps = m.eps;
    p.dt0 = m.dt0;
    switch (m.x_int_mode) {
        case XIntMode::Center:
            p.x_int = 0.5;
            break;
        case XIntMode::Fixed:
            p.x_int = m.x_int;
            break;
        case XIntMode::Auto:
            break;
    }
    return p;
}

std::vector<tex::Uv> span_uv(const MappedPrim& prim, UvMethod method, const MethodSpec& spec,
                             const raster::Span& span) {
    switch (method) {
        case UvMethod::Exact:
            return uv_exact_span(prim.map, span);
        case UvMethod::Affine:
            return uv_affine_span(prim, span);
        case UvMethod::Midpoint:
            return uv_midpoint_span(prim.map, span, spec.du);
        case UvMethod::Quad:
        case UvMethod::QuadShifted:
        case UvMethod::QuadUnnormalized:
            return uv_quad_span(prim.map, span, method, spec);
        case UvMethod::BezierIter:
        case UvMethod::BezierQuad:
            return uv_bezier_span(prim.map, span, method, spec);
        case UvMethod::Biquadratic:
            return uv_bivariate_span(prim, span, tex::BivarOrder::Biquadratic);
        case UvMethod::Bicubic:
            return uv_bivariate_span(prim, span, tex::BivarOrder::Bicubic);
        case UvMethod::Nrl:
            return uv_nrl_span(prim.map, span);
        case UvMethod::RowConst:
            return uv_rowconst_span(prim.map, span);
    }
    fail(Err::UnknownMethod, "unhandled texture-coordinate method");
}

Image render_with_texture(const SceneConfig& c, UvMethod method, const Image& texture) {
    Image out(c.width, c.height);
    for (const auto& prim : project_scene(c)) {
        for (const auto& span : prim.spans) {
            const auto uvs = span_uv(prim, method, c.method, span);
            for (int x = span.x_first; x <= span.x_last; ++x) {
                const tex::Uv uv = uvs[static_cast<std::size_t>(x - span.x_first)];
                std::array<std::uint8_t, 3> texel;
                if (c.filter == Filter::Aniso) {
                    const auto fp = raster::aniso_footprint(prim.map, x, span.y);
                    texel = raster::aniso_sample(texture, fp, uv, c.method.aniso_n);
                } else {
                    texel = texture.texel_clamped(
                        static_cast<int>(std::floor(uv.u * texture.width)),
                        static_cast<int>(std::floor(uv.v * texture.height)));
                }
                const double den = prim.map.g * x + prim.map.h * span.y + prim.map.i;
                const double inv = 1.0 / den;
                const double sh[3] = {
                    std::clamp((prim.shade_x.x * x + prim.shade_y.x * span.y + prim.shade_0.x) * inv,
                               0.0, 1.0),
                    std::clamp((prim.shade_x.y * x + prim.shade_y.y * span.y + prim.shade_0.y) * inv,
                               0.0, 1.0),
                    std::clamp((prim.shade_x.z * x + prim.shade_y.z * span.y + prim.shade_0.z) * inv,
                               0.0, 1.0)};
                std::uint8_t* px = out.at(x, span.y);
                for (int ch = 0; ch < 3; ++ch)
                    px[ch] = static_cast<std::uint8_t>(
                        std::min(255L, std::lround(texel[static_cast<std::size_t>(ch)] * sh[ch])));
            }
        }
    }
    return out;
}

Image render(const SceneConfig& c, UvMethod method) {
    if (c.texture.empty()) fail(Err::MissingTexture, "configuration names no texture");
    std::ifstream probe(c.texture, std::ios::binary);
    if (!probe) fail(Err::MissingTexture, "texture file '" + c.texture + "' not found");
    probe.close();
    return render_with_texture(c, method, read_ppm(c.texture));
}

}  // namespace percor::scene
