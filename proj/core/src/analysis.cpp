// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "percor/error.hpp"

namespace percor::analysis {

using num::Real;
using tex::ProjectiveTexMap;

namespace {

constexpr const char* kNames[] = {
    "exact",       "affine",      "midpoint",    "quad",
    "quad-shifted", "quad-unnormalized", "bezier-iter", "bezier-quad",
    "biquadratic", "bicubic",     "nrl",         "rowconst",
};

// Running error tallies; the oracle side is always plain double arithmetic,
// so it never lands on the ledger.
struct ErrAccum {
    double du = tex::kDefaultDu;
    double max_abs = 0, max_rel = 0, sum_rel = 0;
    std::uint64_t pixels = 0;

    void channel(double approx, double exact) {
        const double d = std::fabs(approx - exact);
        max_abs = std::max(max_abs, d);
        const double rel = d / std::max(std::fabs(exact), du);
        max_rel = std::max(max_rel, rel);
        sum_rel += rel;
    }
    void pixel(double au, double av, double eu, double ev) {
        channel(au, eu);
        channel(av, ev);
        ++pixels;
    }
};

struct Ctx {
    const UvScene& scene;
    const MethodParams& p;
    ErrAccum acc;
    num::OpCounter px_ops;
    std::uint64_t rows = 0;

    Ctx(const UvScene& s, const MethodParams& mp) : scene(s), p(mp) { acc.du = mp.du; }

    void record(double au, double av, double x, double y) {
        const tex::Uv e = tex::exact_uv(scene.map, x, y);
        acc.pixel(au, av, e.u, e.v);
    }
};

void eval_exact(Ctx& c) {
    const auto& m = c.scene.map;
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        for (int x = s.x_first; x <= s.x_last; ++x) {
            double u = 0, v = 0;
            c.px_ops += num::counted_scope("px", [&] {
                const auto uv = tex::uv_kernel<Real>(m, Real(double(x)), Real(double(s.y)));
                u = num::raw(uv.first);
                v = num::raw(uv.second);
            });
            c.record(u, v, x, s.y);
        }
    }
}

// Corner-anchored screen-linear interpolant; collapses to the division-free
// specialized scan when the map itself is affine.
void eval_affine(Ctx& c) {
    const auto& m = c.scene.map;
    if (tex::classify_map(m) == tex::MapClass::Affine) {
        for (const auto& s : c.scene.spans) {
            ++c.rows;
            const auto row =
                tex::row_uv_specialized<Real>(m, tex::MapClass::Affine, s.y, s.x_first, s.x_last + 1);
            for (int x = s.x_first; x <= s.x_last; ++x) {
                const auto& uv = row[static_cast<std::size_t>(x - s.x_first)];
                c.record(num::raw(uv.first), num::raw(uv.second), x, s.y);
            }
        }
        return;
    }
    int x_lo = c.scene.spans.front().x_first, x_hi = c.scene.spans.front().x_last;
    int y_lo = c.scene.spans.front().y, y_hi = c.scene.spans.front().y;
    for (const auto& s : c.scene.spans) {
        x_lo = std::min(x_lo, s.x_first);
        x_hi = std::max(x_hi, s.x_last);
        y_lo = std::min(y_lo, s.y);
        y_hi = std::max(y_hi, s.y);
    }
    const tex::Uv c00 = tex::exact_uv(m, x_lo, y_lo);
    const tex::Uv c10 = x_hi > x_lo ? tex::exact_uv(m, x_hi, y_lo) : c00;
    const tex::Uv c01 = y_hi > y_lo ? tex::exact_uv(m, x_lo, y_hi) : c00;
    const double wx = x_hi > x_lo ? 1.0 / (x_hi - x_lo) : 0.0;
    const double wy = y_hi > y_lo ? 1.0 / (y_hi - y_lo) : 0.0;
    const Real dux((c10.u - c00.u) * wx), dvx((c10.v - c00.v) * wx);
    const Real duy((c01.u - c00.u) * wy), dvy((c01.v - c00.v) * wy);
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        Real u = Real(c00.u) + dux * Real(double(s.x_first - x_lo)) + duy * Real(double(s.y - y_lo));
        Real v = Real(c00.v) + dvx * Real(double(s.x_first - x_lo)) + dvy * Real(double(s.y - y_lo));
        for (int x = s.x_first; x <= s.x_last; ++x) {
            c.record(num::raw(u), num::raw(v), x, s.y);
            if (x < s.x_last) {
                c.px_ops += num::counted_scope("px", [&] {
                    u += dux;
                    v += dvx;
                });
            }
        }
    }
}

void eval_midpoint(Ctx& c) {
    const auto& m = c.scene.map;
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        auto st = tex::midpoint_init<Real>(m, s.x_first, s.y, c.p.du, c.p.du);
        for (int x = s.x_first; x <= s.x_last; ++x) {
            c.record(num::raw(st.cu.u), num::raw(st.cv.u), x, s.y);
            if (x < s.x_last)
                c.px_ops += num::counted_scope("px", [&] { tex::midpoint_step_x(st, +1); });
        }
    }
}

enum class QuadVariant { Center, Shifted, Unnormalized };

void eval_quad(Ctx& c, QuadVariant variant) {
    const auto& m = c.scene.map;
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        const int len = s.x_last - s.x_first;
        if (len == 0) {
            const auto uv = tex::uv_kernel<Real>(m, Real(double(s.x_first)), Real(double(s.y)));
            c.record(num::raw(uv.first), num::raw(uv.second), s.x_first, s.y);
            continue;
        }
        const Real rx0{double(s.x_first)}, rx1{double(s.x_last)}, ry{double(s.y)};
        const auto e0 = tex::uv_kernel<Real>(m, rx0, ry);
        const auto e1 = tex::uv_kernel<Real>(m, rx1, ry);
        if (variant == QuadVariant::Unnormalized) {
            const Real xm = (rx0 + rx1) * Real(0.5);
            const auto em = tex::uv_kernel<Real>(m, xm, ry);
            const auto fit = tex::quad_fit_unnormalized_uv_t<Real>(
                rx0, xm, rx1, e0.first, em.first, e1.first, e0.second, em.second, e1.second);
            for (int x = s.x_first; x <= s.x_last; ++x) {
                double u = 0, v = 0;
                c.px_ops += num::counted_scope("px", [&] {
                    const Real rx{double(x)};
                    u = num::raw(fit.u(rx));
                    v = num::raw(fit.v(rx));
                });
                c.record(u, v, x, s.y);
            }
            continue;
        }
        double xi_u = 0.5, xi_v = 0.5;
        if (c.p.x_int) {
            xi_u = xi_v = *c.p.x_int;
        } else if (variant == QuadVariant::Shifted) {
            xi_u = tex::recommend_anchor(num::raw(e0.first), num::raw(e1.first));
            xi_v = tex::recommend_anchor(num::raw(e0.second), num::raw(e1.second));
        }
        const Real rlen{double(len)};
        const auto emu = tex::uv_kernel<Real>(m, rx0 + Real(xi_u) * rlen, ry);
        const auto emv = xi_v == xi_u ? emu : tex::uv_kernel<Real>(m, rx0 + Real(xi_v) * rlen, ry);
        const auto cu = tex::quad_fit_anchored_t<Real>(e0.first, emu.first, e1.first, Real(xi_u));
        const auto cv =
            tex::quad_fit_anchored_t<Real>(e0.second, emv.second, e1.second, Real(xi_v));
        const Real dt = Real(1.0) / rlen;
        Real t(0.0);
        for (int x = s.x_first; x <= s.x_last; ++x) {
            double u = 0, v = 0;
            c.px_ops += num::counted_scope("px", [&] {
                u = num::raw(cu(t));
                v = num::raw(cv(t));
                if (x < s.x_last) t += dt;
            });
            c.record(u, v, x, s.y);
        }
    }
}

// Exact straight-line row for maps whose denominator does not vary in x;
// the curved row model has nothing to bend there.
void affine_row_fallback(Ctx& c, const raster::Span& s) {
    const auto& m = c.scene.map;
    const tex::Uv a = tex::exact_uv(m, s.x_first, s.y);
    const tex::Uv b = s.x_last > s.x_first ? tex::exact_uv(m, s.x_last, s.y) : a;
    const double w = s.x_last > s.x_first ? 1.0 / (s.x_last - s.x_first) : 0.0;
    for (int x = s.x_first; x <= s.x_last; ++x) {
        const double t = (x - s.x_first) * w;
        c.record(a.u + t * (b.u - a.u), a.v + t * (b.v - a.v), x, s.y);
    }
}

void eval_bezier_iter(Ctx& c) {
    const auto& m = c.scene.map;
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        if (s.x_last - s.x_first < 1) {
            affine_row_fallback(c, s);
            continue;
        }
        tex::BezierRow row;
        try {
            row = tex::bezier_row(m, s.y, s.x_first, s.x_last);
        } catch (const Error& e) {
            if (e.code() != Err::AffineRow) throw;
            affine_row_fallback(c, s);
            continue;
        }
        const auto pix = tex::bezier_param_iterative(row, {c.p.eps, c.p.dt0, 24});
        for (const auto& q : pix) c.record(q.u, q.v, q.x, s.y);
    }
}

void eval_bezier_quad(Ctx& c) {
    const auto& m = c.scene.map;
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        if (s.x_last - s.x_first < 1) {
            affine_row_fallback(c, s);
            continue;
        }
        tex::BezierRow row;
        try {
            row = tex::bezier_row(m, s.y, s.x_first, s.x_last);
        } catch (const Error& e) {
            if (e.code() != Err::AffineRow) throw;
            affine_row_fallback(c, s);
            continue;
        }
        const tex::QuadCoeffs tp = tex::bezier_param_quadratic(row);
        const Real a2(tp.a2), a1(tp.a1), a0(tp.a0);
        const Real u0(row.u0), u1(row.u1), u2(row.u2);
        const Real v0(row.v0), v1(row.v1), v2(row.v2);
        for (int x = s.x_first; x <= s.x_last; ++x) {
            double u = 0, v = 0;
            c.px_ops += num::counted_scope("px", [&] {
                const Real rx{double(x)};
                Real t = (a2 * rx + a1) * rx + a0;
                t = Real(std::clamp(num::raw(t), 0.0, 1.0));
                const Real sc = Real(1.0) - t;
                const Real w0 = sc * sc, w1 = Real(2.0) * t * sc, w2 = t * t;
                u = num::raw(w0 * u0 + w1 * u1 + w2 * u2);
                v = num::raw(w0 * v0 + w1 * v1 + w2 * v2);
            });
            c.record(u, v, x, s.y);
        }
    }
}

void eval_bivariate(Ctx& c, tex::BivarOrder order) {
    const auto& m = c.scene.map;
    int x_lo = c.scene.spans.front().x_first, x_hi = c.scene.spans.front().x_last;
    int y_lo = c.scene.spans.front().y, y_hi = c.scene.spans.front().y;
    for (const auto& s : c.scene.spans) {
        x_lo = std::min(x_lo, s.x_first);
        x_hi = std::max(x_hi, s.x_last);
        y_lo = std::min(y_lo, s.y);
        y_hi = std::max(y_hi, s.y);
    }
    // Triangular sample lattice over the covered box; unisolvent for the
    // matching total degree.
    const int deg = order == tex::BivarOrder::Biquadratic ? 2 : 3;
    std::vector<tex::SamplePoint> pu, pv;
    for (int i = 0; i <= deg; ++i) {
        for (int j = 0; i + j <= deg; ++j) {
            const double x = x_lo + (x_hi - x_lo) * (double(i) / deg);
            const double y = y_lo + (y_hi - y_lo) * (double(j) / deg);
            const tex::Uv e = tex::exact_uv(m, x, y);
            pu.push_back({x, y, e.u});
            pv.push_back({x, y, e.v});
        }
    }
    const tex::BivariatePoly fu = tex::fit_bivariate(order, pu);
    const tex::BivariatePoly fv = tex::fit_bivariate(order, pv);
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        for (int x = s.x_first; x <= s.x_last; ++x) {
            double u = 0, v = 0;
            c.px_ops += num::counted_scope("px", [&] {
                u = num::raw(tex::bivariate_kernel<Real>(fu, Real(double(x)), Real(double(s.y))));
                v = num::raw(tex::bivariate_kernel<Real>(fv, Real(double(x)), Real(double(s.y))));
            });
            c.record(u, v, x, s.y);
        }
    }
}

void eval_nrl(Ctx& c) {
    const auto& m = c.scene.map;
    const raster::NrlSetup setup = raster::nrl_setup<Real>(m);
    if (setup.vertical) {
        // Ideal lines are columns; the denominator is exact per column and
        // needs no residual correction.
        std::map<int, std::vector<raster::Span>> cols;
        for (const auto& s : c.scene.spans)
            for (int x = s.x_first; x <= s.x_last; ++x) cols[x].push_back({s.y, x, x});
        for (const auto& [x, pix] : cols) {
            ++c.rows;
            const Real den = Real(m.g) * Real(double(x)) + Real(m.i);
            if (!(num::raw(den) > 0.0))
                fail(Err::BehindProjection, "column denominator not positive");
            const Real k = Real(1.0) / den;
            for (const auto& s : pix) {
                double u = 0, v = 0;
                c.px_ops += num::counted_scope("px", [&] {
                    const Real rx{double(x)}, ry{double(s.y)};
                    u = num::raw((Real(m.a) * rx + Real(m.b) * ry + Real(m.c)) * k);
                    v = num::raw((Real(m.d) * rx + Real(m.e) * ry + Real(m.f)) * k);
                });
                c.record(u, v, x, s.y);
            }
        }
        return;
    }
    // Bucket covered pixels by the integer intercept of their ideal line.
    std::map<int, std::vector<std::pair<int, int>>> lines;
    for (const auto& s : c.scene.spans)
        for (int x = s.x_first; x <= s.x_last; ++x)
            lines[raster::nrl_intercept(setup, x, s.y)].push_back({x, s.y});
    for (const auto& [y0, pix] : lines) {
        ++c.rows;
        const auto line = raster::nrl_line<Real>(m, y0);
        for (const auto& [x, y] : pix) {
            raster::NrlPixel<Real> r;
            c.px_ops += num::counted_scope("px", [&] { r = raster::nrl_uv<Real>(m, setup, line, x); });
            if (r.y != y) fail(Err::NonConvergence, "line pixel landed off its bucket row");
            c.record(num::raw(r.u), num::raw(r.v), x, y);
        }
    }
}

void eval_rowconst(Ctx& c) {
    const auto& m = c.scene.map;
    const tex::MapClass cls = tex::classify_map(m);
    if (cls == tex::MapClass::General)
        fail(Err::ClassMismatch, "map has no constant-channel structure to exploit");
    if (cls == tex::MapClass::ColConstantU) {
        // Mirror case: split each column into maximal contiguous runs.
        std::map<int, std::vector<int>> cols;
        for (const auto& s : c.scene.spans)
            for (int x = s.x_first; x <= s.x_last; ++x) cols[x].push_back(s.y);
        for (auto& [x, ys] : cols) {
            std::sort(ys.begin(), ys.end());
            std::size_t i = 0;
            while (i < ys.size()) {
                std::size_t j = i;
                while (j + 1 < ys.size() && ys[j + 1] == ys[j] + 1) ++j;
                ++c.rows;
                const auto col =
                    tex::col_uv_specialized<Real>(m, cls, x, ys[i], ys[j] + 1);
                for (std::size_t k = i; k <= j; ++k) {
                    const auto& uv = col[k - i];
                    c.record(num::raw(uv.first), num::raw(uv.second), x, ys[k]);
                }
                i = j + 1;
            }
        }
        return;
    }
    for (const auto& s : c.scene.spans) {
        ++c.rows;
        const auto row = tex::row_uv_specialized<Real>(m, cls, s.y, s.x_first, s.x_last + 1);
        for (int x = s.x_first; x <= s.x_last; ++x) {
            const auto& uv = row[static_cast<std::size_t>(x - s.x_first)];
            c.record(num::raw(uv.first), num::raw(uv.second), x, s.y);
        }
    }
}

}  // namespace

const char* method_name(UvMethod m) { return kNames[static_cast<int>(m)]; }

std::optional<UvMethod> parse_method(std::string_view name) {
    for (int i = 0; i < static_cast<int>(std::size(kNames)); ++i)
        if (name == kNames[i]) return static_cast<UvMethod>(i);
    return std::nullopt;
}

std::vector<UvMethod> all_methods() {
    std::vector<UvMethod> out;
    for (int i = 0; i < static_cast<int>(std::size(kNames)); ++i)
        out.push_back(static_cast<UvMethod>(i));
    return out;
}

ErrorReport compare_uv_method(const UvScene& scene, UvMethod method, const MethodParams& params) {
    if (scene.spans.empty()) fail(Err::DegenerateTriangle, "scene covers no pixels");
    Ctx c(scene, params);
    ErrorReport rep;
    rep.method = method_name(method);
    rep.scene = scene.id;
    rep.ops = num::counted_scope("method", [&] {
        switch (method) {
            case UvMethod::Exact: eval_exact(c); break;
            case UvMethod::Affine: eval_affine(c); break;
            case UvMethod::Midpoint: eval_midpoint(c); break;
            case UvMethod::Quad: eval_quad(c, QuadVariant::Center); break;
            case UvMethod::QuadShifted: eval_quad(c, QuadVariant::Shifted); break;
            case UvMethod::QuadUnnormalized: eval_quad(c, QuadVariant::Unnormalized); break;
            case UvMethod::BezierIter: eval_bezier_iter(c); break;
            case UvMethod::BezierQuad: eval_bezier_quad(c); break;
            case UvMethod::Biquadratic: eval_bivariate(c, tex::BivarOrder::Biquadratic); break;
            case UvMethod::Bicubic: eval_bivariate(c, tex::BivarOrder::Bicubic); break;
            case UvMethod::Nrl: eval_nrl(c); break;
            case UvMethod::RowConst: eval_rowconst(c); break;
        }
    });
    rep.pixel_ops = c.px_ops;
    rep.max_abs = c.acc.max_abs;
    rep.max_rel = c.acc.max_rel;
    rep.mean_rel = c.acc.pixels ? c.acc.sum_rel / (2.0 * double(c.acc.pixels)) : 0.0;
    rep.pixels = c.acc.pixels;
    rep.rows = c.rows;
    return rep;
}

bool claims_pass(const std::vector<ClaimRow>& rows) {
    for (const auto& r : rows)
        if (r.fatal && !r.pass) return false;
    return true;
}

std::string claims_csv(const std::vector<ClaimRow>& rows) {
    std::ostringstream os;
    os << "method,scene,claim,paper_bound,measured,pass,divs,muls,adds\n";
    char buf[64];
    for (const auto& r : rows) {
        os << r.method << ',' << r.scene << ',' << r.claim << ',';
        std::snprintf(buf, sizeof buf, "%.10g", r.paper_bound);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", r.measured);
        os << buf << ',' << (r.pass ? 1 : 0) << ',' << r.ops.divs << ',' << r.ops.muls << ','
           << r.ops.adds << '\n';
    }
    return os.str();
}

void write_claims_csv(const std::vector<ClaimRow>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    f << claims_csv(rows);
    f.flush();
    if (!f) fail(Err::TruncatedData, "claims csv write failed: " + path);
}

int env_threads() {
    const char* s = std::getenv("PERCOR_THREADS");
    if (!s || !*s) return 1;
    const long v = std::strtol(s, nullptr, 10);
    return static_cast<int>(std::clamp(v, 1L, 64L));
}

std::uint64_t env_seed() {
    const char* s = std::getenv("PERCOR_SEED");
    if (!s || !*s) return 42;
    return std::strtoull(s, nullptr, 10);
}

}  // namespace percor::analysis
