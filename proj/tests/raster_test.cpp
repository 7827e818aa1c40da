// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/raster.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "percor/rng.hpp"

namespace {

using namespace percor;
using raster::ScreenTriangle;
using raster::Span;

ScreenTriangle tri(Vec2 a, Vec2 b, Vec2 c) {
    ScreenTriangle t;
    t.v[0].pos = a;
    t.v[1].pos = b;
    t.v[2].pos = c;
    return t;
}

std::set<std::pair<int, int>> span_pixels(const std::vector<Span>& spans) {
    std::set<std::pair<int, int>> out;
    for (const Span& s : spans)
        for (int x = s.x_first; x <= s.x_last; ++x) out.insert({x, s.y});
    return out;
}

TEST(Cover, RightTriangleWithFourPixelLegsCoversTenPixels) {
    const ScreenTriangle t = tri({0, 0}, {4, 0}, {0, 4});
    const auto pixels = span_pixels(raster::scanline_triangle(t));
    EXPECT_EQ(pixels.size(), 10u);
    for (int y = -1; y <= 5; ++y)
        for (int x = -1; x <= 5; ++x) {
            const bool want = x >= 0 && y >= 0 && x + y < 4;
            EXPECT_EQ(raster::covers(t, x, y), want) << x << "," << y;
            EXPECT_EQ(pixels.count({x, y}) == 1, want) << x << "," << y;
        }
}

TEST(Cover, SpansEqualTheCoverPredicateOnRandomTriangles) {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const ScreenTriangle t = tri({rng.uniform(0, 40), rng.uniform(0, 40)},
                                     {rng.uniform(0, 40), rng.uniform(0, 40)},
                                     {rng.uniform(0, 40), rng.uniform(0, 40)});
        std::vector<Span> spans;
        try {
            spans = raster::scanline_triangle(t);
        } catch (const Error& e) {
            ASSERT_EQ(e.code(), Err::DegenerateTriangle);
            continue;
        }
        const auto pixels = span_pixels(spans);
        for (int y = -1; y <= 41; ++y)
            for (int x = -1; x <= 41; ++x)
                EXPECT_EQ(pixels.count({x, y}) == 1, raster::covers(t, x, y)) << x << "," << y;
    }
}

TEST(Cover, SharedEdgePixelsLandInExactlyOneTriangle) {
    // Integer-corner convex quad split along its diagonal; pixel (16, 18) sits
    // exactly on that diagonal.
    const Vec2 a{5, 3}, b{27, 33}, p{30, 7}, q{2, 25};
    const ScreenTriangle t1 = tri(a, p, b);
    const ScreenTriangle t2 = tri(a, b, q);
    EXPECT_EQ(int(raster::covers(t1, 16, 18)) + int(raster::covers(t2, 16, 18)), 1);

    const auto inside_quad = [&](double x, double y) {
        // Strict interior of the quad a-p-b-q (clockwise in y-down terms).
        const auto side = [&](Vec2 s, Vec2 e) {
            return (e.x - s.x) * (y - s.y) - (e.y - s.y) * (x - s.x);
        };
        const double s1 = side(a, p), s2 = side(p, b), s3 = side(b, q), s4 = side(q, a);
        return (s1 > 0 && s2 > 0 && s3 > 0 && s4 > 0) || (s1 < 0 && s2 < 0 && s3 < 0 && s4 < 0);
    };
    for (int y = 0; y <= 36; ++y)
        for (int x = 0; x <= 33; ++x) {
            const int hits = int(raster::covers(t1, x, y)) + int(raster::covers(t2, x, y));
            EXPECT_LE(hits, 1) << x << "," << y;
            if (inside_quad(x, y)) EXPECT_EQ(hits, 1) << x << "," << y;
        }
}

TEST(Cover, ZeroAreaTriangleIsRejected) {
    const ScreenTriangle t = tri({1, 1}, {5, 5}, {9, 9});
    EXPECT_FALSE(raster::covers(t, 3, 3));
    try {
        raster::scanline_triangle(t);
        FAIL() << "expected DegenerateTriangle";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::DegenerateTriangle);
    }
}

// ---------------------------------------------------------------------------

TEST(ConstZ, SlopeAndDepthMatchARayCastAgainstThePlane) {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 p0{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(1, 5)};
        const Vec3 p1{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(1, 5)};
        const Vec3 p2{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(1, 5)};
        raster::PlaneCoeffs pl;
        try {
            pl = raster::plane_from_world_triangle(p0, p1, p2);
        } catch (const Error&) {
            continue;
        }
        if (std::fabs(pl.b) < 1e-3) continue;
        const double k = raster::constz_slope(pl);
        const double h = rng.uniform(-1, 1);
        // Depth of the ray through view-plane point (x, k x + h): the plane
        // equation evaluated on (x Z, y Z, Z) pins Z.
        const auto depth_at = [&](double x) {
            return pl.d / (pl.a * x + pl.b * (k * x + h) + pl.c);
        };
        const double want = raster::constz_depth(pl, h);
        for (const double x : {-0.7, 0.0, 0.4, 1.3}) {
            const double den = pl.a * x + pl.b * (k * x + h) + pl.c;
            if (std::fabs(den) < 1e-6) continue;
            EXPECT_NEAR(depth_at(x), want, 1e-9 * std::max(1.0, std::fabs(want)));
        }
    }
}

TEST(ConstZ, VerticalFamilyIsReportedAsDegenerate) {
    const auto pl = raster::plane_from_world_triangle({0, 0, 1}, {0, 1, 1}, {1, 0, 2});
    ASSERT_EQ(pl.b, 0.0);
    try {
        raster::constz_slope(pl);
        FAIL() << "expected HorizontalDegeneracy";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::HorizontalDegeneracy);
    }
}

TEST(ConstZ, TextureRowCostsOneDivisionAndTracksTheExactMap) {
    tex::ProjectiveTexMap m{0.004, 0.0011, 0.3, -0.002, 0.0035, 0.8, 0.001, 0.002, 1.2};
    const double k = -m.g / m.h;  // constant-denominator slope
    const double h_int = 40.0;
    std::vector<std::pair<num::Real, num::Real>> row;
    const auto ops = num::counted_scope("row", [&] {
        row = raster::constz_texture_row<num::Real>(m, k, h_int, 10.0, 50);
    });
    EXPECT_EQ(ops.divs, 1u);
    ASSERT_EQ(row.size(), 50u);
    for (int i = 0; i < 50; ++i) {
        const double x = 10.0 + i;
        const tex::Uv ex = tex::exact_uv(m, x, k * x + h_int);
        EXPECT_NEAR(num::raw(row[size_t(i)].first), ex.u, 1e-12);
        EXPECT_NEAR(num::raw(row[size_t(i)].second), ex.v, 1e-12);
    }

    tex::ProjectiveTexMap behind = m;
    behind.i = -1.0;
    try {
        raster::constz_texture_row<double>(behind, k, h_int, 10.0, 5);
        FAIL() << "expected BehindProjection";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::BehindProjection);
    }
}

// ---------------------------------------------------------------------------

TEST(ShearedRect, ZeroSlopeReducesToTheBoundingBox) {
    const ScreenTriangle t = tri({3.5, 2.25}, {20, 9}, {8, 17.5});
    const auto r = raster::bounding_rect(t, 0.0);
    EXPECT_DOUBLE_EQ(r.x_min, 3.5);
    EXPECT_DOUBLE_EQ(r.x_max, 20.0);
    EXPECT_DOUBLE_EQ(r.w_min, 2.25);
    EXPECT_DOUBLE_EQ(r.w_max, 17.5);
    EXPECT_DOUBLE_EQ(r.r_offset, 0.0);
}

TEST(ShearedRect, SlabContainsTheTriangleAndTraversalNeverOvershoots) {
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const ScreenTriangle t = tri({rng.uniform(0, 30), rng.uniform(0, 30)},
                                     {rng.uniform(10, 60), rng.uniform(0, 45)},
                                     {rng.uniform(0, 55), rng.uniform(15, 60)});
        const double k = rng.uniform(-1.5, 1.5);
        raster::ShearedRect r;
        try {
            r = raster::bounding_rect(t, k);
        } catch (const Error&) {
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            const Vec2 p = t.v[size_t(i)].pos;
            const double w = p.y - k * p.x;
            EXPECT_GE(p.x, r.x_min - 1e-12);
            EXPECT_LE(p.x, r.x_max + 1e-12);
            EXPECT_GE(w, r.w_min - 1e-12);
            EXPECT_LE(w, r.w_max + 1e-12);
        }
        EXPECT_GE(r.r_offset, 0.0);
        EXPECT_LE(r.r_offset, r.w_max - r.w_min + 1e-12);

        const auto visited = raster::traverse_bounding_rect(t, r);
        std::set<std::pair<int, int>> seen;
        std::map<int, int> last_on_line;
        for (const auto& px : visited) {
            EXPECT_TRUE(seen.insert({px.x, px.y}).second) << "duplicate pixel";
            auto it = last_on_line.find(px.line);
            if (it == last_on_line.end())
                last_on_line[px.line] = px.x;
            else
                it->second = std::max(it->second, px.x);
        }
        // A line's walk ends on a covered pixel, so the rightmost visited
        // pixel of every line lies inside the triangle.
        for (const auto& [line, x_stop] : last_on_line) {
            const int y = static_cast<int>(std::floor(r.k * x_stop + r.w_min + line + 0.5));
            EXPECT_TRUE(raster::covers(t, x_stop, y)) << "line " << line;
        }
        // Every covered pixel is visited by its quantized line.
        for (const Span& s : raster::scanline_triangle(t))
            for (int x = s.x_first; x <= s.x_last; ++x)
                EXPECT_EQ(seen.count({x, s.y}), 1u) << x << "," << s.y;
    }
}

// ---------------------------------------------------------------------------

tex::ProjectiveTexMap ledger_map() {
    return {0.003, 0.001, 0.5, -0.001, 0.003, 0.8, -0.0002, 0.004, 1.2};
}

TEST(Nrl, SetupFollowsTheDenominatorGradient) {
    const tex::ProjectiveTexMap m = ledger_map();
    const auto s = raster::nrl_setup<double>(m);
    EXPECT_FALSE(s.vertical);
    EXPECT_DOUBLE_EQ(s.dy, -m.g / m.h);

    tex::ProjectiveTexMap col = m;
    col.h = 0.0;
    EXPECT_TRUE(raster::nrl_setup<double>(col).vertical);
    col.g = 0.0;
    EXPECT_FALSE(raster::nrl_setup<double>(col).vertical);
}

TEST(Nrl, InterceptRecoversTheLineThroughAPoint) {
    const auto s = raster::nrl_setup<double>(ledger_map());
    Rng rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        const int y0 = int(rng.integer(-30, 30));
        const double x = rng.uniform(0, 120);
        const double t = s.dy * x;
        const double y = y0 + std::floor(t + 0.5);  // quantized line ordinate
        EXPECT_EQ(raster::nrl_intercept(s, x, y), y0);
    }
}

TEST(Nrl, DenominatorIsConstantAlongTheIdealLine) {
    const tex::ProjectiveTexMap m = ledger_map();
    const auto s = raster::nrl_setup<double>(m);
    for (const int y0 : {-5, 0, 12, 40}) {
        const double base = m.h * y0 + m.i;
        for (int i = 0; i <= 100; ++i) {
            const double x = 1.7 * i;
            const double den = m.g * x + m.h * (y0 + s.dy * x) + m.i;
            EXPECT_NEAR(den, base, 1e-12);
        }
    }
}

TEST(Nrl, CorrectedReciprocalIsQuadraticallyClose) {
    const tex::ProjectiveTexMap m = ledger_map();
    const auto s = raster::nrl_setup<double>(m);
    const auto line = raster::nrl_line<double>(m, 7);
    for (int x = 0; x <= 150; ++x) {
        const auto px = raster::nrl_uv(m, s, line, x);
        const double den = m.g * x + m.h * px.y + m.i;
        const double kor = line.k + px.r * line.k2h;
        const double rhk = px.r * m.h * line.k;
        const double limit = 2.0 * rhk * rhk;
        // Below the formation noise of the doubles themselves the bound is
        // unobservable; only resolvable residuals are compared against it.
        EXPECT_LE(std::fabs(kor * den - 1.0), std::max(limit, 1e-13)) << "x=" << x;
    }
}

TEST(Nrl, PixelKernelCostsEightMultipliesAndSevenAdds) {
    const tex::ProjectiveTexMap m = ledger_map();
    const auto s = raster::nrl_setup<num::Real>(m);
    const auto line = raster::nrl_line<num::Real>(m, 5);
    raster::NrlPixel<num::Real> px;
    const auto ops = num::counted_scope("pixel", [&] { px = raster::nrl_uv(m, s, line, 42); });
    EXPECT_EQ(ops.divs, 0u);
    EXPECT_EQ(ops.muls, 8u);
    EXPECT_EQ(ops.adds, 7u);

    // The one division happens at line construction.
    const auto line_ops =
        num::counted_scope("line", [&] { raster::nrl_line<num::Real>(m, 5); });
    EXPECT_EQ(line_ops.divs, 1u);

    // Instrumentation does not change the values.
    const auto plain = raster::nrl_uv(m, raster::nrl_setup<double>(m),
                                      raster::nrl_line<double>(m, 5), 42);
    EXPECT_EQ(plain.y, px.y);
    EXPECT_DOUBLE_EQ(plain.u, num::raw(px.u));
    EXPECT_DOUBLE_EQ(plain.v, num::raw(px.v));
}

TEST(Nrl, CoverPartitionsTheRectangleByQuantizedLines) {
    Rng rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        tex::ProjectiveTexMap m = ledger_map();
        m.h = rng.uniform(0.002, 0.01) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        m.g = -m.h * rng.uniform(-0.8, 0.8);  // slope within +-0.8
        const auto s = raster::nrl_setup<double>(m);
        const int x0 = 3, y_top = -2, w = 40, h = 25;
        const auto cover = raster::nrl_cover(s, x0, y_top, w, h);
        std::set<std::pair<int, int>> seen;
        std::size_t total = 0;
        for (const auto& line : cover) {
            total += line.pixels.size();
            for (const auto& [x, y] : line.pixels) {
                EXPECT_TRUE(seen.insert({x, y}).second) << "duplicate " << x << "," << y;
                EXPECT_EQ(line.y0, y - int(std::floor(s.dy * x + 0.5)));
            }
        }
        EXPECT_EQ(total, std::size_t(w) * h);
        for (int x = x0; x < x0 + w; ++x)
            for (int y = y_top; y < y_top + h; ++y)
                EXPECT_EQ(seen.count({x, y}), 1u);
    }
}

TEST(Nrl, VerticalFamilyBucketsByColumn) {
    tex::ProjectiveTexMap m = ledger_map();
    m.h = 0.0;
    const auto s = raster::nrl_setup<double>(m);
    ASSERT_TRUE(s.vertical);
    const auto cover = raster::nrl_cover(s, 10, 0, 5, 4);
    ASSERT_EQ(cover.size(), 5u);
    for (const auto& line : cover) {
        EXPECT_EQ(line.pixels.size(), 4u);
        for (const auto& [x, y] : line.pixels) EXPECT_EQ(x, line.y0);
    }
}

TEST(Nrl, HorizonLinesAreRejected) {
    const tex::ProjectiveTexMap m = ledger_map();
    try {
        raster::nrl_line<double>(m, -400);  // h*y0 + i < 0
        FAIL() << "expected BehindProjection";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::BehindProjection);
    }
}

// ---------------------------------------------------------------------------

TEST(Serpentine, AxisAlignedWindowSweepsBackAndForth) {
    const auto cells = raster::serpentine_window({0, 0}, 3, 0, 2);
    const std::vector<raster::Cell> want{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
    EXPECT_EQ(cells, want);
}

TEST(Serpentine, DiagonalWindowMatchesTheClosedFormLattice) {
    const int dx = 2, dy = 1, n_rows = 3;
    const raster::Cell origin{5, -3};
    const auto cells = raster::serpentine_window(origin, dx, dy, n_rows);
    const int m = std::max(std::abs(dx), std::abs(dy));
    ASSERT_EQ(cells.size(), std::size_t(m) * n_rows);
    const auto fdiv = [](long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    const auto point = [&](long k) {
        return raster::Cell{int(fdiv(2 * k * dx + m, 2 * m)), int(fdiv(2 * k * dy + m, 2 * m))};
    };
    std::multiset<std::pair<int, int>> got, want;
    for (const auto& c : cells) got.insert({c.x, c.y});
    for (int row = 0; row < n_rows; ++row) {
        const raster::Cell d = point(row);
        for (int k = 0; k < m; ++k) {
            const raster::Cell p = point(k);
            want.insert({origin.x + p.x - d.y, origin.y + p.y + d.x});
        }
    }
    EXPECT_EQ(got, want);
}

TEST(Serpentine, ConsecutiveCellsAreLatticeNeighbors) {
    const auto cells = raster::serpentine_window({0, 0}, -7, 4, 5);
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const int dx = std::abs(cells[i].x - cells[i - 1].x);
        const int dy = std::abs(cells[i].y - cells[i - 1].y);
        EXPECT_LE(std::max(dx, dy), 1) << "jump at " << i;
        EXPECT_GE(dx + dy, 1) << "stall at " << i;
    }
}

TEST(Serpentine, ZeroBaseVectorIsRejected) {
    try {
        raster::serpentine_window({0, 0}, 0, 0, 3);
        FAIL() << "expected ZeroVector";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::ZeroVector);
    }
}

// ---------------------------------------------------------------------------

TEST(Aniso, FootprintMatchesFiniteDifferencesOfTheExactMap) {
    const tex::ProjectiveTexMap m = ledger_map();
    Rng rng(46);
    const double d = 1e-3;
    for (int trial = 0; trial < 50; ++trial) {
        const double x = rng.uniform(0, 120), y = rng.uniform(0, 120);
        const auto fp = raster::aniso_footprint(m, x, y);
        const tex::Uv xp = tex::exact_uv(m, x + d, y), xm = tex::exact_uv(m, x - d, y);
        const tex::Uv yp = tex::exact_uv(m, x, y + d), ym = tex::exact_uv(m, x, y - d);
        EXPECT_NEAR(fp.p2.x, (xp.u - xm.u) / (2 * d), 1e-6);
        EXPECT_NEAR(fp.p2.y, (xp.v - xm.v) / (2 * d), 1e-6);
        EXPECT_NEAR(fp.p1.x, (yp.u - ym.u) / (2 * d), 1e-6);
        EXPECT_NEAR(fp.p1.y, (yp.v - ym.v) / (2 * d), 1e-6);
    }
}

TEST(Aniso, InLineDerivativeIsOneConstantVector) {
    const tex::ProjectiveTexMap m = ledger_map();
    const double k = -m.g / m.h;
    const double h_int = 15.0;
    const Vec2 want = raster::aniso_footprint_line(m, k, h_int);
    for (int i = 0; i <= 100; ++i) {
        const double x = 1.2 * i;
        const auto fp = raster::aniso_footprint(m, x, k * x + h_int);
        EXPECT_NEAR(fp.p2.x + k * fp.p1.x, want.x, 1e-12);
        EXPECT_NEAR(fp.p2.y + k * fp.p1.y, want.y, 1e-12);
    }
}

TEST(Aniso, BoxAverageOfAConstantTextureIsThatConstant) {
    Image texture(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            texture.at(x, y)[0] = 90;
            texture.at(x, y)[1] = 140;
            texture.at(x, y)[2] = 200;
        }
    raster::AnisoFootprint fp{{0.3, 0.1}, {-0.2, 0.25}};
    const auto got = raster::aniso_sample(texture, fp, {0.5, 0.5}, 4);
    EXPECT_EQ(got[0], 90);
    EXPECT_EQ(got[1], 140);
    EXPECT_EQ(got[2], 200);
}

TEST(Aniso, TinyFootprintPicksTheNearestTexel) {
    Image texture(2, 1);
    texture.at(0, 0)[0] = 10;
    texture.at(1, 0)[0] = 250;
    raster::AnisoFootprint fp{{0.01, 0}, {0, 0.01}};
    EXPECT_EQ(raster::aniso_sample(texture, fp, {0.25, 0.5}, 2)[0], 10);
    EXPECT_EQ(raster::aniso_sample(texture, fp, {0.75, 0.5}, 2)[0], 250);
}

// ---------------------------------------------------------------------------

TEST(Image, RoundTripsThroughPpm) {
    Image img(7, 5);
    Rng rng(47);
    for (auto& b : img.rgb) b = std::uint8_t(rng.integer(0, 255));
    const auto path = std::filesystem::temp_directory_path() / "percor_img_test.ppm";
    write_ppm(img, path.string());
    const Image back = read_ppm(path.string());
    EXPECT_EQ(back, img);
    std::filesystem::remove(path);
}

TEST(Image, RejectsForeignMagicAndTruncation) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto p3 = dir / "percor_p3_test.ppm";
    std::ofstream(p3.string()) << "P3\n2 2\n255\n0 0 0 0 0 0 0 0 0 0 0 0\n";
    try {
        read_ppm(p3.string());
        FAIL() << "expected BadMagic";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::BadMagic);
    }
    const auto cut = dir / "percor_cut_test.ppm";
    std::ofstream(cut.string(), std::ios::binary) << "P6\n4 4\n255\n\x01\x02\x03";
    try {
        read_ppm(cut.string());
        FAIL() << "expected TruncatedData";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::TruncatedData);
    }
    std::filesystem::remove(p3);
    std::filesystem::remove(cut);
}

TEST(Image, ClampedLookupSticksToTheBorder) {
    Image img(3, 2);
    img.at(2, 1)[1] = 77;
    EXPECT_EQ(img.texel_clamped(5, 9)[1], 77);
    img.at(0, 0)[2] = 33;
    EXPECT_EQ(img.texel_clamped(-4, -1)[2], 33);
}

}  // namespace
